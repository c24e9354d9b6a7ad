#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cotrans/errors.hpp"
#include "cotrans/scenario_config.hpp"

using namespace cotrans;

TEST(Config, MinimalDocumentTakesDefaults) {
  const auto cfg = parse_config(R"({"scenario": "single-uav"})");
  EXPECT_EQ(cfg.kind, ScenarioKind::SingleUav);
  EXPECT_DOUBLE_EQ(cfg.dt, 1e-3);
  EXPECT_EQ(cfg.hold_steps(), 20);
  EXPECT_EQ(cfg.uav_gains.position, (std::array<double, 4>{6.5, 26.0, 28.5, 15.0}));
  EXPECT_EQ(cfg.rig.uav_count(), 4);
}

TEST(Config, ScenarioIsRequired) {
  EXPECT_THROW(parse_config(R"({"dt": 0.001})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "orbit"})"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "dtt": 0.001})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "uav": {"mas": 1.5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "gains": {"uav": {"betas": [1, 2, 3, 4]}}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "mission", "mission": {"helipad_xyz": [0, 0, 0]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "rig": {"uavs": [{"mass": 1, "color": 2}]}})"),
               ConfigError);
}

TEST(Config, WrongTypesRejected) {
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "dt": "fast"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "initial_offset": [1, 2]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "output": {"format": "xml"}})"), ConfigError);
}

TEST(Config, GainsFromAlphaAndK) {
  const auto cfg = parse_config(R"({"scenario": "payload",
    "gains": {"uav": {"alpha": [3, 3, 1], "k": 2}, "payload": {"alpha": 2.5, "k": 4}}})");
  EXPECT_EQ(cfg.uav_gains.position, quartic_gains_from_alpha_k({{3, 3, 1}, 2}));
  EXPECT_NEAR(cfg.payload_gains.position[0], 4.5, 1e-15);
  EXPECT_NEAR(cfg.payload_gains.position[1], 5.0, 1e-15);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "gains": {"payload": {"beta": [1, 1], "k": 1}}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "gains": {"uav": {"alpha": [3, 3, 1]}}})"), ConfigError);
}

TEST(Config, NonHurwitzGainsRejected) {
  EXPECT_THROW(parse_config(R"({"scenario": "single-uav", "gains": {"uav": {"beta": [1, 1, 1, 5]}}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "gains": {"attitude": {"beta": [-1, 2]}}})"), ConfigError);
}

TEST(Config, PositionsUseHeightUp) {
  const auto cfg = parse_config(R"({"scenario": "single-uav", "reference": {"kind": "hover", "position": [1, 2, 7]},
    "initial_offset": [0.1, 0, 0.5]})");
  EXPECT_EQ(cfg.reference.kind, ReferenceSpec::Kind::Hover);
  EXPECT_EQ(cfg.reference.hover, Vec3(1, 2, -7));
  EXPECT_EQ(cfg.initial_offset, Vec3(0.1, 0, -0.5));
}

TEST(Config, TimeStepRange) {
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "dt": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "dt": 0.02})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "duration": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": "payload", "controller_rate_hz": 5000})"), ConfigError);
  EXPECT_NO_THROW(parse_config(R"({"scenario": "payload", "dt": 0.01, "controller_rate_hz": 100})"));
}

TEST(Config, PayloadScenariosNeedThreeUavs) {
  const char* two = R"({"scenario": "payload", "rig": {"uavs": [
    {"attachment": [0.5, 0, 0.125]}, {"attachment": [-0.5, 0, 0.125]}]}})";
  EXPECT_THROW(parse_config(two), ConfigError);
  const char* three = R"({"scenario": "payload", "rig": {"uavs": [
    {"attachment": [0.5, 0, -0.125]}, {"attachment": [-0.5, 0.5, -0.125]}, {"attachment": [-0.5, -0.5, -0.125]}]}})";
  EXPECT_EQ(parse_config(three).rig.uav_count(), 3);
}

TEST(Config, RoundTrip) {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::Mission);
  cfg.seed = 99;
  cfg.mission.transport_speed = 1.25;
  cfg.payload_gains.attitude = {20.0, 100.0};
  cfg.controller_payload_mass = 3.3;
  cfg.disturbance.force = Vec3(1, 2, 3);
  cfg.output.json = true;
  const std::string text = dump_config(cfg);
  const auto back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.mission.helipad, cfg.mission.helipad);
  EXPECT_EQ(back.controller_payload_mass, cfg.controller_payload_mass);
  EXPECT_EQ(back.disturbance.force, cfg.disturbance.force);
}

TEST(Config, ControllerRigUsesBelievedMass) {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::Payload);
  EXPECT_DOUBLE_EQ(cfg.controller_rig().payload_mass, 3.0);
  cfg.controller_payload_mass = 2.7;
  EXPECT_DOUBLE_EQ(cfg.controller_rig().payload_mass, 2.7);
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "cotrans_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"scenario": "robustness", "robustness": {"mass_variation": 0.2}})";
  }
  const auto cfg = load_config(path.string());
  EXPECT_EQ(cfg.kind, ScenarioKind::Robustness);
  EXPECT_DOUBLE_EQ(cfg.robustness.mass_variation, 0.2);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Config, KindNames) {
  for (auto k : {ScenarioKind::SingleUav, ScenarioKind::Payload, ScenarioKind::Mission, ScenarioKind::Robustness}) {
    EXPECT_EQ(scenario_kind_from_string(to_string(k)), k);
  }
}
