#include "cotrans/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include "cotrans/errors.hpp"
#include "cotrans/integrator.hpp"
#include "cotrans/payload_fbl.hpp"
#include "cotrans/uav_fbl.hpp"

namespace cotrans {

namespace {

constexpr double kRad2Deg = 180.0 / std::numbers::pi;

void push(std::vector<double>& row, const Vec3& ned) {
  row.push_back(ned.x());
  row.push_back(ned.y());
  row.push_back(-ned.z());
}

void push_angles(std::vector<double>& row, const EulerZYX& e) {
  row.push_back(e.yaw);
  row.push_back(e.pitch);
  row.push_back(e.roll);
}

void push_raw(std::vector<double>& row, const Vec3& v) {
  row.push_back(v.x());
  row.push_back(v.y());
  row.push_back(v.z());
}

std::vector<std::string> with(std::vector<std::string> base, const std::string& prefix,
                              std::initializer_list<const char*> suffixes) {
  for (const char* s : suffixes) base.push_back(prefix + s);
  return base;
}

std::vector<std::string> xyz(std::vector<std::string> base, const std::string& prefix) {
  return with(std::move(base), prefix, {"_x", "_y", "_h"});
}

std::string failure_text(const std::exception& e, double t) {
  std::ostringstream s;
  s << e.what() << " (t = " << t << " s)";
  return s.str();
}

// Fits the transient decay of an error series: from 1 s (past the first
// controller transient) until the error first meets five times its
// post-transient RMS, capped at the transient time.
RateFit transient_fit(const std::vector<double>& t, const std::vector<double>& err, double transient_time,
                      double post_rms) {
  RateFitOptions opt;
  opt.t_start = std::min(1.0, transient_time);
  opt.t_end = transient_time;
  if (std::isfinite(post_rms)) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] > opt.t_start && err[i] < 5.0 * post_rms) {
        opt.t_end = std::min(opt.t_end, t[i]);
        break;
      }
    }
  }
  try {
    return fit_exponential_rate(t, err, opt);
  } catch (const ParameterError&) {
    return RateFit{};
  }
}

}  // namespace

ReferenceFn make_reference(const ReferenceSpec& spec) {
  switch (spec.kind) {
    case ReferenceSpec::Kind::Circle: {
      const CircularReference c = spec.circle;
      return [c](double t) { return c.sample(t); };
    }
    case ReferenceSpec::Kind::Hover: {
      const Vec3 p = spec.hover;
      return [p](double) { return hold_sample(p); };
    }
    case ReferenceSpec::Kind::Waypoints: {
      auto path = std::make_shared<SmoothWaypointReference>(spec.waypoints, spec.speeds);
      return [path](double t) { return path->sample(t); };
    }
  }
  throw ConfigError("unknown reference kind");
}

RunLog run_single_uav(const ScenarioConfig& cfg) {
  cfg.validate();
  RunLog log;
  log.scenario = to_string(ScenarioKind::SingleUav);
  std::vector<std::string> cols{"t", "hold"};
  cols = xyz(cols, "pos");
  cols = xyz(cols, "vel");
  cols = with(cols, "", {"yaw", "pitch", "roll", "p", "q", "r", "thrust", "thrust_rate"});
  cols = xyz(cols, "ref");
  cols.push_back("error");
  cols = with(cols, "u_", {"xi_dot", "tau_x", "tau_y", "tau_z"});
  cols = with(xyz(cols, "v"), "v_", {"yaw"});
  cols = with(xyz(cols, "pred"), "pred_", {"yaw"});
  Table& table = log.add_table("uav", cols);

  const UavFblController ctrl(cfg.uav, cfg.uav_gains);
  const ReferenceFn ref = make_reference(cfg.reference);
  UavState12 start;
  start.position = ref(0.0).d[0] + cfg.initial_offset;
  UavVector14 x = ctrl.engage(start);

  const long steps = std::lround(cfg.duration / cfg.dt);
  const int hold_steps = cfg.hold_steps();
  UavControl control;
  long hold = -1;
  double t = 0.0;
  double max_tilt = 0.0, max_tilt_post = 0.0, max_yaw_post = 0.0;
  try {
    for (long k = 0; k <= steps; ++k) {
      t = static_cast<double>(k) * cfg.dt;
      const PathSample r = ref(t);
      if (k % hold_steps == 0) {
        control = ctrl.compute(x, r.as_uav(0.0));
        hold = k / hold_steps;
      }
      const ExtendedUavState s = ExtendedUavState::unpack(x);
      const double tilt = std::max(std::abs(s.attitude.pitch), std::abs(s.attitude.roll));
      max_tilt = std::max(max_tilt, tilt);
      if (t >= cfg.transient_time) {
        max_tilt_post = std::max(max_tilt_post, tilt);
        max_yaw_post = std::max(max_yaw_post, std::abs(s.attitude.yaw));
      }
      if (k % cfg.log_stride == 0) {
        const Linearization lin = uav_delta_b(x, cfg.uav);
        const Vec4 pred = lin.b + lin.delta * control.input;
        std::vector<double> row{t, static_cast<double>(hold)};
        row.reserve(cols.size());
        push(row, s.position);
        push(row, s.velocity);
        push_angles(row, s.attitude);
        push_raw(row, s.rates);
        row.push_back(s.thrust);
        row.push_back(s.thrust_rate);
        push(row, r.d[0]);
        row.push_back((r.d[0] - s.position).norm());
        for (int i = 0; i < 4; ++i) row.push_back(control.input(i));
        push(row, control.v.head<3>());
        row.push_back(control.v(3));
        push(row, pred.head<3>());
        row.push_back(pred(3));
        table.add_row(std::move(row));
      }
      if (k == steps) break;
      const ExtendedUavInput u = control.input;
      x = rk4_step([&](const UavVector14& z) { return ext_uav_rhs(z, u, cfg.uav); }, x, cfg.dt, t);
    }
  } catch (const Error& e) {
    log.summary.note("failure", failure_text(e, t));
    log.summary.set("failure_time", t);
  }

  const auto times = table.column("t");
  const auto err = table.column("error");
  auto& sum = log.summary;
  sum.set("duration", cfg.duration);
  sum.set("rms_error_post", rms_after(times, err, cfg.transient_time));
  sum.set("max_error", err.empty() ? 0.0 : *std::max_element(err.begin(), err.end()));
  sum.set("final_error", err.empty() ? 0.0 : err.back());
  sum.set("max_tilt_deg", max_tilt * kRad2Deg);
  sum.set("max_tilt_post_deg", max_tilt_post * kRad2Deg);
  sum.set("max_abs_yaw_post", max_yaw_post);
  const RateFit fit = transient_fit(times, err, cfg.transient_time, *sum.get("rms_error_post"));
  sum.set("fit_rate", fit.rate);
  sum.set("fit_r_squared", fit.r_squared);
  sum.note("fit_status", to_string(fit.status));
  return log;
}

RunLog run_payload(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n = cfg.rig.uav_count();
  RunLog log;
  log.scenario = to_string(ScenarioKind::Payload);

  std::vector<std::string> pcols{"t", "hold", "disturbance"};
  pcols = xyz(pcols, "pos");
  pcols = xyz(pcols, "vel");
  pcols = with(pcols, "", {"yaw", "pitch", "roll", "wx", "wy", "wz"});
  pcols = xyz(pcols, "ref");
  pcols.push_back("error");
  pcols = xyz(pcols, "v");
  pcols = xyz(pcols, "pred");
  pcols = xyz(pcols, "acc");
  pcols.push_back("held_commands");
  log.add_table("payload", pcols);

  std::vector<std::string> ucols{"t", "hold"};
  ucols = xyz(ucols, "pos");
  ucols = with(ucols, "", {"yaw", "pitch", "roll", "p", "q", "r", "thrust", "tau_x", "tau_y", "tau_z", "des_yaw",
                           "des_pitch", "des_roll", "att_error_deg"});
  for (int i = 0; i < n; ++i) log.add_table("uav" + std::to_string(i), ucols);
  Table& payload_table = log.table("payload");
  std::vector<Table*> uav_tables;
  for (int i = 0; i < n; ++i) uav_tables.push_back(&log.table("uav" + std::to_string(i)));

  const PayloadDynamics plant(cfg.rig);
  PayloadControllerOptions options;
  options.attitude_feedforward = cfg.attitude_feedforward;
  options.payload_attitude_hold = cfg.payload_attitude_hold;
  options.controller_period = cfg.controller_period();
  const PayloadFblController ctrl(cfg.controller_rig(), cfg.payload_gains, options);
  PayloadControllerMemory memory;
  const ReferenceFn ref = make_reference(cfg.reference);

  // Start on the reference velocity so the initial error is the position
  // offset alone.
  SystemState start;
  start.position = ref(0.0).d[0] + cfg.initial_offset;
  start.velocity = ref(0.0).d[1];
  start.uavs.resize(n);
  VecX x = start.pack();

  const long steps = std::lround(cfg.duration / cfg.dt);
  const int hold_steps = cfg.hold_steps();
  PayloadControl control;
  long hold = -1;
  double t = 0.0;
  std::vector<double> max_att_err_post(n, 0.0);
  long held_total = 0;
  try {
    for (long k = 0; k <= steps; ++k) {
      t = static_cast<double>(k) * cfg.dt;
      const SystemState s = SystemState::unpack(x);
      const PathSample r = ref(t);
      if (k % hold_steps == 0) {
        control = ctrl.compute(s, r.as_payload(), memory);
        held_total += control.held_commands;
        hold = k / hold_steps;
      }
      const DisturbanceForce d{cfg.disturbance.at(t)};
      for (int i = 0; i < n; ++i) {
        if (t < cfg.transient_time) continue;
        Vec3 e;
        for (int c = 0; c < 3; ++c) {
          e(c) = wrap_angle(control.attitude_targets[i].angles(c) - s.uavs[i].attitude.as_vector()(c));
        }
        max_att_err_post[i] = std::max(max_att_err_post[i], e.norm() * kRad2Deg);
      }
      if (k % cfg.log_stride == 0) {
        const Mat3 rot0 = rot_zyx(s.attitude);
        const PayloadLinearization lin = payload_delta_b(s, ctrl.belief(), ctrl.P());
        const Vec3 pred = lin.b + lin.delta * control.u_bar;
        const VecX xdot = plant.rhs(x, control.input, d);
        const Vec3 acc = rot0 * (s.rates.cross(s.velocity) + xdot.segment<3>(sys_index::kVel));

        std::vector<double> row{t, static_cast<double>(hold), cfg.disturbance.active(t) ? 1.0 : 0.0};
        row.reserve(pcols.size());
        push(row, s.position);
        push(row, rot0 * s.velocity);
        push_angles(row, s.attitude);
        push_raw(row, s.rates);
        push(row, r.d[0]);
        row.push_back((r.d[0] - s.position).norm());
        push(row, control.v);
        push(row, pred);
        push(row, acc);
        row.push_back(control.held_commands);
        payload_table.add_row(std::move(row));

        const auto kin = uav_positions(s, cfg.rig);
        for (int i = 0; i < n; ++i) {
          const auto& u = s.uavs[i];
          const AttitudeTarget& target = control.attitude_targets[i];
          Vec3 e;
          for (int c = 0; c < 3; ++c) e(c) = wrap_angle(target.angles(c) - u.attitude.as_vector()(c));
          std::vector<double> urow{t, static_cast<double>(hold)};
          urow.reserve(ucols.size());
          push(urow, kin[i].position);
          push_angles(urow, u.attitude);
          push_raw(urow, u.rates);
          urow.push_back(control.input[i].thrust);
          push_raw(urow, control.input[i].torque);
          push_raw(urow, target.angles);
          urow.push_back(e.norm() * kRad2Deg);
          uav_tables[i]->add_row(std::move(urow));
        }
      }
      if (k == steps) break;
      const SystemInput u = control.input;
      x = rk4_step([&](const VecX& z) { return plant.rhs(z, u, d); }, x, cfg.dt, t);
    }
  } catch (const Error& e) {
    log.summary.note("failure", failure_text(e, t));
    log.summary.set("failure_time", t);
  }

  const auto times = payload_table.column("t");
  const auto err = payload_table.column("error");
  auto& sum = log.summary;
  sum.set("duration", cfg.duration);
  const double post = rms_after(times, err, cfg.transient_time);
  sum.set("rms_error_post", post);
  sum.set("max_error", err.empty() ? 0.0 : *std::max_element(err.begin(), err.end()));
  sum.set("final_error", err.empty() ? 0.0 : err.back());
  const RateFit fit = transient_fit(times, err, cfg.transient_time, post);
  sum.set("fit_rate", fit.rate);
  sum.set("fit_intercept", fit.intercept);
  sum.set("fit_window_start", fit.window_start);
  sum.set("fit_window_end", fit.window_end);
  sum.set("fit_r_squared", fit.r_squared);
  sum.note("fit_status", to_string(fit.status));
  double worst_att = 0.0;
  for (int i = 0; i < n; ++i) {
    sum.set("max_att_error_post_deg_uav" + std::to_string(i), max_att_err_post[i]);
    worst_att = std::max(worst_att, max_att_err_post[i]);
  }
  sum.set("max_att_error_post_deg", worst_att);
  sum.set("held_commands", static_cast<double>(held_total));
  if (!uav_tables.empty() && !uav_tables.front()->empty()) {
    for (int i = 0; i < n; ++i) sum.set("final_thrust_uav" + std::to_string(i), uav_tables[i]->row(uav_tables[i]->size() - 1)[uav_tables[i]->index("thrust")]);
    const EffortReport effort = control_effort(log);
    sum.set("effort", effort.total);
    sum.set("effort_thrust", effort.thrust);
    sum.set("effort_torque", effort.torque);
    sum.set("effort_squared", effort.squared);
  }
  return log;
}

Summary RobustnessReport::summary() const {
  Summary s;
  s.set("nominal_rms", nominal_rms);
  s.set("wind_max_deviation", wind_max_deviation);
  s.set("wind_max_error", wind_max_error);
  s.set("wind_recovery_rms", wind_recovery_rms);
  s.set("nominal_recovery_rms", nominal_recovery_rms);
  s.set("recovered", recovered ? 1.0 : 0.0);
  s.set("heavy_rms_change", heavy_rms_change);
  s.set("light_rms_change", light_rms_change);
  s.set("nominal_effort", nominal_effort.total);
  s.set("heavy_effort", heavy_effort.total);
  s.set("light_effort", light_effort.total);
  s.set("heavy_effort_ratio", heavy_effort_ratio);
  s.set("light_effort_ratio", light_effort_ratio);
  s.set("heavy_squared_effort_ratio", heavy_squared_effort_ratio);
  s.set("light_squared_effort_ratio", light_squared_effort_ratio);
  for (const auto* run : {&nominal, &wind, &heavy, &light}) {
    if (auto f = run->summary.get_note("failure")) s.note("failure", *f);
  }
  return s;
}

RobustnessReport run_robustness(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& rb = cfg.robustness;
  ScenarioConfig base = cfg;
  base.kind = ScenarioKind::Payload;
  base.disturbance = DisturbanceSpec{};
  base.controller_payload_mass.reset();

  ScenarioConfig wind = base;
  wind.disturbance.force = Vec3(rb.gust_force, 0.0, 0.0);
  wind.disturbance.start = rb.gust_start;
  wind.disturbance.duration = rb.gust_duration;

  ScenarioConfig heavy = base;
  heavy.controller_payload_mass = base.rig.payload_mass;
  heavy.rig.payload_mass = base.rig.payload_mass * (1.0 + rb.mass_variation);
  ScenarioConfig light = base;
  light.controller_payload_mass = base.rig.payload_mass;
  light.rig.payload_mass = base.rig.payload_mass * (1.0 - rb.mass_variation);

  // Independent rollouts; nothing mutable is shared between them.
  auto f_nominal = std::async(std::launch::async, [&] { return run_payload(base); });
  auto f_wind = std::async(std::launch::async, [&] { return run_payload(wind); });
  auto f_heavy = std::async(std::launch::async, [&] { return run_payload(heavy); });
  auto f_light = std::async(std::launch::async, [&] { return run_payload(light); });

  RobustnessReport r;
  r.nominal = f_nominal.get();
  r.wind = f_wind.get();
  r.heavy = f_heavy.get();
  r.light = f_light.get();
  for (auto* run : {&r.nominal, &r.wind, &r.heavy, &r.light}) run->scenario = to_string(ScenarioKind::Robustness);

  const Table& nom = r.nominal.table("payload");
  const Table& win = r.wind.table("payload");
  const auto times = nom.column("t");
  const auto nom_err = nom.column("error");
  const auto win_err = win.column("error");
  r.nominal_rms = rms_after(times, nom_err, cfg.transient_time);
  const std::size_t m = std::min(nom.size(), win.size());
  const MatX pn = columns(nom, {"pos_x", "pos_y", "pos_h"});
  const MatX pw = columns(win, {"pos_x", "pos_y", "pos_h"});
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    r.wind_max_deviation = std::max(r.wind_max_deviation, (pw.row(row) - pn.row(row)).norm());
    r.wind_max_error = std::max(r.wind_max_error, win_err[i]);
  }
  const double recovery_start = rb.gust_start + rb.gust_duration + rb.recovery_delay;
  r.wind_recovery_rms = rms_after(win.column("t"), win_err, recovery_start);
  r.nominal_recovery_rms = rms_after(times, nom_err, recovery_start);
  r.recovered = std::isfinite(r.wind_recovery_rms) && r.wind_recovery_rms < 2.0 * r.nominal_recovery_rms;

  const auto rms_change = [&](const RunLog& run) {
    const Table& p = run.table("payload");
    const double rms = rms_after(p.column("t"), p.column("error"), cfg.transient_time);
    return std::abs(rms - r.nominal_rms) / r.nominal_rms;
  };
  r.heavy_rms_change = rms_change(r.heavy);
  r.light_rms_change = rms_change(r.light);
  r.nominal_effort = control_effort(r.nominal);
  r.heavy_effort = control_effort(r.heavy);
  r.light_effort = control_effort(r.light);
  r.heavy_effort_ratio = r.heavy_effort.total / r.nominal_effort.total;
  r.light_effort_ratio = r.light_effort.total / r.nominal_effort.total;
  r.heavy_squared_effort_ratio = r.heavy_effort.squared / r.nominal_effort.squared;
  r.light_squared_effort_ratio = r.light_effort.squared / r.nominal_effort.squared;
  return r;
}

std::vector<std::string> write_robustness(const RobustnessReport& r, const std::string& dir, bool csv, bool json) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  const std::pair<const char*, const RunLog*> cases[] = {
      {"nominal", &r.nominal}, {"wind", &r.wind}, {"mass_plus", &r.heavy}, {"mass_minus", &r.light}};
  for (const auto& [name, run] : cases) {
    const auto paths = write_run(*run, (fs::path(dir) / name).string(), csv, json);
    written.insert(written.end(), paths.begin(), paths.end());
  }
  const auto path = (fs::path(dir) / "summary.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << summary_to_json(r.summary(), to_string(ScenarioKind::Robustness)) << '\n';
  written.push_back(path);
  return written;
}

}  // namespace cotrans
