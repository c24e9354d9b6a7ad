#include "cotrans/mission.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cotrans/errors.hpp"
#include "cotrans/integrator.hpp"
#include "cotrans/payload_fbl.hpp"
#include "cotrans/reference.hpp"
#include "cotrans/uav_fbl.hpp"

namespace cotrans {

std::string to_string(MissionPhase p) {
  switch (p) {
    case MissionPhase::Formation: return "formation";
    case MissionPhase::Descend: return "descend";
    case MissionPhase::Attached: return "attached";
    case MissionPhase::Transport: return "transport";
    case MissionPhase::Detach: return "detach";
  }
  return "unknown";
}

bool MissionReport::phases_monotonic() const {
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (static_cast<int>(phases[i].phase) <= static_cast<int>(phases[i - 1].phase)) return false;
    if (phases[i].time < phases[i - 1].time) return false;
  }
  return true;
}

Vec3 attachment_target(const Vec3& payload, const UavLink& link) {
  return payload + link.attachment - link.link_length * kUnitZ;
}

namespace {

UavParams uav_params(const UavLink& link, double gravity) {
  UavParams p;
  p.mass = link.mass;
  p.inertia = link.inertia.diagonal();
  p.gravity = gravity;
  return p;
}

// Uniform over the annulus r in [r_min, r_max] around `centre`, at NED z.
Vec3 annulus_point(std::mt19937_64& rng, const Vec3& centre, double r_min, double r_max, double z) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> area(r_min * r_min, r_max * r_max);
  const double a = angle(rng);
  const double r = std::sqrt(area(rng));
  return {centre.x() + r * std::cos(a), centre.y() + r * std::sin(a), z};
}

void push(std::vector<double>& row, const Vec3& ned) {
  row.push_back(ned.x());
  row.push_back(ned.y());
  row.push_back(-ned.z());
}

class Mission {
 public:
  explicit Mission(const ScenarioConfig& cfg)
      : cfg_(cfg),
        m_(cfg.mission),
        n_(cfg.rig.uav_count()),
        rng_(cfg.seed),
        plant_(cfg.rig),
        payload_ctrl_(cfg.controller_rig(), cfg.payload_gains, payload_options(cfg)) {
    for (const auto& link : cfg.rig.uavs) {
      uav_ctrl_.emplace_back(uav_params(link, cfg.rig.gravity), cfg.uav_gains);
    }
    rest_ = Vec3(m_.payload_spawn.x(), m_.payload_spawn.y(), -m_.payload_rest_height);
    landing_ = Vec3(m_.helipad.x(), m_.helipad.y(), -m_.payload_rest_height);
    payload_hold_ = rest_;
  }

  MissionReport run() {
    MissionReport rep;
    rep.log.scenario = to_string(ScenarioKind::Mission);
    std::vector<std::string> pcols{"t", "phase", "pos_x", "pos_y", "pos_h", "vel_x", "vel_y", "vel_h",
                                   "yaw", "pitch", "roll", "ref_x", "ref_y", "ref_h"};
    std::vector<std::string> ucols{"t", "phase", "pos_x", "pos_y", "pos_h", "vel_x", "vel_y", "vel_h", "yaw",
                                   "pitch", "roll", "thrust", "ref_x", "ref_y", "ref_h"};
    rep.log.add_table("payload", pcols);
    for (int i = 0; i < n_; ++i) rep.log.add_table("uav" + std::to_string(i), ucols);
    for (const auto& link : cfg_.rig.uavs) rep.attach_targets.push_back(attachment_target(rest_, link));

    start_formation(rep);
    const long steps = std::lround(cfg_.duration / cfg_.dt);
    const int hold_steps = cfg_.hold_steps();
    double t = 0.0;
    try {
      for (long k = 0; k <= steps && !rep.completed; ++k) {
        t = static_cast<double>(k) * cfg_.dt;
        if (k % hold_steps == 0) {
          advance_phase(rep, t);
          if (rep.completed) break;
          compute_control(t);
        }
        if (k % cfg_.log_stride == 0) log_row(rep.log, t);
        if (k == steps) break;
        step(t);
      }
      if (!rep.completed) throw Error("mission did not complete within " + std::to_string(cfg_.duration) + " s");
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (t = " << t << " s, phase " << to_string(phase_) << ")";
      rep.failure = msg.str();
      rep.log.summary.note("failure", msg.str());
      rep.log.summary.set("failure_time", t);
    }
    summarize(rep);
    return rep;
  }

 private:
  static PayloadControllerOptions payload_options(const ScenarioConfig& cfg) {
    PayloadControllerOptions o;
    o.attitude_feedforward = cfg.attitude_feedforward;
    o.payload_attitude_hold = cfg.payload_attitude_hold;
    o.controller_period = cfg.controller_period();
    return o;
  }

  bool attached() const { return phase_ == MissionPhase::Attached || phase_ == MissionPhase::Transport; }

  void enter(MissionReport& rep, MissionPhase p, double t) {
    phase_ = p;
    phase_start_ = t;
    rep.phases.push_back({p, t});
  }

  Vec3 formation_target(int i) const {
    const Vec3 a = attachment_target(rest_, cfg_.rig.uavs[i]);
    return {a.x(), a.y(), -m_.formation_height};
  }

  void start_formation(MissionReport& rep) {
    free_.clear();
    uav_refs_.clear();
    for (int i = 0; i < n_; ++i) {
      UavState12 s;
      s.position = annulus_point(rng_, m_.payload_spawn, m_.spawn_radius_min, m_.spawn_radius_max, 0.0);
      free_.push_back(uav_ctrl_[i].engage(s));
      uav_refs_.emplace_back(std::vector<Vec3>{s.position, formation_target(i)},
                             std::vector<double>{m_.formation_speed}, 0.0);
    }
    enter(rep, MissionPhase::Formation, 0.0);
  }

  bool uavs_at(const std::vector<Vec3>& targets, double pos_tol, double vel_tol) const {
    for (int i = 0; i < n_; ++i) {
      const auto s = ExtendedUavState::unpack(free_[i]);
      if ((s.position - targets[i]).norm() > pos_tol || s.velocity.norm() > vel_tol) return false;
    }
    return true;
  }

  bool uav_paths_done(double t) const {
    for (const auto& r : uav_refs_) {
      if (t < r.end_time()) return false;
    }
    return true;
  }

  void advance_phase(MissionReport& rep, double t) {
    switch (phase_) {
      case MissionPhase::Formation: {
        std::vector<Vec3> targets;
        for (int i = 0; i < n_; ++i) targets.push_back(formation_target(i));
        if (uav_paths_done(t) && uavs_at(targets, m_.formation_tolerance, std::numeric_limits<double>::infinity())) {
          uav_refs_.clear();
          for (int i = 0; i < n_; ++i) {
            uav_refs_.emplace_back(std::vector<Vec3>{targets[i], rep.attach_targets[i]},
                                   std::vector<double>{m_.descend_speed}, t);
          }
          enter(rep, MissionPhase::Descend, t);
        }
        break;
      }
      case MissionPhase::Descend:
        if (uav_paths_done(t) && uavs_at(rep.attach_targets, m_.attach_tolerance, m_.attach_velocity_tolerance)) {
          attach(rep, t);
        } else if (t - phase_start_ > m_.attach_timeout) {
          throw Error("attach timeout after " + std::to_string(m_.attach_timeout) + " s");
        }
        break;
      case MissionPhase::Attached:
        if (t >= payload_ref_->knot_times()[1]) enter(rep, MissionPhase::Transport, t);
        break;
      case MissionPhase::Transport: {
        const double settled = payload_ref_->end_time() + m_.settle_time;
        if (t < settled) break;
        const double err = (sys_.position - landing_).norm();
        if (err < m_.land_tolerance) {
          rep.landing_error = err;
          detach(rep, t);
        } else if (t > settled + m_.attach_timeout) {
          throw Error("payload did not land within tolerance (error " + std::to_string(err) + " m)");
        }
        break;
      }
      case MissionPhase::Detach:
        if (t >= phase_start_ + m_.detach_duration) rep.completed = true;
        break;
    }
  }

  void attach(MissionReport& rep, double t) {
    sys_ = SystemState{};
    sys_.position = payload_hold_;
    sys_.uavs.resize(n_);
    std::vector<ExtendedUavState> before;
    for (int i = 0; i < n_; ++i) {
      const auto s = ExtendedUavState::unpack(free_[i]);
      before.push_back(s);
      sys_.uavs[i].attitude = s.attitude;
      sys_.uavs[i].rates = s.rates;
    }
    const auto kin = uav_positions(sys_, cfg_.rig);
    for (int i = 0; i < n_; ++i) {
      rep.handoff_velocity_jump = std::max(rep.handoff_velocity_jump, (kin[i].velocity - before[i].velocity).norm());
      rep.handoff_position_jump = std::max(rep.handoff_position_jump, (kin[i].position - before[i].position).norm());
    }
    rep.handoff_payload_jump = (sys_.position - payload_hold_).norm();
    x_sys_ = sys_.pack();
    memory_ = PayloadControllerMemory{};

    const Vec3 up_spawn(rest_.x(), rest_.y(), -m_.cruise_height);
    const Vec3 up_pad(landing_.x(), landing_.y(), -m_.cruise_height);
    std::vector<Vec3> pts{rest_, up_spawn};
    pts.insert(pts.end(), m_.transport_via.begin(), m_.transport_via.end());
    pts.push_back(up_pad);
    pts.push_back(landing_);
    std::vector<double> speeds;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      const Vec3 d = pts[s + 1] - pts[s];
      const bool vertical = d.head<2>().norm() < 1e-9;
      speeds.push_back(vertical ? m_.descend_speed : m_.transport_speed);
    }
    payload_ref_.emplace(pts, speeds, t);
    enter(rep, MissionPhase::Attached, t);
  }

  void detach(MissionReport& rep, double t) {
    sys_ = SystemState::unpack(x_sys_);
    payload_hold_ = sys_.position;
    const auto kin = uav_positions(sys_, cfg_.rig);
    free_.clear();
    uav_refs_.clear();
    for (int i = 0; i < n_; ++i) {
      ExtendedUavState s;
      s.position = kin[i].position;
      s.velocity = kin[i].velocity;
      s.attitude = sys_.uavs[i].attitude;
      s.rates = sys_.uavs[i].rates;
      s.thrust = payload_control_.input[i].thrust;
      s.thrust_rate = 0.0;
      free_.push_back(s.pack());
      const Vec3 target = annulus_point(rng_, m_.helipad, m_.dispersal_radius_min, m_.dispersal_radius_max,
                                        -m_.dispersal_height);
      uav_refs_.emplace_back(std::vector<Vec3>{s.position, target}, std::vector<double>{m_.dispersal_speed}, t);
    }
    enter(rep, MissionPhase::Detach, t);
  }

  void compute_control(double t) {
    if (attached()) {
      sys_ = SystemState::unpack(x_sys_);
      payload_control_ = payload_ctrl_.compute(sys_, payload_ref_->sample(t).as_payload(), memory_);
      return;
    }
    uav_inputs_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      uav_inputs_[i] = uav_ctrl_[i].compute(free_[i], uav_refs_[i].sample(t).as_uav(0.0)).input;
    }
  }

  void step(double t) {
    if (attached()) {
      const SystemInput u = payload_control_.input;
      x_sys_ = rk4_step([&](const VecX& z) { return plant_.rhs(z, u); }, x_sys_, cfg_.dt, t);
      return;
    }
    for (int i = 0; i < n_; ++i) {
      const ExtendedUavInput u = uav_inputs_[i];
      const UavParams& p = uav_ctrl_[i].params();
      free_[i] = rk4_step([&](const UavVector14& z) { return ext_uav_rhs(z, u, p); }, free_[i], cfg_.dt, t);
    }
  }

  void log_row(RunLog& log, double t) {
    const double ph = static_cast<double>(static_cast<int>(phase_));
    std::vector<double> prow{t, ph};
    if (attached()) {
      const SystemState s = SystemState::unpack(x_sys_);
      const Mat3 rot0 = rot_zyx(s.attitude);
      push(prow, s.position);
      push(prow, rot0 * s.velocity);
      prow.insert(prow.end(), {s.attitude.yaw, s.attitude.pitch, s.attitude.roll});
      push(prow, payload_ref_->sample(t).d[0]);
      log.table("payload").add_row(std::move(prow));
      const auto kin = uav_positions(s, cfg_.rig);
      for (int i = 0; i < n_; ++i) {
        std::vector<double> row{t, ph};
        push(row, kin[i].position);
        push(row, kin[i].velocity);
        const auto& a = s.uavs[i].attitude;
        row.insert(row.end(), {a.yaw, a.pitch, a.roll, payload_control_.input[i].thrust});
        push(row, attachment_target(payload_ref_->sample(t).d[0], cfg_.rig.uavs[i]));
        log.table("uav" + std::to_string(i)).add_row(std::move(row));
      }
      return;
    }
    push(prow, payload_hold_);
    push(prow, Vec3::Zero());
    prow.insert(prow.end(), {0.0, 0.0, 0.0});
    push(prow, payload_hold_);
    log.table("payload").add_row(std::move(prow));
    for (int i = 0; i < n_; ++i) {
      const auto s = ExtendedUavState::unpack(free_[i]);
      std::vector<double> row{t, ph};
      push(row, s.position);
      push(row, s.velocity);
      row.insert(row.end(), {s.attitude.yaw, s.attitude.pitch, s.attitude.roll, s.thrust});
      push(row, uav_refs_[i].sample(t).d[0]);
      log.table("uav" + std::to_string(i)).add_row(std::move(row));
    }
  }

  void summarize(MissionReport& rep) const {
    auto& s = rep.log.summary;
    s.set("completed", rep.completed ? 1.0 : 0.0);
    for (const auto& e : rep.phases) s.set("phase_start_" + to_string(e.phase), e.time);
    s.set("handoff_velocity_jump", rep.handoff_velocity_jump);
    s.set("handoff_position_jump", rep.handoff_position_jump);
    s.set("handoff_payload_jump", rep.handoff_payload_jump);
    s.set("landing_error", rep.landing_error);
    s.set("phases_monotonic", rep.phases_monotonic() ? 1.0 : 0.0);
    s.note("final_phase", to_string(phase_));
  }

  const ScenarioConfig& cfg_;
  const MissionSpec& m_;
  int n_;
  std::mt19937_64 rng_;
  PayloadDynamics plant_;
  PayloadFblController payload_ctrl_;
  std::vector<UavFblController> uav_ctrl_;

  MissionPhase phase_ = MissionPhase::Formation;
  double phase_start_ = 0.0;
  Vec3 rest_, landing_, payload_hold_;

  std::vector<UavVector14> free_;
  std::vector<SmoothWaypointReference> uav_refs_;
  std::vector<ExtendedUavInput> uav_inputs_;

  SystemState sys_;
  VecX x_sys_;
  std::optional<SmoothWaypointReference> payload_ref_;
  PayloadControllerMemory memory_;
  PayloadControl payload_control_;
};

}  // namespace

MissionReport run_mission(const ScenarioConfig& cfg) {
  cfg.validate();
  Mission mission(cfg);
  return mission.run();
}

}  // namespace cotrans
