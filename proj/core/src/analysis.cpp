#include "cotrans/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cotrans/errors.hpp"

namespace cotrans {

std::string to_string(RateFit::Status s) {
  switch (s) {
    case RateFit::Status::Converging: return "converging";
    case RateFit::Status::NonConvergent: return "non-convergent";
    case RateFit::Status::AlreadyConverged: return "already-converged";
  }
  return "unknown";
}

RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& errors,
                             const RateFitOptions& options) {
  if (times.size() != errors.size()) throw ParameterError("fit_exponential_rate: length mismatch");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < options.t_start || times[i] > options.t_end) continue;
    if (!(errors[i] > options.floor) || !std::isfinite(errors[i])) continue;
    ts.push_back(times[i]);
    ys.push_back(std::log(errors[i]));
  }
  RateFit fit;
  fit.samples = ts.size();
  if (ts.empty()) return fit;
  if (ts.size() < options.min_samples) {
    throw ParameterError("fit_exponential_rate: only " + std::to_string(ts.size()) +
                         " samples above the floor, need " + std::to_string(options.min_samples));
  }
  fit.window_start = ts.front();
  fit.window_end = ts.back();

  const double n = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (!(stt > 0.0)) throw ParameterError("fit_exponential_rate: window has zero time span");
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.intercept = ym - slope * tm;
  // A flat log-error has no variance to explain.
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 0.0;
  fit.status = fit.rate > options.convergence_threshold ? RateFit::Status::Converging
                                                          : RateFit::Status::NonConvergent;
  return fit;
}

double FdReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& c : channels) m = std::max(m, c.rel_error);
  return m;
}

FdReport fd_consistency(const std::vector<double>& times, const MatX& signal, const MatX& predicted,
                        const std::vector<double>& hold, const FdOptions& options) {
  if (options.order != 2 && options.order != 4) throw ParameterError("fd_consistency: order must be 2 or 4");
  if (options.stride < 1) throw ParameterError("fd_consistency: stride must be positive");
  const auto n = static_cast<Eigen::Index>(times.size());
  if (signal.rows() != n || predicted.rows() != n || signal.cols() != predicted.cols()) {
    throw ParameterError("fd_consistency: signal and prediction must match the time base");
  }
  if (!hold.empty() && static_cast<Eigen::Index>(hold.size()) != n) {
    throw ParameterError("fd_consistency: hold index must match the time base");
  }
  if (n < 2) throw ParameterError("fd_consistency: need at least two samples");
  const double dt = times[1] - times[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > options.uniform_tolerance * std::abs(dt) + 1e-15) {
      throw ParameterError("fd_consistency: timestamps are not uniformly spaced");
    }
  }
  if (!(dt > 0.0)) throw ParameterError("fd_consistency: timestamps must increase");

  const int s = options.stride;
  const int half = options.order == 2 ? s : 2 * s;
  const double h = s * dt;
  FdReport report;
  report.spacing = h;
  const auto channels = signal.cols();
  VecX sum_sq = VecX::Zero(channels);
  VecX max_err = VecX::Zero(channels);
  double pred_sq = 0.0;

  for (Eigen::Index k = half; k + half < n; ++k) {
    if (times[k] < options.t_start) continue;
    // The interior (k - half, k + half) must not contain a hold start.
    if (!hold.empty() && hold[k + half - 1] != hold[k - half]) continue;
    VecX fd;
    if (options.order == 2) {
      fd = (signal.row(k - s) - 2.0 * signal.row(k) + signal.row(k + s)).transpose() / (h * h);
    } else {
      fd = (signal.row(k - 2 * s) - 4.0 * signal.row(k - s) + 6.0 * signal.row(k) - 4.0 * signal.row(k + s) +
            signal.row(k + 2 * s))
               .transpose() /
           (h * h * h * h);
    }
    const VecX err = fd - predicted.row(k).transpose();
    sum_sq += err.cwiseAbs2();
    max_err = max_err.cwiseMax(err.cwiseAbs());
    pred_sq += predicted.row(k).squaredNorm();
    ++report.stencils;
  }
  report.channels.resize(channels);
  if (report.stencils == 0) return report;
  const double m = static_cast<double>(report.stencils);
  const double scale = std::max(std::sqrt(pred_sq / m), options.scale_floor);
  for (Eigen::Index c = 0; c < channels; ++c) {
    auto& ch = report.channels[c];
    ch.rms_error = std::sqrt(sum_sq(c) / m);
    ch.max_error = max_err(c);
    ch.rel_error = ch.rms_error / scale;
  }
  return report;
}

EffortReport control_effort(const std::vector<double>& times, const MatX& inputs) {
  if (static_cast<Eigen::Index>(times.size()) != inputs.rows()) {
    throw ParameterError("control_effort: one input row per sample expected");
  }
  if (inputs.cols() % 4 != 0) throw ParameterError("control_effort: inputs must be [f, tau] per UAV");
  const int n = static_cast<int>(inputs.cols() / 4);
  EffortReport out;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dt = times[k + 1] - times[k];
    const auto row = inputs.row(static_cast<Eigen::Index>(k));
    double thrust_sq = 0.0, torque_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      thrust_sq += row(4 * i) * row(4 * i);
      torque_sq += row.segment<3>(4 * i + 1).squaredNorm();
    }
    out.total += std::sqrt(thrust_sq + torque_sq) * dt;
    out.thrust += std::sqrt(thrust_sq) * dt;
    out.torque += std::sqrt(torque_sq) * dt;
    out.squared += (thrust_sq + torque_sq) * dt;
  }
  return out;
}

EffortReport control_effort(const RunLog& log) {
  std::vector<const Table*> uavs;
  for (int i = 0; log.has_table("uav" + std::to_string(i)); ++i) uavs.push_back(&log.table("uav" + std::to_string(i)));
  if (uavs.empty()) throw ParameterError("control_effort: log has no uav tables");
  const auto times = uavs.front()->column("t");
  MatX inputs(static_cast<Eigen::Index>(times.size()), 4 * static_cast<Eigen::Index>(uavs.size()));
  for (std::size_t i = 0; i < uavs.size(); ++i) {
    if (uavs[i]->size() != times.size()) throw ParameterError("control_effort: uav tables differ in length");
    inputs.middleCols(4 * static_cast<Eigen::Index>(i), 4) =
        columns(*uavs[i], {"thrust", "tau_x", "tau_y", "tau_z"});
  }
  return control_effort(times, inputs);
}

Table error_export(const std::vector<double>& times, const std::vector<double>& errors) {
  if (times.size() != errors.size()) throw ParameterError("error_export: length mismatch");
  Table t({"t", "error_norm", "log10_error"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double e = std::abs(errors[i]);
    t.add_row({times[i], e, e > 0.0 ? std::log10(e) : -std::numeric_limits<double>::infinity()});
  }
  return t;
}

double rms_after(const std::vector<double>& times, const std::vector<double>& values, double t_start, double t_end) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (times[i] < t_start || times[i] > t_end) continue;
    sum += values[i] * values[i];
    ++count;
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN();
}

MatX columns(const Table& t, const std::vector<std::string>& names) {
  MatX out(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    const int idx = t.index(names[c]);
    for (std::size_t r = 0; r < t.size(); ++r) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.row(r)[idx];
    }
  }
  return out;
}

}  // namespace cotrans
