#pragma once

// Post-run checks: exponential decay-rate fits, finite-difference
// consistency between logged outputs and predicted derivatives, and
// control-effort integrals.

#include <limits>
#include <string>
#include <vector>

#include "cotrans/math.hpp"
#include "cotrans/sim_log.hpp"

namespace cotrans {

struct RateFitOptions {
  double t_start = 0.0;  // skip the first controller transient
  double t_end = std::numeric_limits<double>::infinity();
  double floor = 1e-9;   // samples at or below are excluded
  std::size_t min_samples = 50;
  double convergence_threshold = 1e-6;  // fitted rate below this is non-convergent
};

struct RateFit {
  enum class Status { Converging, NonConvergent, AlreadyConverged };
  Status status = Status::AlreadyConverged;
  double rate = std::numeric_limits<double>::quiet_NaN();  // lambda = -slope [1/s]
  double intercept = std::numeric_limits<double>::quiet_NaN();  // log e at t = 0
  double window_start = 0.0;
  double window_end = 0.0;
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples = 0;
};

std::string to_string(RateFit::Status s);

// Least-squares line through log(e) over the window. Throws ParameterError
// if times and errors differ in length or if some but fewer than
// min_samples points lie above the floor.
RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& errors,
                             const RateFitOptions& options = {});

struct FdOptions {
  int order = 4;        // derivative order, 2 or 4
  int stride = 1;       // stencil spacing in samples
  double t_start = 0.0; // ignore centres before this time
  double scale_floor = 1e-6;
  double uniform_tolerance = 1e-9;  // relative spacing tolerance
};

struct FdChannel {
  double rms_error = 0.0;
  double max_error = 0.0;
  double rel_error = 0.0;  // rms_error / max(rms of the predicted vector norm, scale_floor)
};

struct FdReport {
  std::vector<FdChannel> channels;
  std::size_t stencils = 0;
  double spacing = 0.0;  // stencil spacing h [s]
  double max_rel_error() const;
};

// Compares central finite differences of `signal` (one column per
// channel) with `predicted`. Second derivatives use the three-point
// stencil, fourth derivatives the five-point stencil
//   (f(-2h) - 4 f(-h) + 6 f(0) - 4 f(h) + f(2h)) / h^4.
// When `hold` is given, stencils whose interior crosses the start of a new
// controller hold are skipped: the derivative jumps there under a
// zero-order hold. Throws ParameterError for non-uniform timestamps.
FdReport fd_consistency(const std::vector<double>& times, const MatX& signal, const MatX& predicted,
                        const std::vector<double>& hold, const FdOptions& options);

struct EffortReport {
  double total = 0.0;    // integral of |U|_2
  double thrust = 0.0;   // integral of |(f_1..f_N)|_2
  double torque = 0.0;   // integral of |(tau_1..tau_N)|_2
  double squared = 0.0;  // integral of |U|_2^2
};

// `inputs` holds one row per sample, laid out [f_1, tau_1, ..., f_N, tau_N].
// Inputs are zero-order held, so the integral is the left Riemann sum.
EffortReport control_effort(const std::vector<double>& times, const MatX& inputs);

// Reads per-UAV tables "uav<i>" with thrust and tau_* columns.
EffortReport control_effort(const RunLog& log);

// Plot-ready series: time, error norm, log10 error.
Table error_export(const std::vector<double>& times, const std::vector<double>& errors);

// RMS of `values` over samples with t >= t_start (and t <= t_end).
double rms_after(const std::vector<double>& times, const std::vector<double>& values, double t_start,
                 double t_end = std::numeric_limits<double>::infinity());

// Stacks the named columns of a table into a matrix.
MatX columns(const Table& t, const std::vector<std::string>& names);

}  // namespace cotrans
