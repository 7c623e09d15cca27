#ifndef ALGMECH_INTEGRATE_HPP
#define ALGMECH_INTEGRATE_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "algmech/errors.hpp"

namespace algmech {

using StateFn =
    std::function<std::vector<double>(double t, const std::vector<double>& state)>;
using MonitorFn =
    std::function<double(double t, const std::vector<double>& state)>;

struct Monitor {
  std::string name;
  MonitorFn fn;
};

// Time-stamped states plus named monitored scalars, one value per stored
// state. `aborted` is set when the field degenerated mid-run; the states up
// to the last good one are retained.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::string> labels;
  std::vector<std::string> monitor_names;
  std::vector<std::vector<double>> monitor_values;  // [monitor][step]
  bool aborted = false;
  std::string abort_reason;

  std::size_t size() const { return times.size(); }
};

// Classical fixed-step RK4 update. Field failures are reported with the
// stage index.
std::vector<double> rk4_step(const StateFn& field, const std::vector<double>& state,
                             double t, double h);

Trajectory integrate(const StateFn& field, std::vector<double> state0, double t0,
                     double t1, double h, std::vector<Monitor> monitors = {},
                     std::vector<std::string> labels = {});

struct DriftReport {
  double max_abs = 0.0;
  double relative = 0.0;
};

// max |m(t) - m(t0)| over the run, and that divided by max(|m(t0)|, 1).
DriftReport drift_report(const Trajectory& traj, std::string_view monitor);

}  // namespace algmech

#endif
