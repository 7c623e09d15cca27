#include "algmech/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace algmech {

namespace {

std::vector<double> call_stage(const StateFn& field, double t,
                               const std::vector<double>& state, int stage) {
  try {
    std::vector<double> k = field(t, state);
    if (k.size() != state.size())
      throw ShapeError("field returned wrong state dimension");
    return k;
  } catch (const DegeneracyError& e) {
    throw DegeneracyError("RK4 stage " + std::to_string(stage) + ": " + e.what());
  } catch (const EvalError& e) {
    throw EvalError(std::string("RK4 stage ") + std::to_string(stage) + ": " + e.what(),
                    e.subexpr());
  }
}

std::vector<double> axpy(const std::vector<double>& s, double a,
                         const std::vector<double>& k) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + a * k[i];
  return out;
}

// Number of steps; (t1-t0)/h within 1e-6 of an integer rounds to it.
std::size_t step_count(double t0, double t1, double h) {
  const double raw = (t1 - t0) / h;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) < 1e-6 && rounded >= 1.0)
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(raw));
}

}  // namespace

std::vector<double> rk4_step(const StateFn& field, const std::vector<double>& state,
                             double t, double h) {
  std::vector<double> k1 = call_stage(field, t, state, 1);
  std::vector<double> k2 = call_stage(field, t + 0.5 * h, axpy(state, 0.5 * h, k1), 2);
  std::vector<double> k3 = call_stage(field, t + 0.5 * h, axpy(state, 0.5 * h, k2), 3);
  std::vector<double> k4 = call_stage(field, t + h, axpy(state, h, k3), 4);

  std::vector<double> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    out[i] = state[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Trajectory integrate(const StateFn& field, std::vector<double> state0, double t0,
                     double t1, double h, std::vector<Monitor> monitors,
                     std::vector<std::string> labels) {
  if (!(h > 0.0)) throw ShapeError("integrate: step size must be positive");
  if (!(t1 > t0)) throw ShapeError("integrate: t1 must exceed t0");

  Trajectory traj;
  traj.labels = std::move(labels);
  traj.monitor_names.reserve(monitors.size());
  traj.monitor_values.assign(monitors.size(), {});
  for (const auto& mon : monitors) traj.monitor_names.push_back(mon.name);

  auto record = [&](double t, const std::vector<double>& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    for (std::size_t i = 0; i < monitors.size(); ++i)
      traj.monitor_values[i].push_back(monitors[i].fn(t, s));
  };

  record(t0, state0);
  const std::size_t steps = step_count(t0, t1, h);
  std::vector<double> state = std::move(state0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    try {
      state = rk4_step(field, state, t, h);
    } catch (const DegeneracyError& e) {
      traj.aborted = true;
      traj.abort_reason = e.what();
      return traj;
    }
    record(t0 + static_cast<double>(k + 1) * h, state);
  }
  return traj;
}

DriftReport drift_report(const Trajectory& traj, std::string_view monitor) {
  for (std::size_t i = 0; i < traj.monitor_names.size(); ++i) {
    if (traj.monitor_names[i] == monitor) {
      const auto& series = traj.monitor_values[i];
      if (series.empty()) return {};
      DriftReport out;
      const double m0 = series.front();
      for (double v : series) out.max_abs = std::max(out.max_abs, std::abs(v - m0));
      out.relative = out.max_abs / std::max(std::abs(m0), 1.0);
      return out;
    }
  }
  throw ShapeError("drift_report: unknown monitor '" + std::string(monitor) + "'");
}

}  // namespace algmech
