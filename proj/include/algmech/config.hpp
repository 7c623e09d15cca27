#ifndef ALGMECH_CONFIG_HPP
#define ALGMECH_CONFIG_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algmech/models.hpp"

namespace algmech {

struct SimulateSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  double h = 1e-3;
  std::vector<double> x0;
  std::vector<double> fiber0;
  bool phase = false;  // true: fiber0 holds xi (run on E*), else y (run on E)
};

struct CheckSpec {
  SampleBox base_box;
  SampleBox fiber_box;
  int count = 30;
  std::uint64_t seed = kDefaultSampleSeed;
  double tolerance = 1e-12;
  std::vector<std::string> checks{"skew", "lie"};
};

struct NoetherSpec {
  Section section;
  Expr f;
};

// A validated configuration: the algebroid plus whatever dynamical data the
// document supplied. Presets expand into the same representation.
struct Model {
  explicit Model(Algebroid alg) : algebroid(std::move(alg)) {}

  Algebroid algebroid;
  std::optional<Metric> metric;
  std::optional<Lagrangian> lagrangian;
  std::optional<Hamiltonian> hamiltonian;
  std::optional<WongSetup> wong;
  std::optional<NoetherSpec> noether;
  std::optional<SimulateSpec> simulate;
  CheckSpec check;
  std::vector<std::pair<std::string, Expr>> monitors;
};

// Parses and validates a configuration document; throws ConfigError with
// the offending field path. No computation happens on invalid input.
Model load_model(const std::string& json_text);
Model load_model_file(const std::string& path);

}  // namespace algmech

#endif
