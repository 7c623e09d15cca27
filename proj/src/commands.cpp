#include "algmech/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

namespace algmech {

namespace {

std::size_t thread_count() {
  const char* env = std::getenv("ALGMECH_THREADS");
  if (!env) return 1;
  const long v = std::strtol(env, nullptr, 10);
  if (v < 1) return 1;
  return static_cast<std::size_t>(v);
}

// Ordered map over indices; results land in a pre-sized vector so the
// reduction is deterministic for any thread count.
template <class Fn>
std::vector<double> parallel_map(std::size_t count, std::size_t threads, Fn&& fn) {
  std::vector<double> results(count, 0.0);
  if (threads <= 1 || count < 2 * threads) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) results[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

std::vector<std::vector<double>> product_samples(const SampleBox& base,
                                                 const SampleBox& fiber, int count,
                                                 std::uint64_t seed) {
  SampleBox joint;
  joint.range = base.range;
  joint.range.insert(joint.range.end(), fiber.range.begin(), fiber.range.end());
  return sample_points(joint, count, seed);
}

CheckItem structure_finite_check(const Model& model,
                                 const std::vector<std::vector<double>>& samples) {
  const Algebroid& alg = model.algebroid;
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  CheckItem item{"structure", true, 0.0, ""};
  auto eval_all = [&](std::size_t s) -> double {
    Env env = alg.base_env(samples[s]);
    double worst = 0.0;
    auto probe = [&](const Expr& e) {
      const double v = e.eval(env);
      if (!std::isfinite(v)) throw EvalError("non-finite value", e.str());
      worst = std::max(worst, 0.0);
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < m; ++i) {
        probe(alg.rho()(a, i));
        probe(alg.sigma()(a, i));
      }
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) probe(alg.c()(k, i, j));
    return worst;
  };
  try {
    parallel_map(samples.size(), thread_count(), eval_all);
  } catch (const EvalError& e) {
    item.passed = false;
    item.detail = e.what();
  }
  return item;
}

}  // namespace

bool RunReport::all_passed() const {
  return std::all_of(items.begin(), items.end(),
                     [](const CheckItem& i) { return i.passed; });
}

RunReport cmd_check(const Model& model) {
  const CheckSpec& spec = model.check;
  auto samples = sample_points(spec.base_box, spec.count, spec.seed);

  RunReport report;
  report.items.push_back(structure_finite_check(model, samples));

  for (const std::string& name : spec.checks) {
    if (name == "skew") {
      CheckResult r = check_skew(model.algebroid, samples, spec.tolerance);
      report.items.push_back({"skew", r.passed, r.max_abs, r.detail});
    } else if (name == "lie") {
      CheckResult r = check_lie(model.algebroid, samples, spec.tolerance);
      report.items.push_back({"lie", r.passed, r.max_abs, r.detail});
    }
  }

  if (model.metric) {
    CheckResult r = validate_metric(*model.metric, model.algebroid.chart(), samples,
                                    spec.tolerance);
    report.items.push_back({"metric", r.passed, r.max_abs, r.detail});
  }

  if (model.noether) {
    auto xy = product_samples(spec.base_box, spec.fiber_box, spec.count, spec.seed);
    CheckResult r = noether_check(model.algebroid, *model.lagrangian,
                                  model.noether->section, model.noether->f, xy,
                                  spec.tolerance);
    report.items.push_back({"noether", r.passed, r.max_abs, r.detail});
  }

  return report;
}

void print_report(const RunReport& report, std::ostream& out) {
  for (const CheckItem& item : report.items) {
    out << (item.passed ? "PASS" : "FAIL") << "  " << item.name
        << "  residual=" << format_double(item.residual);
    if (!item.detail.empty()) out << "  (" << item.detail << ")";
    out << "\n";
  }
}

namespace {

void write_csv_row(std::ostream& out, double t, const std::vector<double>& state,
                   const std::vector<double>& extras) {
  out << format_double(t);
  for (double v : state) out << ',' << format_double(v);
  for (double v : extras) out << ',' << format_double(v);
  out << '\n';
}

}  // namespace

int cmd_simulate(const Model& model, std::ostream& csv_out, std::string& diagnostics) {
  if (!model.simulate) throw ConfigError("simulate: block missing from config");
  const SimulateSpec& spec = *model.simulate;
  const Algebroid& alg = model.algebroid;
  const ChartNames& chart = alg.chart();
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();

  StateFn flow;
  if (spec.phase) {
    if (model.wong) flow = make_wong_phase_flow(*model.wong);
    else flow = make_hamiltonian_flow(alg, *model.hamiltonian);
  } else {
    if (model.wong) flow = make_wong_el_flow(*model.wong);
    else flow = make_euler_lagrange_flow(alg, *model.lagrangian);
  }

  // Energy column: the Hamiltonian on phase runs, the fibre-radial energy of
  // the Lagrangian on velocity runs.
  const std::vector<std::string>& fiber_names = spec.phase ? chart.xi : chart.y;
  Expr h_expr = spec.phase ? model.hamiltonian->expr()
                           : lagrangian_energy(*model.lagrangian);
  auto state_env = [&, n, m](double t, const std::vector<double>& s) {
    Env env;
    env.set("t", t);
    for (std::size_t a = 0; a < n; ++a) env.set(chart.x[a], s[a]);
    for (std::size_t i = 0; i < m; ++i) env.set(fiber_names[i], s[n + i]);
    return env;
  };

  std::vector<Monitor> monitors;
  monitors.push_back({"H", [&, h_expr](double t, const std::vector<double>& s) {
                        Env env = state_env(t, s);
                        return h_expr.eval(env);
                      }});
  if (model.noether && !spec.phase) {
    Expr integral =
        noether_integral(*model.lagrangian, model.noether->section, model.noether->f);
    monitors.push_back({"noether", [&, integral](double t, const std::vector<double>& s) {
                          Env env = state_env(t, s);
                          return integral.eval(env);
                        }});
  }
  for (const auto& [name, expr] : model.monitors) {
    monitors.push_back({name, [&, expr](double t, const std::vector<double>& s) {
                          Env env = state_env(t, s);
                          return expr.eval(env);
                        }});
  }

  std::vector<double> state0 = spec.x0;
  state0.insert(state0.end(), spec.fiber0.begin(), spec.fiber0.end());

  csv_out << "t";
  for (const auto& name : chart.x) csv_out << ',' << name;
  for (const auto& name : fiber_names) csv_out << ',' << name;
  for (const auto& mon : monitors) csv_out << ',' << mon.name;
  csv_out << '\n';

  Trajectory traj = integrate(flow, state0, spec.t0, spec.t1, spec.h, monitors);
  std::vector<double> extras(monitors.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    for (std::size_t j = 0; j < monitors.size(); ++j)
      extras[j] = traj.monitor_values[j][k];
    write_csv_row(csv_out, traj.times[k], traj.states[k], extras);
  }
  if (traj.aborted) {
    diagnostics = "integration aborted: " + traj.abort_reason;
    return kExitDegeneracy;
  }
  return kExitOk;
}

namespace {

// Explicit symbolic right-hand side of the Euler-Lagrange field when the
// Hessian admits a symbolic inverse.
std::vector<Expr> symbolic_el_rhs(const Algebroid& alg, const Lagrangian& L) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  std::vector<Expr> rhs(m, Expr::number(0.0));
  std::vector<Expr> xdot(n, Expr::number(0.0));
  for (std::size_t a = 0; a < n; ++a) {
    Expr s = Expr::number(0.0);
    for (std::size_t k = 0; k < m; ++k)
      s = s + alg.rho()(a, k) * Expr::variable(alg.chart().y[k]);
    xdot[a] = s.simplified();
  }
  for (std::size_t j = 0; j < m; ++j) {
    Expr s = Expr::number(0.0);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        s = s + alg.c()(k, i, j) * Expr::variable(alg.chart().y[i]) * L.dLdy()[k];
    for (std::size_t a = 0; a < n; ++a) {
      s = s + alg.sigma()(a, j) * L.dLdx()[a];
      s = s - L.mixed()(j, a) * xdot[a];
    }
    rhs[j] = s.simplified();
  }
  ExprMat hinv = expr_inverse(L.hessian());
  std::vector<Expr> ydot(m, Expr::number(0.0));
  for (std::size_t l = 0; l < m; ++l) {
    Expr s = Expr::number(0.0);
    for (std::size_t j = 0; j < m; ++j) s = s + hinv(l, j) * rhs[j];
    ydot[l] = s.simplified();
  }
  return ydot;
}

}  // namespace

void cmd_describe(const Model& model, std::ostream& out) {
  const Algebroid& alg = model.algebroid;
  const ChartNames& chart = alg.chart();
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();

  out << "algebroid: base_dim=" << n << " fiber_rank=" << m << "\n";

  out << "left anchor (rho):\n";
  for (std::size_t a = 0; a < n; ++a) {
    out << "  ";
    for (std::size_t i = 0; i < m; ++i)
      out << alg.rho()(a, i).str() << (i + 1 < m ? "  " : "");
    out << "\n";
  }
  out << "right anchor (sigma):\n";
  for (std::size_t a = 0; a < n; ++a) {
    out << "  ";
    for (std::size_t i = 0; i < m; ++i)
      out << alg.sigma()(a, i).str() << (i + 1 < m ? "  " : "");
    out << "\n";
  }

  out << "tensor [xi,xi] block (entry i,j):\n";
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Expr e = Expr::number(0.0);
      for (std::size_t k = 0; k < m; ++k)
        e = e + alg.c()(k, i, j) * Expr::variable(chart.xi[k]);
      e = e.simplified();
      if (!e.is_number(0.0))
        out << "  [" << chart.xi[i] << "," << chart.xi[j] << "] = " << e.str() << "\n";
    }
  out << "tensor [xi,x] block = rho, [x,xi] block = -sigma\n";

  if (model.metric) {
    GammaSymbols gamma = gamma_symbols(alg, *model.metric);
    out << "Gamma symbols (nonzero entries):\n";
    auto probe_env = [&]() {
      Env env;
      for (std::size_t a = 0; a < n; ++a) env.set(chart.x[a], 0.7 + 0.1 * double(a));
      return env;
    }();
    for (std::size_t l = 0; l < m; ++l)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const Expr& g = gamma.coeffs(l, i, j);
          bool zero = g.is_number(0.0);
          if (!zero) {
            try {
              zero = std::abs(g.eval(probe_env)) == 0.0 && g.variables().empty();
            } catch (const EvalError&) {
              zero = false;
            }
          }
          if (!zero)
            out << "  Gamma^" << (l + 1) << "_" << (i + 1) << (j + 1) << " = "
                << g.str() << "\n";
        }
  }

  if (model.lagrangian) {
    out << "Euler-Lagrange field:\n";
    for (std::size_t a = 0; a < n; ++a) {
      Expr s = Expr::number(0.0);
      for (std::size_t k = 0; k < m; ++k)
        s = s + alg.rho()(a, k) * Expr::variable(chart.y[k]);
      out << "  xdot" << (a + 1) << " = " << s.simplified().str() << "\n";
    }
    Expr det = expr_determinant(model.lagrangian->hessian()).simplified();
    if (det.is_number(0.0)) {
      out << "  (degenerate Hessian: no explicit ydot)\n";
    } else {
      std::vector<Expr> ydot = symbolic_el_rhs(alg, *model.lagrangian);
      for (std::size_t l = 0; l < m; ++l)
        out << "  ydot" << (l + 1) << " = " << ydot[l].str() << "\n";
    }
  }

  if (model.hamiltonian) {
    out << "hamiltonian: H = " << model.hamiltonian->expr().str() << "\n";
  }

  if (model.noether) {
    Expr integral =
        noether_integral(*model.lagrangian, model.noether->section, model.noether->f);
    out << "noether integral: " << integral.str() << "\n";
  }
}

namespace {

int usage(std::ostream& err) {
  err << "usage: algmech check <config.json>\n"
         "       algmech simulate <config.json> [-o out.csv]\n"
         "       algmech describe <config.json>\n";
  return kExitConfigError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.size() < 2) return usage(err);
  const std::string& cmd = args[0];
  const std::string& config_path = args[1];

  try {
    Model model = load_model_file(config_path);
    if (cmd == "check") {
      RunReport report = cmd_check(model);
      print_report(report, out);
      return report.all_passed() ? kExitOk : kExitCheckFailed;
    }
    if (cmd == "simulate") {
      std::string out_path;
      for (std::size_t i = 2; i + 1 < args.size(); ++i)
        if (args[i] == "-o") out_path = args[i + 1];
      std::string diagnostics;
      int rc;
      if (!out_path.empty()) {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
          err << "cannot open output file '" << out_path << "'\n";
          return kExitConfigError;
        }
        rc = cmd_simulate(model, file, diagnostics);
      } else {
        rc = cmd_simulate(model, out, diagnostics);
      }
      if (!diagnostics.empty()) err << diagnostics << "\n";
      return rc;
    }
    if (cmd == "describe") {
      cmd_describe(model, out);
      return kExitOk;
    }
    return usage(err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DegeneracyError& e) {
    err << "degeneracy: " << e.what() << "\n";
    return kExitDegeneracy;
  } catch (const EvalError& e) {
    err << "evaluation error: " << e.what() << "\n";
    return kExitDegeneracy;
  }
}

}  // namespace algmech
