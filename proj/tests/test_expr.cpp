#include <cmath>
#include <random>

#include "algmech/expr.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace algmech;

namespace {

Env env_of(std::initializer_list<std::pair<const char*, double>> vars) {
  Env env;
  for (const auto& [name, value] : vars) env.set(name, value);
  return env;
}

// Random expressions with domain hazards fenced off: ln/sqrt arguments are
// bounded away from zero, divisors bounded away from zero, exponents are
// small integer literals.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> var_pick(0, 2);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  auto leaf = [&]() -> Expr {
    if (var_pick(rng) == 0) return Expr::number(std::round(coef(rng) * 4.0) / 4.0);
    return Expr::variable("x" + std::to_string(1 + var_pick(rng)));
  };
  if (depth <= 0) return leaf();
  std::uniform_int_distribution<int> op_pick(0, 9);
  Expr a = random_expr(rng, depth - 1);
  Expr b = random_expr(rng, depth - 1);
  switch (op_pick(rng)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (Expr::number(2.0) + b * b);
    case 4: return sin(a);
    case 5: return cos(a);
    case 6: return exp(a * Expr::number(0.25));
    case 7: return ln(Expr::number(2.0) + sin(a));
    case 8: return sqrt(Expr::number(2.0) + cos(a));
    default: return pow(a, Expr::number(double(1 + op_pick(rng) % 3)));
  }
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("parse literals and structure") {
  Expr zero = parse_expr("0");
  CHECK(zero.is_number(0.0));

  Expr e = parse_expr("x1*x1 + sin(x2)");
  CHECK(e.eval(env_of({{"x1", 2.0}, {"x2", 0.0}})) == doctest::Approx(4.0).epsilon(1e-15));
  // Add(Mul(Var, Var), Sin(Var))
  Expr rebuilt = Expr::variable("x1") * Expr::variable("x1") + sin(Expr::variable("x2"));
  CHECK(e.same_structure(rebuilt));
}

TEST_CASE("power is right-associative") {
  Expr e = parse_expr("2^3^2");
  Env env;
  CHECK(e.eval(env) == doctest::Approx(512.0).epsilon(1e-15));
  CHECK(e.eval(env) == doctest::Approx(oracle::tiny_eval("2^3^2")).epsilon(1e-15));

  // a handful of mixed forms against the independent evaluator
  const char* cases[] = {"2^-2",          "-2^2",          "1-2-3",
                         "12/4/3",        "2*3^2+1",       "(1+2)*(3-4)/5",
                         "2^(1/2)^2",     "1+2*3-4/8",     "-(2+3)*-2"};
  for (const char* text : cases) {
    CAPTURE(text);
    CHECK(parse_expr(text).eval(env) ==
          doctest::Approx(oracle::tiny_eval(text)).epsilon(1e-14));
  }
}

TEST_CASE("eval basics and domain") {
  Env empty;
  CHECK(parse_expr("pi").eval(empty) == doctest::Approx(3.141592653589793).epsilon(1e-16));
  CHECK(parse_expr("x^2").eval(env_of({{"x", -3.0}})) == doctest::Approx(9.0));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pos(0.01, 50.0);
  Expr ident = parse_expr("exp(ln(x))");
  for (int i = 0; i < 100; ++i) {
    const double x = pos(rng);
    CHECK(std::abs(ident.eval(env_of({{"x", x}})) - x) < 1e-14 * std::max(1.0, x));
  }
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expr("1 + "), ParseError);
  try {
    parse_expr("1 + %");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("foo(x)");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown function") != std::string::npos);
    CHECK(e.offset() == 0);
  }
  CHECK_THROWS_AS(parse_expr("(1+2"), ParseError);
  CHECK_THROWS_AS(parse_expr("1 2"), ParseError);
}

TEST_CASE("eval errors") {
  Env empty;
  CHECK_THROWS_AS(parse_expr("x1+1").eval(empty), EvalError);
  try {
    parse_expr("1+ln(0-x)").eval(env_of({{"x", 1.0}}));
    CHECK(false);
  } catch (const EvalError& e) {
    CHECK(e.subexpr().find("ln") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expr("sqrt(0-4)").eval(empty), EvalError);
  CHECK_THROWS_AS(parse_expr("(0-2)^0.5").eval(empty), EvalError);
  CHECK_THROWS_AS(parse_expr("1/(x-x)").eval(env_of({{"x", 3.0}})), EvalError);
}

TEST_CASE("derivative table rules") {
  Expr ds = parse_expr("sin(x)").derivative("x");
  CHECK(ds.same_structure(cos(Expr::variable("x"))));

  Expr dp = parse_expr("x*y").derivative("x");
  CHECK(dp.same_structure(Expr::variable("y")));

  // absent variable differentiates to the zero literal
  CHECK(parse_expr("sin(x1)*x2").derivative("q").is_number(0.0));
  CHECK(parse_expr("3.5").derivative("x").is_number(0.0));
  CHECK(parse_expr("pi").derivative("x").is_number(0.0));
}

TEST_CASE("derivative of x^3*exp(x) against finite differences") {
  Expr e = parse_expr("x^3*exp(x)");
  Expr d = e.derivative("x");
  for (double t : {-1.0, 0.5, 2.0}) {
    auto f = [&](double x) { return e.eval(env_of({{"x", x}})); };
    const double fd = oracle::central_diff(f, t);
    CHECK(std::abs(d.eval(env_of({{"x", t}})) - fd) < 1e-6);
  }
}

TEST_CASE("1000 randomized derivative vs finite-difference checks") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> point(-1.5, 1.5);
  int performed = 0;
  int attempts = 0;
  while (performed < 1000 && attempts < 20000) {
    ++attempts;
    Expr e = random_expr(rng, 3);
    const char* vars[] = {"x1", "x2", "x3"};
    const char* var = vars[attempts % 3];
    Expr d = e.derivative(var);
    const double x1 = point(rng), x2 = point(rng), x3 = point(rng);
    const double vals[3] = {x1, x2, x3};
    const double base = vals[attempts % 3];
    auto env_with = [&](double v) {
      Env env = env_of({{"x1", x1}, {"x2", x2}, {"x3", x3}});
      env.set(var, v);
      return env;
    };
    try {
      auto f = [&](double v) { return e.eval(env_with(v)); };
      const double fd = (f(base + 1e-6) - f(base - 1e-6)) / 2e-6;
      const double sym = d.eval(env_with(base));
      if (!std::isfinite(fd) || !std::isfinite(sym)) continue;
      const double scale = std::max({1.0, std::abs(fd), std::abs(sym)});
      if (std::abs(fd) > 1e8) continue;  // FD unreliable near steep spots
      CHECK(std::abs(sym - fd) / scale < 1e-6);
      ++performed;
    } catch (const EvalError&) {
      continue;  // point fell outside a guarded domain
    }
  }
  CHECK(performed == 1000);
}

TEST_CASE("derivative is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> point(-1.2, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    Expr e1 = random_expr(rng, 2);
    Expr e2 = random_expr(rng, 2);
    const double a = std::round(point(rng) * 8.0) / 8.0;
    Expr combined = (Expr::number(a) * e1 + e2).derivative("x1");
    Expr split = Expr::number(a) * e1.derivative("x1") + e2.derivative("x1");
    for (int p = 0; p < 5; ++p) {
      Env env = env_of({{"x1", point(rng)}, {"x2", point(rng)}, {"x3", point(rng)}});
      double lhs, rhs;
      try {
        lhs = combined.eval(env);
        rhs = split.eval(env);
      } catch (const EvalError&) {
        continue;
      }
      CHECK(std::abs(lhs - rhs) < 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
}

TEST_CASE("print/parse round trip") {
  const char* corpus[] = {
      "x1*x1+sin(x2)", "2^3^2",          "1-(2-3)",        "x1/(x2*x3)",
      "-(x1+x2)",      "-x1^2",          "(x1+1)*(x2-2)",  "sqrt(2+cos(x1))",
      "exp(x1*0.25)",  "ln(2+sin(x3))",  "x1^-2",          "1/2/3",
      "pi*x1",         "tan(x1)+0.125",  "x1-x2-x3",       "x1^(x2+1)",
  };
  for (const char* text : corpus) {
    CAPTURE(text);
    Expr e = parse_expr(text).simplified();
    Expr round = parse_expr(e.str()).simplified();
    CHECK(round.same_structure(e));
  }

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    Expr e = random_expr(rng, 3).simplified();
    Expr round = parse_expr(e.str()).simplified();
    CAPTURE(e.str());
    CHECK(round.same_structure(e));
  }
}

TEST_CASE("simplify is idempotent and folds neutrals") {
  CHECK((parse_expr("x1+0").simplified()).same_structure(Expr::variable("x1")));
  CHECK((parse_expr("0*x1").simplified()).is_number(0.0));
  CHECK((parse_expr("1*x1").simplified()).same_structure(Expr::variable("x1")));
  CHECK((parse_expr("x1^1").simplified()).same_structure(Expr::variable("x1")));
  CHECK((parse_expr("x1^0").simplified()).is_number(1.0));
  CHECK((parse_expr("0/x1").simplified()).is_number(0.0));
  CHECK((parse_expr("2*3+1").simplified()).is_number(7.0));

  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = random_expr(rng, 3);
    Expr once = e.simplified();
    CHECK(once.same_structure(once.simplified()));
  }
}

TEST_CASE("substitution") {
  Expr e = parse_expr("y1^2+x1");
  Expr sub = e.substituted({{"y1", parse_expr("2*x1")}});
  Env env = env_of({{"x1", 3.0}});
  CHECK(sub.eval(env) == doctest::Approx(39.0));
}

}  // TEST_SUITE
