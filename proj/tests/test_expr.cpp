#include <cmath>
#include <numbers>
#include <cstring>
#include <random>

#include "doctest.h"
#include "psh/error.hpp"
#include "psh/expr.hpp"

using namespace psh;

namespace {

const std::vector<VarDecl> kZ = {{"z", VarKind::complex}};
const std::vector<VarDecl> kTZ = {{"t", VarKind::complex}, {"z", VarKind::complex}};

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const LabError& e) {
    return e.kind();
  }
  FAIL("expected LabError");
  return ErrorKind::io;
}

// Random real-valued expression over x, y (real) built from total operators.
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  switch (pick(rng)) {
    case 0: return "x";
    case 1: return "y";
    case 2: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", c(rng));
      return std::string("(") + buf + ")";
    }
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 6: return "-" + random_expr(rng, depth - 1) + "^2";
    case 7: return "exp(" + random_expr(rng, depth - 1) + " * 0.1)";
    case 8: return "log(abs2(" + random_expr(rng, depth - 1) + ") + 1)";
    case 9: return "max(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
    default: return "min(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("abs2 and re evaluate the declared examples") {
  auto e = Expression::parse("abs2(z)", kZ);
  CHECK(e.eval({{"z", Value(3, 4)}}).re == doctest::Approx(25.0));
  auto f = Expression::parse("re(t) + abs2(z - t)", kTZ);
  CHECK(f.eval({{"t", Value(1)}, {"z", Value(1)}}).re == doctest::Approx(1.0));
}

TEST_CASE("log of zero is the -inf sentinel") {
  auto e = Expression::parse("log(abs2(z))", kZ);
  CHECK(e.eval({{"z", Value(0)}}).is_neg_inf());
  auto n = Expression::parse("log(0 - 1)", {});
  CHECK(n.eval(std::map<std::string, Value>{}).is_neg_inf());
}

TEST_CASE("scalar evaluation examples") {
  CHECK(Expression::constant(2.5).eval_coords({}) == 2.5);
  auto half_log = Expression::parse("0.5*log(abs2(z))", kZ);
  CHECK(half_log.eval({{"z", Value(std::exp(-3.0))}}).re == doctest::Approx(-3.0).epsilon(1e-14));
  auto g = Expression::parse("exp(-abs2(z))", kZ);
  CHECK(g.eval({{"z", Value(1)}}).re == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("precedence: pow binds tighter than unary minus, products before sums") {
  const std::vector<VarDecl> x = {{"x", VarKind::real}};
  auto e = Expression::parse("-x^2", x);
  CHECK(e.eval_coords(std::vector<double>{3.0}) == -9.0);
  auto f = Expression::parse("1 + 2*3 - 4/2", {});
  CHECK(f.eval_coords({}) == 5.0);
  auto g = Expression::parse("2*x^3", x);
  CHECK(g.eval_coords(std::vector<double>{2.0}) == 16.0);
  auto h = Expression::parse("pow(x, 3) - x^3", x);
  CHECK(h.eval_coords(std::vector<double>{1.7}) == 0.0);
}

TEST_CASE("error kinds") {
  CHECK(kind_of([] { Expression::parse("abs2(w)", kZ); }) == ErrorKind::undeclared_variable);
  CHECK(kind_of([] { Expression::parse("abs2(z", kZ); }) == ErrorKind::syntax);
  CHECK(kind_of([] { Expression::parse("z^0.5", kZ); }) == ErrorKind::non_integer_exponent);
  CHECK(kind_of([] { Expression::parse("", kZ); }) == ErrorKind::syntax);
  CHECK(kind_of([] { Expression::parse("1/0", {}).eval_coords({}); }) == ErrorKind::division_by_zero);
  CHECK(kind_of([] { Expression::parse("log(z)", kZ).eval({{"z", Value(0, 1)}}); }) == ErrorKind::kind_mismatch);
  CHECK(kind_of([] {
          Expression::parse("z", kZ).eval_real(std::vector<Value>{Value(0, 1)});
        }) == ErrorKind::kind_mismatch);
}

TEST_CASE("syntax errors carry a position") {
  try {
    Expression::parse("1 + * 2", {});
    FAIL("expected syntax error");
  } catch (const LabError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("sentinel absorbs under addition and exp maps it to zero") {
  auto e = Expression::parse("log(abs2(z)) + 7", kZ);
  CHECK(e.eval({{"z", Value(0)}}).is_neg_inf());
  auto f = Expression::parse("exp(log(abs2(z)))", kZ);
  CHECK(f.eval({{"z", Value(0)}}).re == 0.0);
  auto g = Expression::parse("0 * log(abs2(z))", kZ);
  CHECK(g.eval({{"z", Value(0)}}).re == 0.0);
}

TEST_CASE("central-difference gradients") {
  auto e = Expression::parse("abs2(z)", kZ);
  auto g = e.gradient_fd(std::vector<double>{1.0, 0.0}, 1e-4);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(g[1]) < 1e-10);
  const std::vector<VarDecl> t = {{"t", VarKind::complex}};
  auto r = Expression::parse("re(t)", t).gradient_fd(std::vector<double>{0.3, -2.0}, 1e-3);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(std::abs(r[1]) < 1e-12);
  // O(h^2): halving h quarters the error against the closed form
  auto ex = Expression::parse("exp(re(t))", t);
  const double e1 = std::abs(ex.gradient_fd(std::vector<double>{0.0, 0.0}, 1e-2)[0] - 1.0);
  const double e2 = std::abs(ex.gradient_fd(std::vector<double>{0.0, 0.0}, 5e-3)[0] - 1.0);
  CHECK(e1 < 1e-4);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
  CHECK(kind_of([&] { Expression::parse("log(abs2(z))", kZ).gradient_fd(std::vector<double>{0.0, 0.0}, 1e-3); }) ==
        ErrorKind::singular_stencil);
}

TEST_CASE("property: print then parse evaluates identically on random bindings") {
  const std::vector<VarDecl> xy = {{"x", VarKind::real}, {"y", VarKind::real}};
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto text = random_expr(rng, 4);
    const auto e = Expression::parse(text, xy);
    const auto back = Expression::parse(e.print(), xy);
    CHECK(back.print() == e.print());
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> b = {u(rng), u(rng)};
      const double v0 = e.eval_coords(b), v1 = back.eval_coords(b);
      if (std::isnan(v0)) {
        CHECK(std::isnan(v1));
      } else {
        CHECK(v0 == v1);
      }
    }
  }
}

TEST_CASE("property: evaluation is pure") {
  const std::vector<VarDecl> xy = {{"x", VarKind::real}, {"y", VarKind::real}};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = Expression::parse(random_expr(rng, 3), xy);
    const std::vector<double> b = {u(rng), u(rng)};
    const double a = e.eval_coords(b);
    for (int k = 0; k < 5; ++k) {
      const double again = e.eval_coords(b);
      CHECK(std::memcmp(&a, &again, sizeof a) == 0);
    }
  }
}

TEST_CASE("complex variables occupy consecutive coordinates") {
  auto e = Expression::parse("re(t)*10 + im(t) + re(z)*1000 + im(z)*100", kTZ);
  CHECK(e.real_dimension() == 4);
  CHECK(e.eval_coords(std::vector<double>{1, 2, 3, 4}) == doctest::Approx(10 + 2 + 3000 + 400));
  CHECK(e.slot("z") == 1);
  CHECK(e.slot("w") == -1);
}

TEST_CASE("pi constant and max/min") {
  CHECK(Expression::parse("pi", {}).eval_coords({}) == doctest::Approx(std::numbers::pi));
  CHECK(Expression::parse("max(1, 2) + min(1, 2)", {}).eval_coords({}) == 3.0);
}
