#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psh/error.hpp"

namespace psh {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class VarKind { real, complex };

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::real;
};

// Extended scalar. A complex number stored as a pair of reals; the -infinity
// sentinel is {-inf, 0}.
struct Value {
  double re = 0.0;
  double im = 0.0;

  constexpr Value() = default;
  constexpr Value(double r) : re(r) {}  // NOLINT: implicit from real is intended
  constexpr Value(double r, double i) : re(r), im(i) {}

  bool is_real() const { return im == 0.0; }
  bool is_neg_inf() const { return re == kNegInf && im == 0.0; }
};

/// Immutable parsed scalar expression over declared real/complex variables.
///
/// Grammar (EBNF) is documented in docs/expressions.md. Evaluation is pure and
/// reentrant; a single Expression may be evaluated from many threads.
class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view text, std::vector<VarDecl> declared);
  static Expression constant(double c);

  const std::vector<VarDecl>& free_vars() const { return vars_; }
  int slot(std::string_view name) const;  // -1 when not declared
  // Number of real coordinates: one per real var, two per complex var.
  int real_dimension() const;

  Value eval(std::span<const Value> slots) const;
  Value eval(const std::map<std::string, Value>& binding) const;
  // Convenience for real-valued expressions: throws kind_mismatch when the
  // result has a nonzero imaginary part.
  double eval_real(std::span<const Value> slots) const;
  // Real coordinates laid out as free_vars() order, complex vars as (re, im).
  double eval_coords(std::span<const double> coords) const;

  // Central-difference gradient with respect to the real coordinates.
  std::vector<double> gradient_fd(std::span<const double> coords, double h) const;
  std::vector<double> gradient_fd(const std::map<std::string, Value>& binding, double h) const;

  std::string print() const;
  bool empty() const { return nodes_.empty(); }

  enum class Op { constant, variable, add, sub, mul, div, neg, pow, exp, log, abs2, re, im, max, min };

  struct Node {
    Op op = Op::constant;
    double value = 0.0;  // constant payload
    int slot = -1;       // variable payload
    int exponent = 0;    // pow payload
    int lhs = -1;
    int rhs = -1;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  friend class ExprParser;

  Value eval_node(int index, std::span<const Value> slots) const;
  void print_node(int index, std::string& out) const;
  std::vector<Value> slots_from_coords(std::span<const double> coords) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<VarDecl> vars_;
};

// Scalar helpers shared with the kernels: multiplication with 0 * inf = 0,
// matching the convention that a vanishing coefficient kills a -inf term.
Value operator+(Value a, Value b);
Value operator-(Value a, Value b);
Value operator*(Value a, Value b);

}  // namespace psh
