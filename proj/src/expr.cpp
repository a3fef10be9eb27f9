#include "psh/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <set>

namespace psh {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax error";
    case ErrorKind::undeclared_variable: return "undeclared variable";
    case ErrorKind::non_integer_exponent: return "non-integer exponent";
    case ErrorKind::division_by_zero: return "division by zero";
    case ErrorKind::kind_mismatch: return "kind mismatch";
    case ErrorKind::singular_stencil: return "singular stencil";
    case ErrorKind::non_integrable: return "non-integrable sample";
    case ErrorKind::empty_domain: return "empty interior";
    case ErrorKind::domain_truncated: return "domain truncated";
    case ErrorKind::rule_too_coarse: return "rule too coarse";
    case ErrorKind::not_admissible: return "weight not admissible";
    case ErrorKind::not_radial: return "not radial";
    case ErrorKind::not_strictly_psh: return "weight not strictly psh";
    case ErrorKind::precondition: return "precondition violated";
    case ErrorKind::field_too_singular: return "field too singular";
    case ErrorKind::solver: return "solver failure";
    case ErrorKind::unsupported_family: return "unsupported family shape";
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "io error";
  }
  return "error";
}

namespace {

double safe_mul(double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  return x * y;
}

}  // namespace

Value operator+(Value a, Value b) {
  if (a.is_neg_inf() || b.is_neg_inf()) {
    if (std::isfinite(a.re) || std::isfinite(b.re)) return Value(kNegInf);
  }
  return {a.re + b.re, a.im + b.im};
}

Value operator-(Value a, Value b) { return a + Value(-b.re, -b.im); }

Value operator*(Value a, Value b) {
  if (a.is_real() && b.is_real()) return Value(safe_mul(a.re, b.re));
  return {safe_mul(a.re, b.re) - safe_mul(a.im, b.im), safe_mul(a.re, b.im) + safe_mul(a.im, b.re)};
}

namespace {

Value divide(Value a, Value b) {
  if (b.re == 0.0 && b.im == 0.0) throw LabError(ErrorKind::division_by_zero, "denominator evaluated to 0");
  if (a.is_real() && b.is_real()) return Value(a.re / b.re);
  const double den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

Value require_real(Value v, const char* op) {
  if (!v.is_real()) throw LabError(ErrorKind::kind_mismatch, std::string(op) + " needs a real argument");
  return v;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view text, Expression& out) : text_(text), out_(out) {}

  int parse_all() {
    const int root = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw LabError(ErrorKind::syntax, msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int add(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int binary(Op op, int l, int r) {
    Expression::Node n;
    n.op = op;
    n.lhs = l;
    n.rhs = r;
    return add(n);
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = binary(Op::add, lhs, parse_product());
      else if (accept('-')) lhs = binary(Op::sub, lhs, parse_product());
      else return lhs;
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = binary(Op::mul, lhs, parse_unary());
      else if (accept('/')) lhs = binary(Op::div, lhs, parse_unary());
      else return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) return binary(Op::neg, parse_unary(), -1);
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (!accept('^')) return base;
    const int e = parse_integer_exponent();
    Expression::Node n;
    n.op = Op::pow;
    n.lhs = base;
    n.exponent = e;
    return add(n);
  }

  int parse_integer_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (accept('-')) negative = true;
    else accept('+');
    skip_ws();
    if (accept('(')) {
      const int e = parse_integer_exponent();
      expect(')');
      return negative ? -e : e;
    }
    const double v = parse_number_literal();
    if (v != std::floor(v) || std::abs(v) > 1024) {
      pos_ = start;
      throw LabError(ErrorKind::non_integer_exponent,
                     "exponent must be an integer literal at position " + std::to_string(start));
    }
    return negative ? -static_cast<int>(v) : static_cast<int>(v);
  }

  double parse_number_literal() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    if (pos_ == start) {
      if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        throw LabError(ErrorKind::non_integer_exponent,
                       "exponent must be an integer literal at position " + std::to_string(start));
      fail("expected number");
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  std::string parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      Expression::Node n;
      n.op = Op::constant;
      n.value = parse_number_literal();
      return add(n);
    }
    if (accept('(')) {
      const int inner = parse_sum();
      expect(')');
      return inner;
    }
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected '") + c + "'");
    const std::size_t ident_pos = pos_;
    const std::string name = parse_identifier();
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      const int slot = out_.slot(name);
      if (slot >= 0) {
        Expression::Node n;
        n.op = Op::variable;
        n.slot = slot;
        return add(n);
      }
      if (name == "pi") {
        Expression::Node n;
        n.value = std::numbers::pi;
        return add(n);
      }
      pos_ = ident_pos;
      throw LabError(ErrorKind::undeclared_variable,
                     "'" + name + "' at position " + std::to_string(ident_pos));
    }
    ++pos_;  // '('
    static const std::map<std::string, Op, std::less<>> unary = {
        {"exp", Op::exp}, {"log", Op::log}, {"abs2", Op::abs2}, {"re", Op::re}, {"im", Op::im}};
    if (auto it = unary.find(name); it != unary.end()) {
      const int arg = parse_sum();
      expect(')');
      return binary(it->second, arg, -1);
    }
    if (name == "max" || name == "min") {
      const int a = parse_sum();
      expect(',');
      const int b = parse_sum();
      expect(')');
      return binary(name == "max" ? Op::max : Op::min, a, b);
    }
    if (name == "pow") {
      const int base = parse_sum();
      expect(',');
      const int e = parse_integer_exponent();
      expect(')');
      Expression::Node n;
      n.op = Op::pow;
      n.lhs = base;
      n.exponent = e;
      return add(n);
    }
    pos_ = ident_pos;
    fail("unknown function '" + name + "'");
  }

  std::string_view text_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, std::vector<VarDecl> declared) {
  std::set<std::string> seen;
  for (const auto& v : declared) {
    if (v.name.empty()) throw LabError(ErrorKind::config, "empty variable name");
    if (!seen.insert(v.name).second) throw LabError(ErrorKind::config, "variable '" + v.name + "' declared twice");
  }
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw LabError(ErrorKind::syntax, "empty expression at position 0");
  Expression e;
  e.vars_ = std::move(declared);
  ExprParser parser(text, e);
  e.root_ = parser.parse_all();
  return e;
}

Expression Expression::constant(double c) {
  Expression e;
  Node n;
  n.value = c;
  e.nodes_.push_back(n);
  e.root_ = 0;
  return e;
}

int Expression::slot(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

int Expression::real_dimension() const {
  int d = 0;
  for (const auto& v : vars_) d += v.kind == VarKind::complex ? 2 : 1;
  return d;
}

Value Expression::eval_node(int index, std::span<const Value> slots) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::constant: return Value(n.value);
    case Op::variable: return slots[static_cast<std::size_t>(n.slot)];
    case Op::add: return eval_node(n.lhs, slots) + eval_node(n.rhs, slots);
    case Op::sub: return eval_node(n.lhs, slots) - eval_node(n.rhs, slots);
    case Op::mul: return eval_node(n.lhs, slots) * eval_node(n.rhs, slots);
    case Op::div: return divide(eval_node(n.lhs, slots), eval_node(n.rhs, slots));
    case Op::neg: {
      const Value v = eval_node(n.lhs, slots);
      return {-v.re, v.im == 0.0 ? 0.0 : -v.im};
    }
    case Op::pow: {
      const Value base = eval_node(n.lhs, slots);
      Value acc(1.0);
      for (int k = 0; k < std::abs(n.exponent); ++k) acc = acc * base;
      return n.exponent < 0 ? divide(Value(1.0), acc) : acc;
    }
    case Op::exp: {
      const Value v = eval_node(n.lhs, slots);
      if (v.is_real()) return Value(std::exp(v.re));
      const double m = std::exp(v.re);
      return {m * std::cos(v.im), m * std::sin(v.im)};
    }
    case Op::log: {
      const Value v = require_real(eval_node(n.lhs, slots), "log");
      if (!(v.re > 0.0)) return Value(kNegInf);
      return Value(std::log(v.re));
    }
    case Op::abs2: {
      const Value v = eval_node(n.lhs, slots);
      return Value(v.re * v.re + v.im * v.im);
    }
    case Op::re: return Value(eval_node(n.lhs, slots).re);
    case Op::im: return Value(eval_node(n.lhs, slots).im);
    case Op::max:
    case Op::min: {
      const Value a = require_real(eval_node(n.lhs, slots), n.op == Op::max ? "max" : "min");
      const Value b = require_real(eval_node(n.rhs, slots), n.op == Op::max ? "max" : "min");
      return Value(n.op == Op::max ? std::max(a.re, b.re) : std::min(a.re, b.re));
    }
  }
  return Value(0.0);
}

Value Expression::eval(std::span<const Value> slots) const {
  if (slots.size() != vars_.size())
    throw LabError(ErrorKind::kind_mismatch, "binding has " + std::to_string(slots.size()) + " values for " +
                                                 std::to_string(vars_.size()) + " variables");
  if (root_ < 0) throw LabError(ErrorKind::syntax, "evaluating an empty expression");
  return eval_node(root_, slots);
}

Value Expression::eval(const std::map<std::string, Value>& binding) const {
  std::vector<Value> slots(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = binding.find(vars_[i].name);
    if (it == binding.end()) throw LabError(ErrorKind::kind_mismatch, "no value bound for '" + vars_[i].name + "'");
    if (vars_[i].kind == VarKind::real && !it->second.is_real())
      throw LabError(ErrorKind::kind_mismatch, "complex value bound to real variable '" + vars_[i].name + "'");
    slots[i] = it->second;
  }
  return eval(slots);
}

double Expression::eval_real(std::span<const Value> slots) const {
  return require_real(eval(slots), "real-valued evaluation").re;
}

std::vector<Value> Expression::slots_from_coords(std::span<const double> coords) const {
  if (static_cast<int>(coords.size()) != real_dimension())
    throw LabError(ErrorKind::kind_mismatch, "coordinate vector has wrong length");
  std::vector<Value> slots(vars_.size());
  std::size_t c = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].kind == VarKind::complex) {
      slots[i] = Value(coords[c], coords[c + 1]);
      c += 2;
    } else {
      slots[i] = Value(coords[c++]);
    }
  }
  return slots;
}

double Expression::eval_coords(std::span<const double> coords) const {
  const auto slots = slots_from_coords(coords);
  return eval_real(slots);
}

std::vector<double> Expression::gradient_fd(std::span<const double> coords, double h) const {
  std::vector<double> x(coords.begin(), coords.end());
  std::vector<double> grad(x.size());
  auto sample = [&]() {
    const double v = eval_coords(x);
    if (!std::isfinite(v)) throw LabError(ErrorKind::singular_stencil, "non-finite value inside the stencil");
    return v;
  };
  sample();  // the stencil centre belongs to the stencil
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = sample();
    x[i] = x0 - h;
    const double fm = sample();
    x[i] = x0;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

std::vector<double> Expression::gradient_fd(const std::map<std::string, Value>& binding, double h) const {
  std::vector<double> coords;
  for (const auto& v : vars_) {
    auto it = binding.find(v.name);
    if (it == binding.end()) throw LabError(ErrorKind::kind_mismatch, "no value bound for '" + v.name + "'");
    coords.push_back(it->second.re);
    if (v.kind == VarKind::complex) coords.push_back(it->second.im);
  }
  return gradient_fd(coords, h);
}

void Expression::print_node(int index, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  auto wrap2 = [&](const char* op) {
    out += '(';
    print_node(n.lhs, out);
    out += op;
    print_node(n.rhs, out);
    out += ')';
  };
  auto call1 = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::variable: out += vars_[static_cast<std::size_t>(n.slot)].name; return;
    case Op::add: wrap2(" + "); return;
    case Op::sub: wrap2(" - "); return;
    case Op::mul: wrap2(" * "); return;
    case Op::div: wrap2(" / "); return;
    case Op::neg:
      out += "(-";
      print_node(n.lhs, out);
      out += ')';
      return;
    case Op::pow:
      out += "pow(";
      print_node(n.lhs, out);
      out += ", " + std::to_string(n.exponent) + ")";
      return;
    case Op::exp: call1("exp"); return;
    case Op::log: call1("log"); return;
    case Op::abs2: call1("abs2"); return;
    case Op::re: call1("re"); return;
    case Op::im: call1("im"); return;
    case Op::max:
    case Op::min:
      out += n.op == Op::max ? "max(" : "min(";
      print_node(n.lhs, out);
      out += ", ";
      print_node(n.rhs, out);
      out += ')';
      return;
  }
}

std::string Expression::print() const {
  std::string out;
  if (root_ >= 0) print_node(root_, out);
  return out;
}

}  // namespace psh
