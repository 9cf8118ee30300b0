#include "skt/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "skt/error.hpp"

namespace skt {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Constant;
  n->constant = v;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Variable;
  n->index = index;
  return n;
}

NodePtr make_unary(ExprOp op, NodePtr arg) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(arg);
  return n;
}

NodePtr make_binary(ExprOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_pow_int(NodePtr base, int exponent) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::PowInt;
  n->index = exponent;
  n->lhs = std::move(base);
  return n;
}

const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::Exp: return "exp";
    case ExprOp::Log: return "log";
    case ExprOp::Sin: return "sin";
    case ExprOp::Cos: return "cos";
    case ExprOp::Sqrt: return "sqrt";
    case ExprOp::Abs: return "abs";
    default: return nullptr;
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case ExprOp::Constant:
      if (n.constant < 0 || std::signbit(n.constant)) {
        out += "(" + format_double(n.constant) + ")";
      } else {
        out += format_double(n.constant);
      }
      return;
    case ExprOp::Variable:
      out += "x" + std::to_string(n.index + 1);
      return;
    case ExprOp::Negate:
      out += "(-";
      print(*n.lhs, out);
      out += ")";
      return;
    case ExprOp::Add:
    case ExprOp::Subtract:
    case ExprOp::Multiply:
    case ExprOp::Divide:
    case ExprOp::PowReal: {
      const char* sym = n.op == ExprOp::Add        ? " + "
                        : n.op == ExprOp::Subtract ? " - "
                        : n.op == ExprOp::Multiply ? " * "
                        : n.op == ExprOp::Divide   ? " / "
                                                   : " ^ ";
      out += "(";
      print(*n.lhs, out);
      out += sym;
      print(*n.rhs, out);
      out += ")";
      return;
    }
    case ExprOp::PowInt:
      out += "(";
      print(*n.lhs, out);
      out += " ^ " + std::to_string(n.index) + ")";
      return;
    default:
      out += function_name(n.op);
      out += "(";
      print(*n.lhs, out);
      out += ")";
      return;
  }
}

std::string node_text(const ExprNode& n) {
  std::string s;
  print(n, s);
  return s;
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case ExprOp::Constant:
      return a.constant == b.constant || (std::isnan(a.constant) && std::isnan(b.constant));
    case ExprOp::Variable:
      return a.index == b.index;
    case ExprOp::PowInt:
      return a.index == b.index && nodes_equal(*a.lhs, *b.lhs);
    default:
      break;
  }
  if (!nodes_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs || b.rhs) return a.rhs && b.rhs && nodes_equal(*a.rhs, *b.rhs);
  return true;
}

// --------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, std::size_t dimension, const VariableTable& names)
      : src_(src), dimension_(dimension), names_(names) {}

  NodePtr parse_all() {
    skip_space();
    if (pos_ >= src_.size()) fail("expected expression, found end of input");
    NodePtr e = parse_sum();
    skip_space();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(ExprOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(ExprOp::Subtract, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(ExprOp::Multiply, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(ExprOp::Divide, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(ExprOp::Negate, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!accept('^')) return base;
    NodePtr exponent = parse_exponent();
    // Integer-valued literal exponents (optionally negated) become PowInt.
    const ExprNode* e = exponent.get();
    bool negated = false;
    if (e->op == ExprOp::Negate) {
      negated = true;
      e = e->lhs.get();
    }
    if (e->op == ExprOp::Constant && std::floor(e->constant) == e->constant &&
        std::abs(e->constant) <= 1024.0) {
      const int n = static_cast<int>(e->constant);
      return make_pow_int(base, negated ? -n : n);
    }
    return make_binary(ExprOp::PowReal, base, exponent);
  }

  NodePtr parse_exponent() {
    if (accept('-')) return make_unary(ExprOp::Negate, parse_exponent());
    if (accept('+')) return parse_exponent();
    return parse_power();
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("expected operand, found end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("expected operand, found '") + c + "'");
  }

  NodePtr parse_number() {
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    static const std::map<std::string_view, ExprOp> functions = {
        {"exp", ExprOp::Exp},   {"log", ExprOp::Log},   {"sin", ExprOp::Sin},
        {"cos", ExprOp::Cos},   {"sqrt", ExprOp::Sqrt}, {"abs", ExprOp::Abs},
    };
    if (auto f = functions.find(name); f != functions.end()) {
      if (!accept('(')) fail("expected '(' after function '" + std::string(name) + "'");
      NodePtr arg = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return make_unary(f->second, arg);
    }
    auto v = names_.find(name);
    if (v == names_.end()) {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (v->second < 0 || static_cast<std::size_t>(v->second) >= dimension_) {
      pos_ = start;
      fail("variable '" + std::string(name) + "' out of range for dimension " +
           std::to_string(dimension_));
    }
    return make_variable(v->second);
  }

  std::string_view src_;
  std::size_t dimension_;
  const VariableTable& names_;
  std::size_t pos_ = 0;
};

// --------------------------------------------------------------------------
// Gradient jet with inline storage, used by eval_jet1 for small dimensions.

constexpr std::size_t kSmallJet = 12;

struct SmallJet {
  double value = 0.0;
  std::size_t n = 0;
  std::array<double, kSmallJet> grad{};
};

using skt::lift;
using skt::primal;

double primal(const SmallJet& a) { return a.value; }
SmallJet lift(const SmallJet& like, double c) {
  SmallJet r;
  r.n = like.n;
  r.value = c;
  return r;
}
SmallJet chain(const SmallJet& a, double f0, double f1) {
  SmallJet r;
  r.n = a.n;
  r.value = f0;
  for (std::size_t i = 0; i < a.n; ++i) r.grad[i] = f1 * a.grad[i];
  return r;
}
SmallJet operator-(const SmallJet& a) { return chain(a, -a.value, -1.0); }
SmallJet operator+(SmallJet a, const SmallJet& b) {
  a.value += b.value;
  for (std::size_t i = 0; i < a.n; ++i) a.grad[i] += b.grad[i];
  return a;
}
SmallJet operator-(SmallJet a, const SmallJet& b) {
  a.value -= b.value;
  for (std::size_t i = 0; i < a.n; ++i) a.grad[i] -= b.grad[i];
  return a;
}
SmallJet operator*(const SmallJet& a, const SmallJet& b) {
  SmallJet r;
  r.n = a.n;
  r.value = a.value * b.value;
  for (std::size_t i = 0; i < a.n; ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
  return r;
}
SmallJet operator/(const SmallJet& a, const SmallJet& b) {
  const double inv = 1.0 / b.value;
  return a * chain(b, inv, -inv * inv);
}
SmallJet operator/(double c, const SmallJet& a) {
  const double inv = 1.0 / a.value;
  return chain(a, c * inv, -c * inv * inv);
}
SmallJet exp(const SmallJet& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e);
}
SmallJet log(const SmallJet& a) { return chain(a, std::log(a.value), 1.0 / a.value); }
SmallJet sin(const SmallJet& a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
SmallJet cos(const SmallJet& a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }
SmallJet sqrt(const SmallJet& a) {
  const double r = std::sqrt(a.value);
  return chain(a, r, 0.5 / r);
}
SmallJet abs(const SmallJet& a) {
  const double s = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
  return chain(a, std::abs(a.value), s);
}

// --------------------------------------------------------------------------
// Evaluation

template <class N>
N eval_node(const ExprNode& n, std::span<const N> vars) {
  const auto fail = [&n](const std::string& msg) -> void { throw DomainError(msg, node_text(n)); };
  switch (n.op) {
    case ExprOp::Constant:
      return lift(vars[0], n.constant);
    case ExprOp::Variable:
      return vars[static_cast<std::size_t>(n.index)];
    case ExprOp::Negate:
      return -eval_node(*n.lhs, vars);
    case ExprOp::Add:
      return eval_node(*n.lhs, vars) + eval_node(*n.rhs, vars);
    case ExprOp::Subtract:
      return eval_node(*n.lhs, vars) - eval_node(*n.rhs, vars);
    case ExprOp::Multiply:
      return eval_node(*n.lhs, vars) * eval_node(*n.rhs, vars);
    case ExprOp::Divide: {
      N num = eval_node(*n.lhs, vars);
      N den = eval_node(*n.rhs, vars);
      if (primal(den) == 0.0) fail("division by zero");
      return num / den;
    }
    case ExprOp::PowInt: {
      N base = eval_node(*n.lhs, vars);
      if (n.index < 0 && primal(base) == 0.0) fail("negative power of zero");
      return pow_int(base, n.index);
    }
    case ExprOp::PowReal: {
      N base = eval_node(*n.lhs, vars);
      if (!(primal(base) > 0.0)) fail("non-integer power of a non-positive base");
      N expo = eval_node(*n.rhs, vars);
      using std::exp;
      using std::log;
      return exp(expo * log(base));
    }
    case ExprOp::Exp: {
      using std::exp;
      return exp(eval_node(*n.lhs, vars));
    }
    case ExprOp::Log: {
      N a = eval_node(*n.lhs, vars);
      if (!(primal(a) > 0.0)) fail("log of a non-positive value");
      using std::log;
      return log(a);
    }
    case ExprOp::Sin: {
      using std::sin;
      return sin(eval_node(*n.lhs, vars));
    }
    case ExprOp::Cos: {
      using std::cos;
      return cos(eval_node(*n.lhs, vars));
    }
    case ExprOp::Sqrt: {
      N a = eval_node(*n.lhs, vars);
      // Derivatives of sqrt are unbounded at 0; plain values are fine there.
      if constexpr (std::is_same_v<N, double>) {
        if (a < 0.0) fail("sqrt of a negative value");
      } else {
        if (!(primal(a) > 0.0)) fail("sqrt is not differentiable at a non-positive value");
      }
      using std::sqrt;
      return sqrt(a);
    }
    case ExprOp::Abs: {
      using std::abs;
      return abs(eval_node(*n.lhs, vars));
    }
  }
  throw Error("corrupt expression node");
}

bool node_uses(const ExprNode& n, int index) {
  if (n.op == ExprOp::Variable) return n.index == index;
  if (n.lhs && node_uses(*n.lhs, index)) return true;
  return n.rhs && node_uses(*n.rhs, index);
}

bool node_constant(const ExprNode& n) {
  if (n.op == ExprOp::Variable) return false;
  if (n.lhs && !node_constant(*n.lhs)) return false;
  return !n.rhs || node_constant(*n.rhs);
}

NodePtr remap_node(const NodePtr& n, std::span<const int> map) {
  if (n->op == ExprOp::Variable) return make_variable(map[static_cast<std::size_t>(n->index)]);
  if (!n->lhs) return n;
  auto copy = std::make_shared<ExprNode>(*n);
  copy->lhs = remap_node(n->lhs, map);
  if (n->rhs) copy->rhs = remap_node(n->rhs, map);
  return copy;
}

void check_same_dimension(const Expression& a, const Expression& b) {
  if (a.dimension() != b.dimension()) throw Error("expression dimensions differ");
}

}  // namespace

// --------------------------------------------------------------------------

VariableTable default_variables(std::size_t dimension) {
  VariableTable t;
  for (std::size_t i = 0; i < dimension; ++i) t.emplace("x" + std::to_string(i + 1), static_cast<int>(i));
  return t;
}

Expression::Expression() : dimension_(1), root_(make_constant(0.0)) {}

Expression::Expression(std::size_t dimension, std::shared_ptr<const ExprNode> root)
    : dimension_(dimension), root_(std::move(root)) {}

Expression Expression::constant(std::size_t dimension, double value) {
  return Expression(dimension, make_constant(value));
}

Expression Expression::variable(std::size_t dimension, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= dimension) {
    throw Error("variable index out of range");
  }
  return Expression(dimension, make_variable(index));
}

bool Expression::is_constant() const { return node_constant(*root_); }

bool Expression::uses_variable(int index) const { return node_uses(*root_, index); }

std::string Expression::to_string() const { return node_text(*root_); }

bool operator==(const Expression& a, const Expression& b) {
  return a.dimension_ == b.dimension_ && nodes_equal(*a.root_, *b.root_);
}

Expression Expression::remap(std::size_t dimension, std::span<const int> index_map) const {
  if (index_map.size() != dimension_) throw Error("remap: index map has wrong length");
  for (int target : index_map) {
    if (target < 0 || static_cast<std::size_t>(target) >= dimension) {
      throw Error("remap: target index out of range");
    }
  }
  return Expression(dimension, remap_node(root_, index_map));
}

template <class N>
N Expression::evaluate_with(std::span<const N> variables) const {
  if (variables.size() != dimension_) {
    throw Error("expected " + std::to_string(dimension_) + " coordinates, got " +
                std::to_string(variables.size()));
  }
  return eval_node<N>(*root_, variables);
}

double Expression::evaluate(std::span<const double> point) const { return evaluate_with<double>(point); }

template <class S>
Jet2<S> Expression::eval_jet2_generic(std::span<const S> point) const {
  if (point.size() != dimension_) {
    throw Error("expected " + std::to_string(dimension_) + " coordinates, got " +
                std::to_string(point.size()));
  }
  std::vector<Jet2<S>> vars;
  vars.reserve(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) vars.push_back(Jet2<S>::variable(dimension_, i, point[i]));
  return eval_node<Jet2<S>>(*root_, vars);
}

Jet2<double> Expression::eval_jet2(std::span<const double> point) const {
  return eval_jet2_generic<double>(point);
}

Jet1<double> Expression::eval_jet1(std::span<const double> point) const {
  if (point.size() != dimension_) {
    throw Error("expected " + std::to_string(dimension_) + " coordinates, got " +
                std::to_string(point.size()));
  }
  if (dimension_ <= kSmallJet) {
    std::array<SmallJet, kSmallJet> vars;
    for (std::size_t i = 0; i < dimension_; ++i) {
      vars[i].n = dimension_;
      vars[i].value = point[i];
      vars[i].grad[i] = 1.0;
    }
    const SmallJet r = eval_node<SmallJet>(*root_, std::span<const SmallJet>(vars.data(), dimension_));
    Jet1<double> out;
    out.value = r.value;
    out.grad.assign(r.grad.begin(), r.grad.begin() + static_cast<std::ptrdiff_t>(dimension_));
    return out;
  }
  std::vector<Jet1<double>> vars;
  vars.reserve(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) vars.push_back(Jet1<double>::variable(dimension_, i, point[i]));
  return eval_node<Jet1<double>>(*root_, vars);
}

template Jet2<double> Expression::eval_jet2_generic<double>(std::span<const double>) const;
template Jet2<Jet2<double>> Expression::eval_jet2_generic<Jet2<double>>(std::span<const Jet2<double>>) const;
template double Expression::evaluate_with<double>(std::span<const double>) const;
template Jet1<double> Expression::evaluate_with<Jet1<double>>(std::span<const Jet1<double>>) const;
template Jet2<double> Expression::evaluate_with<Jet2<double>>(std::span<const Jet2<double>>) const;
template Jet2<Jet2<double>> Expression::evaluate_with<Jet2<Jet2<double>>>(
    std::span<const Jet2<Jet2<double>>>) const;

Expression operator+(const Expression& a, const Expression& b) {
  check_same_dimension(a, b);
  return Expression(a.dimension_, make_binary(ExprOp::Add, a.root_, b.root_));
}
Expression operator-(const Expression& a, const Expression& b) {
  check_same_dimension(a, b);
  return Expression(a.dimension_, make_binary(ExprOp::Subtract, a.root_, b.root_));
}
Expression operator*(const Expression& a, const Expression& b) {
  check_same_dimension(a, b);
  return Expression(a.dimension_, make_binary(ExprOp::Multiply, a.root_, b.root_));
}
Expression operator/(const Expression& a, const Expression& b) {
  check_same_dimension(a, b);
  return Expression(a.dimension_, make_binary(ExprOp::Divide, a.root_, b.root_));
}
Expression operator-(const Expression& a) {
  return Expression(a.dimension_, make_unary(ExprOp::Negate, a.root_));
}
Expression operator*(double c, const Expression& a) {
  return Expression(a.dimension_, make_binary(ExprOp::Multiply, make_constant(c), a.root_));
}
Expression exp(const Expression& a) { return Expression(a.dimension_, make_unary(ExprOp::Exp, a.root_)); }
Expression log(const Expression& a) { return Expression(a.dimension_, make_unary(ExprOp::Log, a.root_)); }
Expression pow(const Expression& a, int n) { return Expression(a.dimension_, make_pow_int(a.root_, n)); }

Expression parse(std::string_view source, std::size_t dimension) {
  return parse(source, dimension, default_variables(dimension));
}

Expression parse(std::string_view source, std::size_t dimension, const VariableTable& names) {
  if (dimension == 0) throw ParseError(0, "dimension must be at least 1");
  Parser p(source, dimension, names);
  return Expression(dimension, p.parse_all());
}

}  // namespace skt
