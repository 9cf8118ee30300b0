#pragma once

// Closed-form scalar expressions over n real variables, parsed from infix
// text and evaluated either as plain doubles or as forward-mode jets.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skt/jet.hpp"

namespace skt {

enum class ExprOp {
  Constant,
  Variable,
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  PowInt,   // integer exponent, evaluated by repeated multiplication
  PowReal,  // general exponent, requires a positive base
  Exp,
  Log,
  Sin,
  Cos,
  Sqrt,
  Abs,
};

struct ExprNode {
  ExprOp op = ExprOp::Constant;
  double constant = 0.0;  // Constant
  int index = 0;          // Variable index, or PowInt exponent
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

/// Maps identifier names to variable indices. Parsing with a table accepts
/// exactly the names in it.
using VariableTable = std::map<std::string, int, std::less<>>;

/// Default table x1..xn.
VariableTable default_variables(std::size_t dimension);

/// An immutable expression tree over `dimension()` variables. Copies share
/// the tree; evaluation is reentrant.
class Expression {
 public:
  Expression();  // the constant 0 in one variable

  static Expression constant(std::size_t dimension, double value);
  static Expression variable(std::size_t dimension, int index);

  std::size_t dimension() const { return dimension_; }
  const ExprNode& root() const { return *root_; }

  bool is_constant() const;
  bool uses_variable(int index) const;

  /// Fully parenthesised infix text using the canonical names x1..xn; it
  /// parses back to an equal tree.
  std::string to_string() const;

  /// Structural equality of the trees (and dimensions).
  friend bool operator==(const Expression& a, const Expression& b);

  /// Re-expresses this expression over `dimension` variables, sending old
  /// variable i to new variable index_map[i].
  Expression remap(std::size_t dimension, std::span<const int> index_map) const;

  double evaluate(std::span<const double> point) const;

  /// Value, exact gradient and exact Hessian at `point`.
  Jet2<double> eval_jet2(std::span<const double> point) const;
  /// Value and exact gradient at `point`.
  Jet1<double> eval_jet1(std::span<const double> point) const;

  /// Jet2 over an arbitrary scalar type; S = Jet2<double> yields nested jets.
  template <class S>
  Jet2<S> eval_jet2_generic(std::span<const S> point) const;

  /// Evaluates with caller-seeded variables of any supported number type
  /// (double, Jet1<double>, Jet2<double>, Jet2<Jet2<double>>).
  template <class N>
  N evaluate_with(std::span<const N> variables) const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression operator*(double c, const Expression& a);
  friend Expression exp(const Expression& a);
  friend Expression log(const Expression& a);
  friend Expression pow(const Expression& a, int n);
  friend Expression parse(std::string_view source, std::size_t dimension, const VariableTable& names);

 private:
  Expression(std::size_t dimension, std::shared_ptr<const ExprNode> root);

  std::size_t dimension_ = 1;
  std::shared_ptr<const ExprNode> root_;
};

/// Parses infix text over variables x1..x<dimension>. Precedence, tightest
/// first: ^ (right associative), unary minus, * and /, + and -. Functions:
/// exp log sin cos sqrt abs. Throws ParseError.
Expression parse(std::string_view source, std::size_t dimension);

/// Parses with an explicit name table; the dimension is given separately so
/// several names may alias one index.
Expression parse(std::string_view source, std::size_t dimension, const VariableTable& names);

}  // namespace skt
