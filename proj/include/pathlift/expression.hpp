#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pathlift {

/// Values bound to the variables of an expression: the path parameter `s`,
/// coordinates `x1..xn` and velocity components `v1..vn`.
struct Bindings {
  double s = 0.0;
  std::span<const double> x;
  std::span<const double> v;
};

/// Immutable arithmetic expression tree.
///
/// Grammar (whitespace insensitive):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'pi' | 's' | 'x'k | 'v'k | func '(' expr ')' | '(' expr ')'
///
/// so `^` binds tighter than unary minus, which binds tighter than `*` and
/// `/`. `^` is right associative: `2^3^2` is 512 and `-2^2` is -4. A minus
/// directly in front of a numeric literal folds into a negative literal.
class Expression {
 public:
  enum class Kind { Literal, Pi, Param, Coord, Velocity, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Cot };

  struct Node;

  /// Constant zero.
  Expression();

  static Expression constant(double value);

  /// Evaluates the tree; throws DomainError on log of a nonpositive value,
  /// sqrt of a negative value, division by zero or any non-finite result,
  /// and ValidationError when a referenced variable index is not bound.
  double evaluate(const Bindings& b = {}) const;

  /// Canonical text with minimal parentheses; parse(to_string()) == *this.
  std::string to_string() const;

  /// True when the expression mentions no variable (it may still use `pi`).
  bool is_constant() const;
  bool uses_param() const;
  /// Largest coordinate / velocity index referenced (0 when none).
  int max_coord_index() const;
  int max_velocity_index() const;

  /// Structural equality of the trees.
  friend bool operator==(const Expression& a, const Expression& b);

  const Node& root() const { return *root_; }

  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

 private:
  std::shared_ptr<const Node> root_;
};

struct Expression::Node {
  Kind kind = Kind::Literal;
  double value = 0.0;             // Literal
  int index = 0;                  // Coord / Velocity, 1-based
  Function function = Function::Sin;  // Call
  std::shared_ptr<const Node> lhs;    // unary operand or left operand
  std::shared_ptr<const Node> rhs;
};

/// Parses `text`; throws ParseError (with byte offset) on syntax errors and
/// unknown identifiers.
Expression parse_expression(std::string_view text);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_shortest(double value);

}  // namespace pathlift
