#include "pathlift/expression.hpp"

#include "pathlift/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace pathlift {

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Kind;
using Function = Expression::Function;

NodePtr make_leaf(Kind kind, double value = 0.0, int index = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->value = value;
  n->index = index;
  return n;
}

NodePtr make_op(Kind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_call(Function f, NodePtr arg) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Call;
  n->function = f;
  n->lhs = std::move(arg);
  return n;
}

struct FunctionName {
  std::string_view name;
  Function function;
};

constexpr std::array<FunctionName, 7> kFunctions{{{"sin", Function::Sin},
                                                  {"cos", Function::Cos},
                                                  {"tan", Function::Tan},
                                                  {"exp", Function::Exp},
                                                  {"log", Function::Log},
                                                  {"sqrt", Function::Sqrt},
                                                  {"cot", Function::Cot}}};

std::string_view function_name(Function f) {
  for (const auto& entry : kFunctions) {
    if (entry.function == f) return entry.name;
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_op(Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_op(Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_op(Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_op(Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      skip_ws();
      const bool bare_number = pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                                       text_[pos_] == '.');
      NodePtr operand = unary();
      if (bare_number && operand->kind == Kind::Literal && !last_primary_parenthesized_) {
        return make_leaf(Kind::Literal, -operand->value);
      }
      return make_op(Kind::Neg, operand);
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      NodePtr exponent = unary();
      last_primary_parenthesized_ = false;
      return make_op(Kind::Pow, base, exponent);
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    last_primary_parenthesized_ = false;
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      last_primary_parenthesized_ = true;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
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
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number '" + std::string(first, last) + "'");
    }
    return make_leaf(Kind::Literal, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    for (const auto& entry : kFunctions) {
      if (entry.name == name) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make_call(entry.function, arg);
      }
    }
    if (name == "s") return make_leaf(Kind::Param);
    if (name == "pi") return make_leaf(Kind::Pi);
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'v') && name[1] != '0') {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1) {
        return make_leaf(name[0] == 'x' ? Kind::Coord : Kind::Velocity, 0.0, index);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool last_primary_parenthesized_ = false;
};

double checked(double value, const char* what) {
  if (!std::isfinite(value)) throw DomainError(std::string("non-finite result in ") + what);
  return value;
}

double eval(const Expression::Node& n, const Bindings& b) {
  switch (n.kind) {
    case Kind::Literal:
      return n.value;
    case Kind::Pi:
      return std::numbers::pi;
    case Kind::Param:
      return b.s;
    case Kind::Coord:
    case Kind::Velocity: {
      const auto& vals = n.kind == Kind::Coord ? b.x : b.v;
      if (static_cast<std::size_t>(n.index) > vals.size()) {
        throw ValidationError(std::string(n.kind == Kind::Coord ? "x" : "v") + std::to_string(n.index) +
                              " is not bound in this context");
      }
      return vals[static_cast<std::size_t>(n.index) - 1];
    }
    case Kind::Neg:
      return -eval(*n.lhs, b);
    case Kind::Add:
      return checked(eval(*n.lhs, b) + eval(*n.rhs, b), "addition");
    case Kind::Sub:
      return checked(eval(*n.lhs, b) - eval(*n.rhs, b), "subtraction");
    case Kind::Mul:
      return checked(eval(*n.lhs, b) * eval(*n.rhs, b), "multiplication");
    case Kind::Div: {
      const double num = eval(*n.lhs, b);
      const double den = eval(*n.rhs, b);
      if (den == 0.0) throw DomainError("division by zero");
      return checked(num / den, "division");
    }
    case Kind::Pow:
      return checked(std::pow(eval(*n.lhs, b), eval(*n.rhs, b)), "power");
    case Kind::Call: {
      const double a = eval(*n.lhs, b);
      switch (n.function) {
        case Function::Sin:
          return std::sin(a);
        case Function::Cos:
          return std::cos(a);
        case Function::Tan:
          return checked(std::tan(a), "tan");
        case Function::Exp:
          return checked(std::exp(a), "exp");
        case Function::Log:
          if (!(a > 0.0)) throw DomainError("log of a nonpositive value");
          return std::log(a);
        case Function::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative value");
          return std::sqrt(a);
        case Function::Cot: {
          const double t = std::tan(a);
          if (t == 0.0) throw DomainError("cot at a multiple of pi");
          return checked(1.0 / t, "cot");
        }
      }
    }
  }
  return 0.0;
}

// Printing precedence levels; a negative literal prints like a negation.
int precedence(const Expression::Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    case Kind::Literal:
      return std::signbit(n.value) ? 3 : 5;
    default:
      return 5;
  }
}

void print(const Expression::Node& n, std::string& out);

void print_child(const Expression::Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Expression::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Literal:
      out += format_shortest(n.value);
      return;
    case Kind::Pi:
      out += "pi";
      return;
    case Kind::Param:
      out += 's';
      return;
    case Kind::Coord:
      out += 'x' + std::to_string(n.index);
      return;
    case Kind::Velocity:
      out += 'v' + std::to_string(n.index);
      return;
    case Kind::Neg:
      out += '-';
      // A bare nonnegative literal after '-' would fold into a literal.
      if (n.lhs->kind == Kind::Literal && !std::signbit(n.lhs->value)) {
        out += '(';
        print(*n.lhs, out);
        out += ')';
      } else {
        print_child(*n.lhs, 3, out);
      }
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const int p = precedence(n);
      print_child(*n.lhs, p, out);
      out += n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? "*" : "/";
      print_child(*n.rhs, p + 1 > 3 ? 3 : p + 1, out);
      return;
    }
    case Kind::Pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      print_child(*n.rhs, 3, out);
      return;
    case Kind::Call:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

bool equal(const Expression::Node& a, const Expression::Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Literal:
      return a.value == b.value && std::signbit(a.value) == std::signbit(b.value);
    case Kind::Coord:
    case Kind::Velocity:
      return a.index == b.index;
    case Kind::Pi:
    case Kind::Param:
      return true;
    case Kind::Call:
      return a.function == b.function && equal(*a.lhs, *b.lhs);
    case Kind::Neg:
      return equal(*a.lhs, *b.lhs);
    default:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

template <class Visit>
void walk(const Expression::Node& n, Visit& visit) {
  visit(n);
  if (n.lhs) walk(*n.lhs, visit);
  if (n.rhs) walk(*n.rhs, visit);
}

}  // namespace

Expression::Expression() : root_(make_leaf(Kind::Literal, 0.0)) {}

Expression Expression::constant(double value) {
  if (!std::isfinite(value)) throw ValidationError("expression constants must be finite");
  return Expression(make_leaf(Kind::Literal, value));
}

double Expression::evaluate(const Bindings& b) const { return eval(*root_, b); }

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool Expression::is_constant() const { return !uses_param() && max_coord_index() == 0 && max_velocity_index() == 0; }

bool Expression::uses_param() const {
  bool found = false;
  auto visit = [&](const Node& n) { found = found || n.kind == Kind::Param; };
  walk(*root_, visit);
  return found;
}

int Expression::max_coord_index() const {
  int m = 0;
  auto visit = [&](const Node& n) {
    if (n.kind == Kind::Coord) m = std::max(m, n.index);
  };
  walk(*root_, visit);
  return m;
}

int Expression::max_velocity_index() const {
  int m = 0;
  auto visit = [&](const Node& n) {
    if (n.kind == Kind::Velocity) m = std::max(m, n.index);
  };
  walk(*root_, visit);
  return m;
}

bool operator==(const Expression& a, const Expression& b) { return equal(*a.root_, *b.root_); }

Expression parse_expression(std::string_view text) { return Expression(Parser(text).parse()); }

std::string format_shortest(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace pathlift
