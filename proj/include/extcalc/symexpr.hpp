#pragma once

// Symbolic scalar expressions over chart coordinates.
//
// An Expr is an immutable, shareable DAG node. Coordinates are referenced by
// index; names only matter for parsing and printing. Arithmetic through the
// overloaded operators goes through light constant-folding constructors, so
// expressions produced by differentiation stay compact. Zero-testing is never
// done symbolically: callers evaluate at sample points.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace extcalc {

/// Exact rational constant with 64-bit numerator/denominator.
/// Arithmetic throws std::overflow_error if a result leaves the 64-bit range.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a);
  friend bool operator==(const Rational& a, const Rational& b) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class Op : std::uint8_t { Const, Var, Add, Mul, Div, Pow, Neg, Sin, Cos, Exp, Ln };

class Expr;

namespace detail {
struct Node;
struct Access;
}

class Expr {
 public:
  Expr();  // the constant 0
  Expr(std::int64_t value);  // NOLINT(implicit)
  Expr(int value) : Expr(static_cast<std::int64_t>(value)) {}  // NOLINT(implicit)
  Expr(const Rational& value);  // NOLINT(implicit)

  static Expr var(int index);

  // Raw node constructors: no folding. Used by the parser so that parse()
  // returns the AST the grammar describes.
  static Expr raw(Op op, Expr a, Expr b = {});
  static Expr raw_pow(Expr base, int exponent);

  Op op() const;
  const Rational& constant() const;  // valid when op() == Const
  int var_index() const;              // valid when op() == Var
  int exponent() const;               // valid when op() == Pow
  Expr lhs() const;
  Expr rhs() const;
  /// Bitmask of coordinate indices this expression depends on (index < 64).
  std::uint64_t var_mask() const;

  bool is_const() const { return op() == Op::Const; }
  bool is_zero() const;
  bool is_one() const;

  /// Pointer identity of the underlying node.
  const void* id() const { return node_.get(); }
  bool same_node(const Expr& other) const { return node_ == other.node_; }
  /// Structural equality (deep comparison).
  bool structurally_equal(const Expr& other) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
  friend struct detail::Access;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);

/// Balanced sum of many terms (keeps tree depth logarithmic).
Expr sum(std::span<const Expr> terms);

/// Rebuilds e through the folding constructors. Evaluation-equivalent to e.
Expr simplify(const Expr& e);

/// Number of distinct nodes in the DAG.
std::size_t node_count(const Expr& e);

// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses text using the given coordinate names.
///
/// Grammar (lowest to highest precedence): + -, then * /, then unary minus,
/// then ^ (right-associative, integer exponents only). Functions: sin, cos,
/// exp, ln. Numeric literals are read exactly as rationals.
Expr parse(std::string_view text, std::span<const std::string> coords);

/// Prints with minimal parentheses; the output re-parses to an
/// evaluation-equivalent expression.
std::string print(const Expr& e, std::span<const std::string> coords);

Expr differentiate(const Expr& e, int var);

/// Evaluates e with coords[i] bound to the i-th coordinate.
/// Throws DomainError naming the failing subexpression (printed with `names`
/// when given, otherwise with placeholder names x0, x1, ...).
double evaluate(const Expr& e, std::span<const double> coords,
                std::span<const std::string> names = {});

/// A compiled, flattened form of one or more expressions for repeated
/// evaluation at many points. Intermediate values are held in long double;
/// results are rounded to double once at the end.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> roots, std::vector<std::string> names = {});
  explicit Tape(const Expr& root, std::vector<std::string> names = {})
      : Tape(std::span<const Expr>(&root, 1), std::move(names)) {}

  /// Values of every root at the given coordinates.
  std::vector<double> run(std::span<const double> coords) const;
  std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    int k = 0;  // var index or exponent
    long double c = 0.0L;
  };
  std::vector<Instr> code_;
  std::vector<int> roots_;
  std::vector<Expr> nodes_;  // nodes_[i] produced code_[i]; kept for diagnostics
  std::vector<std::string> names_;
  [[noreturn]] void fail(std::size_t at, const std::string& what) const;
};

}  // namespace extcalc
