#include "extcalc/symexpr.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace extcalc {

// ---------------------------------------------------------------------------
// Rational

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make_rational(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    num_ = -n;
    den_ = -d;
  }
  std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_rational(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                       static_cast<__int128>(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
  return make_rational(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return make_rational(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}
Rational operator-(const Rational& a) { return Rational(narrow(-static_cast<__int128>(a.num_)), a.den_); }

// ---------------------------------------------------------------------------
// Nodes

namespace detail {

struct Node {
  Op op = Op::Const;
  Rational c;
  int k = 0;  // var index or exponent
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  std::uint64_t mask = 0;
};

struct Access {
  static const Node& node(const Expr& e) { return *e.node_; }
  static const std::shared_ptr<const Node>& ptr(const Expr& e) { return e.node_; }
  static Expr wrap(std::shared_ptr<const Node> p) { return Expr(std::move(p)); }
  static Expr make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }
};

}  // namespace detail

using detail::Access;
using detail::Node;

namespace {

std::shared_ptr<const Node> const_node(const Rational& r) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->c = r;
  return n;
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> z = const_node(Rational(0));
  return z;
}
const std::shared_ptr<const Node>& one_node() {
  static const std::shared_ptr<const Node> o = const_node(Rational(1));
  return o;
}

Expr node_expr(Op op, const Expr& a, const Expr& b = {}, int k = 0) {
  Node n;
  n.op = op;
  n.k = k;
  n.a = Access::ptr(a);
  n.mask = a.var_mask();
  if (op == Op::Add || op == Op::Mul || op == Op::Div) {
    n.b = Access::ptr(b);
    n.mask |= b.var_mask();
  }
  return Access::make(std::move(n));
}

std::optional<Rational> try_fold(Op op, const Rational& x, const Rational& y) {
  try {
    switch (op) {
      case Op::Add:
        return x + y;
      case Op::Mul:
        return x * y;
      case Op::Div:
        if (y.is_zero()) return std::nullopt;
        return x / y;
      default:
        return std::nullopt;
    }
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

std::optional<Rational> try_pow(const Rational& x, int k) {
  if (x.is_zero() && k < 0) return std::nullopt;
  try {
    Rational base = k < 0 ? Rational(1) / x : x;
    Rational out(1);
    for (int i = 0; i < std::abs(k); ++i) out = out * base;
    return out;
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(std::int64_t value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) {
  if (value.is_zero())
    node_ = zero_node();
  else if (value.is_one())
    node_ = one_node();
  else
    node_ = const_node(value);
}

Expr Expr::var(int index) {
  if (index < 0 || index >= 64) throw std::out_of_range("coordinate index out of range");
  Node n;
  n.op = Op::Var;
  n.k = index;
  n.mask = std::uint64_t{1} << index;
  return Access::make(std::move(n));
}

Expr Expr::raw(Op op, Expr a, Expr b) {
  if (op == Op::Const || op == Op::Var || op == Op::Pow)
    throw std::invalid_argument("Expr::raw: use the dedicated constructor");
  return node_expr(op, a, b);
}

Expr Expr::raw_pow(Expr base, int exponent) { return node_expr(Op::Pow, base, {}, exponent); }

Op Expr::op() const { return node_->op; }
const Rational& Expr::constant() const { return node_->c; }
int Expr::var_index() const { return node_->k; }
int Expr::exponent() const { return node_->k; }
Expr Expr::lhs() const { return Access::wrap(node_->a); }
Expr Expr::rhs() const { return Access::wrap(node_->b); }
std::uint64_t Expr::var_mask() const { return node_->mask; }
bool Expr::is_zero() const { return node_->op == Op::Const && node_->c.is_zero(); }
bool Expr::is_one() const { return node_->op == Op::Const && node_->c.is_one(); }

bool Expr::structurally_equal(const Expr& other) const {
  if (node_ == other.node_) return true;
  const Node& x = *node_;
  const Node& y = *other.node_;
  if (x.op != y.op || x.k != y.k || x.mask != y.mask) return false;
  if (x.op == Op::Const) return x.c == y.c;
  if (x.op == Op::Var) return true;
  if (!lhs().structurally_equal(other.lhs())) return false;
  if (x.b) return rhs().structurally_equal(other.rhs());
  return true;
}

// ---------------------------------------------------------------------------
// Folding constructors

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_const() && b.is_const())
    if (auto r = try_fold(Op::Add, a.constant(), b.constant())) return Expr(*r);
  return node_expr(Op::Add, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_const()) {
    try {
      return Expr(-a.constant());
    } catch (const std::overflow_error&) {
    }
  }
  if (a.op() == Op::Neg) return a.lhs();
  return node_expr(Op::Neg, a);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_const() && b.is_const())
    if (auto r = try_fold(Op::Mul, a.constant(), b.constant())) return Expr(*r);
  if (a.is_const() && a.constant() == Rational(-1)) return -b;
  if (b.is_const() && b.constant() == Rational(-1)) return -a;
  if (a.op() == Op::Neg && b.op() == Op::Neg) return a.lhs() * b.lhs();
  return node_expr(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (a.is_const() && b.is_const())
    if (auto r = try_fold(Op::Div, a.constant(), b.constant())) return Expr(*r);
  if (a.is_zero() && !(b.is_const() && b.constant().is_zero())) return Expr();
  return node_expr(Op::Div, a, b);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_const())
    if (auto r = try_pow(base.constant(), exponent)) return Expr(*r);
  if (base.op() == Op::Pow) {
    long long k = static_cast<long long>(base.exponent()) * exponent;
    if (k > INT32_MIN && k < INT32_MAX) return pow(base.lhs(), static_cast<int>(k));
  }
  return node_expr(Op::Pow, base, {}, exponent);
}

Expr sin(const Expr& e) { return e.is_zero() ? Expr() : node_expr(Op::Sin, e); }
Expr cos(const Expr& e) { return e.is_zero() ? Expr(1) : node_expr(Op::Cos, e); }
Expr exp(const Expr& e) { return e.is_zero() ? Expr(1) : node_expr(Op::Exp, e); }
Expr ln(const Expr& e) { return e.is_one() ? Expr() : node_expr(Op::Ln, e); }

Expr sum(std::span<const Expr> terms) {
  if (terms.empty()) return Expr();
  if (terms.size() == 1) return terms[0];
  std::vector<Expr> layer;
  for (const Expr& t : terms)
    if (!t.is_zero()) layer.push_back(t);
  if (layer.empty()) return Expr();
  while (layer.size() > 1) {
    std::vector<Expr> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(layer[i] + layer[i + 1]);
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer = std::move(next);
  }
  return layer[0];
}

namespace {

Expr rebuild(const Expr& e, const Expr& a, const Expr& b) {
  switch (e.op()) {
    case Op::Add:
      return a + b;
    case Op::Mul:
      return a * b;
    case Op::Div:
      return a / b;
    case Op::Neg:
      return -a;
    case Op::Pow:
      return pow(a, e.exponent());
    case Op::Sin:
      return sin(a);
    case Op::Cos:
      return cos(a);
    case Op::Exp:
      return exp(a);
    case Op::Ln:
      return ln(a);
    default:
      return e;
  }
}

Expr simplify_rec(const Expr& e, std::unordered_map<const void*, Expr>& memo) {
  if (e.op() == Op::Const || e.op() == Op::Var) return e;
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr a = simplify_rec(e.lhs(), memo);
  Expr b = (e.op() == Op::Add || e.op() == Op::Mul || e.op() == Op::Div) ? simplify_rec(e.rhs(), memo) : Expr();
  Expr out = rebuild(e, a, b);
  memo.emplace(e.id(), out);
  return out;
}

bool is_binary(Op op) { return op == Op::Add || op == Op::Mul || op == Op::Div; }
bool is_leaf(Op op) { return op == Op::Const || op == Op::Var; }

}  // namespace

Expr simplify(const Expr& e) {
  std::unordered_map<const void*, Expr> memo;
  return simplify_rec(e, memo);
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    if (!seen.insert(x.id()).second) continue;
    if (is_leaf(x.op())) continue;
    stack.push_back(x.lhs());
    if (is_binary(x.op())) stack.push_back(x.rhs());
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr diff_rec(const Expr& e, int v, std::unordered_map<const void*, Expr>& memo) {
  if (!(e.var_mask() & (std::uint64_t{1} << v))) return Expr();
  if (e.op() == Op::Var) return Expr(1);
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  const Expr a = e.lhs();
  Expr out;
  switch (e.op()) {
    case Op::Add:
      out = diff_rec(a, v, memo) + diff_rec(e.rhs(), v, memo);
      break;
    case Op::Mul: {
      const Expr b = e.rhs();
      out = diff_rec(a, v, memo) * b + a * diff_rec(b, v, memo);
      break;
    }
    case Op::Div: {
      const Expr b = e.rhs();
      const Expr da = diff_rec(a, v, memo);
      const Expr db = diff_rec(b, v, memo);
      out = da / b - (a * db) / pow(b, 2);
      break;
    }
    case Op::Neg:
      out = -diff_rec(a, v, memo);
      break;
    case Op::Pow: {
      const int k = e.exponent();
      out = Expr(k) * pow(a, k - 1) * diff_rec(a, v, memo);
      break;
    }
    case Op::Sin:
      out = cos(a) * diff_rec(a, v, memo);
      break;
    case Op::Cos:
      out = -(sin(a) * diff_rec(a, v, memo));
      break;
    case Op::Exp:
      out = e * diff_rec(a, v, memo);
      break;
    case Op::Ln:
      out = diff_rec(a, v, memo) / a;
      break;
    default:
      break;
  }
  memo.emplace(e.id(), out);
  return out;
}

}  // namespace

Expr differentiate(const Expr& e, int var) {
  if (var < 0 || var >= 64) throw std::out_of_range("coordinate index out of range");
  std::unordered_map<const void*, Expr> memo;
  return diff_rec(e, var, memo);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Const: {
      const Rational& c = e.constant();
      if (!c.is_integer()) return 2;
      return c.num() < 0 ? 3 : 5;
    }
    case Op::Var:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln:
      return 5;
    case Op::Pow:
      return 4;
    case Op::Neg:
      return 3;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Add:
      return 1;
  }
  return 0;
}

std::string coord_name(int k, std::span<const std::string> coords) {
  if (k < static_cast<int>(coords.size())) return coords[k];
  return "x" + std::to_string(k);
}

void print_rec(const Expr& e, std::span<const std::string> coords, int min_prec, std::string& out) {
  const bool paren = precedence(e) < min_prec;
  if (paren) out += '(';
  switch (e.op()) {
    case Op::Const:
      out += e.constant().str();
      break;
    case Op::Var:
      out += coord_name(e.var_index(), coords);
      break;
    case Op::Add: {
      print_rec(e.lhs(), coords, 1, out);
      const Expr b = e.rhs();
      if (b.op() == Op::Neg) {
        out += " - ";
        print_rec(b.lhs(), coords, 2, out);
      } else if (b.is_const() && b.constant().num() < 0) {
        out += " - ";
        print_rec(Expr(-b.constant()), coords, 2, out);
      } else {
        out += " + ";
        print_rec(b, coords, 2, out);
      }
      break;
    }
    case Op::Mul:
      print_rec(e.lhs(), coords, 2, out);
      out += '*';
      print_rec(e.rhs(), coords, 3, out);
      break;
    case Op::Div:
      print_rec(e.lhs(), coords, 2, out);
      out += '/';
      print_rec(e.rhs(), coords, 3, out);
      break;
    case Op::Neg:
      out += '-';
      print_rec(e.lhs(), coords, 3, out);
      break;
    case Op::Pow:
      print_rec(e.lhs(), coords, 5, out);
      out += '^';
      if (e.exponent() < 0)
        out += "(" + std::to_string(e.exponent()) + ")";
      else
        out += std::to_string(e.exponent());
      break;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln: {
      static const char* names[] = {"sin", "cos", "exp", "ln"};
      out += names[static_cast<int>(e.op()) - static_cast<int>(Op::Sin)];
      out += '(';
      print_rec(e.lhs(), coords, 0, out);
      out += ')';
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace

std::string print(const Expr& e, std::span<const std::string> coords) {
  std::string out;
  print_rec(e, coords, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords) : text_(text), coords_(coords) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) unexpected();
    return e;
  }

 private:
  std::string_view text_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  [[noreturn]] void unexpected() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("syntax error: unexpected end of input", pos_);
    throw ParseError(std::string("syntax error: unexpected '") + text_[pos_] + "'", pos_);
  }
  void expect(char c) {
    if (peek() != c) unexpected();
    ++pos_;
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        e = Expr::raw(Op::Add, e, parse_product());
      } else if (c == '-') {
        ++pos_;
        e = Expr::raw(Op::Add, e, negate(parse_product()));
      } else {
        return e;
      }
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        e = Expr::raw(Op::Mul, e, parse_unary());
      } else if (c == '/') {
        ++pos_;
        e = Expr::raw(Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (peek() == '-') {
      ++pos_;
      return negate(parse_unary());
    }
    return parse_power();
  }

  // Negated literals become negative constants so that printed output
  // re-parses to the same tree.
  static Expr negate(const Expr& e) {
    if (e.is_const()) return Expr(-e.constant());
    return Expr::raw(Op::Neg, e);
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    const std::size_t at = pos_;
    Expr exponent = simplify(parse_exponent());
    if (!exponent.is_const() || !exponent.constant().is_integer() ||
        std::llabs(exponent.constant().num()) > 1'000'000)
      throw ParseError("exponent must be an integer constant", at);
    return Expr::raw_pow(base, static_cast<int>(exponent.constant().num()));
  }

  Expr parse_exponent() {
    if (peek() == '-') {
      ++pos_;
      return Expr::raw(Op::Neg, parse_exponent());
    }
    return parse_power();
  }

  Expr parse_primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    unexpected();
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    __int128 num = 0;
    std::int64_t den = 1;
    bool digits = false;
    auto push_digit = [&](char d) {
      num = num * 10 + (d - '0');
      if (num > INT64_MAX) throw ParseError("numeric literal too large", start);
      digits = true;
    };
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) push_digit(text_[pos_++]);
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        push_digit(text_[pos_++]);
        if (den > INT64_MAX / 10) throw ParseError("numeric literal too precise", start);
        den *= 10;
      }
    }
    if (!digits) throw ParseError("syntax error: malformed number", start);
    Rational value(static_cast<std::int64_t>(num), den);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      int sign = 1;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) sign = text_[pos_++] == '-' ? -1 : 1;
      int e = 0;
      bool any = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_++] - '0');
        any = true;
        if (e > 18) throw ParseError("exponent of numeric literal too large", start);
      }
      if (!any) {
        pos_ = save;
      } else {
        std::int64_t scale = 1;
        for (int i = 0; i < e; ++i) scale *= 10;
        try {
          value = sign > 0 ? value * Rational(scale) : value / Rational(scale);
        } catch (const std::overflow_error&) {
          throw ParseError("numeric literal out of range", start);
        }
      }
    }
    return Expr(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    static const std::pair<const char*, Op> functions[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"ln", Op::Ln}};
    for (const auto& [fname, op] : functions) {
      if (name == fname && peek() == '(') {
        ++pos_;
        Expr arg = parse_sum();
        expect(')');
        return Expr::raw(op, arg);
      }
    }
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return Expr::var(static_cast<int>(i));
    throw UnknownIdentifierError(name, start);
  }
};

}  // namespace

Expr parse(std::string_view text, std::span<const std::string> coords) { return Parser(text, coords).run(); }

// ---------------------------------------------------------------------------
// Evaluation

Tape::Tape(std::span<const Expr> roots, std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_map<const void*, int> index;
  // Iterative post-order so deep expressions do not exhaust the stack.
  struct Frame {
    Expr e;
    bool expanded;
  };
  for (const Expr& root : roots) {
    std::vector<Frame> stack{{root, false}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (index.contains(f.e.id())) continue;
      const Op op = f.e.op();
      if (!f.expanded && !is_leaf(op)) {
        stack.push_back({f.e, true});
        if (is_binary(op)) stack.push_back({f.e.rhs(), false});
        stack.push_back({f.e.lhs(), false});
        continue;
      }
      Instr in;
      in.op = op;
      if (op == Op::Const)
        in.c = static_cast<long double>(f.e.constant().num()) / static_cast<long double>(f.e.constant().den());
      if (op == Op::Var || op == Op::Pow) in.k = f.e.var_index();
      if (!is_leaf(op)) {
        in.a = index.at(f.e.lhs().id());
        if (is_binary(op)) in.b = index.at(f.e.rhs().id());
      }
      index.emplace(f.e.id(), static_cast<int>(code_.size()));
      code_.push_back(in);
      nodes_.push_back(f.e);
    }
    roots_.push_back(index.at(root.id()));
  }
}

void Tape::fail(std::size_t at, const std::string& what) const {
  std::string text = print(nodes_[at], names_);
  if (text.size() > 200) text = text.substr(0, 197) + "...";
  throw DomainError(what + " in subexpression '" + text + "'");
}

std::vector<double> Tape::run(std::span<const double> coords) const {
  std::vector<long double> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::Const:
        r[i] = in.c;
        break;
      case Op::Var:
        if (in.k >= static_cast<int>(coords.size())) fail(i, "unassigned coordinate");
        r[i] = coords[in.k];
        break;
      case Op::Add:
        r[i] = r[in.a] + r[in.b];
        break;
      case Op::Mul:
        r[i] = r[in.a] * r[in.b];
        break;
      case Op::Div:
        if (r[in.b] == 0.0) fail(i, "division by zero");
        r[i] = r[in.a] / r[in.b];
        break;
      case Op::Neg:
        r[i] = -r[in.a];
        break;
      case Op::Pow: {
        const long double base = r[in.a];
        if (in.k < 0 && base == 0.0) fail(i, "division by zero");
        long double acc = 1.0L;
        long double b = in.k < 0 ? 1.0L / base : base;
        for (unsigned k = static_cast<unsigned>(std::abs(in.k)); k; k >>= 1) {
          if (k & 1u) acc *= b;
          b *= b;
        }
        r[i] = acc;
        break;
      }
      case Op::Sin:
        r[i] = std::sin(r[in.a]);
        break;
      case Op::Cos:
        r[i] = std::cos(r[in.a]);
        break;
      case Op::Exp:
        r[i] = std::exp(r[in.a]);
        break;
      case Op::Ln:
        if (r[in.a] <= 0.0) fail(i, "logarithm of non-positive value");
        r[i] = std::log(r[in.a]);
        break;
    }
  }
  std::vector<double> out;
  out.reserve(roots_.size());
  for (int k : roots_) out.push_back(static_cast<double>(r[k]));
  return out;
}

double evaluate(const Expr& e, std::span<const double> coords, std::span<const std::string> names) {
  return Tape(e, std::vector<std::string>(names.begin(), names.end())).run(coords)[0];
}

}  // namespace extcalc
