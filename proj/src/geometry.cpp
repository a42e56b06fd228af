#include "extcalc/geometry.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

namespace extcalc {

Chart::Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain, bool trig)
    : name_(std::move(name)), coords_(std::move(coords)), domain_(std::move(domain)), trig_(trig) {
  if (coords_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
  if (coords_.size() > 64) throw std::invalid_argument("chart dimension exceeds 64");
  if (domain_.size() != coords_.size()) throw std::invalid_argument("one sampling interval per coordinate required");
  std::set<std::string> seen;
  for (const auto& c : coords_) {
    if (!seen.insert(c).second) throw std::invalid_argument("duplicate coordinate name '" + c + "'");
  }
  for (std::size_t i = 0; i < domain_.size(); ++i)
    if (!(domain_[i].lo <= domain_[i].hi))
      throw std::invalid_argument("empty sampling interval for coordinate '" + coords_[i] + "'");
}

int Chart::index_of(std::string_view coord) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == coord) return static_cast<int>(i);
  throw std::invalid_argument("unknown coordinate '" + std::string(coord) + "'");
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain, bool trig) {
  return std::make_shared<const Chart>(std::move(name), std::move(coords), std::move(domain), trig);
}

double evaluate_at(const Expr& f, const Point& p) { return evaluate(f, p.x); }

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a == b) return;
  if (!a || !b || a->coords() != b->coords()) throw ChartMismatch();
}

// ---------------------------------------------------------------------------
// Vector fields

VectorField::VectorField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), comps_(std::move(components)) {
  if (static_cast<int>(comps_.size()) != chart_->dim())
    throw std::invalid_argument("vector field needs one component per coordinate");
}

VectorField VectorField::zero(ChartPtr chart) {
  const int n = chart->dim();
  return VectorField(std::move(chart), std::vector<Expr>(n));
}

VectorField VectorField::coordinate(ChartPtr chart, int i) {
  std::vector<Expr> c(chart->dim());
  c.at(i) = Expr(1);
  return VectorField(std::move(chart), std::move(c));
}

std::vector<double> VectorField::at(const Point& p) const {
  std::vector<double> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(evaluate_at(c, p));
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart_, b.chart_);
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.comps_[i] + b.comps_[i];
  return VectorField(a.chart_, std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart_, b.chart_);
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.comps_[i] - b.comps_[i];
  return VectorField(a.chart_, std::move(c));
}

VectorField operator-(const VectorField& a) {
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -a.comps_[i];
  return VectorField(a.chart_, std::move(c));
}

VectorField operator*(const Expr& f, const VectorField& a) {
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = f * a.comps_[i];
  return VectorField(a.chart_, std::move(c));
}

namespace {

void require_in_chart(const Expr& f, const ChartPtr& chart) {
  const int n = chart->dim();
  if (n < 64 && (f.var_mask() >> n) != 0) throw ChartMismatch();
}

}  // namespace

ScalarField apply_vector_field(const VectorField& X, const ScalarField& f) {
  require_in_chart(f, X.chart());
  std::vector<Expr> terms;
  for (int i = 0; i < X.dim(); ++i) {
    if (X[i].is_zero()) continue;
    if (!(f.var_mask() & (std::uint64_t{1} << i))) continue;
    terms.push_back(X[i] * differentiate(f, i));
  }
  return sum(terms);
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  require_same_chart(X.chart(), Y.chart());
  std::vector<Expr> c(X.dim());
  for (int k = 0; k < X.dim(); ++k) c[k] = apply_vector_field(X, Y[k]) - apply_vector_field(Y, X[k]);
  return VectorField(X.chart(), std::move(c));
}

// ---------------------------------------------------------------------------
// Index tuples

namespace {

void build_tuples(int n, int p, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == p) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    build_tuples(n, p, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Sign of the permutation sorting `v`, or 0 if `v` has repeats. Sorts v.
int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) {
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] == v[i - 1]) return 0;
  return sign;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

}  // namespace

const std::vector<std::vector<int>>& index_tuples(int n, int p) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.try_emplace({n, p});
  if (inserted && p >= 0 && p <= n) {
    std::vector<int> cur;
    build_tuples(n, p, 0, cur, it->second);
  }
  return it->second;
}

int tuple_position(int n, std::span<const int> tuple) {
  // Combinatorial number system in lexicographic order.
  const int p = static_cast<int>(tuple.size());
  std::size_t pos = 0;
  int prev = -1;
  for (int m = 0; m < p; ++m) {
    for (int v = prev + 1; v < tuple[m]; ++v) pos += binomial(n - v - 1, p - m - 1);
    prev = tuple[m];
  }
  return static_cast<int>(pos);
}

// ---------------------------------------------------------------------------
// Forms

PForm::PForm(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (degree < 0) throw DegreeError("negative form degree");
  comps_.resize(binomial(chart_->dim(), degree));
}

PForm::PForm(ChartPtr chart, int degree, std::vector<Expr> components)
    : chart_(std::move(chart)), degree_(degree), comps_(std::move(components)) {
  if (degree < 0) throw DegreeError("negative form degree");
  if (comps_.size() != binomial(chart_->dim(), degree))
    throw std::invalid_argument("wrong number of form components");
}

PForm PForm::scalar(ChartPtr chart, Expr f) { return PForm(std::move(chart), 0, {std::move(f)}); }

PForm PForm::one_form(ChartPtr chart, std::vector<Expr> components) {
  return PForm(std::move(chart), 1, std::move(components));
}

PForm PForm::differential(ChartPtr chart, int i) {
  std::vector<Expr> c(chart->dim());
  c.at(i) = Expr(1);
  return PForm(std::move(chart), 1, std::move(c));
}

const Expr& PForm::component(std::span<const int> increasing) const {
  return comps_.at(tuple_position(dim(), increasing));
}

Expr PForm::component_any(std::span<const int> indices) const {
  std::vector<int> v(indices.begin(), indices.end());
  const int s = sort_sign(v);
  if (s == 0) return Expr();
  const Expr& c = component(v);
  return s > 0 ? c : -c;
}

namespace {

// Sum over permutations of the p x p minor rows(args) x cols(tuple).
Expr minor_determinant(std::span<const VectorField> args, const std::vector<int>& tuple) {
  const int p = static_cast<int>(tuple.size());
  if (p == 1) return args[0][tuple[0]];
  if (p == 2) return args[0][tuple[0]] * args[1][tuple[1]] - args[0][tuple[1]] * args[1][tuple[0]];
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Expr> terms;
  do {
    std::vector<int> tmp = perm;
    const int s = sort_sign(tmp);
    Expr t(s);
    for (int r = 0; r < p && !t.is_zero(); ++r) t = t * args[r][tuple[perm[r]]];
    if (!t.is_zero()) terms.push_back(t);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum(terms);
}

}  // namespace

Expr PForm::operator()(std::span<const VectorField> args) const {
  if (static_cast<int>(args.size()) != degree_)
    throw DegreeError("form of degree " + std::to_string(degree_) + " applied to " + std::to_string(args.size()) +
                      " arguments");
  for (const auto& a : args) require_same_chart(chart_, a.chart());
  if (degree_ == 0) return comps_.at(0);
  const auto& tuples = index_tuples(dim(), degree_);
  std::vector<Expr> terms;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    if (comps_[t].is_zero()) continue;
    Expr m = minor_determinant(args, tuples[t]);
    if (!m.is_zero()) terms.push_back(comps_[t] * m);
  }
  return sum(terms);
}

PForm operator+(const PForm& a, const PForm& b) {
  require_same_chart(a.chart_, b.chart_);
  if (a.degree_ != b.degree_) throw DegreeError("adding forms of different degree");
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.comps_[i] + b.comps_[i];
  return PForm(a.chart_, a.degree_, std::move(c));
}

PForm operator-(const PForm& a, const PForm& b) {
  require_same_chart(a.chart_, b.chart_);
  if (a.degree_ != b.degree_) throw DegreeError("subtracting forms of different degree");
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.comps_[i] - b.comps_[i];
  return PForm(a.chart_, a.degree_, std::move(c));
}

PForm operator*(const Expr& f, const PForm& a) {
  std::vector<Expr> c(a.comps_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = f * a.comps_[i];
  return PForm(a.chart_, a.degree_, std::move(c));
}

PForm wedge(const PForm& a, const PForm& b) {
  require_same_chart(a.chart(), b.chart());
  const int p = a.degree();
  const int q = b.degree();
  const int n = a.dim();
  if (p + q > n) throw DegreeError("wedge degree exceeds chart dimension");
  const auto& out_tuples = index_tuples(n, p + q);
  std::vector<Expr> comps(out_tuples.size());
  for (std::size_t t = 0; t < out_tuples.size(); ++t) {
    const auto& K = out_tuples[t];
    std::vector<Expr> terms;
    // Each p-subset of positions in K is one (p,q)-shuffle.
    for (const auto& pos : index_tuples(p + q, p)) {
      std::vector<int> I, J, order;
      std::vector<bool> inI(p + q, false);
      for (int m : pos) inI[m] = true;
      for (int m = 0; m < p + q; ++m) (inI[m] ? I : J).push_back(K[m]);
      for (int m = 0; m < p + q; ++m)
        if (inI[m]) order.push_back(m);
      for (int m = 0; m < p + q; ++m)
        if (!inI[m]) order.push_back(m);
      const Expr& ca = p == 0 ? a.components()[0] : a.component(I);
      const Expr& cb = q == 0 ? b.components()[0] : b.component(J);
      if (ca.is_zero() || cb.is_zero()) continue;
      const int s = sort_sign(order);
      terms.push_back(s > 0 ? ca * cb : -(ca * cb));
    }
    comps[t] = sum(terms);
  }
  return PForm(a.chart(), p + q, std::move(comps));
}

Expr wedge_at(const PForm& a, const PForm& b, std::span<const VectorField> args) {
  require_same_chart(a.chart(), b.chart());
  const int p = a.degree();
  const int q = b.degree();
  if (static_cast<int>(args.size()) != p + q) throw DegreeError("wedge evaluated on the wrong number of arguments");
  std::vector<Expr> terms;
  for (const auto& pos : index_tuples(p + q, p)) {
    std::vector<bool> first(p + q, false);
    for (int m : pos) first[m] = true;
    std::vector<VectorField> A, B;
    int inversions = 0;
    for (int m = 0; m < p + q; ++m) {
      if (first[m]) {
        A.push_back(args[m]);
        inversions += static_cast<int>(B.size());
      } else {
        B.push_back(args[m]);
      }
    }
    Expr t = a(A) * b(B);
    terms.push_back(inversions % 2 == 0 ? t : -t);
  }
  return sum(terms);
}

PForm interior_product(const VectorField& X, const PForm& form) {
  require_same_chart(X.chart(), form.chart());
  const int p = form.degree();
  if (p == 0) throw DegreeError("interior product of a 0-form");
  const int n = form.dim();
  const auto& tuples = index_tuples(n, p - 1);
  std::vector<Expr> comps(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) {
      if (X[i].is_zero()) continue;
      std::vector<int> idx{i};
      idx.insert(idx.end(), tuples[t].begin(), tuples[t].end());
      Expr c = form.component_any(idx);
      if (!c.is_zero()) terms.push_back(X[i] * c);
    }
    comps[t] = sum(terms);
  }
  return PForm(form.chart(), p - 1, std::move(comps));
}

PForm exterior_derivative(const PForm& form) {
  const int p = form.degree();
  const int n = form.dim();
  if (p + 1 > n) return PForm(form.chart(), p + 1);
  const auto& tuples = index_tuples(n, p + 1);
  std::vector<Expr> comps(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    const auto& K = tuples[t];
    std::vector<Expr> terms;
    for (int m = 0; m <= p; ++m) {
      std::vector<int> rest;
      for (int r = 0; r <= p; ++r)
        if (r != m) rest.push_back(K[r]);
      const Expr& c = p == 0 ? form.components()[0] : form.component(rest);
      Expr dc = differentiate(c, K[m]);
      if (dc.is_zero()) continue;
      terms.push_back(m % 2 == 0 ? dc : -dc);
    }
    comps[t] = sum(terms);
  }
  return PForm(form.chart(), p + 1, std::move(comps));
}

PForm form_from_rule(const ChartPtr& chart, int degree, const FormRule& rule) {
  const int n = chart->dim();
  if (degree > n) return PForm(chart, degree);
  std::vector<VectorField> basis;
  for (int i = 0; i < n; ++i) basis.push_back(VectorField::coordinate(chart, i));
  const auto& tuples = index_tuples(n, degree);
  std::vector<Expr> comps(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    std::vector<VectorField> args;
    for (int i : tuples[t]) args.push_back(basis[i]);
    comps[t] = rule(args);
  }
  return PForm(chart, degree, std::move(comps));
}

namespace {

std::vector<VectorField> without(std::span<const VectorField> args, std::size_t i) {
  std::vector<VectorField> out;
  for (std::size_t k = 0; k < args.size(); ++k)
    if (k != i) out.push_back(args[k]);
  return out;
}

}  // namespace

Expr exterior_derivative_at(const FormRule& rule, int degree, std::span<const VectorField> args) {
  if (static_cast<int>(args.size()) != degree + 1) throw DegreeError("d of a p-form takes p+1 arguments");
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Expr t = apply_vector_field(args[i], rule(without(args, i)));
    terms.push_back(i % 2 == 0 ? t : -t);
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    for (std::size_t j = i + 1; j < args.size(); ++j) {
      std::vector<VectorField> rest{lie_bracket(args[i], args[j])};
      for (std::size_t k = 0; k < args.size(); ++k)
        if (k != i && k != j) rest.push_back(args[k]);
      Expr t = rule(rest);
      terms.push_back((i + j) % 2 == 0 ? t : -t);
    }
  }
  return sum(terms);
}

Expr exterior_derivative_at(const PForm& form, std::span<const VectorField> args) {
  for (const auto& a : args) require_same_chart(form.chart(), a.chart());
  return exterior_derivative_at([&form](std::span<const VectorField> a) { return form(a); }, form.degree(), args);
}

double exterior_derivative_intrinsic(const PForm& form, std::span<const VectorField> args, const Point& p) {
  return evaluate_at(exterior_derivative_at(form, args), p);
}

// ---------------------------------------------------------------------------
// Symbolic matrices

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = Expr(1);
  return m;
}

namespace {

Expr det_rec(const SymMatrix& m, std::vector<int>& rows, std::vector<int>& cols) {
  const std::size_t k = rows.size();
  if (k == 1) return m(rows[0], cols[0]);
  if (k == 2) return m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
  std::vector<Expr> terms;
  const int r0 = rows[0];
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < k; ++c) {
    const Expr& a = m(r0, cols[c]);
    if (a.is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t cc = 0; cc < k; ++cc)
      if (cc != c) sub_cols.push_back(cols[cc]);
    Expr t = a * det_rec(m, sub_rows, sub_cols);
    terms.push_back(c % 2 == 0 ? t : -t);
  }
  return sum(terms);
}

}  // namespace

Expr SymMatrix::determinant() const {
  if (n_ == 0) return Expr(1);
  std::vector<int> rows(n_), cols(n_);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return det_rec(*this, rows, cols);
}

SymMatrix SymMatrix::inverse() const {
  SymMatrix inv(n_);
  const Expr det = determinant();
  if (n_ == 1) {
    inv(0, 0) = Expr(1) / det;
    return inv;
  }
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      // inv(r, c) = cofactor(c, r) / det
      std::vector<int> rows, cols;
      for (int i = 0; i < n_; ++i)
        if (i != c) rows.push_back(i);
      for (int j = 0; j < n_; ++j)
        if (j != r) cols.push_back(j);
      Expr minor = det_rec(*this, rows, cols);
      if ((r + c) % 2 == 1) minor = -minor;
      inv(r, c) = minor / det;
    }
  }
  return inv;
}

SymMatrix SymMatrix::transpose() const {
  SymMatrix t(n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<double> SymMatrix::at(const Point& p) const {
  Tape tape(a_);
  return tape.run(p.x);
}

SymMatrix operator*(const SymMatrix& a, const SymMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("matrix size mismatch");
  SymMatrix m(a.n_);
  for (int r = 0; r < a.n_; ++r)
    for (int c = 0; c < a.n_; ++c) {
      std::vector<Expr> terms;
      for (int k = 0; k < a.n_; ++k) terms.push_back(a(r, k) * b(k, c));
      m(r, c) = sum(terms);
    }
  return m;
}

// ---------------------------------------------------------------------------
// Tensor values

const char* to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Scalar:
      return "scalar";
    case ValueKind::Vector:
      return "vector";
    case ValueKind::Covector:
      return "covector";
    case ValueKind::Endomorphism:
      return "endomorphism";
  }
  return "?";
}

TensorValue TensorValue::scalar(ChartPtr chart, Expr f) { return {ValueKind::Scalar, std::move(chart), {std::move(f)}}; }
TensorValue TensorValue::vector(const VectorField& v) { return {ValueKind::Vector, v.chart(), v.components()}; }
TensorValue TensorValue::covector(const PForm& one_form) {
  if (one_form.degree() != 1) throw DegreeError("covector value must be a 1-form");
  return {ValueKind::Covector, one_form.chart(), one_form.components()};
}
TensorValue TensorValue::endomorphism(ChartPtr chart, const SymMatrix& m) {
  const int n = chart->dim();
  std::vector<Expr> c(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c[static_cast<std::size_t>(a) * n + b] = m(a, b);
  return {ValueKind::Endomorphism, std::move(chart), std::move(c)};
}

Expr TensorValue::as_scalar() const {
  if (kind != ValueKind::Scalar) throw std::logic_error("value is not a scalar");
  return comps[0];
}
VectorField TensorValue::as_vector() const {
  if (kind != ValueKind::Vector) throw std::logic_error("value is not a vector");
  return VectorField(chart, comps);
}
PForm TensorValue::as_covector() const {
  if (kind != ValueKind::Covector) throw std::logic_error("value is not a covector");
  return PForm(chart, 1, comps);
}
SymMatrix TensorValue::as_matrix() const {
  if (kind != ValueKind::Endomorphism) throw std::logic_error("value is not an endomorphism");
  const int n = chart->dim();
  SymMatrix m(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = comps[static_cast<std::size_t>(a) * n + b];
  return m;
}

TensorValue operator+(const TensorValue& a, const TensorValue& b) {
  if (a.kind != b.kind) throw std::invalid_argument("adding tensor values of different kinds");
  TensorValue out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] = a.comps[i] + b.comps[i];
  return out;
}
TensorValue operator-(const TensorValue& a, const TensorValue& b) {
  if (a.kind != b.kind) throw std::invalid_argument("subtracting tensor values of different kinds");
  TensorValue out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] = a.comps[i] - b.comps[i];
  return out;
}
TensorValue operator*(const Expr& f, const TensorValue& a) {
  TensorValue out = a;
  for (auto& c : out.comps) c = f * c;
  return out;
}

TensorValue zero_value(ValueKind kind, const ChartPtr& chart) {
  const std::size_t n = static_cast<std::size_t>(chart->dim());
  switch (kind) {
    case ValueKind::Scalar:
      return {kind, chart, std::vector<Expr>(1)};
    case ValueKind::Vector:
    case ValueKind::Covector:
      return {kind, chart, std::vector<Expr>(n)};
    case ValueKind::Endomorphism:
      return {kind, chart, std::vector<Expr>(n * n)};
  }
  return {};
}

TensorValue contract(const TensorValue& value, const VectorField& v) {
  const int n = v.dim();
  if (value.kind == ValueKind::Covector) {
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) terms.push_back(value.comps[i] * v[i]);
    return TensorValue::scalar(v.chart(), sum(terms));
  }
  if (value.kind == ValueKind::Endomorphism) {
    std::vector<Expr> out(n);
    for (int a = 0; a < n; ++a) {
      std::vector<Expr> terms;
      for (int b = 0; b < n; ++b) terms.push_back(value.comps[static_cast<std::size_t>(a) * n + b] * v[b]);
      out[a] = sum(terms);
    }
    return TensorValue::vector(VectorField(v.chart(), std::move(out)));
  }
  throw std::invalid_argument(std::string("cannot contract a ") + to_string(value.kind) + " value with a vector");
}

const char* to_string(FormRole role) {
  switch (role) {
    case FormRole::Generic:
      return "generic";
    case FormRole::Soldering:
      return "I";
    case FormRole::CovectorDifferential:
      return "nabla(theta)";
    case FormRole::VectorDifferential:
      return "nabla(Z)";
    case FormRole::Torsion:
      return "T";
    case FormRole::Curvature:
      return "R";
    case FormRole::CurvatureOnVector:
      return "R_Z";
    case FormRole::CurvatureCovector:
      return "R_theta";
  }
  return "?";
}

TensorValuedForm::TensorValuedForm(ChartPtr chart, ValueKind kind, int arity, Rule rule, FormRole role)
    : chart_(std::move(chart)), kind_(kind), arity_(arity), rule_(std::move(rule)), role_(role) {}

TensorValue TensorValuedForm::operator()(std::span<const VectorField> args) const {
  if (static_cast<int>(args.size()) != arity_)
    throw DegreeError("tensor-valued form of arity " + std::to_string(arity_) + " applied to " +
                      std::to_string(args.size()) + " arguments");
  for (const auto& a : args) require_same_chart(chart_, a.chart());
  return rule_(args);
}

TensorValuedForm soldering_form(const ChartPtr& chart) {
  return TensorValuedForm(chart, ValueKind::Vector, 1,
                          [](std::span<const VectorField> a) { return TensorValue::vector(a[0]); },
                          FormRole::Soldering);
}

TensorValuedForm as_tensor_valued(const PForm& form) {
  return TensorValuedForm(form.chart(), ValueKind::Scalar, form.degree(), [form](std::span<const VectorField> a) {
    return TensorValue::scalar(form.chart(), form(a));
  });
}

}  // namespace extcalc
