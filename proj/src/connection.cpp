#include "extcalc/connection.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace extcalc {

struct Connection::Data {
  std::vector<Expr> gamma;
  std::once_flag torsion_once;
  std::vector<Expr> torsion;
  std::once_flag curvature_once;
  std::vector<Expr> curvature;
};

namespace {

std::size_t idx3(int n, int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; }
std::size_t idx4(int n, int a, int b, int c, int d) { return idx3(n, a, b, c) * n + d; }

}  // namespace

Connection::Connection(ChartPtr chart, std::vector<Expr> gamma) : chart_(std::move(chart)) {
  const std::size_t n = chart_->dim();
  if (gamma.size() != n * n * n) throw std::invalid_argument("connection needs n^3 Christoffel symbols");
  for (const auto& g : gamma)
    if (n < 64 && (g.var_mask() >> n) != 0) throw ChartMismatch();
  data_ = std::make_shared<Data>();
  data_->gamma = std::move(gamma);
}

Connection Connection::flat(ChartPtr chart) {
  const std::size_t n = chart->dim();
  return Connection(std::move(chart), std::vector<Expr>(n * n * n));
}

const std::vector<Expr>& Connection::gammas() const { return data_->gamma; }

const Expr& Connection::gamma(int k, int i, int j) const { return data_->gamma.at(idx3(dim(), k, i, j)); }

Connection Connection::with_gamma(int k, int i, int j, Expr value) const {
  std::vector<Expr> g = data_->gamma;
  g.at(idx3(dim(), k, i, j)) = std::move(value);
  return Connection(chart_, std::move(g));
}

Connection Connection::symmetrized() const {
  const int n = dim();
  std::vector<Expr> g(data_->gamma.size());
  const Expr half(Rational(1, 2));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[idx3(n, k, i, j)] = half * (gamma(k, i, j) + gamma(k, j, i));
  return Connection(chart_, std::move(g));
}

const std::vector<Expr>& Connection::torsion_components() const {
  std::call_once(data_->torsion_once, [this] {
    const int n = dim();
    auto& t = data_->torsion;
    t.resize(data_->gamma.size());
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t[idx3(n, k, i, j)] = gamma(k, i, j) - gamma(k, j, i);
  });
  return data_->torsion;
}

const std::vector<Expr>& Connection::curvature_components() const {
  std::call_once(data_->curvature_once, [this] {
    const int n = dim();
    auto& r = data_->curvature;
    r.resize(static_cast<std::size_t>(n) * n * n * n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            std::vector<Expr> terms{differentiate(gamma(l, j, k), i), -differentiate(gamma(l, i, k), j)};
            for (int m = 0; m < n; ++m) {
              terms.push_back(gamma(l, i, m) * gamma(m, j, k));
              terms.push_back(-(gamma(l, j, m) * gamma(m, i, k)));
            }
            r[idx4(n, l, k, i, j)] = sum(terms);
          }
  });
  return data_->curvature;
}

SymMatrix Connection::connection_matrix(const VectorField& X) const {
  require_same_chart(chart_, X.chart());
  const int n = dim();
  SymMatrix w(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      std::vector<Expr> terms;
      for (int i = 0; i < n; ++i)
        if (!X[i].is_zero()) terms.push_back(X[i] * gamma(k, i, j));
      w(k, j) = sum(terms);
    }
  return w;
}

// ---------------------------------------------------------------------------

struct Metric::InverseCache {
  std::once_flag once;
  SymMatrix inv;
};

Metric::Metric(ChartPtr chart, SymMatrix g)
    : chart_(std::move(chart)), g_(std::move(g)), inverse_(std::make_shared<InverseCache>()) {
  if (g_.size() != chart_->dim()) throw std::invalid_argument("metric size does not match chart");
}

const SymMatrix& Metric::inverse() const {
  std::call_once(inverse_->once, [this] { inverse_->inv = g_.inverse(); });
  return inverse_->inv;
}

Expr Metric::apply(const VectorField& X, const VectorField& Y) const {
  require_same_chart(chart_, X.chart());
  require_same_chart(chart_, Y.chart());
  std::vector<Expr> terms;
  for (int i = 0; i < g_.size(); ++i)
    for (int j = 0; j < g_.size(); ++j)
      if (!g_(i, j).is_zero() && !X[i].is_zero() && !Y[j].is_zero()) terms.push_back(g_(i, j) * X[i] * Y[j]);
  return sum(terms);
}

PForm Metric::lower(const VectorField& X) const {
  std::vector<Expr> c(g_.size());
  for (int j = 0; j < g_.size(); ++j) {
    std::vector<Expr> terms;
    for (int i = 0; i < g_.size(); ++i) terms.push_back(X[i] * g_(i, j));
    c[j] = sum(terms);
  }
  return PForm(chart_, 1, std::move(c));
}

void Metric::validate(std::span<const Point> points, double tol) const {
  const int n = g_.size();
  const Expr det = g_.determinant();
  for (const auto& p : points) {
    auto v = g_.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(v[i * n + j] - v[j * n + i]) > tol) throw std::domain_error("metric is not symmetric");
    if (std::abs(evaluate_at(det, p)) <= tol) throw std::domain_error("metric is singular at a sampled point");
  }
}

// ---------------------------------------------------------------------------

Expr covariant_derivative(const Connection&, const VectorField& X, const Expr& f) {
  return apply_vector_field(X, f);
}

VectorField covariant_derivative(const Connection& nabla, const VectorField& X, const VectorField& Y) {
  require_same_chart(nabla.chart(), X.chart());
  require_same_chart(X.chart(), Y.chart());
  const int n = nabla.dim();
  std::vector<Expr> c(n);
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> terms{apply_vector_field(X, Y[k])};
    for (int i = 0; i < n; ++i) {
      if (X[i].is_zero()) continue;
      for (int j = 0; j < n; ++j) {
        const Expr& g = nabla.gamma(k, i, j);
        if (g.is_zero() || Y[j].is_zero()) continue;
        terms.push_back(X[i] * g * Y[j]);
      }
    }
    c[k] = sum(terms);
  }
  return VectorField(X.chart(), std::move(c));
}

PForm covariant_derivative(const Connection& nabla, const VectorField& X, const PForm& theta) {
  require_same_chart(nabla.chart(), X.chart());
  require_same_chart(X.chart(), theta.chart());
  const int n = nabla.dim();
  const int p = theta.degree();
  if (p == 0) return PForm::scalar(X.chart(), apply_vector_field(X, theta.components()[0]));
  if (p > n) return theta;
  const SymMatrix w = nabla.connection_matrix(X);
  const auto& tuples = index_tuples(n, p);
  std::vector<Expr> c(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    std::vector<Expr> terms{apply_vector_field(X, theta.components()[t])};
    std::vector<int> I = tuples[t];
    for (int m = 0; m < p; ++m) {
      const int im = tuples[t][m];
      for (int k = 0; k < n; ++k) {
        if (w(k, im).is_zero()) continue;
        I[m] = k;
        Expr comp = theta.component_any(I);
        if (!comp.is_zero()) terms.push_back(-(w(k, im) * comp));
      }
      I[m] = im;
    }
    c[t] = sum(terms);
  }
  return PForm(X.chart(), p, std::move(c));
}

TensorValue covariant_derivative(const Connection& nabla, const VectorField& X, const TensorValue& value) {
  require_same_chart(nabla.chart(), X.chart());
  const int n = nabla.dim();
  switch (value.kind) {
    case ValueKind::Scalar:
      return TensorValue::scalar(X.chart(), apply_vector_field(X, value.comps[0]));
    case ValueKind::Vector:
      return TensorValue::vector(covariant_derivative(nabla, X, value.as_vector()));
    case ValueKind::Covector:
      return TensorValue::covector(covariant_derivative(nabla, X, value.as_covector()));
    case ValueKind::Endomorphism: {
      const SymMatrix w = nabla.connection_matrix(X);
      TensorValue out = value;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          std::vector<Expr> terms{apply_vector_field(X, value.comps[a * n + b])};
          for (int c = 0; c < n; ++c) {
            const Expr& ac = value.comps[c * n + b];
            if (!w(a, c).is_zero() && !ac.is_zero()) terms.push_back(w(a, c) * ac);
            const Expr& ca = value.comps[a * n + c];
            if (!w(c, b).is_zero() && !ca.is_zero()) terms.push_back(-(ca * w(c, b)));
          }
          out.comps[a * n + b] = sum(terms);
        }
      return out;
    }
  }
  throw std::logic_error("unknown value kind");
}

TensorValuedForm covariant_derivative(const Connection& nabla, const VectorField& X, const TensorValuedForm& A) {
  require_same_chart(nabla.chart(), X.chart());
  require_same_chart(X.chart(), A.chart());
  return TensorValuedForm(A.chart(), A.kind(), A.arity(), [nabla, X, A](std::span<const VectorField> args) {
    TensorValue out = covariant_derivative(nabla, X, A(args));
    std::vector<VectorField> shifted(args.begin(), args.end());
    for (std::size_t i = 0; i < args.size(); ++i) {
      shifted[i] = covariant_derivative(nabla, X, args[i]);
      out = out - A(shifted);
      shifted[i] = args[i];
    }
    return out;
  });
}

// ---------------------------------------------------------------------------

VectorField torsion_at(const Connection& nabla, const VectorField& X, const VectorField& Y) {
  return covariant_derivative(nabla, X, Y) - covariant_derivative(nabla, Y, X) - lie_bracket(X, Y);
}

VectorField curvature_at(const Connection& nabla, const VectorField& X, const VectorField& Y,
                         const VectorField& Z) {
  return covariant_derivative(nabla, X, covariant_derivative(nabla, Y, Z)) -
         covariant_derivative(nabla, Y, covariant_derivative(nabla, X, Z)) -
         covariant_derivative(nabla, lie_bracket(X, Y), Z);
}

namespace {

SymMatrix curvature_matrix(const Connection& nabla, const VectorField& X, const VectorField& Y) {
  const int n = nabla.dim();
  const auto& r = nabla.curvature_components();
  SymMatrix m(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      std::vector<Expr> terms;
      for (int i = 0; i < n; ++i) {
        if (X[i].is_zero()) continue;
        for (int j = 0; j < n; ++j) {
          const Expr& c = r[idx4(n, l, k, i, j)];
          if (c.is_zero() || Y[j].is_zero()) continue;
          terms.push_back(c * X[i] * Y[j]);
        }
      }
      m(l, k) = sum(terms);
    }
  return m;
}

}  // namespace

VectorField curvature_from_components(const Connection& nabla, const VectorField& X, const VectorField& Y,
                                      const VectorField& Z) {
  require_same_chart(nabla.chart(), X.chart());
  return contract(TensorValue::endomorphism(nabla.chart(), curvature_matrix(nabla, X, Y)), Z).as_vector();
}

TensorValuedForm torsion(const Connection& nabla) {
  return TensorValuedForm(
      nabla.chart(), ValueKind::Vector, 2,
      [nabla](std::span<const VectorField> a) {
        const int n = nabla.dim();
        const auto& t = nabla.torsion_components();
        std::vector<Expr> c(n);
        for (int k = 0; k < n; ++k) {
          std::vector<Expr> terms;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const Expr& tk = t[idx3(n, k, i, j)];
              if (!tk.is_zero() && !a[0][i].is_zero() && !a[1][j].is_zero()) terms.push_back(tk * a[0][i] * a[1][j]);
            }
          c[k] = sum(terms);
        }
        return TensorValue::vector(VectorField(nabla.chart(), std::move(c)));
      },
      FormRole::Torsion);
}

TensorValuedForm curvature(const Connection& nabla) {
  return TensorValuedForm(
      nabla.chart(), ValueKind::Endomorphism, 2,
      [nabla](std::span<const VectorField> a) {
        return TensorValue::endomorphism(nabla.chart(), curvature_matrix(nabla, a[0], a[1]));
      },
      FormRole::Curvature);
}

TensorValuedForm curvature_on(const Connection& nabla, const VectorField& Z) {
  require_same_chart(nabla.chart(), Z.chart());
  return TensorValuedForm(
      nabla.chart(), ValueKind::Vector, 2,
      [nabla, Z](std::span<const VectorField> a) {
        return TensorValue::vector(curvature_from_components(nabla, a[0], a[1], Z));
      },
      FormRole::CurvatureOnVector);
}

Connection levi_civita(const Metric& g, std::span<const Point> points) {
  if (!points.empty()) g.validate(points);
  const int n = g.chart()->dim();
  const SymMatrix& inv = g.inverse();
  const Expr half(Rational(1, 2));
  // first kind: [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Expr> first(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        first[idx3(n, i, j, l)] =
            half * (differentiate(g(j, l), i) + differentiate(g(i, l), j) - differentiate(g(i, j), l));
  std::vector<Expr> gamma(first.size());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l)
          if (!inv(k, l).is_zero() && !first[idx3(n, i, j, l)].is_zero())
            terms.push_back(inv(k, l) * first[idx3(n, i, j, l)]);
        gamma[idx3(n, k, i, j)] = sum(terms);
      }
  return Connection(g.chart(), std::move(gamma));
}

Expr metric_derivative_at(const Connection& nabla, const Metric& g, const VectorField& X, const VectorField& Y,
                          const VectorField& Z) {
  return apply_vector_field(X, g.apply(Y, Z)) - g.apply(covariant_derivative(nabla, X, Y), Z) -
         g.apply(Y, covariant_derivative(nabla, X, Z));
}

Connection connection_from_frame(std::span<const VectorField> frame, std::span<const PForm> coframe,
                                 std::span<const Expr> coeffs) {
  const std::size_t n = frame.size();
  if (n == 0 || coframe.size() != n || coeffs.size() != n * n * n)
    throw std::invalid_argument("frame, coframe and coefficients must match the dimension");
  const ChartPtr& chart = frame[0].chart();
  const int dn = static_cast<int>(n);
  // P(b, j) = theta^b(d_j)
  SymMatrix P(dn);
  for (int b = 0; b < dn; ++b) {
    require_same_chart(chart, coframe[b].chart());
    for (int j = 0; j < dn; ++j) P(b, j) = coframe[b].components()[j];
  }
  std::vector<Expr> gamma(n * n * n);
  for (int k = 0; k < dn; ++k)
    for (int i = 0; i < dn; ++i)
      for (int j = 0; j < dn; ++j) {
        std::vector<Expr> terms;
        for (int c = 0; c < dn; ++c) {
          const Expr& uk = frame[c][k];
          if (uk.is_zero()) continue;
          std::vector<Expr> inner{differentiate(P(c, j), i)};
          for (int a = 0; a < dn; ++a)
            for (int b = 0; b < dn; ++b) {
              const Expr& cc = coeffs[idx3(dn, c, a, b)];
              if (cc.is_zero()) continue;
              inner.push_back(P(b, j) * P(a, i) * cc);
            }
          terms.push_back(sum(inner) * uk);
        }
        gamma[idx3(dn, k, i, j)] = sum(terms);
      }
  return Connection(chart, std::move(gamma));
}

}  // namespace extcalc
