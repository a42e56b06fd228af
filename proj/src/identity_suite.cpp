#include "extcalc/identity_suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "extcalc/gallery.hpp"
#include "extcalc/structure_forms.hpp"

namespace extcalc {

void Residual::add(const VectorField& l, const VectorField& r) {
  for (int i = 0; i < l.dim(); ++i) add(l[i], r[i]);
}

void Residual::add(const TensorValue& l, const TensorValue& r) {
  if (l.kind != r.kind) throw std::invalid_argument("residual sides have different kinds");
  for (std::size_t i = 0; i < l.comps.size(); ++i) add(l.comps[i], r.comps[i]);
}

namespace {

using VF = VectorField;

int max_degree(const CheckInputs& in) { return std::min(3, in.geometry.chart->dim()); }

std::vector<VF> fields(CheckInputs& in, int count) { return in.sampler.random_vector_fields(count); }

std::vector<VF> cyclic(const std::vector<VF>& x, int shift) {
  return {x[shift % 3], x[(shift + 1) % 3], x[(shift + 2) % 3]};
}

struct CartanPair {
  CoFrame frame;
  CartanForms lhs;
  CartanForms rhs;
};

CartanPair cartan_pair(const CheckInputs& in) {
  CoFrame frame = in.geometry.frame();
  CartanForms l = cartan_coframe_forms(in.lhs, frame, {});
  CartanForms r = in.geometry.lhs_connection ? cartan_coframe_forms(in.rhs, frame, {}) : l;
  return {std::move(frame), std::move(l), std::move(r)};
}

Residual build_S1(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  auto X = fields(in, 2);
  Residual r;
  r.add(torsion_form_at(in.lhs, theta, X), exterior_derivative(theta)(X) + xi_form_at(in.rhs, theta, X));
  return r;
}

Residual build_S1p(CheckInputs& in) {
  Residual r;
  for (int p = 1; p <= max_degree(in); ++p) {
    PForm theta = in.sampler.random_form(p);
    auto X = fields(in, p + 1);
    r.add(torsion_form_at(in.lhs, theta, X), exterior_derivative(theta)(X) + xi_form_at(in.rhs, theta, X));
  }
  return r;
}

Residual build_S2(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  VF Z = in.sampler.random_vector_field();
  auto X = fields(in, 2);
  Residual r;
  r.add(curvature_form_at(in.lhs, theta, Z, X),
        exterior_derivative(connection_form(in.rhs, theta, Z))(X) + psi_form_at(in.rhs, theta, Z, X));
  return r;
}

Residual build_S2p(CheckInputs& in) {
  Residual r;
  for (int p = 1; p <= max_degree(in); ++p) {
    PForm theta = in.sampler.random_form(p);
    VF Z = in.sampler.random_vector_field();
    auto X = fields(in, p + 1);
    r.add(exterior_derivative(connection_form(in.lhs, theta, Z))(X),
          curvature_form_at(in.rhs, theta, Z, X) - psi_form_at(in.rhs, theta, Z, X) +
              torsion_mixed_form_at(in.rhs, theta, Z, X));
  }
  return r;
}

Residual build_B1(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  auto X = fields(in, 3);
  Residual r;
  r.add(exterior_derivative(torsion_form(in.lhs, theta))(X),
        curvature_three_form_at(in.rhs, theta, X) +
            tensor_wedge(covariant_differential(in.rhs, theta), torsion(in.rhs))(X).as_scalar());
  return r;
}

Residual build_B2(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  VF Z = in.sampler.random_vector_field();
  auto X = fields(in, 3);
  const Connection& n = in.rhs;
  Residual r;
  r.add(exterior_derivative(curvature_form(in.lhs, theta, Z))(X),
        tensor_wedge(covariant_differential(n, theta), curvature_on(n, Z))(X).as_scalar() +
            tensor_wedge(curvature_covector(n, theta), covariant_differential(n, Z))(X).as_scalar());
  return r;
}

Residual build_B1v(CheckInputs& in) {
  auto X = fields(in, 3);
  const TensorValuedForm T = torsion(in.rhs);
  VF lhs = VF::zero(in.geometry.chart), rhs = VF::zero(in.geometry.chart);
  for (int s = 0; s < 3; ++s) {
    auto c = cyclic(X, s);
    lhs = lhs + curvature_at(in.lhs, c[0], c[1], c[2]);
    rhs = rhs + covariant_derivative(in.rhs, c[0], T)({c[1], c[2]}).as_vector() +
          T({T({c[0], c[1]}).as_vector(), c[2]}).as_vector();
  }
  Residual r;
  r.add(lhs, rhs);
  return r;
}

Residual build_B2v(CheckInputs& in) {
  auto X = fields(in, 3);
  const TensorValuedForm RL = curvature(in.lhs);
  const TensorValuedForm RR = curvature(in.rhs);
  const TensorValuedForm T = torsion(in.rhs);
  TensorValue lhs = zero_value(ValueKind::Endomorphism, in.geometry.chart);
  TensorValue rhs = lhs;
  for (int s = 0; s < 3; ++s) {
    auto c = cyclic(X, s);
    lhs = lhs + covariant_derivative(in.lhs, c[0], RL)({c[1], c[2]});
    rhs = rhs + RR({c[0], T({c[1], c[2]}).as_vector()});
  }
  Residual r;
  r.add(lhs, rhs);
  return r;
}

Residual build_CS1(CheckInputs& in) {
  auto X = fields(in, 2);
  CartanPair cp = cartan_pair(in);
  const int n = cp.lhs.n;
  Residual r;
  for (int a = 0; a < n; ++a) {
    std::vector<Expr> terms{exterior_derivative(cp.frame.coframe[a])(X)};
    for (int b = 0; b < n; ++b) terms.push_back(wedge_at(cp.lhs.connection_form(a, b), cp.frame.coframe[b], X));
    r.add(sum(terms), cp.rhs.torsion[a](X));
  }
  return r;
}

Residual build_CS2(CheckInputs& in) {
  auto X = fields(in, 2);
  CartanPair cp = cartan_pair(in);
  const int n = cp.lhs.n;
  Residual r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<Expr> terms{exterior_derivative(cp.lhs.connection_form(a, b))(X)};
      for (int c = 0; c < n; ++c)
        terms.push_back(wedge_at(cp.lhs.connection_form(a, c), cp.lhs.connection_form(c, b), X));
      r.add(sum(terms), cp.rhs.curvature_form(a, b)(X));
    }
  return r;
}

Residual build_C1(CheckInputs& in) {
  auto X = fields(in, 3);
  CartanPair cp = cartan_pair(in);
  const int n = cp.lhs.n;
  Residual r;
  for (int a = 0; a < n; ++a) {
    std::vector<Expr> lhs{exterior_derivative(cp.lhs.torsion[a])(X)};
    std::vector<Expr> rhs;
    for (int b = 0; b < n; ++b) {
      lhs.push_back(wedge_at(cp.lhs.connection_form(a, b), cp.lhs.torsion[b], X));
      rhs.push_back(wedge_at(cp.rhs.curvature_form(a, b), cp.frame.coframe[b], X));
    }
    r.add(sum(lhs), sum(rhs));
  }
  return r;
}

Residual build_C2(CheckInputs& in) {
  auto X = fields(in, 3);
  CartanPair cp = cartan_pair(in);
  const int n = cp.lhs.n;
  Residual r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<Expr> lhs{exterior_derivative(cp.lhs.curvature_form(a, b))(X)};
      std::vector<Expr> rhs;
      for (int c = 0; c < n; ++c) {
        lhs.push_back(wedge_at(cp.lhs.connection_form(a, c), cp.lhs.curvature_form(c, b), X));
        rhs.push_back(wedge_at(cp.rhs.curvature_form(a, c), cp.rhs.connection_form(c, b), X));
      }
      r.add(sum(lhs), sum(rhs));
    }
  return r;
}

Residual build_D1(CheckInputs& in) {
  auto X = fields(in, 2);
  Residual r;
  r.add(exterior_covariant_derivative(in.lhs, soldering_form(in.geometry.chart))(X), torsion(in.rhs)(X));
  return r;
}

Residual build_D2(CheckInputs& in) {
  VF Z = in.sampler.random_vector_field();
  auto X = fields(in, 2);
  Residual r;
  r.add(exterior_covariant_derivative(in.lhs, covariant_differential(in.lhs, Z))(X), curvature_on(in.rhs, Z)(X));
  return r;
}

Residual build_DB1(CheckInputs& in) {
  auto X = fields(in, 3);
  Residual r;
  r.add(exterior_covariant_derivative(in.lhs, torsion(in.lhs))(X),
        tensor_wedge(curvature(in.rhs), soldering_form(in.geometry.chart))(X));
  return r;
}

Residual build_DB2(CheckInputs& in) {
  auto X = fields(in, 3);
  TensorValue lhs = exterior_covariant_derivative(in.lhs, curvature(in.lhs))(X);
  Residual r;
  r.add(lhs, zero_value(ValueKind::Endomorphism, in.geometry.chart));
  return r;
}

Residual build_E1(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  VF Z = in.sampler.random_vector_field();
  auto X = fields(in, 2);
  PForm omega = connection_form(in.rhs, theta, Z);
  Residual r;
  r.add(curvature_form_at(in.lhs, theta, Z, X),
        torsion_form_at(in.rhs, omega, X) - xi_form_at(in.rhs, omega, X) + psi_form_at(in.rhs, theta, Z, X));
  return r;
}

Residual build_LC1(CheckInputs& in) {
  PForm theta = in.sampler.random_form(1);
  auto X = fields(in, 3);
  Residual r;
  r.add(curvature_three_form_at(in.lhs.symmetrized(), theta, X), Expr());
  return r;
}

bool has_coframe(const GeometryCase&) { return true; }

std::vector<IdentityCheck> make_catalog() {
  std::vector<IdentityCheck> c{
      {"B1", "dT_theta = R_theta + nabla theta ^ T", "first Bianchi identity, intrinsic form", {}, build_B1},
      {"B1v", "cyc R(X,Y)Z = cyc nabla_X T(Y,Z) + cyc T(T(X,Y),Z)", "first Bianchi identity, vector form", {},
       build_B1v},
      {"B2", "dR_{theta,Z} = nabla theta ^ R_Z + R_theta ^ nabla Z", "second Bianchi identity, intrinsic form", {},
       build_B2},
      {"B2v", "cyc nabla_X R(Y,Z) = cyc R(X,T(Y,Z))", "second Bianchi identity, vector form", {}, build_B2v},
      {"C1", "dTheta^a + omega^a_b ^ Theta^b = Omega^a_b ^ theta^b", "first Bianchi identity, Cartan form",
       has_coframe, build_C1},
      {"C2", "dOmega^a_b + omega^a_c ^ Omega^c_b = Omega^a_c ^ omega^c_b", "second Bianchi identity, Cartan form",
       has_coframe, build_C2},
      {"CS1", "dtheta^a + omega^a_b ^ theta^b = Theta^a", "Cartan first structure equation", has_coframe, build_CS1},
      {"CS2", "domega^a_b + omega^a_c ^ omega^c_b = Omega^a_b", "Cartan second structure equation", has_coframe,
       build_CS2},
      {"D1", "d^nabla I = T", "first structure equation, exterior covariant form", {}, build_D1},
      {"D2", "d^nabla (nabla Z) = R_Z", "second structure equation, exterior covariant form", {}, build_D2},
      {"DB1", "d^nabla T = R ^ I", "first Bianchi identity, exterior covariant form", {}, build_DB1},
      {"DB2", "d^nabla R = 0", "second Bianchi identity, exterior covariant form", {}, build_DB2},
      {"E1", "R_{theta,Z} = T_omega - Xi_omega + Psi_{theta,Z}, omega = omega_{theta,Z}",
       "curvature recovered from the two structure equations", {}, build_E1},
      {"LC1", "R_theta = 0 for a torsion-free connection (the symmetrised connection)",
       "first Bianchi identity without torsion", {}, build_LC1},
      {"S1", "T_theta = dtheta + Xi_theta", "first structure equation", {}, build_S1},
      {"S1p", "T_Theta = dTheta + Xi_Theta, p = 1..3", "first structure equation for p-forms", {}, build_S1p},
      {"S2", "R_{theta,Z} = domega_{theta,Z} + Psi_{theta,Z}", "second structure equation", {}, build_S2},
      {"S2p", "domega_{Theta,Z} = R_{Theta,Z} - Psi_{Theta,Z} + T_{Theta,Z}, p = 1..3",
       "second structure equation for p-forms", {}, build_S2p},
  };
  std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return c;
}

std::string format_point(const Point& p, const ChartPtr& chart) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << chart->coords()[i] << "=" << p.x[i];
  return os.str();
}

void validate(const SuiteConfig& config) {
  if (config.points < 1) throw std::invalid_argument("points must be at least 1");
  if (config.tuples < 1) throw std::invalid_argument("tuples must be at least 1");
  if (!(config.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
}

std::string seed_key(const GeometryCase& g, const std::string& check, const std::string& what) {
  return g.id + "/" + check + "/" + what;
}

}  // namespace

const std::vector<IdentityCheck>& catalog() {
  static const std::vector<IdentityCheck> c = make_catalog();
  return c;
}

const IdentityCheck& find_check(std::string_view id) {
  for (const auto& c : catalog())
    if (c.id == id) return c;
  throw UnknownCheck("unknown check '" + std::string(id) + "'");
}

Samples sample_fields(const ChartPtr& chart, std::uint64_t seed, const SampleSpec& spec) {
  for (const auto& iv : chart->domain())
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("empty sampling domain");
  FieldSampler s(chart, seed);
  Samples out;
  out.fields = s.random_vector_fields(spec.vector_fields);
  for (int p : spec.form_degrees) out.forms.push_back(s.random_form(p));
  for (int i = 0; i < spec.functions; ++i) out.functions.push_back(s.random_function());
  out.points = s.random_points(spec.points);
  return out;
}

Report run_check(const IdentityCheck& check, const GeometryCase& geometry, const SuiteConfig& config) {
  validate(config);
  if (check.applicable && !check.applicable(geometry))
    throw CheckNotApplicable("check " + check.id + " does not apply to case " + geometry.id);
  const ChartPtr& chart = geometry.chart;
  FieldSampler point_sampler(chart, stable_hash(seed_key(geometry, check.id, "points"), config.seed));
  const std::vector<Point> points = point_sampler.random_points(config.points);

  double worst = 0.0;
  int worst_tuple = -1;
  std::size_t worst_point = 0;
  for (int t = 0; t < config.tuples; ++t) {
    FieldSampler sampler(chart, stable_hash(seed_key(geometry, check.id, "tuple" + std::to_string(t)), config.seed));
    CheckInputs in{geometry, geometry.lhs(), geometry.connection, sampler};
    Residual r = check.build(in);
    // Differences are formed inside the tape so that cancellation happens
    // before the final rounding to double.
    const std::size_t m = r.lhs.size();
    std::vector<Expr> roots;
    for (std::size_t c = 0; c < m; ++c) roots.push_back(r.lhs[c] - r.rhs[c]);
    if (config.relative) {
      roots.insert(roots.end(), r.lhs.begin(), r.lhs.end());
      roots.insert(roots.end(), r.rhs.begin(), r.rhs.end());
    }
    const Tape tape(roots, chart->coords());
    for (std::size_t k = 0; k < points.size(); ++k) {
      const std::vector<double> v = tape.run(points[k].x);
      for (std::size_t c = 0; c < m; ++c) {
        double d = std::abs(v[c]);
        if (config.relative) d /= std::max({1.0, std::abs(v[m + c]), std::abs(v[2 * m + c])});
        if (std::isnan(d)) d = std::numeric_limits<double>::infinity();
        if (d > worst || worst_tuple < 0) {
          worst = std::max(worst, d);
          worst_tuple = t;
          worst_point = k;
        }
      }
      for (const auto& f : r.numeric) {
        double d = f(points[k]);
        if (std::isnan(d)) d = std::numeric_limits<double>::infinity();
        if (d > worst || worst_tuple < 0) {
          worst = std::max(worst, d);
          worst_tuple = t;
          worst_point = k;
        }
      }
    }
  }
  Report rep;
  rep.case_id = geometry.id;
  rep.check_id = check.id;
  rep.points = config.points;
  rep.tuples = config.tuples;
  rep.max_residual = worst;
  rep.tolerance = config.tolerance;
  rep.pass = worst <= config.tolerance;
  rep.seed = config.seed;
  rep.diagnostic = "worst at tuple " + std::to_string(worst_tuple) + ", point (" +
                   format_point(points[worst_point], chart) + ")";
  return rep;
}

Report check_identity(std::string_view id, const GeometryCase& geometry, const SuiteConfig& config) {
  return run_check(find_check(id), geometry, config);
}

namespace {

Report failed_report(const IdentityCheck& check, const GeometryCase& geometry, const SuiteConfig& config,
                     const std::string& message) {
  Report rep;
  rep.case_id = geometry.id;
  rep.check_id = check.id;
  rep.points = config.points;
  rep.tuples = config.tuples;
  rep.max_residual = std::numeric_limits<double>::infinity();
  rep.tolerance = config.tolerance;
  rep.pass = false;
  rep.seed = config.seed;
  rep.diagnostic = message;
  return rep;
}

std::vector<Report> run_many(const std::vector<const IdentityCheck*>& checks, const GeometryCase& geometry,
                             const SuiteConfig& config) {
  validate(config);
  std::vector<Report> out(checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < checks.size(); i = next++) {
      try {
        out[i] = run_check(*checks[i], geometry, config);
      } catch (const std::exception& e) {
        out[i] = failed_report(*checks[i], geometry, config, e.what());
      }
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(checks.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::sort(out.begin(), out.end(), [](const Report& a, const Report& b) { return a.check_id < b.check_id; });
  return out;
}

}  // namespace

std::vector<Report> run_suite(const GeometryCase& geometry, const SuiteConfig& config) {
  std::vector<const IdentityCheck*> checks;
  for (const auto& c : catalog())
    if (!c.applicable || c.applicable(geometry)) checks.push_back(&c);
  return run_many(checks, geometry, config);
}

std::vector<Report> run_case_checks(const GeometryCase& geometry, const SuiteConfig& config) {
  std::vector<const IdentityCheck*> checks;
  for (const auto& c : geometry.case_checks) checks.push_back(&c);
  return run_many(checks, geometry, config);
}

}  // namespace extcalc
