// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "extcalc/gallery.hpp"
#include "extcalc/identity_suite.hpp"
#include "extcalc/structure_forms.hpp"

using namespace extcalc;

namespace {

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void require(const Report& r, double tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %s residual %.3e (tol %.0e)", r.case_id.c_str(), r.check_id.c_str(),
                  r.max_residual, tol);
    require(r.max_residual <= tol, buf);
  }
  void require_value(const std::string& what, double residual, double tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s residual %.3e (tol %.0e)", what.c_str(), residual, tol);
    require(residual <= tol, buf);
  }
};

SuiteConfig config_with(double tol) {
  SuiteConfig c;
  c.tolerance = tol;
  return c;
}

std::map<std::string, Report> by_id(const std::vector<Report>& reports) {
  std::map<std::string, Report> out;
  for (const auto& r : reports) out[r.check_id] = r;
  return out;
}

Report case_check(const GeometryCase& c, const std::string& id, const SuiteConfig& config) {
  for (const auto& k : c.case_checks)
    if (k.id == id) return run_check(k, c, config);
  Report missing;
  missing.case_id = c.id;
  missing.check_id = id + " (missing)";
  missing.max_residual = INFINITY;
  return missing;
}

IdentityCheck custom(std::string id, std::function<Residual(CheckInputs&)> build) {
  return IdentityCheck{std::move(id), "", "", {}, std::move(build)};
}

std::vector<VectorField> fields(CheckInputs& in, int count) { return in.sampler.random_vector_fields(count); }

std::vector<std::string> random_poly_ids(int dim) {
  std::vector<std::string> out;
  for (int seed = 0; seed < 5; ++seed)
    out.push_back("random_poly:" + std::to_string(seed) + (dim == 3 ? "" : ":" + std::to_string(dim)));
  return out;
}

Criterion generic_suite() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> ids{"flat_euclidean", "flat_with_torsion", "sphere_lc"};
  for (const auto& id : random_poly_ids(3)) ids.push_back(id);
  for (const auto& id : ids) {
    const auto reports = run_suite(build_case(id), config_with(1e-8));
    int passed = 0;
    double worst = 0;
    std::string failed;
    for (const auto& r : reports) {
      passed += r.pass;
      worst = std::max(worst, r.max_residual);
      if (!r.pass) failed += " " + r.check_id;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %d of %zu checks pass, worst residual %.3e%s", id.c_str(), passed,
                  reports.size(), worst, failed.c_str());
    c.require(reports.size() == 18 && passed == 18, buf);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "runtime %.1f s (limit 120 s)", seconds);
  c.require(seconds < 120, buf);
  return c;
}

Criterion p_forms() {
  Criterion c;
  for (const auto& id : random_poly_ids(4)) {
    const GeometryCase g = build_case(id);
    c.require(check_identity("S1p", g, config_with(1e-8)), 1e-8);
    c.require(check_identity("S2p", g, config_with(1e-8)), 1e-8);
    // For p = 1 the general forms reduce to theta(T(X, Y)) and theta(R(X, Y)Z).
    const IdentityCheck t1 = custom("T_theta p=1 vs theta(T)", [](CheckInputs& in) {
      const PForm theta = in.sampler.random_form(1);
      auto X = fields(in, 2);
      Residual r;
      r.add(torsion_form_at(in.lhs, theta, X), theta({torsion_at(in.lhs, X[0], X[1])}));
      return r;
    });
    const IdentityCheck r1 = custom("R_theta,Z p=1 vs theta(R Z)", [](CheckInputs& in) {
      const PForm theta = in.sampler.random_form(1);
      const VectorField Z = in.sampler.random_vector_field();
      auto X = fields(in, 2);
      Residual r;
      r.add(curvature_form_at(in.lhs, theta, Z, X), theta({curvature_at(in.lhs, X[0], X[1], Z)}));
      return r;
    });
    c.require(run_check(t1, g, config_with(1e-12)), 1e-12);
    c.require(run_check(r1, g, config_with(1e-12)), 1e-12);
  }
  return c;
}

Criterion equivalence() {
  Criterion c;
  for (const auto& info : case_catalog()) {
    const auto m = by_id(run_suite(build_case(info.id), config_with(1e-8)));
    bool first = true, second = true;
    for (const char* id : {"B1v", "C1", "DB1"}) first = first && m.at(id).pass == m.at("B1").pass;
    for (const char* id : {"B2v", "C2", "DB2"}) second = second && m.at(id).pass == m.at("B2").pass;
    c.require(first, info.id + ": {B1, B1v, C1, DB1} verdicts agree");
    c.require(second, info.id + ": {B2, B2v, C2, DB2} verdicts agree");
    c.require(m.at("E1"), 1e-8);
  }
  return c;
}

Criterion mutation() {
  Criterion c;
  const GeometryCase base = build_case("flat_with_torsion");
  auto first_order_fails = [&](const GeometryCase& g) {
    for (const char* id : {"S1", "B1v", "D1"})
      if (!check_identity(id, g, config_with(1e-8)).pass) return true;
    return false;
  };
  // Gamma^x_yz + 1
  const GeometryCase m = mutate_case(base, 0, 1, 2, Expr(1));
  const Report s1 = check_identity("S1", m, config_with(1e-8));
  char buf[256];
  std::snprintf(buf, sizeof buf, "Gamma^x_yz + 1: S1 residual %.3e, some of {S1, B1v, D1} fails", s1.max_residual);
  c.require(first_order_fails(m), buf);
  int caught = 0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) caught += first_order_fails(mutate_case(base, k, i, j, Expr(1)));
  c.notes.push_back("info {S1, B1v, D1} catch " + std::to_string(caught) + " of 27 single-component mutations");
  return c;
}

Criterion contact() {
  Criterion c;
  const GeometryCase g = build_case("contact_r3");
  for (const char* id : {"contact.nabla_V_V", "contact.nabla_V_alpha", "contact.omega_alpha_V", "contact.R_alpha_V",
                         "contact.V_dR_alpha_V"})
    c.require(case_check(g, id, config_with(1e-8)), 1e-8);
  char buf[128];
  std::snprintf(buf, sizeof buf, "info contact.V_dR_alpha_V_full residual %.3e",
                case_check(g, "contact.V_dR_alpha_V_full", config_with(1e-8)).max_residual);
  c.notes.push_back(buf);
  const CoFrame f = g.frame();
  const PForm alpha = f.coframe[2];
  FieldSampler points(g.chart, 101);
  const auto pts = points.random_points(20);
  const ContactStructure cs = derive_contact_structure(alpha, pts);
  FieldSampler s(g.chart, 102);
  for (const auto& [name, residual] : contact_invariant_residuals(cs, pts, s)) c.require_value(name, residual, 1e-8);
  return c;
}

Criterion foliation() {
  Criterion c;
  const GeometryCase g = build_case("foliation_adapted");
  for (const char* id : {"foliation.T_theta_D_frobenius", "foliation.T_theta_D", "foliation.R_theta_X"})
    c.require(case_check(g, id, config_with(1e-8)), 1e-8);

  GeometryCase contact = build_case("contact_r3");
  const CoFrame f = contact.frame();
  const Report neg =
      run_check(restricted_torsion_check("alpha restricted", f.coframe[2], {f.frame[0], f.frame[1]}), contact,
                config_with(1e-8));
  char buf[256];
  std::snprintf(buf, sizeof buf, "negative control: contact alpha on ker alpha fails, residual %.3e",
                neg.max_residual);
  c.require(!neg.pass, buf);

  const GeometryCase g4 = build_case("foliation_adapted_n4");
  c.require(case_check(g4, "foliation.dT_theta_D", config_with(1e-8)), 1e-8);
  return c;
}

Criterion mechanics() {
  Criterion c;
  const GeometryCase g = build_case("sode_oscillator");
  c.require(case_check(g, "sode.theta_L", config_with(1e-12)), 1e-12);
  for (const char* id : {"sode.dOmega", "sode.Omega_psi_theta", "sode.euler_lagrange", "sode.massa_pagani",
                         "sode.helmholtz_T_GHH", "sode.helmholtz_T_GVV", "sode.helmholtz_Xi_GVH",
                         "sode.helmholtz_Xi_VVH", "sode.rank"})
    c.require(case_check(g, id, config_with(1e-9)), 1e-9);

  const SodeStructure sode = make_sode(1, {"-x"});
  FieldSampler ps(sode.chart, 7);
  const auto pts = ps.random_points(20);
  const Connection mp = derive_massa_pagani(sode, pts);
  FieldSampler s(sode.chart, 8);
  for (const auto& [name, residual] : massa_pagani_residuals(sode, mp, pts, s)) c.require_value(name, residual, 1e-9);
  const Expr x = sode.chart->coord("x"), u = sode.chart->coord("u");
  const CartanForm cf = build_cartan_form(sode, (u * u - x * x) / Expr(2), pts);
  int full_rank = 0;
  for (const auto& p : pts) full_rank += numeric_rank(cf.omega, p) == 2;
  c.require(full_rank == 20, "rank of Omega is 2 at " + std::to_string(full_rank) + " of 20 points");
  return c;
}

Criterion dual_paths() {
  Criterion c;
  SuiteConfig cfg = config_with(1e-9);
  cfg.tuples = 20;
  for (const char* id : {"sphere_lc", "random_poly:0", "random_poly:2:4"}) {
    const GeometryCase g = build_case(id);
    for (int p = 1; p <= 2; ++p) {
      const IdentityCheck d = custom("d coordinate vs intrinsic, p=" + std::to_string(p), [p](CheckInputs& in) {
        const PForm theta = in.sampler.random_form(p);
        const PForm dtheta = exterior_derivative(theta);
        auto X = fields(in, p + 1);
        Residual r;
        r.numeric.push_back([=](const Point& pt) {
          return std::abs(evaluate_at(dtheta(X), pt) - exterior_derivative_intrinsic(theta, X, pt));
        });
        return r;
      });
      c.require(run_check(d, g, cfg), 1e-9);
    }
    const IdentityCheck curv = custom("R(X,Y)Z definition vs components", [](CheckInputs& in) {
      auto X = fields(in, 3);
      Residual r;
      r.add(curvature_at(in.lhs, X[0], X[1], X[2]), curvature_from_components(in.lhs, X[0], X[1], X[2]));
      return r;
    });
    c.require(run_check(curv, g, cfg), 1e-9);
  }
  // T_{Theta,Z} = d omega_{Theta,Z} - R_{Theta,Z} + Psi_{Theta,Z} against its direct evaluation.
  for (const char* id : {"random_poly:3:4", "random_poly:4:4"}) {
    const GeometryCase g = build_case(id);
    for (int p = 2; p <= 3; ++p) {
      const IdentityCheck t = custom("T_Theta,Z implied vs direct, p=" + std::to_string(p), [p](CheckInputs& in) {
        const PForm theta = in.sampler.random_form(p);
        const VectorField Z = in.sampler.random_vector_field();
        auto X = fields(in, p + 1);
        Residual r;
        r.add(exterior_derivative(connection_form(in.lhs, theta, Z))(X) - curvature_form_at(in.lhs, theta, Z, X) +
                  psi_form_at(in.lhs, theta, Z, X),
              torsion_mixed_form_at(in.lhs, theta, Z, X));
        return r;
      });
      c.require(run_check(t, g, config_with(1e-8)), 1e-8);
    }
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"generic identity suite on baseline and random connections", generic_suite},
      {"p-form structure equations on R^4", p_forms},
      {"equivalent Bianchi formulations agree", equivalence},
      {"mutation sensitivity", mutation},
      {"contact metric application", contact},
      {"foliation application", foliation},
      {"mechanics application", mechanics},
      {"dual-path oracles", dual_paths},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    failed += !c.pass;
    std::printf("%s %zu %s\n", c.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  return failed;
}
