#pragma once

// Catalog of identity checks, seeded sampling and residual reports.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "extcalc/connection.hpp"
#include "extcalc/geometry.hpp"
#include "extcalc/sampling.hpp"

namespace extcalc {

struct GeometryCase;

struct SuiteConfig {
  int points = 20;
  int tuples = 5;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  /// Divide each residual by max(1, |lhs|, |rhs|) instead of using it raw.
  bool relative = false;
  /// Worker threads for run_suite; 0 picks the hardware concurrency.
  int threads = 0;
};

struct Report {
  std::string case_id;
  std::string check_id;
  int points = 0;
  int tuples = 0;
  double max_residual = 0.0;  // +inf when evaluation failed
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string diagnostic;  // worst point / tuple or error message; not serialised in JSON
};

/// Both sides of an identity, compared componentwise.
struct Residual {
  std::vector<Expr> lhs;
  std::vector<Expr> rhs;

  void add(Expr l, Expr r) {
    lhs.push_back(std::move(l));
    rhs.push_back(std::move(r));
  }
  void add(const VectorField& l, const VectorField& r);
  void add(const TensorValue& l, const TensorValue& r);

  /// Residuals that are not differences of expressions (for example a matrix
  /// rank defect); each returns a non-negative value at a point.
  std::vector<std::function<double(const Point&)>> numeric;
};

struct CheckInputs {
  const GeometryCase& geometry;
  const Connection& lhs;  // connection used for left-hand sides
  const Connection& rhs;  // connection used for right-hand sides
  FieldSampler& sampler;  // seeded per argument tuple
};

struct IdentityCheck {
  std::string id;
  std::string name;
  std::string anchor;
  /// Empty means always applicable.
  std::function<bool(const GeometryCase&)> applicable;
  std::function<Residual(CheckInputs&)> build;
};

class CheckNotApplicable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownCheck : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The generic catalog, in id order.
const std::vector<IdentityCheck>& catalog();
const IdentityCheck& find_check(std::string_view id);

struct SampleSpec {
  int vector_fields = 0;
  std::vector<int> form_degrees;
  int functions = 0;
  int points = 0;
};

struct Samples {
  std::vector<VectorField> fields;
  std::vector<PForm> forms;
  std::vector<Expr> functions;
  std::vector<Point> points;
};

/// Deterministic for a fixed seed. Throws DegreeError for form degrees above
/// the chart dimension.
Samples sample_fields(const ChartPtr& chart, std::uint64_t seed, const SampleSpec& spec);

/// Evaluates one check. Throws CheckNotApplicable, UnknownCheck, or
/// DomainError when evaluation fails.
Report check_identity(std::string_view id, const GeometryCase& geometry, const SuiteConfig& config);
Report run_check(const IdentityCheck& check, const GeometryCase& geometry, const SuiteConfig& config);

/// Runs every applicable generic check; evaluation failures are reported with
/// an infinite residual. Reports are sorted by check id.
std::vector<Report> run_suite(const GeometryCase& geometry, const SuiteConfig& config);

/// Runs the case-specific checks attached to the case.
std::vector<Report> run_case_checks(const GeometryCase& geometry, const SuiteConfig& config);

}  // namespace extcalc
