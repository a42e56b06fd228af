#include "cli.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "extcalc/case_file.hpp"
#include "extcalc/gallery.hpp"
#include "extcalc/identity_suite.hpp"
#include "extcalc/report.hpp"

namespace extcalc::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerifyOptions {
  std::vector<std::string> cases;
  std::vector<std::string> case_files;
  std::vector<std::string> checks;
  bool all_cases = false;
  bool all_checks = false;
  int points = 20;
  int tuples = 5;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  int dim = 3;
  std::string format = "text";
  bool relative = false;
  int threads = 0;
};

std::vector<GeometryCase> load_cases(const VerifyOptions& o) {
  std::vector<std::string> ids = o.cases;
  if (o.all_cases)
    for (const auto& c : case_catalog()) ids.push_back(c.id);
  if (ids.empty() && o.case_files.empty()) throw UsageError("no case selected (use --case, --all-cases or --case-file)");
  const CaseOptions options{o.seed, o.dim};
  std::vector<GeometryCase> out;
  for (const auto& id : ids) out.push_back(build_case(id, options));
  for (const auto& path : o.case_files) out.push_back(load_case_file(path));
  return out;
}

int verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  SuiteConfig config;
  config.points = o.points;
  config.tuples = o.tuples;
  config.tolerance = o.tolerance;
  config.seed = o.seed;
  config.relative = o.relative;
  config.threads = o.threads;

  const std::vector<GeometryCase> cases = load_cases(o);

  // Every requested check must exist in the catalog or in some selected case.
  const std::set<std::string> wanted(o.checks.begin(), o.checks.end());
  for (const auto& id : wanted) {
    bool known = std::any_of(catalog().begin(), catalog().end(), [&](const auto& c) { return c.id == id; });
    for (const auto& c : cases)
      known = known || std::any_of(c.case_checks.begin(), c.case_checks.end(),
                                   [&](const auto& k) { return k.id == id; });
    if (!known) throw UsageError("unknown check '" + id + "'");
  }
  const bool everything = wanted.empty() || o.all_checks;

  std::vector<Report> reports;
  for (const auto& c : cases) {
    std::vector<Report> rs;
    if (everything) {
      rs = run_suite(c, config);
      auto extra = run_case_checks(c, config);
      rs.insert(rs.end(), extra.begin(), extra.end());
    } else {
      GeometryCase selected = c;
      selected.case_checks.clear();
      for (const auto& k : c.case_checks)
        if (wanted.count(k.id)) selected.case_checks.push_back(k);
      for (const auto& k : catalog())
        if (wanted.count(k.id)) selected.case_checks.push_back(k);
      rs = run_case_checks(selected, config);
    }
    reports.insert(reports.end(), rs.begin(), rs.end());
  }
  std::stable_sort(reports.begin(), reports.end(), [](const Report& a, const Report& b) {
    return a.case_id != b.case_id ? a.case_id < b.case_id : a.check_id < b.check_id;
  });

  out << (o.format == "json" ? format_json(reports) : format_text(reports));
  int failed = 0;
  for (const auto& r : reports)
    if (!r.pass) {
      ++failed;
      err << "FAIL " << r.case_id << " " << r.check_id << ": " << r.diagnostic << "\n";
    }
  err << (reports.size() - failed) << " of " << reports.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

int list(const std::string& what, std::ostream& out) {
  if (what == "cases") {
    for (const auto& c : case_catalog()) out << c.id << "  " << c.description << "\n";
  } else {
    for (const auto& c : catalog()) out << c.id << "  " << c.name << "  [" << c.anchor << "]\n";
  }
  return 0;
}

int describe(const std::string& id, const std::string& case_file, std::uint64_t seed, int dim, std::ostream& out) {
  if (id.empty() == case_file.empty()) throw UsageError("describe-case needs a case id or --case-file");
  const GeometryCase c = case_file.empty() ? build_case(id, CaseOptions{seed, dim}) : load_case_file(case_file);
  out << c.id << ": " << c.description << "\n";
  out << "chart " << c.chart->name() << " (";
  for (int i = 0; i < c.chart->dim(); ++i) {
    const auto& iv = c.chart->domain()[i];
    out << (i ? ", " : "") << c.chart->coords()[i] << " in [" << iv.lo << ", " << iv.hi << "]";
  }
  out << ")\n";
  for (const auto& [label, value] : c.details) out << "  " << label << " = " << value << "\n";
  if (c.case_checks.empty()) {
    out << "case checks: none\n";
  } else {
    out << "case checks:\n";
    for (const auto& k : c.case_checks) out << "  " << k.id << "  " << k.name << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verify structure equations and Bianchi identities on concrete geometries", "extcalc"};
  app.require_subcommand(1);

  VerifyOptions v;
  auto* verify_cmd = app.add_subcommand("verify", "run identity checks on cases");
  verify_cmd->add_option("--case", v.cases, "case id (repeatable); random_poly:SEED[:DIM] is accepted");
  verify_cmd->add_flag("--all-cases", v.all_cases, "every built-in case");
  verify_cmd->add_option("--case-file", v.case_files, "declarative case file (repeatable)")->check(CLI::ExistingFile);
  verify_cmd->add_option("--check", v.checks, "check id (repeatable); default is every check");
  verify_cmd->add_flag("--all-checks", v.all_checks, "generic catalog plus case-specific checks");
  verify_cmd->add_option("--points", v.points, "sample points per check")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--tuples", v.tuples, "argument tuples per check")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--tol", v.tolerance, "tolerance on the max residual")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", v.seed, "sampling seed; also the random_poly seed");
  verify_cmd->add_option("--dim", v.dim, "dimension for random_poly")->check(CLI::Range(2, 6));
  verify_cmd->add_option("--format", v.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_flag("--relative", v.relative, "divide residuals by max(1, |lhs|, |rhs|)");
  verify_cmd->add_option("--threads", v.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);

  std::string what;
  auto* list_cmd = app.add_subcommand("list", "list cases or checks");
  list_cmd->add_option("what", what, "cases or checks")->required()->check(CLI::IsMember({"cases", "checks"}));

  std::string describe_id, describe_file;
  std::uint64_t describe_seed = 0;
  int describe_dim = 3;
  auto* describe_cmd = app.add_subcommand("describe-case", "print a case and its case-specific checks");
  describe_cmd->add_option("id", describe_id, "case id");
  describe_cmd->add_option("--case-file", describe_file, "declarative case file")->check(CLI::ExistingFile);
  describe_cmd->add_option("--seed", describe_seed, "random_poly seed");
  describe_cmd->add_option("--dim", describe_dim, "random_poly dimension")->check(CLI::Range(2, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (verify_cmd->parsed()) return verify(v, out, err);
    if (list_cmd->parsed()) return list(what, out);
    return describe(describe_id, describe_file, describe_seed, describe_dim, out);
  } catch (const UnknownCase& e) {
    err << "error: " << e.what() << "\n";
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const CaseFileError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace extcalc::cli
