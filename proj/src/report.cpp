#include "extcalc/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace extcalc {

std::string format_text(const std::vector<Report>& reports) {
  std::string out;
  char buf[128];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "max_residual=%.3e tol=%.1e", r.max_residual, r.tolerance);
    out += (r.pass ? "PASS " : "FAIL ") + r.case_id + " " + r.check_id + " " + buf +
           " points=" + std::to_string(r.points) + " tuples=" + std::to_string(r.tuples) +
           " seed=" + std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string format_json(const std::vector<Report>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json o;
    o["case"] = r.case_id;
    o["check"] = r.check_id;
    o["points"] = r.points;
    o["tuples"] = r.tuples;
    if (std::isfinite(r.max_residual))
      o["max_residual"] = r.max_residual;
    else
      o["max_residual"] = nullptr;
    o["tol"] = r.tolerance;
    o["pass"] = r.pass;
    o["seed"] = r.seed;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace extcalc
