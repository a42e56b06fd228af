#pragma once

#include <string>
#include <vector>

#include "extcalc/identity_suite.hpp"

namespace extcalc {

/// One line per report.
std::string format_text(const std::vector<Report>& reports);

/// A JSON array with one object per report, keys in the order
/// case, check, points, tuples, max_residual, tol, pass, seed.
/// An infinite residual is written as null.
std::string format_json(const std::vector<Report>& reports);

}  // namespace extcalc
