#pragma once

#include <ostream>

namespace extcalc::cli {

/// Exit codes: 0 all checks pass, 1 some identity failed, 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace extcalc::cli
