#pragma once

// Declarative case files.
//
//   # comment
//   [chart]
//   name = twisted
//   coords = x y z
//   domain = -1 1, -1 1, -1 1     (optional; default [-1, 1] per coordinate)
//   trig = false                  (optional)
//
//   [christoffel]                 Gamma^k_ij, indices 1-based: k i j = expr
//   3 1 2 = 1
//
//   [metric]                      g_ij = expr; setting (i, j) also sets (j, i)
//   1 1 = 1
//
//   [forms]                       name i1 .. ip = expr, increasing indices
//   alpha 3 = 1
//
//   [fields]                      name i = expr
//   V 3 = 1
//
// Without [christoffel] the connection is the Levi-Civita connection of the
// metric, or the flat connection when there is no metric either.

#include <stdexcept>
#include <string>
#include <string_view>

#include "extcalc/gallery.hpp"

namespace extcalc {

class CaseFileError : public std::runtime_error {
 public:
  CaseFileError(const std::string& source, int line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// `source` names the text in error messages; its file stem is the case id
/// unless [chart] sets a name.
GeometryCase parse_case_text(std::string_view text, const std::string& source = "case");
GeometryCase load_case_file(const std::string& path);

}  // namespace extcalc
