#include "extcalc/case_file.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace extcalc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

struct Entry {
  int line;
  std::string key;
  std::string value;
};

struct Parser {
  std::string source;
  std::map<std::string, std::vector<Entry>> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const { throw CaseFileError(source, line, msg); }

  void read(std::string_view text) {
    static const char* known[] = {"chart", "christoffel", "metric", "forms", "fields"};
    std::string current;
    int line_no = 0;
    std::istringstream is{std::string(text)};
    for (std::string raw; std::getline(is, raw);) {
      ++line_no;
      std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        current = trim(std::string_view(line).substr(1, line.size() - 2));
        if (std::find(std::begin(known), std::end(known), current) == std::end(known))
          fail(line_no, "unknown section [" + current + "]");
        if (sections.count(current)) fail(line_no, "duplicate section [" + current + "]");
        sections[current];
        continue;
      }
      if (current.empty()) fail(line_no, "entry outside a section");
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      sections[current].push_back({line_no, trim(std::string_view(line).substr(0, eq)),
                                   trim(std::string_view(line).substr(eq + 1))});
    }
  }

  const std::vector<Entry>* section(const std::string& name) const {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  }

  std::vector<int> indices(const Entry& e, const std::vector<std::string>& parts, std::size_t from, int n) const {
    std::vector<int> out;
    for (std::size_t k = from; k < parts.size(); ++k) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(parts[k], &used);
        if (used != parts[k].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(e.line, "expected an index, got '" + parts[k] + "'");
      }
      if (v < 1 || v > n) fail(e.line, "index " + parts[k] + " outside 1.." + std::to_string(n));
      out.push_back(v - 1);
    }
    return out;
  }

  Expr expression(const Entry& e, const ChartPtr& chart) const {
    try {
      return chart->parse(e.value);
    } catch (const ParseError& err) {
      fail(e.line, err.what());
    }
  }
};

}  // namespace

GeometryCase parse_case_text(std::string_view text, const std::string& source) {
  Parser p{source, {}};
  p.read(text);

  const auto* chart_section = p.section("chart");
  if (!chart_section) p.fail(0, "missing [chart] section");
  std::string name = std::filesystem::path(source).stem().string();
  std::vector<std::string> coords;
  std::vector<Interval> domain;
  bool trig = false;
  int domain_line = 0;
  std::string domain_text;
  for (const auto& e : *chart_section) {
    if (e.key == "name") {
      name = e.value;
    } else if (e.key == "coords") {
      coords = words(e.value);
    } else if (e.key == "domain") {
      domain_text = e.value;
      domain_line = e.line;
    } else if (e.key == "trig") {
      if (e.value != "true" && e.value != "false") p.fail(e.line, "trig must be true or false");
      trig = e.value == "true";
    } else {
      p.fail(e.line, "unknown chart key '" + e.key + "'");
    }
  }
  if (coords.empty()) p.fail(0, "[chart] needs coords");
  const int n = static_cast<int>(coords.size());
  if (domain_text.empty()) {
    domain.assign(n, Interval{-1.0, 1.0});
  } else {
    std::istringstream is(domain_text);
    for (std::string part; std::getline(is, part, ',');) {
      std::istringstream ps(part);
      Interval iv;
      std::string rest;
      if (!(ps >> iv.lo >> iv.hi) || (ps >> rest)) p.fail(domain_line, "domain entries are 'lo hi'");
      if (!(iv.lo <= iv.hi)) p.fail(domain_line, "empty sampling domain");
      domain.push_back(iv);
    }
    if (static_cast<int>(domain.size()) != n) p.fail(domain_line, "domain needs one interval per coordinate");
  }
  ChartPtr chart;
  try {
    chart = make_chart(name, coords, domain, trig);
  } catch (const std::exception& err) {
    p.fail(0, err.what());
  }

  std::optional<Metric> metric;
  if (const auto* sec = p.section("metric")) {
    SymMatrix g(n);
    for (const auto& e : *sec) {
      auto idx = p.indices(e, words(e.key), 0, n);
      if (idx.size() != 2) p.fail(e.line, "metric entries are 'i j = expr'");
      g(idx[0], idx[1]) = p.expression(e, chart);
      g(idx[1], idx[0]) = g(idx[0], idx[1]);
    }
    metric = Metric(chart, g);
  }

  bool is_levi_civita = false;
  std::optional<Connection> nabla;
  if (const auto* sec = p.section("christoffel")) {
    std::vector<Expr> gamma(static_cast<std::size_t>(n) * n * n);
    for (const auto& e : *sec) {
      auto idx = p.indices(e, words(e.key), 0, n);
      if (idx.size() != 3) p.fail(e.line, "christoffel entries are 'k i j = expr'");
      gamma[(idx[0] * n + idx[1]) * n + idx[2]] = p.expression(e, chart);
    }
    nabla = Connection(chart, gamma);
  } else if (metric) {
    is_levi_civita = true;
    try {
      FieldSampler s(chart, stable_hash(name));
      nabla = levi_civita(*metric, s.random_points(20));
    } catch (const std::exception& err) {
      throw ValidationError("metric nondegenerate and symmetric", err.what());
    }
  } else {
    nabla = Connection::flat(chart);
  }

  GeometryCase c{name, "user case from " + source, chart, *nabla, {}, metric, CoFrame::coordinate(chart), {}, {}};
  c.details.emplace_back("connection", is_levi_civita ? "Levi-Civita of the metric"
                                                   : (p.section("christoffel") ? "declared Christoffel symbols" : "flat"));

  // Distinguished forms and fields are listed by name, in file order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<int, std::vector<std::pair<std::vector<int>, Expr>>>> forms;
  if (const auto* sec = p.section("forms")) {
    for (const auto& e : *sec) {
      auto parts = words(e.key);
      if (parts.size() < 2) p.fail(e.line, "form entries are 'name i1 .. ip = expr'");
      auto idx = p.indices(e, parts, 1, n);
      if (!std::is_sorted(idx.begin(), idx.end()) || std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        p.fail(e.line, "form indices must be strictly increasing");
      auto [it, inserted] = forms.try_emplace(parts[0]);
      if (inserted) {
        it->second.first = static_cast<int>(idx.size());
        order.push_back(parts[0]);
      } else if (it->second.first != static_cast<int>(idx.size())) {
        p.fail(e.line, "form '" + parts[0] + "' used with different degrees");
      }
      it->second.second.emplace_back(idx, p.expression(e, chart));
    }
  }
  for (const auto& f : order) {
    const auto& [degree, comps] = forms[f];
    PForm form(chart, degree);
    std::vector<Expr> values = form.components();
    for (const auto& [idx, expr] : comps) values[tuple_position(n, idx)] = expr;
    c.details.emplace_back(f, to_text(PForm(chart, degree, values)));
  }

  std::vector<std::string> field_order;
  std::map<std::string, std::vector<Expr>> fields;
  if (const auto* sec = p.section("fields")) {
    for (const auto& e : *sec) {
      auto parts = words(e.key);
      if (parts.size() != 2) p.fail(e.line, "field entries are 'name i = expr'");
      auto idx = p.indices(e, parts, 1, n);
      auto [it, inserted] = fields.try_emplace(parts[0], std::vector<Expr>(n));
      if (inserted) field_order.push_back(parts[0]);
      it->second[idx[0]] = p.expression(e, chart);
    }
  }
  for (const auto& f : field_order) c.details.emplace_back(f, to_text(VectorField(chart, fields[f])));

  validate_case(c, is_levi_civita);
  return c;
}

GeometryCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseFileError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_case_text(ss.str(), path);
}

}  // namespace extcalc
