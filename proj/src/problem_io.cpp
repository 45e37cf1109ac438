#include "varbox/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "varbox/error.hpp"

namespace varbox {

using nlohmann::json;

namespace {

Polynomial parse_field(const std::string& field, const std::string& text,
                       const std::vector<std::string>& vars) {
  try {
    return parse_expression(text, vars);
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what(), e.position());
  }
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("problem file: missing or malformed field '") + key + "'");
  }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_field<T>(j, key);
}

json box_json(const Box& b) {
  json sides = json::array();
  for (const auto& s : b.sides()) sides.push_back({s.lo, s.hi});
  return sides;
}

Box box_from_json(const json& j) {
  std::vector<Interval> sides;
  for (const auto& s : j) {
    if (!s.is_array() || s.size() != 2) throw Error("box side must be a [lower, upper] pair");
    sides.emplace_back(s[0].get<double>(), s[1].get<double>());
  }
  return Box(std::move(sides));
}

}  // namespace

void ProblemFile::validate() const {
  if (vars.empty()) throw Error("problem file: 'vars' must not be empty");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      if (vars[i] == vars[j]) throw Error("problem file: duplicate variable '" + vars[i] + "'");
    }
  }
  if (box.dimension() != vars.size()) throw Error("problem file: 'box' needs one side per variable");
  if (!(resolution > 0.0)) throw Error("problem file: 'resolution' must be positive");
  if (degree < 2) throw Error("problem file: 'degree' must be at least 2");
  if (epsilon && !(*epsilon > 0.0)) throw Error("problem file: 'epsilon' must be positive");
  if (budget && *budget == 0) throw Error("problem file: 'budget' must be positive");
  for (const auto* p : {&start, &goal}) {
    if (*p && p->value().size() != vars.size()) {
      throw Error("problem file: query point has the wrong dimension");
    }
  }
  system();
  if (variety) g();
}

SemialgebraicSystem ProblemFile::system() const {
  std::vector<Polynomial> eqs, ineqs;
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    eqs.push_back(parse_field("equalities[" + std::to_string(i) + "]", equalities[i], vars));
  }
  for (std::size_t i = 0; i < inequalities.size(); ++i) {
    ineqs.push_back(parse_field("inequalities[" + std::to_string(i) + "]", inequalities[i], vars));
  }
  return SemialgebraicSystem(vars.size(), std::move(eqs), std::move(ineqs));
}

Polynomial ProblemFile::g() const {
  if (variety) return parse_field("variety", *variety, vars);
  SemialgebraicSystem sys = system();
  if (sys.equalities.empty()) throw Error("problem file: no equality or variety to build g from");
  if (sys.equalities.size() == 1) return sys.equalities[0];
  return sum_of_squares_combine(sys.equalities);
}

double ProblemFile::epsilon_or_default() const { return epsilon ? *epsilon : resolution / 10.0; }

ProblemFile read_problem(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("problem file must hold a JSON object");
  ProblemFile p;
  p.vars = get_field<std::vector<std::string>>(j, "vars");
  p.equalities = optional_field<std::vector<std::string>>(j, "equalities").value_or(std::vector<std::string>{});
  p.inequalities = optional_field<std::vector<std::string>>(j, "inequalities").value_or(std::vector<std::string>{});
  p.variety = optional_field<std::string>(j, "variety");
  if (!j.contains("box")) throw Error("problem file: missing field 'box'");
  p.box = box_from_json(j.at("box"));
  p.resolution = optional_field<double>(j, "resolution").value_or(p.resolution);
  p.degree = optional_field<unsigned>(j, "degree").value_or(p.degree);
  p.epsilon = optional_field<double>(j, "epsilon");
  p.start = optional_field<Point>(j, "start");
  p.goal = optional_field<Point>(j, "goal");
  p.budget = optional_field<std::size_t>(j, "budget");
  p.adjacency_tolerance = optional_field<double>(j, "adjacency_tolerance");
  p.validate();
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file '" + path + "'");
  return read_problem(in);
}

BoxGraph ResultFile::graph() const {
  BoxGraph g;
  g.boxes = boxes;
  g.edges = edges;
  g.components = components;
  g.component_count = component_count;
  g.incomplete = incomplete;
  return g;
}

ResultFile make_result(const std::string& mode, const std::vector<std::string>& vars,
                       const BoxGraph& graph) {
  ResultFile r;
  r.mode = mode;
  r.vars = vars;
  r.boxes = graph.boxes;
  r.edges = graph.edges;
  r.components = graph.components;
  r.component_count = graph.component_count;
  r.incomplete = graph.incomplete;
  return r;
}

void write_result(std::ostream& out, const ResultFile& r) {
  json j;
  j["mode"] = r.mode;
  j["vars"] = r.vars;
  j["boxes"] = json::array();
  for (const auto& b : r.boxes) j["boxes"].push_back(box_json(b));
  j["edges"] = json::array();
  for (const auto& [a, b] : r.edges) j["edges"].push_back({a, b});
  j["components"] = r.components;
  j["component_count"] = r.component_count;
  j["incomplete"] = r.incomplete;
  j["critical_boxes"] = json::array();
  for (const auto& b : r.critical_boxes) j["critical_boxes"].push_back(box_json(b));
  j["slices"] = json::array();
  for (const auto& s : r.slices) {
    j["slices"].push_back(
        {{"value", s.value}, {"box_count", s.box_count}, {"component_count", s.component_count}});
  }
  j["path"] = r.path;
  j["query_status"] = r.query_status ? json(*r.query_status) : json(nullptr);
  j["warnings"] = r.warnings;
  j["metadata"] = json::parse(r.metadata_json);
  out << j.dump(1) << '\n';
}

ResultFile read_result(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(std::string("result file is not valid JSON: ") + e.what());
  }
  ResultFile r;
  try {
    r.mode = j.value("mode", "");
    r.vars = j.value("vars", std::vector<std::string>{});
    for (const auto& b : j.at("boxes")) r.boxes.push_back(box_from_json(b));
    for (const auto& e : j.value("edges", json::array())) {
      r.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    }
    r.components = j.value("components", std::vector<std::size_t>{});
    r.component_count = j.value("component_count", std::size_t{0});
    r.incomplete = j.value("incomplete", false);
    for (const auto& b : j.value("critical_boxes", json::array())) {
      r.critical_boxes.push_back(box_from_json(b));
    }
    for (const auto& s : j.value("slices", json::array())) {
      r.slices.push_back({s.at("value").get<double>(), s.value("box_count", std::size_t{0}),
                          s.value("component_count", std::size_t{0})});
    }
    r.path = j.value("path", std::vector<std::size_t>{});
    if (j.contains("query_status") && j["query_status"].is_string()) {
      r.query_status = j["query_status"].get<std::string>();
    }
    r.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("metadata")) r.metadata_json = j["metadata"].dump();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed result file: ") + e.what());
  }
  if (r.components.size() != r.boxes.size()) {
    r.components = connected_components(r.boxes.size(), r.edges, &r.component_count);
  }
  for (const auto& [a, b] : r.edges) {
    if (a >= r.boxes.size() || b >= r.boxes.size()) throw Error("result file: edge index out of range");
  }
  for (std::size_t i : r.path) {
    if (i >= r.boxes.size()) throw Error("result file: path index out of range");
  }
  return r;
}

void save_result(const std::string& path, const ResultFile& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write result file '" + path + "'");
  write_result(out, r);
}

ResultFile load_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open result file '" + path + "'");
  return read_result(in);
}

void write_boxes_csv(std::ostream& out, const ResultFile& r) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < r.boxes.size(); ++i) {
    for (const auto& s : r.boxes[i].sides()) out << s.lo << ',' << s.hi << ',';
    out << (i < r.components.size() ? r.components[i] : 0) << '\n';
  }
  out.precision(old);
}

std::vector<std::pair<Box, std::size_t>> read_boxes_csv(std::istream& in) {
  std::vector<std::pair<Box, std::size_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3 || cells.size() % 2 == 0) throw Error("malformed box CSV row: " + line);
    std::vector<Interval> sides;
    for (std::size_t k = 0; k + 1 < cells.size(); k += 2) {
      sides.emplace_back(std::stod(cells[k]), std::stod(cells[k + 1]));
    }
    rows.emplace_back(Box(std::move(sides)), std::stoul(cells.back()));
  }
  return rows;
}

void write_boxes_obj(std::ostream& out, const ResultFile& r) {
  const auto old = out.precision(17);
  std::size_t base = 1;
  for (const auto& b : r.boxes) {
    const std::size_t n = std::min<std::size_t>(b.dimension(), 3);
    auto coord = [&](std::size_t j, bool hi) { return j < n ? (hi ? b.upper(j) : b.lower(j)) : 0.0; };
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t c = 0; c < corners; ++c) {
      out << "v " << coord(0, c & 1) << ' ' << coord(1, c & 2) << ' ' << coord(2, c & 4) << '\n';
    }
    // corners that differ in one bit share an edge
    for (std::size_t c = 0; c < corners; ++c) {
      for (std::size_t bit = 0; bit < n; ++bit) {
        const std::size_t d = c | (std::size_t{1} << bit);
        if (d != c) out << "l " << base + c << ' ' << base + d << '\n';
      }
    }
    base += corners;
  }
  out.precision(old);
}

}  // namespace varbox
