#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "varbox/cli.hpp"
#include "varbox/error.hpp"
#include "varbox/problem_io.hpp"

using namespace varbox;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("varbox_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kClover = R"j({"vars": ["x", "y"], "equalities": ["(x^2+y^2)^2 - x^3 + 3*x*y^2"],
  "box": [[-2, 2], [-2, 2]], "resolution": 0.5, "degree": 5})j";

cli::Overrides one_thread() {
  cli::Overrides ov;
  ov.threads = 1;
  return ov;
}

}  // namespace

TEST_CASE("problem files") {
  std::istringstream in(kClover);
  ProblemFile p = read_problem(in);
  CHECK(p.vars.size() == 2);
  CHECK(p.degree == 5);
  CHECK(p.system().equalities.size() == 1);
  CHECK(p.epsilon_or_default() == doctest::Approx(0.05));

  std::istringstream bad(R"j({"vars": ["x", "y"], "equalities": ["x + 2y"], "box": [[0,1],[0,1]]})j");
  try {
    read_problem(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
    CHECK(std::string(e.what()).find("equalities[0]") != std::string::npos);
  }
  std::istringstream short_box(R"j({"vars": ["x", "y"], "equalities": ["x"], "box": [[0,1]]})j");
  CHECK_THROWS_AS(read_problem(short_box), Error);
  std::istringstream no_vars(R"j({"box": [[0,1]]})j");
  CHECK_THROWS_AS(read_problem(no_vars), Error);
  std::istringstream not_json("vars = x");
  CHECK_THROWS_AS(read_problem(not_json), Error);
  std::istringstream bad_res(R"j({"vars": ["x"], "equalities": ["x"], "box": [[0,1]], "resolution": 0})j");
  CHECK_THROWS_AS(read_problem(bad_res), Error);
}

TEST_CASE("result files round-trip") {
  BoxGraph g = make_graph({Box::cube(2, 0, 1), Box::cube(2, 1, 2), Box::cube(2, 5, 6)}, 1e-9);
  ResultFile r = make_result("enclose", {"x", "y"}, g);
  r.path = {0, 1};
  r.query_status = "connected";
  std::stringstream ss;
  write_result(ss, r);
  ResultFile back = read_result(ss);
  CHECK(back.boxes == r.boxes);
  CHECK(back.edges == r.edges);
  CHECK(back.components == r.components);
  CHECK(back.component_count == 2);
  CHECK(back.path == r.path);
  CHECK(back.query_status == r.query_status);

  std::istringstream bad_edge(R"j({"boxes": [[[0,1]]], "edges": [[0, 3]]})j");
  CHECK_THROWS_AS(read_result(bad_edge), Error);
  std::istringstream bad_path(R"j({"boxes": [[[0,1]]], "path": [1]})j");
  CHECK_THROWS_AS(read_result(bad_path), Error);
}

TEST_CASE("csv export re-parses to identical boxes") {
  ResultFile r;
  r.boxes = {Box(std::vector<double>{-0.1234567890123456789, 1.0 / 3.0}, std::vector<double>{0.1, 2.0 / 3.0}),
             Box(std::vector<double>{1e-300, -7.25}, std::vector<double>{3.141592653589793, 1e10})};
  r.components = {0, 1};
  std::stringstream ss;
  write_boxes_csv(ss, r);
  auto rows = read_boxes_csv(ss);
  REQUIRE(rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rows[i].second == i);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(rows[i].first.lower(j) - r.boxes[i].lower(j)) <= 1e-15 * std::max(1.0, std::abs(r.boxes[i].lower(j))));
      CHECK(std::abs(rows[i].first.upper(j) - r.boxes[i].upper(j)) <= 1e-15 * std::max(1.0, std::abs(r.boxes[i].upper(j))));
    }
  }
}

TEST_CASE("obj export") {
  ResultFile r;
  r.boxes = {Box::cube(3, 0, 1)};
  std::stringstream ss;
  write_boxes_obj(ss, r);
  std::size_t v = 0, l = 0;
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("l ", 0) == 0) ++l;
  }
  CHECK(v == 8);
  CHECK(l == 12);

  ResultFile flat;
  flat.boxes = {Box::cube(2, 0, 1)};
  std::stringstream s2;
  write_boxes_obj(s2, flat);
  CHECK(std::count(std::istreambuf_iterator<char>(s2), {}, '\n') == 4 + 4);
}

TEST_CASE("command exit codes") {
  TempDir dir;
  std::ostringstream out, log;
  const std::string clover = dir.write("clover.json", kClover);
  const std::string result = dir.file("clover_result.json");

  SUBCASE("enclose, verify and export") {
    CHECK(cli::cmd_enclose(clover, result, one_thread(), out, log) == 0);
    ResultFile r = load_result(result);
    CHECK(r.component_count == 1);
    CHECK(r.boxes.size() >= 4);
    CHECK(r.metadata_json.find("sdp_solves") != std::string::npos);
    CHECK(cli::cmd_verify(result, clover, 300, out, log) == 0);

    const std::string csv = dir.file("clover.csv");
    CHECK(cli::cmd_export(result, "csv", csv, out, log) == 0);
    std::ifstream in(csv);
    auto rows = read_boxes_csv(in);
    REQUIRE(rows.size() == r.boxes.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].first == r.boxes[i]);
    CHECK(cli::cmd_export(result, "svg", csv, out, log) == 1);

    // dropping half the boxes must be caught
    r.boxes.resize(r.boxes.size() / 2);
    r.edges.clear();
    r.components.clear();
    save_result(dir.file("truncated.json"), r);
    CHECK(cli::cmd_verify(dir.file("truncated.json"), clover, 300, out, log) == 2);
  }

  SUBCASE("budget exhaustion") {
    cli::Overrides ov = one_thread();
    ov.budget = 2;
    CHECK(cli::cmd_enclose(clover, result, ov, out, log) == 3);
    CHECK(load_result(result).incomplete);
  }

  SUBCASE("input errors") {
    const std::string bad = dir.write("bad.json", R"j({"vars": ["x", "y"], "equalities": ["x + w"], "box": [[0,1],[0,1]]})j");
    CHECK(cli::cmd_enclose(bad, result, one_thread(), out, log) == 1);
    CHECK(log.str().find("position 4") != std::string::npos);
    CHECK(cli::cmd_enclose(dir.file("missing.json"), result, one_thread(), out, log) == 1);
    const std::string line = dir.write("line.json", R"j({"vars": ["x"], "variety": "x^2-1", "box": [[-2,2]]})j");
    CHECK(cli::cmd_skeleton(line, result, one_thread(), out, log) == 1);
  }

  SUBCASE("empty variety") {
    const std::string none = dir.write("none.json", R"j({"vars": ["x", "y"], "equalities": ["x^2+y^2+1"],
      "box": [[-1,1],[-1,1]], "resolution": 0.5, "degree": 2})j");
    CHECK(cli::cmd_enclose(none, result, one_thread(), out, log) == 0);
    CHECK(load_result(result).boxes.empty());
    out.str("");
    CHECK(cli::cmd_verify(result, none, 100, out, log) == 0);
    CHECK(out.str().find("samples: 0") != std::string::npos);
    const std::string csv = dir.file("empty.csv");
    CHECK(cli::cmd_export(result, "csv", csv, out, log) == 0);
    CHECK(slurp(csv).empty());
  }

  SUBCASE("roadmap queries on two circles") {
    const std::string two = dir.write("two.json", R"j({"vars": ["x", "y"],
      "variety": "((x-2)^2+y^2-1)*((x+2)^2+y^2-1)", "box": [[-4,4],[-4,4]],
      "resolution": 0.25, "degree": 4, "epsilon": 0.01, "start": [3, 0], "goal": [-3, 0]})j");
    CHECK(cli::cmd_roadmap(two, result, one_thread(), out, log) == 2);
    CHECK(load_result(result).query_status == std::optional<std::string>("disconnected"));

    const std::string same = dir.write("same.json", R"j({"vars": ["x", "y"],
      "variety": "((x-2)^2+y^2-1)*((x+2)^2+y^2-1)", "box": [[-4,4],[-4,4]],
      "resolution": 0.25, "degree": 4, "epsilon": 0.01, "start": [3, 0], "goal": [1, 0]})j");
    CHECK(cli::cmd_roadmap(same, result, one_thread(), out, log) == 0);
    ResultFile r = load_result(result);
    CHECK_FALSE(r.path.empty());
    CHECK(cli::cmd_verify(result, same, 200, out, log) == 0);

    const std::string off = dir.write("off.json", R"j({"vars": ["x", "y"],
      "variety": "((x-2)^2+y^2-1)*((x+2)^2+y^2-1)", "box": [[-4,4],[-4,4]],
      "resolution": 0.25, "degree": 4, "epsilon": 0.01, "start": [3, 0], "goal": [0, 0]})j");
    CHECK(cli::cmd_roadmap(off, result, one_thread(), out, log) == 1);
  }

  SUBCASE("torus inner to outer") {
    const std::string torus = dir.write("torus.json", R"j({"vars": ["x", "y", "z"],
      "variety": "36*(x^2+y^2) - (5+x^2+y^2+z^2)^2", "box": [[-6,6],[-6,6],[-6,6]],
      "resolution": 0.5, "degree": 5, "epsilon": 0.01, "start": [0, 1, 0], "goal": [0, -5, 0]})j");
    CHECK(cli::cmd_roadmap(torus, result, one_thread(), out, log) == 0);
    ResultFile r = load_result(result);
    CHECK(r.query_status == std::optional<std::string>("connected"));
    REQUIRE(r.path.size() >= 2);
    // the roadmap follows g = eps, a few 1e-5 away from these points on g = 0
    CHECK(r.boxes[r.path.front()].distance(Point{0.0, 1.0, 0.0}) <= 1e-3);
    CHECK(r.boxes[r.path.back()].distance(Point{0.0, -5.0, 0.0}) <= 1e-3);
  }
}
