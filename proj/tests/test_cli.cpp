#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "horizon/cli.hpp"

using namespace horizon;
using namespace horizon::cli;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
    } else {
      field += ch;
    }
  }
  return rows;
}

// (candidate, condition) -> status from a check report.
std::map<std::pair<std::string, std::string>, std::string> statuses(const std::string& csv) {
  std::map<std::pair<std::string, std::string>, std::string> m;
  const auto rows = parse_csv(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) m[{rows[i][1], rows[i][2]}] = rows[i][3];
  return m;
}

}  // namespace

TEST_CASE("numbers print with nine significant digits") {
  CHECK(format_number(2.4) == "2.4");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(147.361264) == "147.361264");
  CHECK(format_number(-1e-20) == "-1e-20");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("tables serialize to csv and json with the schema first") {
  ReportTable t{"demo_v1", {"name", "x", "n"}, {{std::string("a,b"), 1.5, 3LL}, {std::string("c"), std::nan(""), 4LL}}};
  const std::string csv = to_csv(t);
  CHECK(csv.rfind("schema,name,x,n\n", 0) == 0);
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "demo_v1");
  CHECK(rows[1][1] == "a,b");
  CHECK(rows[2][2] == "nan");
  const auto j = nlohmann::json::parse(to_json(t));
  CHECK(j["schema"] == "demo_v1");
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["x"] == 1.5);
  CHECK(j["rows"][1]["x"].is_null());
  CHECK(j["rows"][1]["n"] == 4);
}

TEST_CASE("list-examples names every builtin") {
  const Result r = call({"list-examples"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "schema");
  CHECK(rows[1][1] == "ramsey");
  CHECK(rows[2][1] == "integrator");
  CHECK(rows[3][1] == "oscillator");
}

TEST_CASE("configuration errors exit with code 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"check", "--example", "nope"}).code == 2);
  CHECK(call({"check", "--format", "xml"}).code == 2);
  CHECK(call({"check", "--bogus"}).code == 2);
  CHECK(call({"check", "--example", "ramsey", "--theta", "1"}).code == 2);
  CHECK(call({"check", "--tol", "-1"}).code == 2);
  CHECK(call({"phase-diagram", "--example", "oscillator"}).code == 2);
  CHECK(call({"needle", "--example", "integrator", "--u", "3"}).code == 2);
  CHECK_FALSE(call({"check", "--example", "nope"}).err.empty());
}

TEST_CASE("integration failures exit with code 3") {
  const Result r = call({"needle", "--example", "ramsey", "--k0", "0.5", "--u", "23", "--tau", "0.1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("check reports for the integrator") {
  SUBCASE("discounted") {
    const Result r = call({"check", "--example", "integrator", "--rho", "0.1", "--a0", "0"});
    REQUIRE(r.code == 0);
    const auto s = statuses(r.out);
    for (const char* c : {"tcPSI", "tcXPSI", "tcM", "tcKAV", "max_principle", "costate_decomposition"}) {
      CHECK(s.at({"normal", c}) == "holds");
    }
    CHECK(s.at({"u_hat", "jx_bounded"}) == "holds");
    CHECK(s.at({"u_hat", "limit_costate"}) == "holds");
    CHECK(s.at({"u_hat", "prop1_woo"}) == "holds");
    CHECK(s.at({"u_hat", "prop1_oo"}) == "holds");
  }
  SUBCASE("undiscounted") {
    const Result r = call({"check", "--example", "integrator", "--rho", "0"});
    REQUIRE(r.code == 0);
    const auto s = statuses(r.out);
    for (const char* c : {"tcPSI", "tcXPSI", "tcM", "tcKAV"}) CHECK(s.at({"abnormal", c}) == "fails");
    CHECK(s.at({"abnormal", "max_principle"}) == "holds");
    CHECK(s.at({"normal", "max_principle"}) == "fails");
    CHECK(s.at({"u_hat", "jx_bounded"}) == "fails");
    CHECK(s.at({"u_hat", "prop1_oo"}) == "holds");
  }
}

TEST_CASE("check report for the oscillator") {
  const Result r = call({"check", "--example", "oscillator", "--b", "0.5"});
  REQUIRE(r.code == 0);
  const auto s = statuses(r.out);
  for (const char* c : {"tcPSI", "tcXPSI", "tcM", "tcKAV"}) CHECK(s.at({"generic", c}) == "fails");
  CHECK(s.at({"generic", "max_principle"}) == "holds");
  CHECK(s.at({"r_sin_phi_eq_minus_b", "tcM"}) == "holds");
  CHECK(s.at({"u_hat", "jx_bounded"}) == "holds");
  CHECK(s.at({"u_hat", "limit_costate"}) == "fails");
  CHECK(s.at({"u_hat", "prop1_woo"}) == "holds");
  CHECK(s.at({"u_hat", "prop1_oo"}) == "fails");
}

TEST_CASE("reports are byte-identical across runs and json mirrors csv") {
  const std::vector<std::string> args{"overtake", "--example", "oscillator", "--t-max", "100"};
  const Result a = call(args);
  const Result b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  auto json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Result j = call(json_args);
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  const auto rows = parse_csv(a.out);
  CHECK(doc["schema"] == rows[1][0]);
  REQUIRE(doc["rows"].size() == rows.size() - 1);
  std::vector<std::string> header(rows[0].begin() + 1, rows[0].end());
  CHECK(doc["columns"].get<std::vector<std::string>>() == header);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(doc["rows"][i - 1]["challenger"] == rows[i][1]);
    CHECK(doc["rows"][i - 1]["verdict"] == rows[i][2]);
    CHECK(doc["rows"][i - 1]["max_gap"].get<double>() == std::stod(rows[i][3]));
  }
}

TEST_CASE("overtake report for the oscillator") {
  const Result r = call({"overtake", "--example", "oscillator", "--b", "0.5"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  bool seen = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] != "delay_pi") continue;
    seen = true;
    CHECK(rows[i][2] == "consistent_WOO_only");
    CHECK(std::stod(rows[i][3]) == doctest::Approx(2.0 - std::numbers::pi / 2).epsilon(1e-6));
  }
  CHECK(seen);
}

TEST_CASE("phase diagram classifies the steady state and brackets the saddle") {
  const Result one = call({"phase-diagram", "--example", "ramsey", "--k-range", "0", "32", "--c-range", "0", "2.4",
                           "--grid", "1"});
  REQUIRE(one.code == 0);
  const auto rows = parse_csv(one.out);
  bool point = false;
  for (const auto& row : rows) {
    if (row[1] == "point") {
      point = true;
      CHECK(row[6] == "saddle");
    }
    if (row[1] == "nullcline_kdot" && row[5] == "32") CHECK(row[6].empty());
  }
  CHECK(point);

  const Result grid = call({"phase-diagram", "--example", "ramsey", "--k-range", "0", "100", "--c-range", "0", "8",
                            "--grid", "40"});
  REQUIRE(grid.code == 0);
  std::string below, above;
  for (const auto& row : parse_csv(grid.out)) {
    if (row[1] != "point" || row[4] != "10") continue;
    const double c = std::stod(row[5]);
    if (std::abs(c - 0.8) < 1e-9) below = row[6];
    if (std::abs(c - 1.0) < 1e-9) above = row[6];
  }
  CHECK(below == "to_zero_consumption");
  CHECK(above == "hits_zero_capital");
}

TEST_CASE("needle report decreases its error with the width") {
  const Result r = call({"needle", "--example", "oscillator", "--tau", "1", "--u", "0", "--horizon", "20"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 12);
  CHECK(std::stod(rows.back()[7]) < std::stod(rows[1][7]) / 100.0);
  CHECK(std::stod(rows[1][10]) > 0.9);
}

TEST_CASE("out writes the report to a file") {
  const auto path = std::filesystem::temp_directory_path() / "horizon_cli_test.csv";
  std::filesystem::remove(path);
  const Result r = call({"list-examples", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == call({"list-examples"}).out);
  std::filesystem::remove(path);
}
