#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "report.hpp"

using namespace relrank;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Report sample_report() {
  Report r;
  r.manifest["experiment"] = "demo";
  r.manifest["summary"] = {{"agreement", json_number(0.5)}};
  RankFamily fam;
  fam.name = "pair";
  fam.labels = {"first", "second"};
  fam.ranks = {StepFun({1.0}, {2.0, 1.0}), StepFun::constant(1.0)};
  r.families.push_back(fam);
  r.tables.push_back({"counts", {"a", "b"}, {{1.0, 2.0}, {3.0, kInfinity}}});
  return r;
}

}  // namespace

TEST_CASE("json numbers carry infinities as strings") {
  CHECK(json_number(2.5) == 2.5);
  CHECK(json_number(kInfinity) == "inf");
  CHECK(json_number(-kInfinity) == "-inf");
}

TEST_CASE("filenames are restricted to a safe alphabet") {
  CHECK(sanitize_filename("a b/c") == "a_b_c");
  CHECK(sanitize_filename("Digit-7_H0.csv") == "Digit-7_H0.csv");
  CHECK(sanitize_filename("") == "unnamed");
}

TEST_CASE("svg charts draw one staircase per rank") {
  Report r = sample_report();
  std::string svg = svg_chart(r.families[0]);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("first") != std::string::npos);
  CHECK(svg.find("second") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
}

TEST_CASE("emitted reports are complete and byte-stable") {
  fs::path dir = fs::path("tmp_tests") / "report";
  fs::remove_all(dir);

  Report r = sample_report();
  emit_report(r, {"csv", "json", "svg"}, dir);

  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "pair_first.csv"));
  CHECK(fs::exists(dir / "pair_second.csv"));
  CHECK(fs::exists(dir / "counts.csv"));
  CHECK(fs::exists(dir / "pair.svg"));

  CHECK(slurp(dir / "pair_first.csv") == "t,value\n0,2\n1,1\n");
  std::string table = slurp(dir / "counts.csv");
  CHECK(table == "a,b\n1,2\n3,inf\n");

  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["experiment"] == "demo");
  CHECK(manifest["summary"]["agreement"] == 0.5);

  // Re-emitting produces identical bytes, there is nothing time-dependent.
  std::string first = slurp(dir / "manifest.json");
  std::string svg = slurp(dir / "pair.svg");
  emit_report(r, {"csv", "json", "svg"}, dir);
  CHECK(slurp(dir / "manifest.json") == first);
  CHECK(slurp(dir / "pair.svg") == svg);

  fs::path json_only = fs::path("tmp_tests") / "report_json";
  fs::remove_all(json_only);
  emit_report(r, {"json"}, json_only);
  CHECK(fs::exists(json_only / "manifest.json"));
  CHECK_FALSE(fs::exists(json_only / "counts.csv"));
}
