#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablerank.hpp"

namespace relrank {

// A group of stable ranks that belong on one chart.
struct RankFamily {
  std::string name;
  std::vector<std::string> labels;
  std::vector<StepFun> ranks;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  nlohmann::ordered_json manifest;  // experiment, config, seeds, input hashes, summary
  std::vector<RankFamily> families;
  std::vector<Table> tables;
};

// csv: one t,value file per rank plus one file per table. json: the
// manifest with ranks embedded. svg: one staircase chart per family.
// Output is a pure function of the report, no timestamps.
void emit_report(const Report& report, const std::set<std::string>& formats,
                 const std::filesystem::path& out_dir);

// Number for JSON, with infinities carried as strings.
nlohmann::ordered_json json_number(double v);

std::string svg_chart(const RankFamily& family);

std::string sanitize_filename(const std::string& name);

}  // namespace relrank
