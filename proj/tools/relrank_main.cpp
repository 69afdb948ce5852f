// Command-line front end. Talks to the library exclusively through the C
// interface so it doubles as a smoke test of that surface.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef RELRANK_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <CLI11.hpp>
#include <httplib.h>

#include "relrank.h"

namespace {

int fail(rr_status st, const std::string& what) {
  std::cerr << "error: " << what << ": " << rr_last_error() << " (status " << st << ")\n";
  return 1;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Simple hand-rolled JSON writer for the flat config objects the CLI
// assembles; values are already JSON fragments.
class ConfigBuilder {
 public:
  void set(const std::string& key, const std::string& fragment) {
    for (auto& [k, v] : items_) {
      if (k == key) {
        v = fragment;
        return;
      }
    }
    items_.emplace_back(key, fragment);
  }
  void set_string(const std::string& key, const std::string& value) {
    std::string quoted = "\"";
    for (char c : value) {
      if (c == '"' || c == '\\') quoted += '\\';
      quoted += c;
    }
    quoted += '"';
    set(key, quoted);
  }
  void set_number(const std::string& key, double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    set(key, ss.str());
  }
  void set_int(const std::string& key, long long v) { set(key, std::to_string(v)); }
  template <typename T>
  void set_array(const std::string& key, const std::vector<T>& vals) {
    std::string out = "[";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(vals[i]);
    }
    out += "]";
    set(key, out);
  }

  std::string json() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : items_) {
      if (!first) out += ",";
      first = false;
      out += "\"" + k + "\":" + v;
    }
    out += "}";
    return out;
  }

  bool empty() const { return items_.empty(); }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// Merge behavior: an explicit --config file is the base object; flags the
// user passed override its keys one by one.
std::string merge_config(const std::string& base_json, const ConfigBuilder& overrides) {
  if (base_json.empty()) return overrides.json();
  std::string body = base_json;
  std::size_t open = body.find('{');
  std::size_t close = body.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close <= open) {
    throw std::runtime_error("config file is not a JSON object");
  }
  std::string inner = body.substr(open + 1, close - open - 1);
  std::string extra = overrides.json();
  extra = extra.substr(1, extra.size() - 2);
  bool inner_blank = inner.find_first_not_of(" \t\r\n") == std::string::npos;
  if (extra.empty()) return base_json;
  if (inner_blank) return "{" + extra + "}";
  return "{" + inner + "," + extra + "}";
}

struct CommonFlags {
  std::string config_file;
  std::string data_dir;
  std::string out_dir;
  std::string formats = "csv,json,svg";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> sample_size;
  std::optional<std::uint32_t> instances;
  std::optional<int> degree;
  std::string truncation;
  std::string density_file;
  std::optional<double> percentile;
  std::optional<std::uint32_t> amplification;
  std::optional<std::uint32_t> repeats;
  std::string scale;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_out) {
  f.out_dir = default_out;
  cmd->add_option("--config", f.config_file, "JSON config file; flags override its keys");
  cmd->add_option("--data-dir", f.data_dir,
                  "digit dataset directory (default: RELRANK_DATA_DIR)");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--format", f.formats, "comma-separated subset of csv,json,svg");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--sample-size", f.sample_size, "points per subsample");
  cmd->add_option("--instances", f.instances, "subsample instances per run");
  cmd->add_option("--degree", f.degree, "homological degree");
  cmd->add_option("--truncation", f.truncation, "contour truncation, number or inf");
  cmd->add_option("--density", f.density_file,
                  "JSON file with contour density {jumps, values}");
  cmd->add_option("--percentile", f.percentile, "fitted-distribution percentile");
  cmd->add_option("--amplification", f.amplification, "fitted-distribution amplification");
  cmd->add_option("--repeats", f.repeats, "experiment repeats");
  cmd->add_option("--scale", f.scale, "preset: desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
}

void apply_common(const CommonFlags& f, ConfigBuilder& cfg, bool wants_data_dir) {
  if (wants_data_dir) {
    std::string dir = f.data_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("RELRANK_DATA_DIR")) dir = env;
    }
    if (!dir.empty()) cfg.set_string("data_dir", dir);
  }
  if (!f.scale.empty()) cfg.set_string("scale", f.scale);
  if (f.seed) cfg.set_int("seed", static_cast<long long>(*f.seed));
  if (f.sample_size) cfg.set_int("sample_size", *f.sample_size);
  if (f.instances) cfg.set_int("instances", *f.instances);
  if (f.degree) cfg.set_int("degree", *f.degree);
  if (!f.truncation.empty()) {
    if (f.truncation == "inf") {
      cfg.set("truncation", "\"inf\"");
    } else {
      cfg.set("truncation", f.truncation);
    }
  }
  if (!f.density_file.empty()) cfg.set("density", read_text(f.density_file));
  if (f.percentile) cfg.set_number("percentile", *f.percentile);
  if (f.amplification) cfg.set_int("amplification", *f.amplification);
  if (f.repeats) cfg.set_int("repeats", *f.repeats);
  if (f.workers) cfg.set_int("workers", static_cast<long long>(*f.workers));
}

int run_experiment(const char* kind, const CommonFlags& f, const ConfigBuilder& cfg) {
  std::string base;
  if (!f.config_file.empty()) base = read_text(f.config_file);
  std::string config = merge_config(base, cfg);
  char* summary = nullptr;
  rr_status st = rr_experiment(kind, config.c_str(), f.out_dir.c_str(),
                               f.formats.c_str(), &summary);
  if (st != RR_OK) return fail(st, std::string("running ") + kind + " experiment");
  std::cout << summary << "\n";
  std::cout << "report written to " << f.out_dir << "\n";
  rr_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative stable-rank pipeline"};
  app.require_subcommand(1);

  // global
  CommonFlags gf;
  std::vector<int> g_digits;
  std::vector<int> g_degrees;
  CLI::App* global = app.add_subcommand("global", "train/test vs random-split distances");
  add_common(global, gf, "out_global");
  global->add_option("--digits", g_digits, "digits to process");
  global->add_option("--degrees", g_degrees, "homological degrees to process");

  // plane
  CommonFlags pf;
  std::optional<int> p_example;
  std::optional<std::uint32_t> p_queries;
  std::optional<double> p_threshold_t, p_threshold_v;
  CLI::App* plane = app.add_subcommand("plane", "planar reference-object examples");
  add_common(plane, pf, "out_plane");
  plane->add_option("--example", p_example, "example number: 1, 2, or 3");
  plane->add_option("--queries", p_queries, "number of query points");
  plane->add_option("--threshold-t", p_threshold_t, "where to read the stable rank");
  plane->add_option("--threshold-v", p_threshold_v, "decision value at the threshold");

  // relative
  CommonFlags rf;
  std::string r_mode;
  std::vector<int> r_ref_digits;
  std::optional<std::uint32_t> r_eval, r_train_per_class, r_queries, r_ref_limit;
  std::optional<double> r_svm_c;
  CLI::App* relative = app.add_subcommand("relative", "query-point stable ranks on digits");
  add_common(relative, rf, "out_relative");
  relative->add_option("--mode", r_mode, "classify, illustrate, ambient, or sweep")
      ->check(CLI::IsMember({"classify", "illustrate", "ambient", "sweep"}));
  relative->add_option("--ref-digits", r_ref_digits, "digits forming the reference object");
  relative->add_option("--ref-limit", r_ref_limit, "reference size cap (0 = all)");
  relative->add_option("--eval-per-class", r_eval, "evaluation queries per class (0 = all)");
  relative->add_option("--train-per-class", r_train_per_class, "training queries per class");
  relative->add_option("--svm-c", r_svm_c, "SVM regularization C");
  relative->add_option("--queries", r_queries, "query count for illustrate/ambient");

  // pipeline
  std::string pl_config_file, pl_out;
  std::string pl_images, pl_labels;
  std::vector<int> pl_digits;
  std::uint32_t pl_circle_n = 200;
  double pl_circle_radius = 3.0, pl_circle_noise = 0.2;
  std::uint64_t pl_cloud_seed = 7;
  bool pl_use_circle = false;
  CLI::App* pipeline = app.add_subcommand("pipeline", "one averaged stable rank");
  pipeline->add_option("--config", pl_config_file, "pipeline configuration JSON file")
      ->required();
  pipeline->add_option("--images", pl_images, "IDX image file for the reference");
  pipeline->add_option("--labels", pl_labels, "IDX label file for the reference");
  pipeline->add_option("--digits", pl_digits, "digits to keep from the image file");
  pipeline->add_flag("--circle", pl_use_circle, "use a noisy circle as the reference");
  pipeline->add_option("--circle-points", pl_circle_n, "circle point count");
  pipeline->add_option("--circle-radius", pl_circle_radius, "circle radius");
  pipeline->add_option("--circle-noise", pl_circle_noise, "circle noise sigma");
  pipeline->add_option("--cloud-seed", pl_cloud_seed, "seed for generated reference");
  pipeline->add_option("--out", pl_out, "write rank CSV here instead of stdout");

  // synth
  std::string sy_dir = "acceptance_data";
  std::uint64_t sy_seed = 20240101;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic digit dataset");
  synth->add_option("--dir", sy_dir, "target directory");
  synth->add_option("--seed", sy_seed, "generation seed");

  // fetch
  std::string fe_dir;
  CLI::App* fetch = app.add_subcommand("fetch", "download the canonical digit archives");
  fetch->add_option("--dir", fe_dir, "target directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (global->parsed()) {
      ConfigBuilder cfg;
      apply_common(gf, cfg, true);
      if (!g_digits.empty()) cfg.set_array("digits", g_digits);
      if (!g_degrees.empty()) cfg.set_array("degrees", g_degrees);
      return run_experiment("global", gf, cfg);
    }
    if (plane->parsed()) {
      ConfigBuilder cfg;
      apply_common(pf, cfg, false);
      if (p_example) cfg.set_int("example", *p_example);
      if (p_queries) cfg.set_int("queries", *p_queries);
      if (p_threshold_t) cfg.set_number("threshold_t", *p_threshold_t);
      if (p_threshold_v) cfg.set_number("threshold_v", *p_threshold_v);
      return run_experiment("plane", pf, cfg);
    }
    if (relative->parsed()) {
      ConfigBuilder cfg;
      if (!r_mode.empty()) cfg.set_string("mode", r_mode);
      apply_common(rf, cfg, true);
      if (!r_ref_digits.empty()) cfg.set_array("ref_digits", r_ref_digits);
      if (r_ref_limit) cfg.set_int("ref_limit", *r_ref_limit);
      if (r_eval) cfg.set_int("eval_per_class", *r_eval);
      if (r_train_per_class) cfg.set_int("train_ranks_per_class", *r_train_per_class);
      if (r_svm_c) cfg.set_number("svm_c", *r_svm_c);
      if (r_queries) cfg.set_int("queries", *r_queries);
      return run_experiment("relative", rf, cfg);
    }
    if (pipeline->parsed()) {
      rr_cloud* cloud = nullptr;
      rr_status st;
      if (pl_use_circle || pl_images.empty()) {
        st = rr_cloud_circle(pl_circle_n, pl_circle_radius, pl_circle_noise, pl_cloud_seed,
                             &cloud);
      } else {
        if (pl_labels.empty()) {
          std::cerr << "error: --images requires --labels\n";
          return 1;
        }
        st = rr_cloud_from_digits(pl_images.c_str(), pl_labels.c_str(), pl_digits.data(),
                                  pl_digits.size(), &cloud);
      }
      if (st != RR_OK) return fail(st, "building reference cloud");
      std::string config = read_text(pl_config_file);
      rr_rank* rank = nullptr;
      st = rr_pipeline_run(cloud, config.c_str(), &rank);
      if (st != RR_OK) {
        rr_cloud_free(cloud);
        return fail(st, "running pipeline");
      }
      char* csv = nullptr;
      st = rr_rank_csv(rank, &csv);
      if (st == RR_OK) {
        if (pl_out.empty()) {
          std::cout << csv;
        } else {
          std::ofstream out(pl_out, std::ios::binary);
          out << csv;
          std::cout << "rank written to " << pl_out << "\n";
        }
        rr_string_free(csv);
      }
      rr_rank_free(rank);
      rr_cloud_free(cloud);
      return st == RR_OK ? 0 : fail(st, "serializing rank");
    }
    if (synth->parsed()) {
      rr_status st = rr_synth_digits(sy_dir.c_str(), sy_seed);
      if (st != RR_OK) return fail(st, "writing synthetic dataset");
      char* info = nullptr;
      if (rr_dataset_info(sy_dir.c_str(), &info) == RR_OK) {
        std::cout << info << "\n";
        rr_string_free(info);
      }
      std::cout << "synthetic dataset written to " << sy_dir << "\n";
      return 0;
    }
    if (fetch->parsed()) {
      char* info = nullptr;
      if (rr_dataset_info(fe_dir.c_str(), &info) == RR_OK) {
        std::cout << "dataset already present: " << info << "\n";
        rr_string_free(info);
        return 0;
      }
#ifdef RELRANK_HAVE_OPENSSL
      const char* names[] = {"train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz",
                             "t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"};
      std::filesystem::create_directories(fe_dir);
      httplib::SSLClient client("ossci-datasets.s3.amazonaws.com");
      client.set_follow_location(true);
      client.set_connection_timeout(30);
      client.set_read_timeout(120);
      for (const char* name : names) {
        std::cout << "fetching " << name << "...\n";
        auto res = client.Get(std::string("/mnist/") + name);
        if (!res || res->status != 200) {
          std::cerr << "error: download of " << name << " failed ("
                    << (res ? std::to_string(res->status) : httplib::to_string(res.error()))
                    << ")\n";
          return 1;
        }
        std::ofstream out(std::filesystem::path(fe_dir) / name, std::ios::binary);
        out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
        if (!out) {
          std::cerr << "error: cannot write " << name << "\n";
          return 1;
        }
      }
      if (rr_dataset_info(fe_dir.c_str(), &info) != RR_OK) {
        return fail(RR_EPARSE, "validating downloaded archives");
      }
      std::cout << "dataset ready: " << info << "\n";
      rr_string_free(info);
      return 0;
#else
      std::cerr << "error: this build has no TLS support; place the four archives in "
                << fe_dir << " by hand\n";
      return 1;
#endif
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
