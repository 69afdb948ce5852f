#include "relrank.h"

#include <cstring>
#include <new>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "experiments.hpp"
#include "mnist.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "stablerank.hpp"
#include "synth_digits.hpp"
#include "synthetic.hpp"

using namespace relrank;

struct rr_cloud {
  PointCloud cloud;
};

struct rr_rank {
  StepFun fun;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
rr_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RR_OK;
  } catch (const parse_error& e) {
    g_last_error = e.what();
    return RR_EPARSE;
  } catch (const structural_error& e) {
    g_last_error = e.what();
    return RR_ESTRUCT;
  } catch (const resource_error& e) {
    g_last_error = e.what();
    return RR_ERESOURCE;
  } catch (const io_error& e) {
    g_last_error = e.what();
    return RR_EIO;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return RR_EPARSE;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return RR_EDOMAIN;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return RR_EINVAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RR_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RR_EINTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rr_status require(bool ok, const char* msg) {
  if (ok) return RR_OK;
  g_last_error = msg;
  return RR_EINVAL;
}

}  // namespace

extern "C" {

const char* rr_version(void) { return "1.0.0"; }

const char* rr_last_error(void) { return g_last_error.c_str(); }

void rr_string_free(char* s) { delete[] s; }

rr_status rr_cloud_create(const double* coords, size_t n, size_t dim,
                          const int32_t* labels, rr_cloud** out) {
  if (rr_status st = require(coords && out && dim > 0, "null argument"); st != RR_OK) return st;
  return guarded([&] {
    std::vector<double> c(coords, coords + n * dim);
    std::vector<std::int32_t> l;
    if (labels) l.assign(labels, labels + n);
    auto* handle = new rr_cloud{PointCloud(std::move(c), dim, std::move(l))};
    *out = handle;
  });
}

rr_status rr_cloud_from_digits(const char* images_path, const char* labels_path,
                               const int* digits, size_t digit_count, rr_cloud** out) {
  if (rr_status st = require(images_path && labels_path && out, "null argument"); st != RR_OK)
    return st;
  return guarded([&] {
    std::set<int> keep;
    for (size_t i = 0; i < digit_count; ++i) keep.insert(digits[i]);
    *out = new rr_cloud{load_digits(images_path, labels_path, keep)};
  });
}

rr_status rr_cloud_circle(size_t n, double radius, double noise_sigma, uint64_t seed,
                          rr_cloud** out) {
  if (rr_status st = require(out != nullptr, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = new rr_cloud{make_noisy_circle(n, radius, noise_sigma, seed)}; });
}

size_t rr_cloud_size(const rr_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

size_t rr_cloud_dim(const rr_cloud* cloud) { return cloud ? cloud->cloud.dim() : 0; }

rr_status rr_cloud_point(const rr_cloud* cloud, size_t i, double* out) {
  if (rr_status st = require(cloud && out, "null argument"); st != RR_OK) return st;
  if (rr_status st = require(i < cloud->cloud.size(), "point index out of range"); st != RR_OK)
    return st;
  auto p = cloud->cloud.point(i);
  std::memcpy(out, p.data(), p.size() * sizeof(double));
  g_last_error.clear();
  return RR_OK;
}

void rr_cloud_free(rr_cloud* cloud) { delete cloud; }

rr_status rr_pipeline_run(const rr_cloud* reference, const char* config_json,
                          rr_rank** out) {
  if (rr_status st = require(reference && config_json && out, "null argument"); st != RR_OK)
    return st;
  return guarded([&] {
    PipelineConfig cfg = parse_pipeline_config(nlohmann::json::parse(config_json));
    PairwiseDistances dist(reference->cloud);
    PipelineResult res = run_pipeline(dist, cfg);
    *out = new rr_rank{std::move(res.rank)};
  });
}

rr_status rr_rank_value(const rr_rank* rank, double t, double* out) {
  if (rr_status st = require(rank && out, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = rank->fun(t); });
}

size_t rr_rank_breaks(const rr_rank* rank) {
  return rank ? rank->fun.jumps().size() : 0;
}

rr_status rr_rank_data(const rr_rank* rank, double* breaks, double* values) {
  if (rr_status st = require(rank && breaks && values, "null argument"); st != RR_OK) return st;
  const auto& jumps = rank->fun.jumps();
  const auto& vals = rank->fun.values();
  breaks[0] = 0.0;
  for (size_t i = 0; i < jumps.size(); ++i) breaks[i + 1] = jumps[i];
  for (size_t i = 0; i < vals.size(); ++i) values[i] = vals[i];
  g_last_error.clear();
  return RR_OK;
}

rr_status rr_rank_l1(const rr_rank* a, const rr_rank* b, double* out) {
  if (rr_status st = require(a && b && out, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = l1_distance(a->fun, b->fun); });
}

rr_status rr_rank_l2(const rr_rank* a, const rr_rank* b, double cap, double* out) {
  if (rr_status st = require(a && b && out, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = l2_inner_product(a->fun, b->fun, cap); });
}

rr_status rr_rank_csv(const rr_rank* rank, char** out) {
  if (rr_status st = require(rank && out, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = dup_string(to_csv(rank->fun)); });
}

rr_status rr_rank_json(const rr_rank* rank, char** out) {
  if (rr_status st = require(rank && out, "null argument"); st != RR_OK) return st;
  return guarded([&] { *out = dup_string(to_json(rank->fun)); });
}

void rr_rank_free(rr_rank* rank) { delete rank; }

rr_status rr_experiment(const char* kind, const char* config_json, const char* out_dir,
                        const char* formats, char** summary_json) {
  if (rr_status st = require(kind && config_json && out_dir, "null argument"); st != RR_OK)
    return st;
  return guarded([&] {
    nlohmann::json cfg = nlohmann::json::parse(config_json);
    std::string k = kind;
    Report report;
    if (k == "global") {
      report = run_global_experiment(parse_global_config(cfg));
    } else if (k == "plane") {
      report = run_plane_experiment(parse_plane_config(cfg));
    } else if (k == "relative") {
      report = run_relative_experiment(parse_relative_config(cfg));
    } else {
      throw std::invalid_argument("kind must be global, plane, or relative");
    }
    std::set<std::string> fmt;
    std::string f = formats ? formats : "csv,json,svg";
    std::stringstream ss(f);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) fmt.insert(item);
    }
    emit_report(report, fmt, out_dir);
    if (summary_json) *summary_json = dup_string(report.manifest.dump(2));
  });
}

rr_status rr_synth_digits(const char* dir, uint64_t seed) {
  if (rr_status st = require(dir != nullptr, "null argument"); st != RR_OK) return st;
  return guarded([&] {
    SynthConfig cfg;
    cfg.seed = seed;
    write_synthetic_dataset(dir, cfg);
  });
}

rr_status rr_dataset_info(const char* dir, char** info_json) {
  if (rr_status st = require(dir && info_json, "null argument"); st != RR_OK) return st;
  return guarded([&] {
    PointCloud train = load_split(dir, "train");
    PointCloud test = load_split(dir, "test");
    nlohmann::ordered_json info = {
        {"train", train.size()}, {"test", test.size()}, {"dim", train.dim()}};
    *info_json = dup_string(info.dump());
  });
}

}  // extern "C"
