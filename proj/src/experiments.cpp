#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "classify.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "mnist.hpp"
#include "rng.hpp"
#include "sha256.hpp"
#include "synthetic.hpp"

namespace relrank {

namespace {

std::string hash_file(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes = read_file_auto(path);
  return Sha256::hex_of(bytes.data(), bytes.size());
}

nlohmann::ordered_json input_entry(const std::filesystem::path& path) {
  return {{"path", path.string()}, {"sha256", hash_file(path)}};
}

std::vector<double> restricted_uniform(std::size_t total,
                                       std::span<const std::uint32_t> subset) {
  std::vector<double> prob(total, 0.0);
  double w = 1.0 / static_cast<double>(subset.size());
  for (std::uint32_t i : subset) prob[i] = w;
  return prob;
}

std::vector<std::uint32_t> seeded_permutation(std::size_t total, std::uint64_t seed) {
  std::vector<std::uint32_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0u);
  Philox rng(seed, 0);
  for (std::size_t i = 0; i + 1 < total; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace

std::vector<std::uint32_t> seeded_subset(std::size_t total, std::uint32_t limit,
                                         std::uint64_t seed) {
  if (limit == 0 || limit >= total) {
    std::vector<std::uint32_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0u);
    return idx;
  }
  std::vector<std::uint32_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0u);
  Philox rng(seed, 0);
  for (std::uint32_t i = 0; i < limit; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Report run_global_experiment(const GlobalConfig& cfg) {
  if (cfg.digits.empty()) throw std::invalid_argument("no digits requested");
  if (cfg.degrees.empty()) throw std::invalid_argument("no degrees requested");
  if (cfg.repeats == 0) throw std::invalid_argument("repeats must be positive");

  MnistSplit train_files = locate_split(cfg.data_dir, "train");
  MnistSplit test_files = locate_split(cfg.data_dir, "test");

  Report report;
  report.manifest["experiment"] = "global";
  report.manifest["config"] = {
      {"data_dir", cfg.data_dir.string()},
      {"digits", cfg.digits},
      {"degrees", cfg.degrees},
      {"truncation", json_number(cfg.truncation)},
      {"sample_size", cfg.sample_size},
      {"instances", cfg.instances},
      {"repeats", cfg.repeats},
      {"ref_limit", cfg.ref_limit},
      {"seed", cfg.seed},
  };
  report.manifest["inputs"] = {input_entry(train_files.images), input_entry(train_files.labels),
                               input_entry(test_files.images), input_entry(test_files.labels)};
  nlohmann::ordered_json summary;

  for (std::size_t di = 0; di < cfg.digits.size(); ++di) {
    int digit = cfg.digits[di];
    PointCloud pooled;
    std::size_t n_train = 0;
    {
      PointCloud train_d = load_digits(train_files.images, train_files.labels, {digit});
      PointCloud test_d = load_digits(test_files.images, test_files.labels, {digit});
      auto sub_train = seeded_subset(train_d.size(), cfg.ref_limit,
                                     derive_seed(cfg.seed, rng_purpose::kSelect, 2 * di));
      auto sub_test = seeded_subset(test_d.size(), cfg.ref_limit,
                                    derive_seed(cfg.seed, rng_purpose::kSelect, 2 * di + 1));
      pooled = train_d.subset(sub_train);
      n_train = sub_train.size();
      pooled.append(test_d.subset(sub_test));
    }
    std::size_t n_total = pooled.size();
    if (n_train < cfg.sample_size || n_total - n_train < cfg.sample_size) {
      throw std::invalid_argument("digit " + std::to_string(digit) +
                                  " has fewer points than the sample size");
    }
    PairwiseDistances dist(pooled);

    std::vector<std::uint32_t> train_idx(n_train), test_idx(n_total - n_train);
    std::iota(train_idx.begin(), train_idx.end(), 0u);
    std::iota(test_idx.begin(), test_idx.end(), static_cast<std::uint32_t>(n_train));
    std::vector<double> prob_train = restricted_uniform(n_total, train_idx);
    std::vector<double> prob_test = restricted_uniform(n_total, test_idx);

    for (int degree : cfg.degrees) {
      PipelineConfig pc;
      pc.degree = degree;
      pc.contour.truncation = cfg.truncation;
      pc.workers = cfg.workers;
      pc.sampling.sample_size = cfg.sample_size;
      pc.sampling.instances = cfg.instances;

      std::vector<StepFun> tr_ranks, te_ranks, ra_ranks, rb_ranks;
      std::vector<std::vector<double>> rows;
      std::uint32_t ordering = 0;
      for (std::uint32_t r = 0; r < cfg.repeats; ++r) {
        std::uint64_t key = ((di * 16 + static_cast<std::size_t>(degree)) * 4096 + r) * 4;
        auto run = [&](const std::vector<double>& prob, std::uint64_t role) {
          PipelineConfig c = pc;
          c.sampling.seed = derive_seed(cfg.seed, rng_purpose::kRun, key + role);
          return averaged_stable_rank(dist, prob, c).rank;
        };
        StepFun tr = run(prob_train, 0);
        StepFun te = run(prob_test, 1);

        auto perm = seeded_permutation(n_total,
                                       derive_seed(cfg.seed, rng_purpose::kPartition, di * 4096 + r));
        std::vector<std::uint32_t> part_a(perm.begin(), perm.begin() + n_train);
        std::vector<std::uint32_t> part_b(perm.begin() + n_train, perm.end());
        StepFun ra = run(restricted_uniform(n_total, part_a), 2);
        StepFun rb = run(restricted_uniform(n_total, part_b), 3);

        double d_orig = l1_distance(tr, te);
        double d_rand = l1_distance(ra, rb);
        if (d_orig > d_rand) ++ordering;
        rows.push_back({static_cast<double>(r), d_orig, d_rand});
        tr_ranks.push_back(std::move(tr));
        te_ranks.push_back(std::move(te));
        ra_ranks.push_back(std::move(ra));
        rb_ranks.push_back(std::move(rb));
      }

      std::string tag = "digit" + std::to_string(digit) + "_H" + std::to_string(degree);
      RankFamily fam;
      fam.name = tag;
      fam.labels = {"train", "test", "random_a", "random_b"};
      fam.ranks = {average(tr_ranks, tr_ranks.size()), average(te_ranks, te_ranks.size()),
                   average(ra_ranks, ra_ranks.size()), average(rb_ranks, rb_ranks.size())};
      report.families.push_back(std::move(fam));

      double mean_orig = 0.0, mean_rand = 0.0;
      for (const auto& row : rows) {
        mean_orig += row[1];
        mean_rand += row[2];
      }
      mean_orig /= static_cast<double>(rows.size());
      mean_rand /= static_cast<double>(rows.size());
      report.tables.push_back(
          {"distances_" + tag, {"repeat", "original_distance", "random_distance"}, rows});
      summary[tag] = {{"ordering_count", ordering},
                      {"repeats", cfg.repeats},
                      {"mean_original", json_number(mean_orig)},
                      {"mean_random", json_number(mean_rand)}};
    }
  }
  report.manifest["summary"] = summary;
  return report;
}

namespace {

struct PlaneDefaults {
  double threshold_t;
  double threshold_v;
};

PlaneDefaults plane_defaults(int example) {
  if (example == 2) return {0.87, 1.87};
  if (example == 3) return {1.5, 3.9};
  return {0.0, 0.0};
}

}  // namespace

Report run_plane_experiment(const PlaneConfig& cfg) {
  if (cfg.example < 1 || cfg.example > 3) {
    throw std::invalid_argument("example must be 1, 2, or 3");
  }
  Report report;
  report.manifest["experiment"] = "plane";
  report.manifest["inputs"] = nlohmann::ordered_json::array();
  PlaneDefaults defs = plane_defaults(cfg.example);
  double thr_t = cfg.threshold_t > 0.0 ? cfg.threshold_t : defs.threshold_t;
  double thr_v = cfg.threshold_v > 0.0 ? cfg.threshold_v : defs.threshold_v;

  report.manifest["config"] = {
      {"example", cfg.example},
      {"ref_points", cfg.ref_points},
      {"queries", cfg.queries},
      {"radius", cfg.radius},
      {"noise", cfg.noise},
      {"box_half_width", cfg.box_half_width},
      {"ref_point", cfg.ref_point},
      {"direction", cfg.direction},
      {"sample_size", cfg.sample_size},
      {"instances", cfg.instances},
      {"threshold_t", thr_t},
      {"threshold_v", thr_v},
      {"seed", cfg.seed},
  };
  nlohmann::ordered_json summary;

  if (cfg.example == 1) {
    if (cfg.ref_point.size() != 2 || cfg.direction.size() != 2) {
      throw std::invalid_argument("example 1 needs a planar reference point and direction");
    }
    PointCloud reference = PointCloud::single_point(cfg.ref_point);
    PairwiseDistances dist1(reference);
    PointCloud queries =
        make_uniform_box(cfg.queries, -cfg.box_half_width, cfg.box_half_width, 2,
                         derive_seed(cfg.seed, rng_purpose::kCloud, 2));
    double vx = cfg.direction[0], vy = cfg.direction[1];
    double vnorm = std::sqrt(vx * vx + vy * vy);
    if (vnorm == 0.0) throw std::invalid_argument("direction must be nonzero");

    for (int ci = 0; ci < 2; ++ci) {
      bool halfplane = ci == 0;
      Distribution d =
          halfplane ? Distribution::step_ge(0.0) : Distribution::window(-2.0, 1.0);
      std::size_t mismatches = 0, colored_count = 0;
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        auto p = queries.point(i);
        std::vector<double> vals =
            directional_filter(reference, p, VectorField::constant(cfg.direction));
        std::vector<double> prob = to_probability(vals, d);
        PipelineConfig pc;
        pc.degree = 0;
        pc.workers = cfg.workers;
        pc.sampling = {1, 1, derive_seed(cfg.seed, rng_purpose::kRun, ci * 4096 + i)};
        PipelineResult res = averaged_stable_rank(dist1, prob, pc);
        double rank0 = res.empty_support ? 0.0 : res.rank(0.0);
        bool colored = rank0 > 0.5;
        // Closed-form check: the filter of a one-point reference is the signed
        // projection of p - ref onto the direction.
        double proj =
            (vx * (p[0] - cfg.ref_point[0]) + vy * (p[1] - cfg.ref_point[1])) / vnorm;
        bool predicate = halfplane ? proj >= 0.0 : (proj >= -2.0 && proj <= 1.0);
        if (colored != predicate) ++mismatches;
        if (colored) ++colored_count;
        rows.push_back({p[0], p[1], proj, rank0, predicate ? 1.0 : 0.0,
                        colored == predicate ? 1.0 : 0.0});
      }
      const char* table = halfplane ? "halfplane_partition" : "band_partition";
      report.tables.push_back(
          {table, {"x", "y", "projection", "rank_at_zero", "predicate", "match"}, rows});
      const char* name = halfplane ? "halfplane" : "band";
      summary[std::string(name) + "_mismatches"] = mismatches;
      summary[std::string(name) + "_colored"] = colored_count;
      summary[std::string(name) + "_queries"] = queries.size();
    }
    report.manifest["summary"] = summary;
    return report;
  }

  PointCloud reference = make_noisy_circle(cfg.ref_points, cfg.radius, cfg.noise,
                                           derive_seed(cfg.seed, rng_purpose::kCloud, 1));
  PointCloud queries = make_uniform_box(cfg.queries, -cfg.box_half_width, cfg.box_half_width,
                                        2, derive_seed(cfg.seed, rng_purpose::kCloud, 2));
  PairwiseDistances dist(reference);

  VectorField field;
  Distribution d;
  if (cfg.example == 2) {
    d = Distribution::gaussian(0.0, 1.0);
  } else {
    field = VectorField::to_center(center_of_mass(reference));
    d = Distribution::step_ge(1.0);
  }

  std::vector<std::vector<double>> rows;
  RankFamily fam;
  fam.name = "example" + std::to_string(cfg.example) + "_sample_ranks";
  std::size_t matches = 0, decided = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto q = queries.point(i);
    std::vector<double> vals = cfg.example == 2
                                   ? distance_filter(reference, q)
                                   : directional_filter(reference, q, field);
    std::vector<double> prob = to_probability(vals, d);
    PipelineConfig pc;
    pc.degree = 0;
    pc.workers = cfg.workers;
    pc.sampling = {cfg.sample_size, cfg.instances,
                   derive_seed(cfg.seed, rng_purpose::kRun, i)};
    PipelineResult res = averaged_stable_rank(dist, prob, pc);
    double value = res.empty_support ? 0.0 : res.rank(thr_t);
    bool predicted_inside = value > thr_v;
    double qn = std::sqrt(q[0] * q[0] + q[1] * q[1]);
    bool truth_inside = qn < cfg.radius;
    if (predicted_inside == truth_inside) ++matches;
    ++decided;
    rows.push_back({q[0], q[1], value, predicted_inside ? 1.0 : 0.0, truth_inside ? 1.0 : 0.0,
                    predicted_inside == truth_inside ? 1.0 : 0.0});
    if (fam.ranks.size() < 4 && !res.empty_support) {
      fam.ranks.push_back(res.rank);
      fam.labels.push_back("query" + std::to_string(i) + (truth_inside ? "_in" : "_out"));
    }
  }
  report.tables.push_back(
      {"classification",
       {"qx", "qy", "value_at_threshold", "predicted_inside", "truth_inside", "match"},
       rows});
  if (!fam.ranks.empty()) report.families.push_back(std::move(fam));
  summary["agreement"] = json_number(static_cast<double>(matches) / decided);
  summary["matches"] = matches;
  summary["queries"] = decided;
  summary["threshold_t"] = thr_t;
  summary["threshold_v"] = thr_v;
  report.manifest["summary"] = summary;
  return report;
}

namespace {

struct RelData {
  MnistSplit train_files;
  MnistSplit test_files;
  std::vector<PointCloud> test_by_digit;
  PointCloud reference;
};

RelData load_relative_data(const RelativeConfig& cfg) {
  if (cfg.ref_digits.empty()) throw std::invalid_argument("no reference digits");
  RelData data;
  data.train_files = locate_split(cfg.data_dir, "train");
  data.test_files = locate_split(cfg.data_dir, "test");
  std::uint32_t per_digit =
      cfg.ref_limit == 0 ? 0
                         : std::max<std::uint32_t>(
                               1, cfg.ref_limit / static_cast<std::uint32_t>(cfg.ref_digits.size()));
  for (std::size_t di = 0; di < cfg.ref_digits.size(); ++di) {
    int digit = cfg.ref_digits[di];
    PointCloud train_d =
        load_digits(data.train_files.images, data.train_files.labels, {digit});
    data.test_by_digit.push_back(
        load_digits(data.test_files.images, data.test_files.labels, {digit}));
    auto idx = seeded_subset(train_d.size(), per_digit,
                             derive_seed(cfg.seed, rng_purpose::kSelect, 100 + di));
    data.reference.append(train_d.subset(idx));
  }
  return data;
}

struct QueryRank {
  StepFun rank;
  double mu = 0.0;
  double sigma = 0.0;
  bool empty_support = false;
};

QueryRank rank_for_query(const PairwiseDistances& dist, std::span<const double> q,
                         const RelativeConfig& cfg, double percentile,
                         std::uint32_t amplification, std::uint64_t run_seed) {
  std::vector<double> vals = distances_to_point(dist.cloud(), q);
  FittedGaussian fit =
      fit_relative_gaussian(vals, {percentile, amplification}, cfg.sample_size);
  std::vector<double> prob = to_probability(vals, fit.distribution);
  PipelineConfig pc;
  pc.degree = cfg.degree;
  pc.contour = cfg.contour;
  pc.workers = cfg.workers;
  pc.sampling = {cfg.sample_size, cfg.instances, run_seed};
  PipelineResult res = averaged_stable_rank(dist, prob, pc);
  return {std::move(res.rank), fit.mu, fit.sigma, res.empty_support};
}

StepFun uniform_baseline(const PairwiseDistances& dist, const RelativeConfig& cfg,
                         std::uint64_t run_seed) {
  std::vector<double> prob(dist.cloud().size(),
                           1.0 / static_cast<double>(dist.cloud().size()));
  PipelineConfig pc;
  pc.degree = cfg.degree;
  pc.contour = cfg.contour;
  pc.workers = cfg.workers;
  pc.sampling = {cfg.sample_size, cfg.instances, run_seed};
  return averaged_stable_rank(dist, prob, pc).rank;
}

nlohmann::ordered_json relative_config_json(const RelativeConfig& cfg) {
  nlohmann::ordered_json j = {
      {"data_dir", cfg.data_dir.string()},
      {"mode", cfg.mode},
      {"ref_digits", cfg.ref_digits},
      {"ref_limit", cfg.ref_limit},
      {"percentile", cfg.percentile},
      {"amplification", cfg.amplification},
      {"sample_size", cfg.sample_size},
      {"instances", cfg.instances},
      {"degree", cfg.degree},
      {"truncation", json_number(cfg.contour.truncation)},
      {"train_ranks_per_class", cfg.train_ranks_per_class},
      {"eval_per_class", cfg.eval_per_class},
      {"svm_c", cfg.svm_c},
      {"repeats", cfg.repeats},
      {"queries", cfg.queries},
      {"seed", cfg.seed},
  };
  return j;
}

Report run_relative_classify(const RelativeConfig& cfg, RelData& data) {
  if (cfg.ref_digits.size() != 2) {
    throw std::invalid_argument("classification needs exactly two reference digits");
  }
  Report report;
  report.manifest["experiment"] = "relative";
  report.manifest["config"] = relative_config_json(cfg);
  report.manifest["inputs"] = {input_entry(data.train_files.images),
                               input_entry(data.train_files.labels),
                               input_entry(data.test_files.images),
                               input_entry(data.test_files.labels)};

  PairwiseDistances dist(data.reference);
  for (std::size_t c = 0; c < 2; ++c) {
    if (data.test_by_digit[c].size() <= cfg.train_ranks_per_class) {
      throw std::invalid_argument("not enough test digits for class " +
                                  std::to_string(cfg.ref_digits[c]));
    }
  }

  std::vector<std::vector<double>> acc_rows;
  double acc_sum = 0.0;
  RankFamily fam;
  fam.name = "class_average_ranks";

  // Each repeat draws fresh training queries from the test split and
  // evaluates on (a seeded subset of) the remaining test digits.
  for (std::uint32_t r = 0; r < cfg.repeats; ++r) {
    std::vector<StepFun> train_ranks;
    std::vector<int> labels;
    std::vector<std::vector<std::uint32_t>> train_pick(2);
    for (std::size_t c = 0; c < 2; ++c) {
      train_pick[c] = seeded_subset(data.test_by_digit[c].size(), cfg.train_ranks_per_class,
                                    derive_seed(cfg.seed, rng_purpose::kSelect,
                                                1000 + r * 8 + c));
      for (std::size_t jq = 0; jq < train_pick[c].size(); ++jq) {
        std::uint64_t tag = ((static_cast<std::uint64_t>(r) * 4 + c) * 65536) + jq;
        QueryRank qr = rank_for_query(dist, data.test_by_digit[c].point(train_pick[c][jq]),
                                      cfg, cfg.percentile, cfg.amplification,
                                      derive_seed(cfg.seed, rng_purpose::kRun, tag));
        train_ranks.push_back(std::move(qr.rank));
        labels.push_back(c == 0 ? 1 : -1);
      }
    }

    std::vector<StepFun> eval_ranks;
    std::vector<int> eval_labels;
    for (std::size_t c = 0; c < 2; ++c) {
      std::vector<char> used(data.test_by_digit[c].size(), 0);
      for (std::uint32_t i : train_pick[c]) used[i] = 1;
      std::vector<std::uint32_t> pool;
      for (std::uint32_t i = 0; i < used.size(); ++i) {
        if (!used[i]) pool.push_back(i);
      }
      auto pick = seeded_subset(pool.size(), cfg.eval_per_class,
                                derive_seed(cfg.seed, rng_purpose::kSelect,
                                            5000 + r * 8 + c));
      for (std::size_t jq = 0; jq < pick.size(); ++jq) {
        std::uint64_t tag = ((static_cast<std::uint64_t>(r) * 4 + 2 + c) * 65536) + jq;
        QueryRank qr = rank_for_query(dist, data.test_by_digit[c].point(pool[pick[jq]]),
                                      cfg, cfg.percentile, cfg.amplification,
                                      derive_seed(cfg.seed, rng_purpose::kRun, tag));
        eval_ranks.push_back(std::move(qr.rank));
        eval_labels.push_back(c == 0 ? 1 : -1);
      }
    }

    double cap = 0.0;
    for (const StepFun& f : train_ranks) {
      if (!f.jumps().empty()) cap = std::max(cap, f.jumps().back());
    }
    for (const StepFun& f : eval_ranks) {
      if (!f.jumps().empty()) cap = std::max(cap, f.jumps().back());
    }
    if (cap <= 0.0) cap = 1.0;

    GramMatrix gram = gram_matrix(train_ranks, cap);
    SvmModel model = train_svm(gram, labels, cfg.svm_c);
    std::size_t correct = 0;
    for (std::size_t e = 0; e < eval_ranks.size(); ++e) {
      auto row = kernel_row(eval_ranks[e], train_ranks, cap);
      if (predict(model, row) == eval_labels[e]) ++correct;
    }
    double accuracy = static_cast<double>(correct) / static_cast<double>(eval_ranks.size());
    acc_sum += accuracy;
    acc_rows.push_back({static_cast<double>(r), static_cast<double>(correct),
                        static_cast<double>(eval_ranks.size()), accuracy});

    if (r == 0) {
      for (std::size_t c = 0; c < 2; ++c) {
        std::vector<StepFun> cls;
        for (std::size_t t = 0; t < train_ranks.size(); ++t) {
          if (labels[t] == (c == 0 ? 1 : -1)) cls.push_back(train_ranks[t]);
        }
        fam.ranks.push_back(average(cls, cls.size()));
        fam.labels.push_back("digit" + std::to_string(cfg.ref_digits[c]));
      }
    }
  }

  report.families.push_back(std::move(fam));
  report.tables.push_back({"accuracy", {"repeat", "correct", "total", "accuracy"}, acc_rows});
  nlohmann::ordered_json summary;
  summary["mean_accuracy"] = json_number(acc_sum / static_cast<double>(cfg.repeats));
  summary["repeats"] = cfg.repeats;
  report.manifest["summary"] = summary;
  return report;
}

// Points of interest for the illustration and sweep runs: the ambient
// origin and the reference's center of mass.
Report run_relative_illustrate(const RelativeConfig& cfg, RelData& data) {
  Report report;
  report.manifest["experiment"] = "relative";
  report.manifest["config"] = relative_config_json(cfg);
  report.manifest["inputs"] = {input_entry(data.train_files.images),
                               input_entry(data.train_files.labels),
                               input_entry(data.test_files.images),
                               input_entry(data.test_files.labels)};
  PairwiseDistances dist(data.reference);

  std::vector<double> origin(data.reference.dim(), 0.0);
  std::vector<double> com = center_of_mass(data.reference);

  RankFamily fam;
  fam.name = "query_ranks";
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  struct Named {
    const char* label;
    std::span<const double> q;
  };
  Named queries[] = {{"origin", origin}, {"center_of_mass", com}};
  std::vector<std::vector<double>> probs;
  for (std::size_t qi = 0; qi < 2; ++qi) {
    QueryRank qr = rank_for_query(dist, queries[qi].q, cfg, cfg.percentile,
                                  cfg.amplification,
                                  derive_seed(cfg.seed, rng_purpose::kRun, qi));
    fam.ranks.push_back(std::move(qr.rank));
    fam.labels.push_back(queries[qi].label);
    fits.push_back({{"label", queries[qi].label},
                    {"mu", json_number(qr.mu)},
                    {"sigma", json_number(qr.sigma)}});
    std::vector<double> vals = distances_to_point(data.reference, queries[qi].q);
    FittedGaussian fit =
        fit_relative_gaussian(vals, {cfg.percentile, cfg.amplification}, cfg.sample_size);
    probs.push_back(to_probability(vals, fit.distribution));
  }
  fam.ranks.push_back(
      uniform_baseline(dist, cfg, derive_seed(cfg.seed, rng_purpose::kRun, 999999)));
  fam.labels.push_back("uniform");
  report.families.push_back(std::move(fam));

  // Planar view of the reference with the subsampling probabilities each
  // query induces on it.
  Projection2 proj = pca_project2(data.reference, {origin, com});
  std::vector<std::vector<double>> proj_rows;
  auto keep = seeded_subset(data.reference.size(), 1000,
                            derive_seed(cfg.seed, rng_purpose::kSelect, 400));
  for (std::uint32_t i : keep) {
    proj_rows.push_back(
        {proj.coords[2 * i], proj.coords[2 * i + 1], probs[0][i], probs[1][i], 0.0});
  }
  for (std::size_t e = 0; e < 2; ++e) {
    std::size_t base = data.reference.size() + e;
    proj_rows.push_back({proj.coords[2 * base], proj.coords[2 * base + 1], 0.0, 0.0,
                         static_cast<double>(e + 1)});
  }
  report.tables.push_back(
      {"projection", {"x", "y", "prob_origin", "prob_center", "query_marker"}, proj_rows});

  nlohmann::ordered_json summary;
  summary["fits"] = fits;
  summary["projection_degenerate"] = proj.degenerate;
  summary["projection_eigenvalues"] = {json_number(proj.eigenvalues[0]),
                                       json_number(proj.eigenvalues[1])};
  report.manifest["summary"] = summary;
  return report;
}

// Cluster centers against random ambient points, both measured by how far
// their relative stable ranks sit from the uniform baseline.
Report run_relative_ambient(const RelativeConfig& cfg, RelData& data) {
  Report report;
  report.manifest["experiment"] = "relative";
  report.manifest["config"] = relative_config_json(cfg);
  report.manifest["inputs"] = {input_entry(data.train_files.images),
                               input_entry(data.train_files.labels),
                               input_entry(data.test_files.images),
                               input_entry(data.test_files.labels)};
  PairwiseDistances dist(data.reference);
  StepFun baseline =
      uniform_baseline(dist, cfg, derive_seed(cfg.seed, rng_purpose::kRun, 999999));

  KMeansResult km = kmeans(data.reference, cfg.queries, cfg.seed);
  PointCloud ambient = make_uniform_box(cfg.queries, 0.0, 255.0, data.reference.dim(),
                                        derive_seed(cfg.seed, rng_purpose::kCloud, 600));

  RankFamily fam;
  fam.name = "centers_vs_ambient";
  std::vector<std::vector<double>> rows;
  double center_sum = 0.0, ambient_sum = 0.0;

  for (std::size_t c = 0; c < km.k; ++c) {
    std::span<const double> q(km.centroids.data() + c * km.dim, km.dim);
    QueryRank qr = rank_for_query(dist, q, cfg, cfg.percentile, cfg.amplification,
                                  derive_seed(cfg.seed, rng_purpose::kRun, c));
    double dist_u = l1_distance(qr.rank, baseline);
    center_sum += dist_u;
    rows.push_back({0.0, static_cast<double>(c), dist_u, qr.rank(0.0)});
    if (fam.ranks.size() < 3) {
      fam.ranks.push_back(std::move(qr.rank));
      fam.labels.push_back("center_" + std::to_string(c));
    }
  }
  for (std::size_t jq = 0; jq < ambient.size(); ++jq) {
    QueryRank qr = rank_for_query(dist, ambient.point(jq), cfg, cfg.percentile,
                                  cfg.amplification,
                                  derive_seed(cfg.seed, rng_purpose::kRun, 4096 + jq));
    double dist_u = l1_distance(qr.rank, baseline);
    ambient_sum += dist_u;
    rows.push_back({1.0, static_cast<double>(jq), dist_u, qr.rank(0.0)});
    if (fam.ranks.size() < 6) {
      fam.ranks.push_back(std::move(qr.rank));
      fam.labels.push_back("ambient_" + std::to_string(jq));
    }
  }
  fam.ranks.push_back(baseline);
  fam.labels.push_back("uniform");
  report.families.push_back(std::move(fam));
  report.tables.push_back(
      {"centers_vs_ambient", {"is_ambient", "index", "l1_to_uniform", "value_at_zero"}, rows});

  double mean_center = center_sum / static_cast<double>(km.k);
  double mean_ambient = ambient_sum / static_cast<double>(ambient.size());
  nlohmann::ordered_json summary;
  summary["mean_center_l1"] = json_number(mean_center);
  summary["mean_ambient_l1"] = json_number(mean_ambient);
  summary["ambient_closer_to_uniform"] = mean_ambient < mean_center;
  summary["kmeans_inertia"] = json_number(km.inertia);
  summary["kmeans_iterations"] = km.iterations;
  report.manifest["summary"] = summary;
  return report;
}

Report run_relative_sweep(const RelativeConfig& cfg, RelData& data) {
  Report report;
  report.manifest["experiment"] = "relative";
  report.manifest["config"] = relative_config_json(cfg);
  report.manifest["inputs"] = {input_entry(data.train_files.images),
                               input_entry(data.train_files.labels),
                               input_entry(data.test_files.images),
                               input_entry(data.test_files.labels)};
  PairwiseDistances dist(data.reference);
  StepFun baseline =
      uniform_baseline(dist, cfg, derive_seed(cfg.seed, rng_purpose::kRun, 999999));

  std::vector<double> com = center_of_mass(data.reference);
  std::span<const double> q(com);

  RankFamily fam;
  fam.name = "sweep_ranks";
  std::vector<std::vector<double>> prows, arows;
  bool mono_p = true, mono_a = true;
  double prev = kInfinity;
  for (std::size_t i = 0; i < cfg.sweep_percentiles.size(); ++i) {
    QueryRank qr = rank_for_query(dist, q, cfg, cfg.sweep_percentiles[i], cfg.amplification,
                                  derive_seed(cfg.seed, rng_purpose::kRun, 10000 + i));
    double d = l1_distance(qr.rank, baseline);
    if (d > prev) mono_p = false;
    prev = d;
    prows.push_back({cfg.sweep_percentiles[i], d});
    fam.ranks.push_back(std::move(qr.rank));
    fam.labels.push_back("percentile_" + format_double(cfg.sweep_percentiles[i]));
  }
  prev = kInfinity;
  for (std::size_t i = 0; i < cfg.sweep_amplifications.size(); ++i) {
    QueryRank qr =
        rank_for_query(dist, q, cfg, cfg.percentile, cfg.sweep_amplifications[i],
                       derive_seed(cfg.seed, rng_purpose::kRun, 20000 + i));
    double d = l1_distance(qr.rank, baseline);
    if (d > prev) mono_a = false;
    prev = d;
    arows.push_back({static_cast<double>(cfg.sweep_amplifications[i]), d});
    fam.ranks.push_back(std::move(qr.rank));
    fam.labels.push_back("amplification_" + std::to_string(cfg.sweep_amplifications[i]));
  }
  fam.ranks.push_back(baseline);
  fam.labels.push_back("uniform");
  report.families.push_back(std::move(fam));
  report.tables.push_back({"percentile_sweep", {"percentile", "l1_to_uniform"}, prows});
  report.tables.push_back(
      {"amplification_sweep", {"amplification", "l1_to_uniform"}, arows});

  nlohmann::ordered_json summary;
  summary["percentile_monotone"] = mono_p;
  summary["amplification_monotone"] = mono_a;
  report.manifest["summary"] = summary;
  return report;
}

}  // namespace

Report run_relative_experiment(const RelativeConfig& cfg) {
  RelData data = load_relative_data(cfg);
  if (cfg.mode == "classify") return run_relative_classify(cfg, data);
  if (cfg.mode == "illustrate") return run_relative_illustrate(cfg, data);
  if (cfg.mode == "ambient") return run_relative_ambient(cfg, data);
  if (cfg.mode == "sweep") return run_relative_sweep(cfg, data);
  throw std::invalid_argument("mode must be classify, illustrate, ambient, or sweep");
}

namespace {

void apply_scale(const nlohmann::json& j, bool& full) {
  full = false;
  if (j.contains("scale")) {
    std::string s = j.at("scale").get<std::string>();
    if (s == "full") {
      full = true;
    } else if (s != "desk") {
      throw std::invalid_argument("scale must be desk or full");
    }
  }
}

}  // namespace

GlobalConfig parse_global_config(const nlohmann::json& j) {
  GlobalConfig cfg;
  bool full = false;
  apply_scale(j, full);
  if (full) {
    cfg.instances = 2000;
    cfg.ref_limit = 0;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "scale") {
    } else if (k == "data_dir") {
      cfg.data_dir = it.value().get<std::string>();
    } else if (k == "digits") {
      cfg.digits = it.value().get<std::vector<int>>();
    } else if (k == "degrees") {
      cfg.degrees = it.value().get<std::vector<int>>();
    } else if (k == "truncation") {
      cfg.truncation = it.value().is_string() ? kInfinity : it.value().get<double>();
    } else if (k == "sample_size") {
      cfg.sample_size = it.value().get<std::uint32_t>();
    } else if (k == "instances") {
      cfg.instances = it.value().get<std::uint32_t>();
    } else if (k == "repeats") {
      cfg.repeats = it.value().get<std::uint32_t>();
    } else if (k == "ref_limit") {
      cfg.ref_limit = it.value().get<std::uint32_t>();
    } else if (k == "seed") {
      cfg.seed = it.value().get<std::uint64_t>();
    } else if (k == "workers") {
      cfg.workers = it.value().get<std::size_t>();
    } else {
      throw std::invalid_argument("unknown key \"" + k + "\" in global config");
    }
  }
  return cfg;
}

PlaneConfig parse_plane_config(const nlohmann::json& j) {
  PlaneConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "example") {
      cfg.example = it.value().get<int>();
    } else if (k == "ref_points") {
      cfg.ref_points = it.value().get<std::uint32_t>();
    } else if (k == "queries") {
      cfg.queries = it.value().get<std::uint32_t>();
    } else if (k == "radius") {
      cfg.radius = it.value().get<double>();
    } else if (k == "noise") {
      cfg.noise = it.value().get<double>();
    } else if (k == "box_half_width") {
      cfg.box_half_width = it.value().get<double>();
    } else if (k == "ref_point") {
      cfg.ref_point = it.value().get<std::vector<double>>();
    } else if (k == "direction") {
      cfg.direction = it.value().get<std::vector<double>>();
    } else if (k == "sample_size") {
      cfg.sample_size = it.value().get<std::uint32_t>();
    } else if (k == "instances") {
      cfg.instances = it.value().get<std::uint32_t>();
    } else if (k == "threshold_t") {
      cfg.threshold_t = it.value().get<double>();
    } else if (k == "threshold_v") {
      cfg.threshold_v = it.value().get<double>();
    } else if (k == "seed") {
      cfg.seed = it.value().get<std::uint64_t>();
    } else if (k == "workers") {
      cfg.workers = it.value().get<std::size_t>();
    } else {
      throw std::invalid_argument("unknown key \"" + k + "\" in plane config");
    }
  }
  return cfg;
}

RelativeConfig parse_relative_config(const nlohmann::json& j) {
  RelativeConfig cfg;
  bool full = false;
  apply_scale(j, full);
  if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
  if (cfg.mode == "illustrate" || cfg.mode == "sweep" || cfg.mode == "ambient") {
    cfg.ref_digits = {1};
    cfg.sample_size = 50;
    cfg.amplification = 5;
    if (cfg.mode == "sweep") cfg.ref_limit = 0;
    if (cfg.mode == "ambient") cfg.queries = 10;
  }
  if (full) {
    cfg.ref_limit = 0;
    cfg.eval_per_class = 0;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "scale" || k == "mode") {
    } else if (k == "data_dir") {
      cfg.data_dir = it.value().get<std::string>();
    } else if (k == "ref_digits") {
      cfg.ref_digits = it.value().get<std::vector<int>>();
    } else if (k == "ref_limit") {
      cfg.ref_limit = it.value().get<std::uint32_t>();
    } else if (k == "percentile") {
      cfg.percentile = it.value().get<double>();
    } else if (k == "amplification") {
      cfg.amplification = it.value().get<std::uint32_t>();
    } else if (k == "sample_size") {
      cfg.sample_size = it.value().get<std::uint32_t>();
    } else if (k == "instances") {
      cfg.instances = it.value().get<std::uint32_t>();
    } else if (k == "degree") {
      cfg.degree = it.value().get<int>();
    } else if (k == "truncation") {
      cfg.contour.truncation = it.value().is_string() ? kInfinity : it.value().get<double>();
    } else if (k == "density") {
      cfg.contour.density_jumps = it.value().at("jumps").get<std::vector<double>>();
      cfg.contour.density_values = it.value().at("values").get<std::vector<double>>();
    } else if (k == "train_ranks_per_class") {
      cfg.train_ranks_per_class = it.value().get<std::uint32_t>();
    } else if (k == "eval_per_class") {
      cfg.eval_per_class = it.value().get<std::uint32_t>();
    } else if (k == "svm_c") {
      cfg.svm_c = it.value().get<double>();
    } else if (k == "repeats") {
      cfg.repeats = it.value().get<std::uint32_t>();
    } else if (k == "queries") {
      cfg.queries = it.value().get<std::uint32_t>();
    } else if (k == "sweep_percentiles") {
      cfg.sweep_percentiles = it.value().get<std::vector<double>>();
    } else if (k == "sweep_amplifications") {
      cfg.sweep_amplifications = it.value().get<std::vector<std::uint32_t>>();
    } else if (k == "seed") {
      cfg.seed = it.value().get<std::uint64_t>();
    } else if (k == "workers") {
      cfg.workers = it.value().get<std::size_t>();
    } else {
      throw std::invalid_argument("unknown key \"" + k + "\" in relative config");
    }
  }
  return cfg;
}

}  // namespace relrank
