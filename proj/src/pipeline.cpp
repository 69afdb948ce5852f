#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "parallel.hpp"
#include "persistence.hpp"

namespace relrank {

Contour ContourSpec::build() const {
  if (density_values.empty()) return Contour::standard(truncation);
  return Contour::with_density(density_jumps, density_values, truncation);
}

std::vector<double> resolve_query(const PointCloud& reference, const QuerySpec& q) {
  if (q.kind == QuerySpec::Kind::CenterOfMass) return center_of_mass(reference);
  if (q.coords.size() != reference.dim()) {
    throw structural_error("query coordinates do not match the reference dimension");
  }
  return q.coords;
}

namespace {

struct BuiltProbability {
  std::vector<double> prob;
  double mu = 0.0;
  double sigma = 0.0;
};

BuiltProbability build_probability_impl(const PointCloud& reference,
                                        const PipelineConfig& cfg) {
  BuiltProbability out;
  std::size_t m = reference.size();
  if (m == 0) throw std::invalid_argument("empty reference cloud");

  if (cfg.distribution.kind == DistributionSpec::Kind::UniformProbability) {
    out.prob.assign(m, 1.0 / static_cast<double>(m));
    return out;
  }

  std::vector<double> query = resolve_query(reference, cfg.query);
  std::vector<double> values;
  if (cfg.filter.kind == FilterSpec::Kind::Distance) {
    values = distance_filter(reference, query);
  } else {
    values = directional_filter(reference, query, cfg.filter.field);
  }

  if (cfg.distribution.kind == DistributionSpec::Kind::Direct) {
    out.prob = to_probability(values, cfg.distribution.direct);
    return out;
  }

  if (cfg.filter.kind != FilterSpec::Kind::Distance) {
    throw std::invalid_argument("the fitted distribution needs the distance filter");
  }
  FittedGaussian fit = fit_relative_gaussian(values, cfg.distribution.fitted,
                                             cfg.sampling.sample_size);
  out.prob = to_probability(values, fit.distribution);
  out.mu = fit.mu;
  out.sigma = fit.sigma;
  return out;
}

}  // namespace

std::vector<double> build_probability(const PointCloud& reference, const PipelineConfig& cfg) {
  return build_probability_impl(reference, cfg).prob;
}

PipelineResult averaged_stable_rank(const PairwiseDistances& dist,
                                    std::span<const double> prob,
                                    const PipelineConfig& cfg) {
  if (cfg.degree < 0) throw std::invalid_argument("negative homology degree");
  PipelineResult res;
  SubsampleSet draws = draw_subsamples(prob, cfg.sampling);
  if (draws.empty()) {
    res.empty_support = true;
    res.rank = StepFun();
    return res;
  }
  Contour contour = cfg.contour.build();
  std::size_t n = draws.instances.size();
  std::vector<StepFun> slots(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    DistanceMatrix dm = dist.gather(draws.instances[i]);
    Filtration filt = build_rips_filtration(dm, cfg.degree + 1, cfg.simplex_cap);
    Barcode code = reduce_barcode(filt, cfg.degree);
    slots[i] = stable_rank(code, contour);
  });
  res.rank = average(slots, n);
  res.instances = static_cast<std::uint32_t>(n);
  return res;
}

PipelineResult run_pipeline(const PairwiseDistances& dist, const PipelineConfig& cfg) {
  BuiltProbability built = build_probability_impl(dist.cloud(), cfg);
  PipelineResult res = averaged_stable_rank(dist, built.prob, cfg);
  res.fitted_mu = built.mu;
  res.fitted_sigma = built.sigma;
  return res;
}

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument(std::string("unknown key \"") + it.key() + "\" in " + where);
    }
  }
}

double parse_extended(const nlohmann::json& j, const char* where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfinity;
    throw std::invalid_argument(std::string(where) + " must be a number or \"inf\"");
  }
  if (!j.is_number()) throw std::invalid_argument(std::string(where) + " must be a number");
  return j.get<double>();
}

std::vector<double> parse_vector(const nlohmann::json& j, const char* where) {
  if (!j.is_array()) throw std::invalid_argument(std::string(where) + " must be an array");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw std::invalid_argument(std::string(where) + " must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

PipelineConfig parse_pipeline_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  check_keys(j, {"filter", "query", "distribution", "sampling", "degree", "contour",
                 "workers", "simplex_cap"},
             "config");
  PipelineConfig cfg;

  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    check_keys(f, {"kind", "field"}, "filter");
    std::string kind = f.at("kind").get<std::string>();
    if (kind == "distance") {
      cfg.filter.kind = FilterSpec::Kind::Distance;
    } else if (kind == "directional") {
      cfg.filter.kind = FilterSpec::Kind::Directional;
      const auto& fld = f.at("field");
      check_keys(fld, {"kind", "vector", "center"}, "filter.field");
      std::string fk = fld.at("kind").get<std::string>();
      if (fk == "constant") {
        cfg.filter.field = VectorField::constant(parse_vector(fld.at("vector"), "field.vector"));
      } else if (fk == "to_center") {
        cfg.filter.field = VectorField::to_center(parse_vector(fld.at("center"), "field.center"));
      } else {
        throw std::invalid_argument("field.kind must be constant or to_center");
      }
    } else {
      throw std::invalid_argument("filter.kind must be distance or directional");
    }
  }

  if (j.contains("query")) {
    const auto& q = j.at("query");
    check_keys(q, {"kind", "coords"}, "query");
    std::string kind = q.at("kind").get<std::string>();
    if (kind == "center_of_mass") {
      cfg.query.kind = QuerySpec::Kind::CenterOfMass;
    } else if (kind == "coords") {
      cfg.query.kind = QuerySpec::Kind::Coords;
      cfg.query.coords = parse_vector(q.at("coords"), "query.coords");
    } else {
      throw std::invalid_argument("query.kind must be center_of_mass or coords");
    }
  }

  if (j.contains("distribution")) {
    const auto& d = j.at("distribution");
    check_keys(d, {"kind", "mu", "sigma", "threshold", "lo", "hi", "percentile",
                   "amplification"},
               "distribution");
    std::string kind = d.at("kind").get<std::string>();
    if (kind == "uniform") {
      cfg.distribution.kind = DistributionSpec::Kind::UniformProbability;
    } else if (kind == "constant") {
      cfg.distribution.kind = DistributionSpec::Kind::Direct;
      cfg.distribution.direct = Distribution::uniform();
    } else if (kind == "gaussian") {
      cfg.distribution.kind = DistributionSpec::Kind::Direct;
      cfg.distribution.direct =
          Distribution::gaussian(d.at("mu").get<double>(), d.at("sigma").get<double>());
    } else if (kind == "step_ge") {
      cfg.distribution.kind = DistributionSpec::Kind::Direct;
      cfg.distribution.direct = Distribution::step_ge(d.at("threshold").get<double>());
    } else if (kind == "window") {
      cfg.distribution.kind = DistributionSpec::Kind::Direct;
      cfg.distribution.direct =
          Distribution::window(d.at("lo").get<double>(), d.at("hi").get<double>());
    } else if (kind == "fitted") {
      cfg.distribution.kind = DistributionSpec::Kind::Fitted;
      if (d.contains("percentile")) {
        cfg.distribution.fitted.percentile = d.at("percentile").get<double>();
      }
      if (d.contains("amplification")) {
        cfg.distribution.fitted.amplification = d.at("amplification").get<std::uint32_t>();
      }
    } else {
      throw std::invalid_argument("unknown distribution.kind \"" + kind + "\"");
    }
  }

  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    check_keys(s, {"sample_size", "instances", "seed"}, "sampling");
    if (s.contains("sample_size")) cfg.sampling.sample_size = s.at("sample_size").get<std::uint32_t>();
    if (s.contains("instances")) cfg.sampling.instances = s.at("instances").get<std::uint32_t>();
    if (s.contains("seed")) cfg.sampling.seed = s.at("seed").get<std::uint64_t>();
  }

  if (j.contains("degree")) cfg.degree = j.at("degree").get<int>();

  if (j.contains("contour")) {
    const auto& c = j.at("contour");
    check_keys(c, {"truncation", "density"}, "contour");
    if (c.contains("truncation")) {
      cfg.contour.truncation = parse_extended(c.at("truncation"), "contour.truncation");
    }
    if (c.contains("density")) {
      const auto& den = c.at("density");
      check_keys(den, {"jumps", "values"}, "contour.density");
      cfg.contour.density_jumps = parse_vector(den.at("jumps"), "density.jumps");
      cfg.contour.density_values = parse_vector(den.at("values"), "density.values");
    }
  }

  if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  if (j.contains("simplex_cap")) cfg.simplex_cap = j.at("simplex_cap").get<std::size_t>();
  return cfg;
}

nlohmann::ordered_json pipeline_config_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;

  nlohmann::ordered_json f;
  if (cfg.filter.kind == FilterSpec::Kind::Distance) {
    f["kind"] = "distance";
  } else {
    f["kind"] = "directional";
    nlohmann::ordered_json fld;
    if (cfg.filter.field.kind == VectorField::Kind::Constant) {
      fld["kind"] = "constant";
      fld["vector"] = cfg.filter.field.v;
    } else {
      fld["kind"] = "to_center";
      fld["center"] = cfg.filter.field.v;
    }
    f["field"] = fld;
  }
  j["filter"] = f;

  nlohmann::ordered_json q;
  if (cfg.query.kind == QuerySpec::Kind::CenterOfMass) {
    q["kind"] = "center_of_mass";
  } else {
    q["kind"] = "coords";
    q["coords"] = cfg.query.coords;
  }
  j["query"] = q;

  nlohmann::ordered_json d;
  switch (cfg.distribution.kind) {
    case DistributionSpec::Kind::UniformProbability:
      d["kind"] = "uniform";
      break;
    case DistributionSpec::Kind::Direct:
      switch (cfg.distribution.direct.kind) {
        case Distribution::Kind::UniformConstant:
          d["kind"] = "constant";
          break;
        case Distribution::Kind::Gaussian:
          d["kind"] = "gaussian";
          d["mu"] = cfg.distribution.direct.a;
          d["sigma"] = cfg.distribution.direct.b;
          break;
        case Distribution::Kind::StepGE:
          d["kind"] = "step_ge";
          d["threshold"] = cfg.distribution.direct.a;
          break;
        case Distribution::Kind::Window:
          d["kind"] = "window";
          d["lo"] = cfg.distribution.direct.a;
          d["hi"] = cfg.distribution.direct.b;
          break;
      }
      break;
    case DistributionSpec::Kind::Fitted:
      d["kind"] = "fitted";
      d["percentile"] = cfg.distribution.fitted.percentile;
      d["amplification"] = cfg.distribution.fitted.amplification;
      break;
  }
  j["distribution"] = d;

  j["sampling"] = {{"sample_size", cfg.sampling.sample_size},
                   {"instances", cfg.sampling.instances},
                   {"seed", cfg.sampling.seed}};
  j["degree"] = cfg.degree;

  nlohmann::ordered_json c;
  if (std::isinf(cfg.contour.truncation)) {
    c["truncation"] = "inf";
  } else {
    c["truncation"] = cfg.contour.truncation;
  }
  if (!cfg.contour.density_values.empty()) {
    c["density"] = {{"jumps", cfg.contour.density_jumps},
                    {"values", cfg.contour.density_values}};
  }
  j["contour"] = c;

  j["workers"] = cfg.workers;
  j["simplex_cap"] = cfg.simplex_cap;
  return j;
}

}  // namespace relrank
