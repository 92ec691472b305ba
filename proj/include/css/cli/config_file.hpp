#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "css/baselines.hpp"
#include "css/estimator_config.hpp"
#include "css/simlab/distributions.hpp"
#include "css/simlab/experiments.hpp"

namespace css::cli {

/// One entry of a run's method list: either a streaming estimator or the
/// data-free MoM union-bound baseline.
struct MethodEntry {
  std::string name;
  bool is_mom = false;
  EstimatorConfig cfg;
  MoMConfig mom;
};

struct RunConfig {
  std::vector<MethodEntry> methods;
  sim::DistributionSpec distribution;
  std::int64_t horizon = 0;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  sim::RateModel rate_model = sim::RateModel::sqrt_log_t_over_t;
  double fit_min_t = 0.0;
  double fit_max_t = std::numeric_limits<double>::infinity();
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every invalid field, one entry each

  bool ok() const { return errors.empty() && config.has_value(); }
};

namespace detail {

using Section = std::map<std::string, std::string>;

struct RawConfig {
  Section run;
  Section distribution;
  Section distribution_base;
  Section distribution_contaminant;
  std::vector<Section> estimators;
};

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Key-value reader that records which keys were consumed so unknown keys
/// can be reported by name.
class SectionReader {
 public:
  SectionReader(const Section& section, std::string prefix,
                std::vector<std::string>& errors)
      : section_(section), prefix_(std::move(prefix)), errors_(errors) {}

  bool has(const std::string& key) const { return section_.count(key) > 0; }

  std::optional<std::string> str(const std::string& key) {
    used_.push_back(key);
    const auto it = section_.find(key);
    if (it == section_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> num(const std::string& key) {
    const auto raw = str(key);
    if (!raw) return std::nullopt;
    try {
      std::size_t pos = 0;
      const double val = std::stod(*raw, &pos);
      if (pos != raw->size()) throw std::invalid_argument("trailing characters");
      return val;
    } catch (const std::exception&) {
      fail(key, "not a number: '" + *raw + "'");
      return std::nullopt;
    }
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const auto raw = str(key);
    if (!raw) return std::nullopt;
    try {
      std::size_t pos = 0;
      const std::int64_t val = std::stoll(*raw, &pos);
      if (pos != raw->size()) throw std::invalid_argument("trailing characters");
      return val;
    } catch (const std::exception&) {
      fail(key, "not an integer: '" + *raw + "'");
      return std::nullopt;
    }
  }

  std::optional<bool> boolean(const std::string& key) {
    const auto raw = str(key);
    if (!raw) return std::nullopt;
    if (*raw == "true" || *raw == "1") return true;
    if (*raw == "false" || *raw == "0") return false;
    fail(key, "not a boolean (true/false): '" + *raw + "'");
    return std::nullopt;
  }

  // Comma-separated vector; a single scalar broadcasts to length d.
  std::optional<Vec> vec(const std::string& key, int d) {
    const auto raw = str(key);
    if (!raw) return std::nullopt;
    std::vector<double> vals;
    std::stringstream ss(*raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        vals.push_back(std::stod(trim(item)));
      } catch (const std::exception&) {
        fail(key, "not a comma-separated vector: '" + *raw + "'");
        return std::nullopt;
      }
    }
    if (vals.size() == 1 && d > 1) vals.assign(static_cast<std::size_t>(d), vals[0]);
    if (static_cast<int>(vals.size()) != d) {
      fail(key, "expected " + std::to_string(d) + " components");
      return std::nullopt;
    }
    Vec out(d);
    for (int j = 0; j < d; ++j) out[j] = vals[static_cast<std::size_t>(j)];
    return out;
  }

  // Rows separated by ';', entries by ','.
  std::optional<Matrix> matrix(const std::string& key, int d) {
    const auto raw = str(key);
    if (!raw) return std::nullopt;
    std::vector<std::vector<double>> rows;
    std::stringstream ss(*raw);
    std::string row;
    while (std::getline(ss, row, ';')) {
      std::vector<double> vals;
      std::stringstream rs(row);
      std::string item;
      while (std::getline(rs, item, ',')) {
        try {
          vals.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
          fail(key, "not a matrix ('a,b;c,d'): '" + *raw + "'");
          return std::nullopt;
        }
      }
      rows.push_back(std::move(vals));
    }
    if (static_cast<int>(rows.size()) != d) {
      fail(key, "expected " + std::to_string(d) + " rows");
      return std::nullopt;
    }
    Matrix out(d, d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d) {
        fail(key, "expected " + std::to_string(d) + " columns per row");
        return std::nullopt;
      }
      for (int j = 0; j < d; ++j) {
        out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return out;
  }

  void fail(const std::string& key, const std::string& why) {
    errors_.push_back(prefix_ + key + ": " + why);
  }

  void require(const std::string& key, const std::string& context) {
    if (!has(key)) {
      errors_.push_back(prefix_ + key + ": required " + context);
    }
  }

  void report_unknown_keys() {
    for (const auto& [key, value] : section_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        errors_.push_back(prefix_ + key + ": unknown key");
      }
    }
  }

 private:
  const Section& section_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::vector<std::string> used_;
};

inline std::optional<RawConfig> split_sections(const std::string& text,
                                               std::vector<std::string>& errors) {
  RawConfig raw;
  Section* current = nullptr;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        return std::nullopt;
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "run") {
        current = &raw.run;
      } else if (name == "distribution") {
        current = &raw.distribution;
      } else if (name == "distribution.base") {
        current = &raw.distribution_base;
      } else if (name == "distribution.contaminant") {
        current = &raw.distribution_contaminant;
      } else if (name == "estimator") {
        raw.estimators.emplace_back();
        current = &raw.estimators.back();
      } else {
        errors.push_back("line " + std::to_string(lineno) + ": unknown section [" +
                         name + "]");
        return std::nullopt;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current == nullptr) {
      errors.push_back("line " + std::to_string(lineno) +
                       ": expected 'key = value' inside a section");
      return std::nullopt;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key");
      return std::nullopt;
    }
    (*current)[key] = value;
  }
  return raw;
}

inline std::optional<sim::DistributionSpec> build_distribution(
    const Section& section, const Section& base_section,
    const Section& contaminant_section, const std::string& prefix,
    std::vector<std::string>& errors, bool allow_mix) {
  SectionReader r(section, prefix, errors);
  const auto kind = r.str("kind");
  if (!kind) {
    r.require("kind", "(beta_product | gaussian_iso | gaussian_cov | heavy_tail "
                      "| point_mass | huber_mix)");
    return std::nullopt;
  }
  const bool known_kind =
      *kind == "beta_product" || *kind == "gaussian_iso" || *kind == "gaussian_cov" ||
      *kind == "heavy_tail" || *kind == "point_mass" || *kind == "huber_mix";
  if (!known_kind) {
    errors.push_back(prefix + "kind: unknown distribution '" + *kind + "'");
    return std::nullopt;
  }
  const auto d_opt = r.integer("d");
  const int d = d_opt ? static_cast<int>(*d_opt) : 0;
  if (*kind != "point_mass" && (!d_opt || d < 1)) {
    errors.push_back(prefix + "d: required count >= 1");
    return std::nullopt;
  }

  std::optional<sim::DistributionSpec> spec;
  if (*kind == "beta_product") {
    const auto a = r.num("a");
    const auto b = r.num("b");
    if (!a) r.require("a", "for beta_product");
    if (!b) r.require("b", "for beta_product");
    const bool recenter = r.boolean("recenter").value_or(false);
    const double scale = r.num("scale").value_or(1.0);
    if (a && b) {
      spec = sim::DistributionSpec::beta_product(d, *a, *b, recenter, scale);
    }
  } else if (*kind == "gaussian_iso") {
    const auto sigma = r.num("sigma");
    if (!sigma) r.require("sigma", "for gaussian_iso");
    const auto mu = r.has("mu") ? r.vec("mu", d) : std::optional<Vec>(Vec::Zero(d));
    if (sigma && mu) spec = sim::DistributionSpec::gaussian_iso(d, *mu, *sigma);
  } else if (*kind == "gaussian_cov") {
    const auto sigma_matrix = r.matrix("sigma_matrix", d);
    if (!sigma_matrix) r.require("sigma_matrix", "for gaussian_cov");
    const auto mu = r.has("mu") ? r.vec("mu", d) : std::optional<Vec>(Vec::Zero(d));
    if (sigma_matrix && mu) {
      spec = sim::DistributionSpec::gaussian_cov(d, *mu, *sigma_matrix);
    }
  } else if (*kind == "heavy_tail") {
    const auto p = r.num("p");
    const auto v = r.num("v");
    if (!p) r.require("p", "for heavy_tail");
    if (!v) r.require("v", "for heavy_tail");
    if (p && v) spec = sim::DistributionSpec::heavy_tail(d, *p, *v);
  } else if (*kind == "point_mass") {
    const int dim = d_opt ? d : -1;
    if (dim < 1) {
      errors.push_back(prefix + "d: required count >= 1");
      return std::nullopt;
    }
    const auto point = r.vec("point", dim);
    if (!point) {
      r.require("point", "for point_mass");
    } else {
      spec = sim::DistributionSpec::point_mass(*point);
    }
  } else if (*kind == "huber_mix") {
    if (!allow_mix) {
      errors.push_back(prefix + "kind: nested huber_mix is not supported");
      return std::nullopt;
    }
    const auto eps = r.num("eps");
    if (!eps) r.require("eps", "for huber_mix");
    if (base_section.empty()) {
      errors.push_back("[distribution.base]: required for huber_mix");
    }
    if (contaminant_section.empty()) {
      errors.push_back("[distribution.contaminant]: required for huber_mix");
    }
    if (eps && !base_section.empty() && !contaminant_section.empty()) {
      const Section empty;
      auto base = build_distribution(base_section, empty, empty,
                                     "distribution.base.", errors, false);
      auto cont = build_distribution(contaminant_section, empty, empty,
                                     "distribution.contaminant.", errors, false);
      if (base && cont) {
        spec = sim::DistributionSpec::huber_mix(std::move(*base), *eps,
                                                std::move(*cont));
      }
    }
  }

  r.report_unknown_keys();
  if (spec) {
    for (const auto& e : spec->validation_errors()) errors.push_back(prefix + e);
    if (!spec->validation_errors().empty()) return std::nullopt;
  }
  return spec;
}

inline std::optional<LambdaSchedule> build_schedule(SectionReader& r,
                                                    const std::string& prefix,
                                                    double alpha,
                                                    std::vector<std::string>& errors) {
  const auto kind = r.str("schedule");
  if (!kind) {
    r.require("schedule", "(constant | fixed_time_eb | anytime_eb | anytime_cg "
                          "| fixed_time_cg | robust_var | robust_fixed_time)");
    return std::nullopt;
  }
  try {
    if (*kind == "constant") {
      const auto lambda = r.num("lambda");
      if (!lambda) {
        r.require("lambda", "for schedule=constant");
        return std::nullopt;
      }
      return LambdaSchedule::constant(*lambda);
    }
    if (*kind == "fixed_time_eb") {
      const auto n = r.integer("n");
      const auto c = r.num("c");
      const auto cap = r.num("cap");
      if (!n || !c || !cap) {
        if (!n) r.require("n", "for schedule=fixed_time_eb");
        if (!c) r.require("c", "for schedule=fixed_time_eb");
        if (!cap) r.require("cap", "for schedule=fixed_time_eb");
        return std::nullopt;
      }
      return LambdaSchedule::fixed_time_eb(*n, alpha, *c, *cap);
    }
    if (*kind == "anytime_eb") {
      const auto cap = r.num("cap");
      if (!cap) {
        r.require("cap", "for schedule=anytime_eb");
        return std::nullopt;
      }
      return LambdaSchedule::anytime_eb(alpha, *cap);
    }
    if (*kind == "anytime_cg") {
      const auto v = r.num("v");
      const auto p = r.num("p");
      if (!v || !p) {
        if (!v) r.require("v", "for schedule=anytime_cg");
        if (!p) r.require("p", "for schedule=anytime_cg");
        return std::nullopt;
      }
      return LambdaSchedule::anytime_cg(alpha, *v, *p);
    }
    if (*kind == "fixed_time_cg") {
      const auto n = r.integer("n");
      const auto v = r.num("v");
      const auto p = r.num("p");
      if (!n || !v || !p) {
        if (!n) r.require("n", "for schedule=fixed_time_cg");
        if (!v) r.require("v", "for schedule=fixed_time_cg");
        if (!p) r.require("p", "for schedule=fixed_time_cg");
        return std::nullopt;
      }
      return LambdaSchedule::fixed_time_cg(*n, alpha, *v, *p);
    }
    if (*kind == "robust_var") {
      const auto b = r.num("b");
      if (!b) {
        r.require("b", "for schedule=robust_var");
        return std::nullopt;
      }
      const double cap = r.num("cap").value_or(0.68);
      return LambdaSchedule::robust_var(*b, cap);
    }
    if (*kind == "robust_fixed_time") {
      const auto n = r.integer("n");
      const auto eps = r.num("eps");
      const auto B = r.num("B");
      const auto cap = r.num("cap");
      if (!n || !eps || !B || !cap) {
        if (!n) r.require("n", "for schedule=robust_fixed_time");
        if (!eps) r.require("eps", "for schedule=robust_fixed_time");
        if (!B) r.require("B", "for schedule=robust_fixed_time");
        if (!cap) r.require("cap", "for schedule=robust_fixed_time");
        return std::nullopt;
      }
      return LambdaSchedule::robust_fixed_time(*n, alpha, *eps, *B, *cap);
    }
  } catch (const std::exception& e) {
    errors.push_back(prefix + "schedule: " + e.what());
    return std::nullopt;
  }
  errors.push_back(prefix + "schedule: unknown schedule '" + *kind + "'");
  return std::nullopt;
}

inline std::optional<Psi> build_psi(SectionReader& r, const std::string& prefix,
                                    std::vector<std::string>& errors) {
  const auto kind = r.str("psi");
  if (!kind) return std::nullopt;
  try {
    if (*kind == "exponential") return Psi::exponential();
    if (*kind == "gaussian") {
      const auto sigma = r.num("psi_sigma");
      if (!sigma) {
        r.require("psi_sigma", "for psi=gaussian");
        return std::nullopt;
      }
      return Psi::gaussian(*sigma);
    }
    if (*kind == "gamma") {
      const auto c = r.num("psi_c");
      if (!c) {
        r.require("psi_c", "for psi=gamma");
        return std::nullopt;
      }
      return Psi::gamma(*c);
    }
    if (*kind == "exponential_tail") {
      const auto sigma = r.num("psi_sigma");
      const auto lmax = r.num("psi_lambda_max");
      if (!sigma || !lmax) {
        if (!sigma) r.require("psi_sigma", "for psi=exponential_tail");
        if (!lmax) r.require("psi_lambda_max", "for psi=exponential_tail");
        return std::nullopt;
      }
      return Psi::exponential_tail(*sigma, *lmax);
    }
  } catch (const std::exception& e) {
    errors.push_back(prefix + "psi: " + e.what());
    return std::nullopt;
  }
  errors.push_back(prefix + "psi: unknown psi kind '" + *kind + "'");
  return std::nullopt;
}

inline std::optional<MethodEntry> build_estimator(const Section& section,
                                                  std::size_t index, int dist_d,
                                                  std::vector<std::string>& errors) {
  const std::string prefix = "estimator[" + std::to_string(index) + "].";
  SectionReader r(section, prefix, errors);
  const auto method_str = r.str("method");
  if (!method_str) {
    r.require("method", "(eb | sub_psi | cg | robust_eb | semi_empirical | "
                        "stitched_eb | stitched_subgamma | mom_union)");
    return std::nullopt;
  }

  MethodEntry entry;
  entry.name = r.str("name").value_or(*method_str);

  const auto alpha = r.num("alpha");
  if (!alpha) {
    r.require("alpha", "level in (0,1)");
    return std::nullopt;
  }
  if (!(*alpha > 0.0 && *alpha < 1.0)) {
    errors.push_back(prefix + "alpha must lie in (0,1)");
    return std::nullopt;
  }

  if (*method_str == "mom_union") {
    entry.is_mom = true;
    entry.mom.alpha = *alpha;
    const auto tr = r.num("trace_sigma");
    if (!tr) {
      r.require("trace_sigma", "for method=mom_union");
      return std::nullopt;
    }
    entry.mom.trace_sigma = *tr;
    r.report_unknown_keys();
    return entry;
  }

  EstimatorConfig cfg;
  cfg.alpha = *alpha;
  cfg.d = static_cast<int>(r.integer("d").value_or(dist_d));
  if (*method_str == "eb") {
    cfg.method = Method::eb;
  } else if (*method_str == "sub_psi") {
    cfg.method = Method::sub_psi;
  } else if (*method_str == "cg") {
    cfg.method = Method::cg;
  } else if (*method_str == "robust_eb") {
    cfg.method = Method::robust_eb;
  } else if (*method_str == "semi_empirical") {
    cfg.method = Method::semi_empirical;
  } else if (*method_str == "stitched_eb") {
    cfg.method = Method::stitched_eb;
  } else if (*method_str == "stitched_subgamma") {
    cfg.method = Method::stitched_subgamma;
  } else {
    errors.push_back(prefix + "method: unknown method '" + *method_str + "'");
    return std::nullopt;
  }

  if (const auto B = r.num("B")) cfg.B = *B;
  if (const auto v = r.num("v")) cfg.v = *v;
  if (const auto p = r.num("p")) cfg.p = *p;
  if (const auto beta = r.num("beta")) cfg.beta = *beta;
  if (const auto eps = r.num("eps")) cfg.eps = *eps;
  if (const auto tr = r.num("trace_sigma")) cfg.trace_sigma = *tr;
  if (const auto kappa = r.num("kappa")) cfg.kappa = *kappa;
  if (const auto cons = r.boolean("conservative")) cfg.conservative = *cons;
  cfg.psi = build_psi(r, prefix, errors);

  if (cfg.method != Method::stitched_eb && cfg.method != Method::stitched_subgamma) {
    cfg.schedule = build_schedule(r, prefix, cfg.alpha, errors);
  }

  r.report_unknown_keys();
  for (const auto& e : cfg.validation_errors()) errors.push_back(prefix + e);
  if (!cfg.validation_errors().empty()) return std::nullopt;
  entry.cfg = std::move(cfg);
  return entry;
}

}  // namespace detail

/// Parses the key-value run configuration. On failure the error list names
/// every invalid field.
inline ParseResult parse_config(const std::string& text) {
  ParseResult result;
  auto raw = detail::split_sections(text, result.errors);
  if (!raw) return result;

  RunConfig cfg;

  {
    detail::SectionReader r(raw->run, "run.", result.errors);
    const auto horizon = r.integer("horizon");
    if (!horizon) {
      r.require("horizon", "count >= 1");
    } else if (*horizon < 1) {
      result.errors.push_back("run.horizon must be >= 1");
    } else {
      cfg.horizon = *horizon;
    }
    cfg.replications = r.integer("replications").value_or(1);
    if (cfg.replications < 1) result.errors.push_back("run.replications must be >= 1");
    if (const auto seed = r.integer("seed")) {
      cfg.seed = static_cast<std::uint64_t>(*seed);
    } else {
      r.require("seed", "integer");
    }
    cfg.threads = static_cast<int>(r.integer("threads").value_or(1));
    if (cfg.threads < 1) result.errors.push_back("run.threads must be >= 1");
    cfg.out = r.str("out").value_or("");
    if (const auto model = r.str("model")) {
      if (*model == "sqrt_log_t_over_t") {
        cfg.rate_model = sim::RateModel::sqrt_log_t_over_t;
      } else if (*model == "lil") {
        cfg.rate_model = sim::RateModel::lil;
      } else {
        result.errors.push_back("run.model: unknown model '" + *model +
                                "' (sqrt_log_t_over_t | lil)");
      }
    }
    cfg.fit_min_t = r.num("fit_min_t").value_or(0.0);
    cfg.fit_max_t = r.num("fit_max_t").value_or(std::numeric_limits<double>::infinity());
    r.report_unknown_keys();
  }

  if (raw->distribution.empty()) {
    result.errors.push_back("[distribution]: section is required");
  }
  std::optional<sim::DistributionSpec> dist;
  if (!raw->distribution.empty()) {
    dist = detail::build_distribution(raw->distribution, raw->distribution_base,
                                      raw->distribution_contaminant,
                                      "distribution.", result.errors, true);
  }

  if (raw->estimators.empty()) {
    result.errors.push_back("[estimator]: at least one estimator section is required");
  }
  for (std::size_t i = 0; i < raw->estimators.size(); ++i) {
    auto entry = detail::build_estimator(raw->estimators[i], i,
                                         dist ? dist->d : 0, result.errors);
    if (entry) cfg.methods.push_back(std::move(*entry));
  }

  if (!result.errors.empty()) return result;
  cfg.distribution = std::move(*dist);
  result.config = std::move(cfg);
  return result;
}

}  // namespace css::cli
