// css-sim: Monte Carlo experiment driver for confidence sphere sequences.
//
// Subcommands:
//   coverage  simultaneous-coverage study for one estimator
//   width     radius trajectory for one estimator
//   compare   radius trajectories for several estimators (MoM baseline allowed)
//   rate      width trajectory + least-squares rate fit
//
// All experiment parameters come from a key-value config file (see README
// for the grammar); --seed/--threads/--out override the corresponding
// config entries.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "css/cli/config_file.hpp"
#include "css/cli/csv.hpp"
#include "css/css.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = 0;
  bool seed_set = false;
  int threads_override = 0;
  bool assert_thresholds = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "path to the run config file")
      ->required();
  cmd->add_option("--seed", args.seed_override, "override the config seed");
  cmd->add_option("--threads", args.threads_override,
                  "override the config thread count");
  cmd->add_option("--out", args.out_override, "override the config output path");
  cmd->add_flag("--assert", args.assert_thresholds,
                "turn acceptance thresholds into the exit code (coverage runs)");
}

int load_config(const CommonArgs& args, css::cli::RunConfig& cfg) {
  std::ifstream in(args.config_path);
  if (!in) {
    std::cerr << "error: cannot read config file: " << args.config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto parsed = css::cli::parse_config(buffer.str());
  if (!parsed.ok()) {
    std::cerr << "invalid config:\n";
    for (const auto& e : parsed.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }
  cfg = std::move(*parsed.config);
  if (args.seed_set) cfg.seed = static_cast<std::uint64_t>(args.seed_override);
  if (args.threads_override > 0) cfg.threads = args.threads_override;
  if (!args.out_override.empty()) cfg.out = args.out_override;
  return 0;
}

int require_single_estimator(const css::cli::RunConfig& cfg) {
  if (cfg.methods.size() != 1 || cfg.methods[0].is_mom) {
    std::cerr << "error: this subcommand needs exactly one [estimator] section "
                 "(and not mom_union)\n";
    return 2;
  }
  return 0;
}

int run_coverage_cmd(const CommonArgs& args) {
  css::cli::RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  if (int rc = require_single_estimator(cfg)) return rc;
  const auto& est = cfg.methods[0];

  const auto report =
      css::sim::run_coverage(est.cfg, cfg.distribution, cfg.horizon,
                             cfg.replications, cfg.seed, cfg.threads);
  if (!cfg.out.empty()) {
    css::cli::write_file_atomic(cfg.out, css::cli::coverage_csv(report));
  }

  const double threshold = 1.0 - est.cfg.alpha - 2.0 * report.binomial_se;
  std::cout << "method=" << est.name << " alpha=" << est.cfg.alpha
            << " horizon=" << report.horizon
            << " replications=" << report.replications
            << " miscovered=" << report.miscovered
            << " coverage_hat=" << css::cli::format_number(report.coverage_hat)
            << " binomial_se=" << css::cli::format_number(report.binomial_se)
            << " threshold=" << css::cli::format_number(threshold) << "\n";

  if (args.assert_thresholds && report.coverage_hat < threshold) {
    std::cerr << "assert: coverage " << report.coverage_hat
              << " fell below 1 - alpha - 2se = " << threshold << "\n";
    return 1;
  }
  return 0;
}

std::vector<css::sim::WidthPoint> collect_width_points(
    const css::cli::RunConfig& cfg) {
  std::vector<css::sim::NamedEstimator> streaming;
  for (const auto& m : cfg.methods) {
    if (!m.is_mom) streaming.push_back({m.name, m.cfg});
  }
  std::map<std::string, std::vector<css::sim::WidthPoint>> by_method;
  if (!streaming.empty()) {
    auto pts = css::sim::run_width_curve(streaming, cfg.distribution, cfg.horizon,
                                         cfg.replications, cfg.seed, cfg.threads);
    for (auto& pt : pts) by_method[pt.method].push_back(std::move(pt));
  }
  for (const auto& m : cfg.methods) {
    if (m.is_mom) by_method[m.name] = css::sim::mom_width_curve(m.mom, cfg.horizon, m.name);
  }

  // Interleave by checkpoint with the config's method ordering.
  const auto checkpoints = css::sim::log_checkpoints(cfg.horizon);
  std::vector<css::sim::WidthPoint> rows;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (const auto& m : cfg.methods) {
      rows.push_back(by_method.at(m.name).at(c));
    }
  }
  return rows;
}

int run_width_cmd(const CommonArgs& args, bool allow_multiple) {
  css::cli::RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  if (!allow_multiple) {
    if (int rc = require_single_estimator(cfg)) return rc;
  }
  const auto rows = collect_width_points(cfg);
  // With no output path the CSV goes to stdout, so the summary moves to
  // stderr to keep the stream parseable.
  if (!cfg.out.empty()) {
    css::cli::write_file_atomic(cfg.out, css::cli::width_csv(rows));
  } else {
    std::cout << css::cli::width_csv(rows);
  }
  (cfg.out.empty() ? std::cerr : std::cout)
      << "rows=" << rows.size() << " methods=" << cfg.methods.size()
      << " horizon=" << cfg.horizon << "\n";
  return 0;
}

int run_rate_cmd(const CommonArgs& args) {
  css::cli::RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  if (int rc = require_single_estimator(cfg)) return rc;

  const auto rows = collect_width_points(cfg);
  std::vector<css::sim::WidthPoint> windowed;
  for (const auto& pt : rows) {
    const double t = static_cast<double>(pt.t);
    if (t >= cfg.fit_min_t && t <= cfg.fit_max_t) windowed.push_back(pt);
  }
  const auto fit = css::sim::fit_rate(windowed, cfg.rate_model);

  std::vector<css::cli::RateRow> out_rows;
  out_rows.push_back({cfg.methods[0].name, cfg.rate_model, fit});
  if (!cfg.out.empty()) {
    css::cli::write_file_atomic(cfg.out, css::cli::rate_csv(out_rows));
  }
  std::cout << "method=" << cfg.methods[0].name
            << " model=" << css::sim::rate_model_name(cfg.rate_model)
            << " slope=" << css::cli::format_number(fit.slope)
            << " intercept=" << css::cli::format_number(fit.intercept)
            << " n_points=" << fit.n_points << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for time-uniform confidence sphere sequences"};
  app.require_subcommand(1);

  CommonArgs coverage_args, width_args, compare_args, rate_args;
  auto* coverage = app.add_subcommand("coverage", "simultaneous-coverage study");
  add_common(coverage, coverage_args);
  auto* width = app.add_subcommand("width", "radius trajectory for one estimator");
  add_common(width, width_args);
  auto* compare = app.add_subcommand("compare", "radius trajectories, several estimators");
  add_common(compare, compare_args);
  auto* rate = app.add_subcommand("rate", "width trajectory + rate fit");
  add_common(rate, rate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems share the bad-config code
  }

  coverage_args.seed_set = coverage->count("--seed") > 0;
  width_args.seed_set = width->count("--seed") > 0;
  compare_args.seed_set = compare->count("--seed") > 0;
  rate_args.seed_set = rate->count("--seed") > 0;

  try {
    if (coverage->parsed()) return run_coverage_cmd(coverage_args);
    if (width->parsed()) return run_width_cmd(width_args, false);
    if (compare->parsed()) return run_width_cmd(compare_args, true);
    if (rate->parsed()) return run_rate_cmd(rate_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
