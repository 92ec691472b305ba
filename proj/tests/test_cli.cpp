#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "css/cli/config_file.hpp"
#include "css/cli/csv.hpp"

namespace cli = css::cli;
namespace sim = css::sim;

namespace {

const char* kMinimalCoverage = R"(
# minimal EB coverage run
[run]
horizon = 10000
replications = 500
seed = 7

[distribution]
kind = beta_product
d = 10
a = 1
b = 1
recenter = true

[estimator]
method = eb
alpha = 0.1
B = 1.5811388300841898
schedule = anytime_eb
cap = 0.5
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: minimal EB coverage config is accepted") {
  const auto result = cli::parse_config(kMinimalCoverage);
  CAPTURE(result.errors);
  REQUIRE(result.ok());
  const auto& cfg = *result.config;
  CHECK(cfg.horizon == 10000);
  CHECK(cfg.replications == 500);
  CHECK(cfg.seed == 7);
  REQUIRE(cfg.methods.size() == 1);
  CHECK(cfg.methods[0].cfg.method == css::Method::eb);
  CHECK(cfg.methods[0].cfg.d == 10);
  CHECK(cfg.methods[0].cfg.alpha == 0.1);
  CHECK(cfg.distribution.kind == sim::DistributionSpec::Kind::beta_product);
  CHECK(cfg.distribution.recenter);
}

TEST_CASE("parse_config: missing cg parameter is named") {
  const std::string text = R"(
[run]
horizon = 100
seed = 1
[distribution]
kind = heavy_tail
d = 4
p = 2
v = 10
[estimator]
method = cg
alpha = 0.1
schedule = anytime_cg
p = 2
)";
  const auto result = cli::parse_config(text);
  REQUIRE_FALSE(result.ok());
  bool mentions_v = false;
  for (const auto& e : result.errors) {
    if (e.find("v") != std::string::npos) mentions_v = true;
  }
  CHECK(mentions_v);
}

TEST_CASE("parse_config: alpha range error") {
  const std::string text = R"(
[run]
horizon = 100
seed = 1
[distribution]
kind = beta_product
d = 2
a = 1
b = 1
[estimator]
method = eb
alpha = 1.5
B = 1.0
schedule = anytime_eb
cap = 0.5
)";
  const auto result = cli::parse_config(text);
  REQUIRE_FALSE(result.ok());
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.find("alpha must lie in (0,1)") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("parse_config: unknown method and unknown key are both reported") {
  const std::string text = R"(
[run]
horizon = 100
seed = 1
typo_key = 3
[distribution]
kind = beta_product
d = 2
a = 1
b = 1
[estimator]
method = frequentist_magic
alpha = 0.1
)";
  const auto result = cli::parse_config(text);
  REQUIRE_FALSE(result.ok());
  bool unknown_method = false, unknown_key = false;
  for (const auto& e : result.errors) {
    if (e.find("unknown method") != std::string::npos) unknown_method = true;
    if (e.find("typo_key") != std::string::npos) unknown_key = true;
  }
  CHECK(unknown_method);
  CHECK(unknown_key);
}

TEST_CASE("parse_config: huber mixture with nested sections") {
  const std::string text = R"(
[run]
horizon = 1000
replications = 10
seed = 2

[distribution]
kind = huber_mix
d = 2
eps = 0.05

[distribution.base]
kind = beta_product
d = 2
a = 50
b = 50
recenter = true

[distribution.contaminant]
kind = point_mass
d = 2
point = 0.5,0.5

[estimator]
method = robust_eb
alpha = 0.1
B = 0.7071067811865476
eps = 0.05
schedule = robust_var
b = 8
)";
  const auto result = cli::parse_config(text);
  CAPTURE(result.errors);
  REQUIRE(result.ok());
  const auto& dist = result.config->distribution;
  CHECK(dist.kind == sim::DistributionSpec::Kind::huber_mix);
  CHECK(dist.eps == 0.05);
  REQUIRE(dist.base);
  CHECK(dist.base->a == 50.0);
  REQUIRE(dist.contaminant);
  CHECK(dist.contaminant->point.size() == 2);
}

TEST_CASE("parse_config: compare run with a MoM baseline keeps method order") {
  const std::string text = R"(
[run]
horizon = 1000
replications = 5
seed = 3

[distribution]
kind = gaussian_iso
d = 20
sigma = 1
mu = 0

[estimator]
name = cg
method = cg
alpha = 0.05
v = 20
p = 2
beta = 1
schedule = anytime_cg

[estimator]
name = mom
method = mom_union
alpha = 0.05
trace_sigma = 20
)";
  const auto result = cli::parse_config(text);
  CAPTURE(result.errors);
  REQUIRE(result.ok());
  REQUIRE(result.config->methods.size() == 2);
  CHECK(result.config->methods[0].name == "cg");
  CHECK_FALSE(result.config->methods[0].is_mom);
  CHECK(result.config->methods[1].name == "mom");
  CHECK(result.config->methods[1].is_mom);
  CHECK(result.config->methods[1].mom.trace_sigma == 20.0);
}

TEST_CASE("csv formatting uses 12 significant digits") {
  CHECK(cli::format_number(0.1234567890123456) == "0.123456789012");
  CHECK(cli::format_number(1.0) == "1");
  CHECK(cli::format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("width csv layout and empty stream") {
  std::vector<sim::WidthPoint> pts;
  CHECK(cli::width_csv(pts) == "t,method,mean_radius,radius_se\n");
  pts.push_back({1, "a", 0.5, 0.0});
  pts.push_back({1, "b", 0.25, 0.0});
  pts.push_back({10, "a", 0.05, 0.001});
  const std::string csv = cli::width_csv(pts);
  CHECK(csv ==
        "t,method,mean_radius,radius_se\n"
        "1,a,0.5,0\n"
        "1,b,0.25,0\n"
        "10,a,0.05,0.001\n");
}

TEST_CASE("rate csv rows") {
  std::vector<cli::RateRow> rows;
  rows.push_back({"eb", sim::RateModel::sqrt_log_t_over_t, {1.0075, -0.25, 150}});
  CHECK(cli::rate_csv(rows) ==
        "method,model,slope,intercept,n_points\n"
        "eb,sqrt_log_t_over_t,1.0075,-0.25,150\n");
}

TEST_CASE("coverage csv rows") {
  sim::CoverageReport report;
  report.first_miscoverage_t = {-1, 42, -1};
  const std::string csv = cli::coverage_csv(report);
  CHECK(csv ==
        "replication,first_miscoverage_t\n"
        "0,-1\n"
        "1,42\n"
        "2,-1\n");
}

TEST_CASE("atomic csv writing is byte-stable and leaves no temp file") {
  const auto dir = std::filesystem::temp_directory_path() / "css_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";

  std::vector<sim::WidthPoint> pts = {{1, "m", 0.125, 0.0}, {5, "m", 0.03125, 0.0}};
  cli::write_file_atomic(path.string(), cli::width_csv(pts));
  const std::string first = slurp(path);
  cli::write_file_atomic(path.string(), cli::width_csv(pts));
  CHECK(first == slurp(path));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));

  CHECK_THROWS_AS(cli::write_file_atomic((dir / "nodir" / "x.csv").string(), "a"),
                  std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("end-to-end determinism: same config + seed, identical report") {
  const auto result = cli::parse_config(kMinimalCoverage);
  REQUIRE(result.ok());
  const auto& cfg = *result.config;
  const auto a = sim::run_coverage(cfg.methods[0].cfg, cfg.distribution, 500, 30,
                                   cfg.seed, 2);
  const auto b = sim::run_coverage(cfg.methods[0].cfg, cfg.distribution, 500, 30,
                                   cfg.seed, 1);
  CHECK(cli::coverage_csv(a) == cli::coverage_csv(b));
}
