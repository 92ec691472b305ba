#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "css/simlab/rng.hpp"
#include "css/vec.hpp"

namespace css::sim {

/// Generator configuration for the synthetic data regimes: Beta-product,
/// Gaussian, heavy-tailed Pareto-radial, point mass, and Huber
/// eps-mixtures (which lie inside the TV eps-ball around the base law).
struct DistributionSpec {
  enum class Kind {
    beta_product,
    gaussian_iso,
    gaussian_cov,
    heavy_tail,
    point_mass,
    huber_mix,
  };

  Kind kind = Kind::beta_product;
  int d = 1;

  // beta_product: per-coordinate Beta(a, b), optionally recentered to
  // [-1/2, 1/2] and scaled.
  double a = 1.0;
  double b = 1.0;
  bool recenter = false;
  double scale = 1.0;

  // gaussian_iso / gaussian_cov
  Vec mu;
  double sigma = 1.0;
  Matrix Sigma;

  // heavy_tail: isotropic direction times a Pareto radius with shape
  // p + 1/2 and scale calibrated so E|X|^p = v exactly.
  double p_moment = 2.0;
  double v = 1.0;

  // point_mass
  Vec point;

  // huber_mix: (1 - eps) base + eps contaminant
  double eps = 0.0;
  std::shared_ptr<const DistributionSpec> base;
  std::shared_ptr<const DistributionSpec> contaminant;

  static DistributionSpec beta_product(int d, double a, double b,
                                       bool recenter = false, double scale = 1.0) {
    DistributionSpec s;
    s.kind = Kind::beta_product;
    s.d = d;
    s.a = a;
    s.b = b;
    s.recenter = recenter;
    s.scale = scale;
    return s;
  }

  static DistributionSpec gaussian_iso(int d, Vec mu, double sigma) {
    DistributionSpec s;
    s.kind = Kind::gaussian_iso;
    s.d = d;
    s.mu = std::move(mu);
    s.sigma = sigma;
    return s;
  }

  static DistributionSpec gaussian_cov(int d, Vec mu, Matrix Sigma) {
    DistributionSpec s;
    s.kind = Kind::gaussian_cov;
    s.d = d;
    s.mu = std::move(mu);
    s.Sigma = std::move(Sigma);
    return s;
  }

  static DistributionSpec heavy_tail(int d, double p_moment, double v) {
    DistributionSpec s;
    s.kind = Kind::heavy_tail;
    s.d = d;
    s.p_moment = p_moment;
    s.v = v;
    return s;
  }

  static DistributionSpec point_mass(Vec point) {
    DistributionSpec s;
    s.kind = Kind::point_mass;
    s.d = static_cast<int>(point.size());
    s.point = std::move(point);
    return s;
  }

  static DistributionSpec huber_mix(DistributionSpec base_spec, double eps,
                                    DistributionSpec contaminant_spec) {
    DistributionSpec s;
    s.kind = Kind::huber_mix;
    s.d = base_spec.d;
    s.eps = eps;
    s.base = std::make_shared<const DistributionSpec>(std::move(base_spec));
    s.contaminant = std::make_shared<const DistributionSpec>(std::move(contaminant_spec));
    return s;
  }

  // Pareto shape and scale of the heavy-tail radial law. Shape p + 1/2
  // makes the p-th moment the largest finite one; scale solves
  // E R^p = shape x_m^p / (shape - p) = (2p+1) x_m^p = v.
  double pareto_shape() const { return p_moment + 0.5; }
  double pareto_scale() const {
    return std::pow(v / (2.0 * p_moment + 1.0), 1.0 / p_moment);
  }

  std::vector<std::string> validation_errors() const {
    std::vector<std::string> errs;
    auto bad = [&errs](const std::string& m) { errs.push_back(m); };
    if (d < 1) bad("distribution: d must be >= 1");
    switch (kind) {
      case Kind::beta_product:
        if (!(a > 0.0)) bad("distribution: a must be > 0");
        if (!(b > 0.0)) bad("distribution: b must be > 0");
        if (!(scale > 0.0)) bad("distribution: scale must be > 0");
        break;
      case Kind::gaussian_iso:
        if (!(sigma > 0.0)) bad("distribution: sigma must be > 0");
        if (mu.size() != d) bad("distribution: mu must have length d");
        break;
      case Kind::gaussian_cov: {
        if (mu.size() != d) bad("distribution: mu must have length d");
        if (Sigma.rows() != d || Sigma.cols() != d) {
          bad("distribution: Sigma must be d x d");
        } else {
          Eigen::LLT<Matrix> llt(Sigma);
          if (llt.info() != Eigen::Success) {
            bad("distribution: Sigma must be positive definite");
          }
        }
        break;
      }
      case Kind::heavy_tail:
        if (!(p_moment >= 2.0)) bad("distribution: p must be >= 2");
        if (!(v > 0.0)) bad("distribution: v must be > 0");
        break;
      case Kind::point_mass:
        if (point.size() != d) bad("distribution: point must have length d");
        if (point.size() > 0 && !point.allFinite()) bad("distribution: point must be finite");
        break;
      case Kind::huber_mix: {
        if (!(eps >= 0.0 && eps <= 1.0)) bad("distribution: eps must lie in [0,1]");
        if (!base || !contaminant) {
          bad("distribution: huber_mix needs base and contaminant");
        } else {
          if (base->d != d || contaminant->d != d) {
            bad("distribution: huber_mix components must share d");
          }
          for (const auto& e : base->validation_errors()) bad("base " + e);
          for (const auto& e : contaminant->validation_errors()) bad("contaminant " + e);
        }
        break;
      }
    }
    return errs;
  }

  void validate() const {
    const auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg = "invalid distribution spec:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }

  /// Mean of the law itself (mixtures included).
  Vec mean() const {
    switch (kind) {
      case Kind::beta_product: {
        double m = a / (a + b);
        if (recenter) m -= 0.5;
        return Vec::Constant(d, scale * m);
      }
      case Kind::gaussian_iso:
      case Kind::gaussian_cov:
        return mu;
      case Kind::heavy_tail:
        return Vec::Zero(d);
      case Kind::point_mass:
        return point;
      case Kind::huber_mix:
        return (1.0 - eps) * base->mean() + eps * contaminant->mean();
    }
    return Vec::Zero(d);
  }

  /// The mean a coverage run must capture: the base law's mean for Huber
  /// mixtures (the robust guarantee targets mu_P), the plain mean
  /// otherwise.
  Vec coverage_target() const {
    if (kind == Kind::huber_mix) return base->coverage_target();
    return mean();
  }

  /// E|X - mean|^2 (finite for every built-in spec since p >= 2).
  double second_central_moment() const {
    switch (kind) {
      case Kind::beta_product: {
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
        return d * scale * scale * var;
      }
      case Kind::gaussian_iso:
        return d * sigma * sigma;
      case Kind::gaussian_cov:
        return Sigma.trace();
      case Kind::heavy_tail: {
        const double sh = pareto_shape();
        const double xm = pareto_scale();
        return sh * xm * xm / (sh - 2.0);  // E R^2, mean is zero
      }
      case Kind::point_mass:
        return 0.0;
      case Kind::huber_mix: {
        const Vec m = mean();
        const double db = (base->mean() - m).squaredNorm();
        const double dc = (contaminant->mean() - m).squaredNorm();
        return (1.0 - eps) * (base->second_central_moment() + db) +
               eps * (contaminant->second_central_moment() + dc);
      }
    }
    return 0.0;
  }

  /// Almost-sure bound on |X| when one exists.
  std::optional<double> norm_bound() const {
    switch (kind) {
      case Kind::beta_product: {
        const double coord = recenter ? 0.5 * scale : scale;
        return std::sqrt(static_cast<double>(d)) * coord;
      }
      case Kind::point_mass:
        return point.norm();
      case Kind::huber_mix: {
        const auto bb = base->norm_bound();
        const auto cb = contaminant->norm_bound();
        if (bb && cb) return std::max(*bb, *cb);
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }
};

/// Incremental sampler for one replication's stream, deterministic given
/// (seed, stream index).
class Sampler {
 public:
  Sampler(const DistributionSpec& spec, std::uint64_t seed, std::uint64_t stream)
      : engine_(substream(seed, stream)) {
    spec.validate();
    root_ = build(spec);
  }

  Vec next() { return draw(*root_); }

 private:
  struct Node {
    DistributionSpec spec;
    Matrix chol;  // gaussian_cov
    std::unique_ptr<Node> base;
    std::unique_ptr<Node> contaminant;
  };

  std::unique_ptr<Node> build(const DistributionSpec& spec) {
    auto node = std::make_unique<Node>();
    node->spec = spec;
    if (spec.kind == DistributionSpec::Kind::gaussian_cov) {
      node->chol = Eigen::LLT<Matrix>(spec.Sigma).matrixL();
    }
    if (spec.kind == DistributionSpec::Kind::huber_mix) {
      node->base = build(*spec.base);
      node->contaminant = build(*spec.contaminant);
    }
    return node;
  }

  Vec draw(const Node& node) {
    const DistributionSpec& s = node.spec;
    switch (s.kind) {
      case DistributionSpec::Kind::beta_product: {
        Vec x(s.d);
        std::gamma_distribution<double> ga(s.a, 1.0);
        std::gamma_distribution<double> gb(s.b, 1.0);
        for (int j = 0; j < s.d; ++j) {
          const double u = ga(engine_);
          const double w = gb(engine_);
          double val = u / (u + w);
          if (s.recenter) val -= 0.5;
          x[j] = s.scale * val;
        }
        return x;
      }
      case DistributionSpec::Kind::gaussian_iso: {
        Vec x(s.d);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int j = 0; j < s.d; ++j) x[j] = s.mu[j] + s.sigma * nd(engine_);
        return x;
      }
      case DistributionSpec::Kind::gaussian_cov: {
        Vec z(s.d);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int j = 0; j < s.d; ++j) z[j] = nd(engine_);
        return s.mu + node.chol * z;
      }
      case DistributionSpec::Kind::heavy_tail: {
        Vec dir(s.d);
        std::normal_distribution<double> nd(0.0, 1.0);
        double norm = 0.0;
        do {
          for (int j = 0; j < s.d; ++j) dir[j] = nd(engine_);
          norm = dir.norm();
        } while (norm == 0.0);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        double u = ud(engine_);
        if (u <= 0.0) u = std::numeric_limits<double>::min();
        const double r = s.pareto_scale() * std::pow(u, -1.0 / s.pareto_shape());
        return (r / norm) * dir;
      }
      case DistributionSpec::Kind::point_mass:
        return s.point;
      case DistributionSpec::Kind::huber_mix: {
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        const bool contaminate = ud(engine_) < s.eps;
        return contaminate ? draw(*node.contaminant) : draw(*node.base);
      }
    }
    return Vec::Zero(s.d);  // unreachable
  }

  std::mt19937_64 engine_;
  std::unique_ptr<Node> root_;
};

/// Materialized sample batch, deterministic given the seed (stream 0).
inline std::vector<Vec> generate(const DistributionSpec& spec, std::int64_t n,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  Sampler sampler(spec, seed, 0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace css::sim
