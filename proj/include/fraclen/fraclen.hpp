#pragma once

// Monte-Carlo estimation of the fractional length Len_σ(C, Ω) and the σ↑1
// limit sweep.
//
// Len_σ(C, Ω) integrates r^{1−n−σ} over the discs (p, u, r) that cross C an
// odd number of times and whose boundary meets Ω. Discs are parametrized by
// a crossing point z ∈ C, an orthonormal pair (a, b), an offset ξ and a
// radius r ≥ ξ through p = z + ξa, u = b; the surface factor of that
// parametrization is ξ^{n−2}|b·t(z)|. Every odd disc has several such
// parametrizations, one per interior crossing. The canonical estimator keeps
// only the one whose z is closest to p; the multiplicity estimator keeps them
// all and divides by the number of crossings.
//
// Sampling density:
//   z          uniform in arclength on C
//   (a, b)     uniform product measure on pairs (see measure_uperp2)
//   ξ          mixture of ξ^{−σ} on (0, ξ₀] and ξ^{−1−σ} on (ξ₀, ∞), ξ₀ = d
//   r | ξ      ∝ r^{1−n−σ} on [ξ, ξ + d]
// with d = 2R the window diameter. Any disc whose boundary meets the window
// and that contains a curve point at distance ξ from its center has
// r − ξ < d, so the r range is exact. ξ itself is unbounded: very large discs
// whose boundary sweeps through the window still count, and their mass decays
// like ξ^{−1−σ}, which the tail component matches. The importance weight is
// bounded on the whole domain.

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclen/curve.hpp"
#include "fraclen/disc.hpp"
#include "fraclen/errors.hpp"
#include "fraclen/geometry.hpp"
#include "fraclen/parallel.hpp"
#include "fraclen/random.hpp"

namespace fraclen {

class SigmaParam {
 public:
  explicit SigmaParam(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
      throw ConfigError("sigma must lie in (0, 1), got " + std::to_string(sigma));
    }
  }
  double value() const noexcept { return sigma_; }
  operator double() const noexcept { return sigma_; }  // NOLINT(google-explicit-constructor)

 private:
  double sigma_;
};

struct ProposalDescriptor {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
};

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_rejected_degenerate = 0;
  std::uint64_t seed = 0;
  ProposalDescriptor proposal;
  std::vector<std::string> warnings;
};

enum class UnbiasMode { canonical, multiplicity };

struct LenOptions {
  Tolerances tol;
  int workers = 1;
  UnbiasMode mode = UnbiasMode::canonical;
  int multiplicity_refine = 8;  // grid refinement factor for the brute-force crossing count
  int max_resamples = 1000;
};

/// Proposal for (ξ, δ = r − ξ). Exposed for tests.
class RadialProposal {
 public:
  RadialProposal(int n, double sigma, double diameter)
      : n_(n), sigma_(sigma), d_(diameter), xi0_(diameter), m_(n + sigma - 2.0) {
    if (!(d_ > 0.0) || !std::isfinite(d_)) throw ConfigError("proposal: window diameter must be positive");
    const double mass_in = std::pow(xi0_, 1.0 - sigma_) / ((1.0 - sigma_) * m_);
    const double mass_tail = d_ * std::pow(xi0_, -sigma_) / sigma_;
    pi_in_ = mass_in / (mass_in + mass_tail);
    if (!(pi_in_ > 0.0 && pi_in_ < 1.0)) throw ConfigError("proposal normalization failed");
  }

  struct Draw {
    double xi;
    double delta;
    double weight;  // ξ^{n−2} Z(ξ) / p(ξ), with Z(ξ) = ∫_ξ^{ξ+d} r^{1−n−σ} dr
  };

  Draw sample(SampleStream& rng) const {
    const double pick = rng.uniform();
    const double u = rng.uniform_open_closed();
    const bool inner = pick < pi_in_;
    // For σ near 1 the inner draw can underflow. Below the floor every disc
    // sees the curve as a straight line, and the inner weight does not depend
    // on ξ, so flooring changes no contribution.
    const double xi = inner ? std::max(xi0_ * std::pow(u, 1.0 / (1.0 - sigma_)), kXiFloor * xi0_)
                            : xi0_ * std::pow(u, -1.0 / sigma_);
    const double c = -std::expm1(-m_ * std::log1p(d_ / xi));  // 1 − (1 + d/ξ)^{−m}
    const double v = rng.uniform();
    const double delta = xi * std::expm1(-std::log1p(-v * c) / m_);
    // ξ^{n−2}Z(ξ) = ξ^{−σ} c / m; the ξ^{−σ} cancels against either piece.
    const double weight = inner ? c / (m_ * pi_in_ * (1.0 - sigma_) * std::pow(xi0_, sigma_ - 1.0))
                                : xi * c / (m_ * (1.0 - pi_in_) * sigma_ * std::pow(xi0_, sigma_));
    return {xi, std::min(delta, d_), weight};
  }

  /// Joint density of (ξ, r) under the proposal, for tests.
  double density(double xi, double r) const {
    if (!(xi > 0.0) || r < xi || r > xi + d_) return 0.0;
    // Evaluated in logs: the factors overflow separately for tiny ξ.
    const double lx = std::log(xi);
    const double log_p_xi = xi <= xi0_ ? std::log(pi_in_ * (1.0 - sigma_)) - sigma_ * lx - (1.0 - sigma_) * std::log(xi0_)
                                       : std::log((1.0 - pi_in_) * sigma_) + sigma_ * std::log(xi0_) - (1.0 + sigma_) * lx;
    const double log_z = -m_ * lx + std::log(-std::expm1(-m_ * std::log1p(d_ / xi)) / m_);
    return std::exp(log_p_xi - (m_ + 1.0) * std::log(r) - log_z);
  }

  ProposalDescriptor describe() const {
    return {"xi:mixture(power(-sigma) on (0,xi0], power(-1-sigma) on (xi0,inf)); r|xi:power(1-n-sigma) on [xi,xi+d]",
            {{"n", n_}, {"sigma", sigma_}, {"d", d_}, {"xi0", xi0_}, {"inner_weight", pi_in_}}};
  }

 private:
  static constexpr double kXiFloor = 1e-200;

  int n_;
  double sigma_;
  double d_;
  double xi0_;
  double m_;
  double pi_in_ = 0.5;
};

/// 4 α_{n−1} α_{n−2} / (n − 1), the σ↑1 limit of (1 − σ)Len_σ per unit length.
inline double limit_constant(int n) {
  require_dimension(n, 3, "limit_constant");
  return 4.0 * ball_volume(n - 1) * ball_volume(n - 2) / (n - 1);
}

/// 2 α_{n−1}², the value of the same limit obtained by integrating
/// |b·t| over the pair measure directly. It differs from limit_constant by
/// the factor (n−1)α_{n−1}/(2α_{n−2}), which is π/2 for n = 3.
inline double limit_constant_exact(int n) {
  require_dimension(n, 3, "limit_constant_exact");
  const double a = ball_volume(n - 1);
  return 2.0 * a * a;
}

namespace detail {

struct LenAccumulator {
  Moments moments;
  std::uint64_t rejected = 0;
  void merge(const LenAccumulator& o) {
    moments.merge(o.moments);
    rejected += o.rejected;
  }
};

inline void require_inside(const Curve& curve, const Window& window) {
  if (curve.dim() != window.center.size()) throw DimensionError("window dimension does not match curve");
  const double reach = bounding_radius(curve, window.center);
  if (!(reach < window.R)) {
    throw PreconditionError("curve is not contained in the window (reach " + std::to_string(reach) +
                            " >= R " + std::to_string(window.R) + ")");
  }
}

inline void attach_common_warnings(EstimatorResult& r) {
  if (r.n_samples > 0 && static_cast<double>(r.n_rejected_degenerate) >= 0.01 * static_cast<double>(r.n_samples)) {
    r.warnings.push_back("degenerate rejection rate above 1%");
  }
}

}  // namespace detail

/// Importance-sampling estimate of Len_σ(C, Ω) for a ball window.
inline EstimatorResult len_sigma(const Curve& curve, const Window& window, SigmaParam sigma, std::uint64_t n_samples,
                                 std::uint64_t seed, const LenOptions& opt = {}) {
  opt.tol.validate();
  if (n_samples < 1000) throw PreconditionError("len_sigma: n_samples must be at least 1000");
  detail::require_inside(curve, window);
  const int n = curve.dim();
  const CurveGrid grid(curve, opt.tol.grid);
  std::optional<CurveGrid> fine;
  if (opt.mode == UnbiasMode::multiplicity) fine.emplace(curve, opt.tol.grid * opt.multiplicity_refine);
  const ArclengthMap amap(curve);
  const double length = amap.length();
  const double mass = measure_uperp2(n);
  const RadialProposal proposal(n, sigma, window.diameter());

  auto block = [&](std::uint64_t begin, std::uint64_t end) {
    detail::LenAccumulator acc;
    for (std::uint64_t i = begin; i < end; ++i) {
      SampleStream rng(seed, i);
      double value = 0.0;
      for (int attempt = 0;; ++attempt) {
        if (attempt > opt.max_resamples) throw NumericalError("len_sigma: too many degenerate resamples");
        const double s = amap.param_at(rng.uniform() * length);
        const VecN dz = curve.derivative(s);
        const PerpPair ab = sample_perp_pair(n, rng);
        const RadialProposal::Draw draw = proposal.sample(rng);
        const AnchoredDisc disc{s, curve.eval(s), ab.a().vec(), ab.b().vec(), draw.xi, draw.delta};
        if (!boundary_meets_window(disc, window)) break;
        const double bt = std::abs(ab.b().dot(dz)) / dz.norm();
        const double weight = bt * length * mass * draw.weight;
        if (opt.mode == UnbiasMode::canonical) {
          const DiscClass cls = classify_anchored(grid, disc, PinnedRole::interior, opt.tol);
          if (!cls.parity_defined()) {
            ++acc.rejected;
            continue;
          }
          if (cls.label == DiscLabel::odd && anchor_is_canonical(disc, cls)) value = weight;
        } else {
          const DiscClass cls = classify_disc(*fine, disc.to_disc(), opt.tol);
          if (!cls.parity_defined()) {
            ++acc.rejected;
            continue;
          }
          if (cls.label == DiscLabel::odd) value = weight / cls.count;
        }
        break;
      }
      acc.moments.add(value);
    }
    return acc;
  };

  const auto total = reduce_blocks(n_samples, opt.workers, block, detail::LenAccumulator{});
  EstimatorResult r;
  r.estimate = total.moments.mean;
  r.std_error = total.moments.std_error();
  r.n_samples = n_samples;
  r.n_rejected_degenerate = total.rejected;
  r.seed = seed;
  r.proposal = proposal.describe();
  if (opt.mode == UnbiasMode::multiplicity) r.proposal.name += "; unbiasing:multiplicity";
  detail::attach_common_warnings(r);
  if (!std::isfinite(r.estimate)) throw NumericalError("len_sigma: non-finite estimate");
  return r;
}

struct LimitSweepRow {
  double sigma;
  double scaled_estimate;  // (1 − σ)·Len_σ
  double std_error;
  EstimatorResult raw;
};

struct Extrapolation {
  double value = 0.0;           // intercept of the least-squares line at σ = 1
  double std_error = 0.0;       // Monte-Carlo error propagated through the fit
  double slope = 0.0;
  double residual_rms = 0.0;    // root-mean-square residual of the linear fit
  std::vector<double> residuals;
};

struct LimitSweepResult {
  std::vector<LimitSweepRow> rows;
  Extrapolation extrapolation;
  /// Weighted cubic in (1 − σ); present when the grid has at least 5 points.
  std::optional<Extrapolation> cubic;
  double target = 0.0;        // limit_constant(n)·ℋ¹(C)
  double exact_target = 0.0;  // limit_constant_exact(n)·ℋ¹(C)
  double length = 0.0;
};

/// Ordinary least squares of y against x; returns the intercept with its
/// error propagated from independent per-point standard errors.
inline Extrapolation linear_extrapolate(const std::vector<double>& x, const std::vector<double>& y,
                                        const std::vector<double>& se) {
  const std::size_t k = x.size();
  if (k < 2 || y.size() != k || se.size() != k) throw ConfigError("extrapolation needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("extrapolation needs distinct abscissae");
  Extrapolation e;
  e.slope = sxy / sxx;
  e.value = my - e.slope * mx;
  double var = 0.0;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double c = 1.0 / static_cast<double>(k) - mx * (x[i] - mx) / sxx;  // ∂intercept/∂y_i
    var += c * c * se[i] * se[i];
    const double res = y[i] - (e.value + e.slope * x[i]);
    e.residuals.push_back(res);
    rss += res * res;
  }
  e.std_error = std::sqrt(var);
  e.residual_rms = std::sqrt(rss / static_cast<double>(k));
  return e;
}

/// Weighted least-squares polynomial of the given degree, weights 1/se².
/// The intercept's error is the (0,0) entry of the inverse normal matrix.
inline Extrapolation polynomial_extrapolate(const std::vector<double>& x, const std::vector<double>& y,
                                            const std::vector<double>& se, int degree) {
  const std::size_t k = x.size();
  if (degree < 1) throw ConfigError("extrapolation degree must be at least 1");
  if (y.size() != k || se.size() != k || k < static_cast<std::size_t>(degree) + 2) {
    throw ConfigError("polynomial extrapolation needs at least degree + 2 points");
  }
  const int m = degree + 1;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(k), m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (!(se[i] > 0.0)) throw ConfigError("polynomial extrapolation needs positive standard errors");
    double pw = 1.0;
    for (int j = 0; j < m; ++j, pw *= x[i]) a(static_cast<Eigen::Index>(i), j) = pw / se[i];
    rhs[static_cast<Eigen::Index>(i)] = y[i] / se[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < m) throw ConfigError("extrapolation needs distinct abscissae");
  const Eigen::VectorXd coef = qr.solve(rhs);
  const Eigen::MatrixXd normal_inv = (a.transpose() * a).inverse();
  Extrapolation e;
  e.value = coef[0];
  e.slope = coef[1];
  e.std_error = std::sqrt(normal_inv(0, 0));
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double fit = 0.0;
    double pw = 1.0;
    for (int j = 0; j < m; ++j, pw *= x[i]) fit += coef[j] * pw;
    e.residuals.push_back(y[i] - fit);
    rss += (y[i] - fit) * (y[i] - fit);
  }
  e.residual_rms = std::sqrt(rss / static_cast<double>(k));
  return e;
}

/// One len_sigma run per σ (row seeds derived from `seed`) and a linear
/// extrapolation of (1 − σ)Len_σ to σ = 1.
inline LimitSweepResult limit_sweep(const Curve& curve, const Window& window, const std::vector<SigmaParam>& sigmas,
                                    std::uint64_t n_samples, std::uint64_t seed, const LenOptions& opt = {}) {
  if (sigmas.size() < 2) throw ConfigError("limit_sweep needs at least two sigma values");
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    if (!(sigmas[i].value() > sigmas[i - 1].value())) throw ConfigError("sigma grid must be strictly increasing");
  }
  LimitSweepResult out;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> se;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double sg = sigmas[i].value();
    EstimatorResult r = len_sigma(curve, window, sigmas[i], n_samples, derive_seed(seed, i), opt);
    const double f = 1.0 - sg;
    out.rows.push_back({sg, f * r.estimate, f * r.std_error, r});
    x.push_back(f);
    y.push_back(f * r.estimate);
    se.push_back(f * r.std_error);
  }
  out.extrapolation = linear_extrapolate(x, y, se);
  if (x.size() >= 5) out.cubic = polynomial_extrapolate(x, y, se, 3);
  out.length = arclength(curve);
  out.target = limit_constant(curve.dim()) * out.length;
  out.exact_target = limit_constant_exact(curve.dim()) * out.length;
  return out;
}

}  // namespace fraclen
