#pragma once

// Local value assignment with imperfect double-count identification, the
// Bell correlation function, CHSH evaluation and its maximization.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdcswap/experiment.hpp"

namespace pdcswap {

/// Probability that a two-photon hit on a single detector is recognised as
/// such. Must lie in [0, 1].
class Distinguishability {
 public:
  explicit Distinguishability(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("Distinguishability: alpha must lie in [0, 1]");
  }
  double value() const { return alpha_; }

 private:
  double alpha_;
};

struct AngleSet {
  double theta1;
  double theta1p;
  double theta2;
  double theta2p;

  bool finite() const {
    return std::isfinite(theta1) && std::isfinite(theta1p) && std::isfinite(theta2) &&
           std::isfinite(theta2p);
  }

  /// Angles from the doubled values 2*theta, the form in which optimal
  /// settings are usually quoted.
  static AngleSet from_doubled(double t1, double t1p, double t2, double t2p) {
    return {t1 / 2, t1p / 2, t2 / 2, t2p / 2};
  }

  std::array<double, 4> as_array() const { return {theta1, theta1p, theta2, theta2p}; }
  static AngleSet from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

inline constexpr double kLocalBound = 2.0;
inline constexpr double kViolationTolerance = 1e-9;

struct ChshResult {
  double S;
  AngleSet angles;
  Distinguishability alpha;
  bool violated;
};

/// Expected local value at one station given (n+, n-):
/// a single click at +/- gives +1/-1, every other event +1, except two
/// photons at the - detector, which read as a single - click with
/// probability 1 - alpha.
inline double local_value(unsigned n_plus, unsigned n_minus, Distinguishability alpha) {
  if (n_plus + n_minus > 2)
    throw std::invalid_argument("local_value: more than two photons at one station");
  if (n_plus == 0 && n_minus == 1) return -1.0;
  if (n_plus == 0 && n_minus == 2) return 2.0 * alpha.value() - 1.0;
  return 1.0;
}

inline double correlation(const ProbabilityTable& table, Distinguishability alpha) {
  double e = 0.0;
  for (const auto& [pat, p] : table.entries()) {
    if (p == 0.0) continue;
    const auto [ap, am] = pat.side_a();
    const auto [bp, bm] = pat.side_b();
    e += p * local_value(ap, am, alpha) * local_value(bp, bm, alpha);
  }
  return e;
}

inline double chsh_value(const SwappingExperiment& exp, const AngleSet& t, Distinguishability alpha) {
  auto e = [&](double x, double y) { return correlation(exp.probabilities(x, y), alpha); };
  return e(t.theta1, t.theta2) + e(t.theta1, t.theta2p) + e(t.theta1p, t.theta2) -
         e(t.theta1p, t.theta2p);
}

inline ChshResult make_result(double s, const AngleSet& angles, Distinguishability alpha) {
  return {s, angles, alpha, s > kLocalBound + kViolationTolerance};
}

inline ChshResult chsh(const SwappingExperiment& exp, const AngleSet& angles, Distinguishability alpha) {
  if (!angles.finite()) throw std::invalid_argument("chsh: angles must be finite");
  return make_result(chsh_value(exp, angles, alpha), angles, alpha);
}

inline ChshResult chsh(Variant variant, const AngleSet& angles, Distinguishability alpha) {
  return chsh(SwappingExperiment(variant), angles, alpha);
}

struct OptimizerOptions {
  double grid_step = std::numbers::pi / 60;
  double final_step = 1e-7;
  std::size_t refine_seeds = 4;
};

namespace detail {

/// Compass search: try +-step along each coordinate, move to the best
/// improving point, halve the step when nothing improves.
template <typename F>
std::array<double, 4> pattern_search(F&& f, std::array<double, 4> x, double& fx, double step,
                                     double final_step) {
  while (step >= final_step) {
    std::array<double, 4> best = x;
    double best_f = fx;
    for (std::size_t k = 0; k < 4; ++k)
      for (double dir : {1.0, -1.0}) {
        auto y = x;
        y[k] += dir * step;
        const double fy = f(y);
        if (fy > best_f) {
          best_f = fy;
          best = y;
        }
      }
    if (best_f > fx) {
      x = best;
      fx = best_f;
    } else {
      step *= 0.5;
    }
  }
  return x;
}

inline double wrap_pi(double t) {
  double r = std::fmod(t, std::numbers::pi);
  return r < 0 ? r + std::numbers::pi : r;
}

}  // namespace detail

/// Global maximum of S over the four analyzer angles. All probabilities are
/// pi-periodic in each angle, so a grid over [0, pi)^4 is scanned using a
/// precomputed table of correlations, then the best few grid points are
/// refined by pattern search. Deterministic.
inline ChshResult maximize_chsh(const SwappingExperiment& exp, Distinguishability alpha,
                                const OptimizerOptions& opt = {}) {
  if (!(opt.grid_step > 0.0) || !(opt.final_step > 0.0))
    throw std::invalid_argument("maximize_chsh: steps must be positive");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(std::numbers::pi / opt.grid_step)));
  const double h = std::numbers::pi / static_cast<double>(n);

  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      e[i * n + j] = correlation(exp.probabilities(i * h, j * h), alpha);

  struct Seed {
    double s;
    std::array<std::size_t, 4> idx;
  };
  const std::size_t keep = std::max<std::size_t>(1, opt.refine_seeds);
  std::vector<Seed> seeds;
  // Strict comparisons keep the lexicographically first of equal values.
  auto offer = [&](double s, std::array<std::size_t, 4> idx) {
    if (seeds.size() == keep && s <= seeds.back().s) return;
    auto pos = std::find_if(seeds.begin(), seeds.end(), [s](const Seed& x) { return s > x.s; });
    seeds.insert(pos, {s, idx});
    if (seeds.size() > keep) seeds.pop_back();
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ip = 0; ip < n; ++ip)
      for (std::size_t j = 0; j < n; ++j) {
        const double eij = e[i * n + j];
        const double eipj = e[ip * n + j];
        for (std::size_t jp = 0; jp < n; ++jp) {
          const double s = eij + e[i * n + jp] + eipj - e[ip * n + jp];
          if (seeds.size() < keep || s > seeds.back().s) offer(s, {i, ip, j, jp});
        }
      }

  auto objective = [&](const std::array<double, 4>& x) {
    return chsh_value(exp, AngleSet::from_array(x), alpha);
  };
  ChshResult best = make_result(-5.0, AngleSet{0, 0, 0, 0}, alpha);
  for (const auto& seed : seeds) {
    std::array<double, 4> x{seed.idx[0] * h, seed.idx[1] * h, seed.idx[2] * h, seed.idx[3] * h};
    double fx = objective(x);
    x = detail::pattern_search(objective, x, fx, h, opt.final_step);
    if (fx > best.S) {
      for (auto& t : x) t = detail::wrap_pi(t);
      best = make_result(fx, AngleSet::from_array(x), alpha);
    }
  }
  return best;
}

inline ChshResult maximize_chsh(Variant variant, Distinguishability alpha, const OptimizerOptions& opt = {}) {
  return maximize_chsh(SwappingExperiment(variant), alpha, opt);
}

enum class ThresholdStatus { crossing, violated_at_all_alpha, never_violated };

inline std::string to_string(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::crossing: return "crossing";
    case ThresholdStatus::violated_at_all_alpha: return "violated_at_all_alpha";
    default: return "never_violated";
  }
}

struct ThresholdResult {
  double alpha_star;
  ThresholdStatus status;
};

/// Smallest alpha at which the maximal CHSH value reaches the local bound.
/// Monotonicity of S*(alpha) is checked on a grid before bisecting; a
/// violation of it raises std::runtime_error.
inline ThresholdResult alpha_threshold(const SwappingExperiment& exp, double tol = 1e-6,
                                       const OptimizerOptions& opt = {}) {
  auto s_star = [&](double a) { return maximize_chsh(exp, Distinguishability(a), opt).S; };

  const double at_zero = s_star(0.0);
  if (at_zero > kLocalBound + kViolationTolerance) return {0.0, ThresholdStatus::violated_at_all_alpha};

  double prev = at_zero;
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    const double cur = s_star(a);
    if (cur < prev - 1e-9) throw std::runtime_error("alpha_threshold: S*(alpha) is not monotone");
    prev = cur;
  }
  if (prev <= kLocalBound) return {1.0, ThresholdStatus::never_violated};

  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (s_star(mid) >= kLocalBound ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), ThresholdStatus::crossing};
}

inline ThresholdResult alpha_threshold(Variant variant, double tol = 1e-6, const OptimizerOptions& opt = {}) {
  return alpha_threshold(SwappingExperiment(variant), tol, opt);
}

}  // namespace pdcswap
