#pragma once

// The full pipeline: two PDC sources -> trigger beam splitter -> [trigger
// polarizers] -> trigger post-selection -> station analyzers -> detection
// pattern probabilities conditioned on both triggers firing.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdcswap/fock.hpp"
#include "pdcswap/optics.hpp"

namespace pdcswap {

/// A: plain trigger detectors. B: the trigger at e~ sees only V, the one at
/// d~ only H.
enum class Variant { A, B };

inline std::string to_string(Variant v) { return v == Variant::A ? "A" : "B"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "A" || s == "a") return Variant::A;
  if (s == "B" || s == "b") return Variant::B;
  throw std::invalid_argument("unknown variant '" + s + "' (expected A or B)");
}

/// Raised when a pipeline stage produces a state that cannot be conditioned on.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Configuration {
 public:
  Configuration(Variant variant, double theta1, double theta2)
      : variant_(variant), theta1_(theta1), theta2_(theta2) {
    if (!std::isfinite(theta1) || !std::isfinite(theta2))
      throw std::invalid_argument("Configuration: analyzer angles must be finite");
  }

  Variant variant() const { return variant_; }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }

 private:
  Variant variant_;
  double theta1_;
  double theta2_;
};

/// Photon counts at (a+, a-, b+, b-).
struct DetectionPattern {
  std::array<unsigned, 4> counts{};

  unsigned a_plus() const { return counts[0]; }
  unsigned a_minus() const { return counts[1]; }
  unsigned b_plus() const { return counts[2]; }
  unsigned b_minus() const { return counts[3]; }
  std::pair<unsigned, unsigned> side_a() const { return {counts[0], counts[1]}; }
  std::pair<unsigned, unsigned> side_b() const { return {counts[2], counts[3]}; }
  unsigned total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

  auto operator<=>(const DetectionPattern&) const = default;

  /// e.g. "1a+,0a-;0b+,1b-"
  std::string to_string() const {
    return std::to_string(counts[0]) + "a+," + std::to_string(counts[1]) + "a-;" +
           std::to_string(counts[2]) + "b+," + std::to_string(counts[3]) + "b-";
  }

  static DetectionPattern of(const Monomial& m) {
    return {{m.count(modes::a_plus), m.count(modes::a_minus), m.count(modes::b_plus),
             m.count(modes::b_minus)}};
  }
};

/// The ten two-photon station patterns, in a fixed order: the six events
/// with both photons at one station, then the four one-per-station events.
inline const std::vector<DetectionPattern>& all_detection_patterns() {
  static const std::vector<DetectionPattern> patterns = {
      {{1, 1, 0, 0}}, {{2, 0, 0, 0}}, {{0, 2, 0, 0}}, {{0, 0, 1, 1}}, {{0, 0, 2, 0}},
      {{0, 0, 0, 2}}, {{1, 0, 1, 0}}, {{0, 1, 0, 1}}, {{1, 0, 0, 1}}, {{0, 1, 1, 0}}};
  return patterns;
}

inline std::string trigger_condition(Variant v) {
  return v == Variant::A ? "n(e~) >= 1 and n(d~) >= 1"
                         : "n(e~_V) = 1 and n(d~_H) = 1 and no loss photons";
}

/// Conditional distribution over station detection patterns.
class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  ProbabilityTable(std::map<DetectionPattern, double> entries, std::string conditioned_on)
      : entries_(std::move(entries)), conditioned_on_(std::move(conditioned_on)) {
    for (auto& [pat, p] : entries_) {
      if (p < -kPruneEpsilon) throw std::domain_error("ProbabilityTable: negative probability");
      if (p < 0.0) p = 0.0;
    }
  }

  /// Probability of `pattern`; patterns not stored have probability 0.
  double operator[](const DetectionPattern& pattern) const {
    auto it = entries_.find(pattern);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<DetectionPattern, double>& entries() const { return entries_; }
  const std::string& conditioned_on() const { return conditioned_on_; }

  double total() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.second;
    return s;
  }

 private:
  std::map<DetectionPattern, double> entries_;
  std::string conditioned_on_;
};

/// Order gamma^2 part of the two-source PDC state with the gamma^2/2 prefactor
/// dropped: X^2 + X Y + Y^2 with X = a_H d_V + a_V d_H, Y = e_H b_V + e_V b_H.
inline CreationPolynomial build_pdc_state() {
  using namespace modes;
  CreationPolynomial x = CreationPolynomial(Monomial{{a_H, 1}, {d_V, 1}}) +
                         CreationPolynomial(Monomial{{a_V, 1}, {d_H, 1}});
  CreationPolynomial y = CreationPolynomial(Monomial{{e_H, 1}, {b_V, 1}}) +
                         CreationPolynomial(Monomial{{e_V, 1}, {b_H, 1}});
  // Each source contributes (x/sqrt2)^n; the pair orders (2,0), (1,1), (0,2)
  // all carry (1/sqrt2)^2 = 1/2, which is part of the dropped prefactor.
  return multiply(x, x) + multiply(x, y) + multiply(y, y);
}

/// Keeps the terms compatible with both trigger detectors firing.
/// Throws PipelineError if nothing survives.
inline CreationPolynomial post_select(const CreationPolynomial& state, Variant variant) {
  using namespace modes;
  CreationPolynomial out;
  if (variant == Variant::A) {
    out = filter(state, [](const Monomial& m) {
      return m.count(e_out_H) + m.count(e_out_V) >= 1 && m.count(d_out_H) + m.count(d_out_V) >= 1;
    });
  } else {
    out = filter(state, [](const Monomial& m) {
      return m.count(e_out_V) == 1 && m.count(d_out_H) == 1;
    });
    // At order gamma^2 both idler photons are used up by the triggers, so no
    // surviving term may have fed a loss mode.
    for (const auto& t : out.terms())
      if (t.first.count(loss_e) + t.first.count(loss_d) + t.first.count(e_out_H) +
              t.first.count(d_out_V) != 0)
        throw PipelineError("post_select: triggered term with photons in rejected modes: " +
                            t.first.to_string());
  }
  if (out.empty())
    throw PipelineError("post_select: no term satisfies the trigger condition for variant " +
                        to_string(variant));
  return out;
}

/// PDC state after the trigger optics and trigger post-selection. The result
/// is independent of the analyzer angles.
inline CreationPolynomial triggered_state(Variant variant) {
  CreationPolynomial s = substitute(build_pdc_state(), beam_splitter_map());
  if (variant == Variant::B) {
    s = substitute(s, polarizer_filter_map(Trigger::e, Polarization::V));
    s = substitute(s, polarizer_filter_map(Trigger::d, Polarization::H));
  }
  return post_select(s, variant);
}

/// Pipeline with the angle-independent part evaluated once.
class SwappingExperiment {
 public:
  explicit SwappingExperiment(Variant variant)
      : variant_(variant), state_(triggered_state(variant)), norm_(norm_squared(state_)) {}

  Variant variant() const { return variant_; }
  const CreationPolynomial& triggered() const { return state_; }

  /// Squared norm of the post-selected state, relative to the dropped
  /// gamma^2/2 prefactor.
  double trigger_norm() const { return norm_; }

  ProbabilityTable probabilities(double theta1, double theta2) const {
    const Configuration cfg(variant_, theta1, theta2);
    const LinearMap analyzers =
        combine(analyzer_map(Station::a, cfg.theta1()), analyzer_map(Station::b, cfg.theta2()));
    const CreationPolynomial out = substitute(state_, analyzers);

    std::map<DetectionPattern, double> entries;
    for (const auto& pat : all_detection_patterns()) entries.emplace(pat, 0.0);
    for (const auto& [m, c] : out.terms()) {
      const double w = std::norm(c) * m.factorial_weight() / norm_;
      auto it = entries.find(DetectionPattern::of(m));
      if (it == entries.end()) {
        if (w > kPruneEpsilon)
          throw PipelineError("probabilities: weight on non two-photon pattern " +
                              DetectionPattern::of(m).to_string());
        continue;
      }
      it->second += w;
    }
    return ProbabilityTable(std::move(entries), trigger_condition(variant_));
  }

 private:
  Variant variant_;
  CreationPolynomial state_;
  double norm_;
};

inline ProbabilityTable station_probabilities(const Configuration& config) {
  return SwappingExperiment(config.variant()).probabilities(config.theta1(), config.theta2());
}

struct HomPoint {
  double theta1;
  double coincidence;  // P(1a+,1a-;0b+,0b-)
};

/// Station-a coincidence probability along a grid of theta1 (variant B).
inline std::vector<HomPoint> hom_scan(const std::vector<double>& theta1_grid) {
  const SwappingExperiment exp(Variant::B);
  const DetectionPattern coincidence{{1, 1, 0, 0}};
  std::vector<HomPoint> out;
  out.reserve(theta1_grid.size());
  for (double t : theta1_grid) out.push_back({t, exp.probabilities(t, 0.0)[coincidence]});
  return out;
}

}  // namespace pdcswap
