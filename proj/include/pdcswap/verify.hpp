#pragma once

// Self-check suites behind the `verify` command: pipeline against the dense
// oracle and against the closed forms, plus the reported reference values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pdcswap/bell.hpp"
#include "pdcswap/experiment.hpp"
#include "pdcswap/oracle.hpp"

namespace pdcswap {

struct CheckResult {
  std::string name;
  std::size_t comparisons;
  double max_deviation;
  double tolerance;
  bool passed() const { return max_deviation <= tolerance; }
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  /// Adds a small offset to every pipeline probability before comparison;
  /// used to confirm that the checks can fail.
  bool perturb = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }
};

inline VerifyReport run_verification(const VerifyOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double offset = opt.perturb ? 1e-6 : 0.0;

  const SwappingExperiment exp_a(Variant::A);
  const SwappingExperiment exp_b(Variant::B);
  auto experiment = [&](Variant v) -> const SwappingExperiment& { return v == Variant::A ? exp_a : exp_b; };

  VerifyReport report;

  {
    CheckResult c{"oracle vs pipeline tables", 0, 0.0, 1e-10};
    for (Variant v : {Variant::A, Variant::B})
      for (int k = 0; k < 20; ++k) {
        const double t1 = angle(rng), t2 = angle(rng);
        const auto sparse = experiment(v).probabilities(t1, t2);
        const auto dense = oracle::oracle_probabilities(Configuration(v, t1, t2));
        for (const auto& p : all_detection_patterns()) {
          c.max_deviation = std::max(c.max_deviation, std::abs(sparse[p] + offset - dense[p]));
          ++c.comparisons;
        }
      }
    report.checks.push_back(c);
  }
  {
    CheckResult c{"pipeline vs closed-form tables", 0, 0.0, 1e-10};
    for (Variant v : {Variant::A, Variant::B})
      for (int k = 0; k < 25; ++k) {
        const double t1 = angle(rng), t2 = angle(rng);
        const auto table = experiment(v).probabilities(t1, t2);
        for (const auto& p : all_detection_patterns()) {
          const double ref = oracle::closed_form_probability(v, p, t1, t2);
          c.max_deviation = std::max(c.max_deviation, std::abs(table[p] + offset - ref));
          ++c.comparisons;
        }
      }
    report.checks.push_back(c);
  }
  {
    CheckResult c{"correlation vs closed form", 0, 0.0, 1e-9};
    for (Variant v : {Variant::A, Variant::B})
      for (int k = 0; k < 50; ++k) {
        const double t1 = angle(rng), t2 = angle(rng), a = unit(rng);
        const double e = correlation(experiment(v).probabilities(t1, t2), Distinguishability(a));
        c.max_deviation =
            std::max(c.max_deviation, std::abs(e + offset - oracle::closed_form_correlation(v, t1, t2, a)));
        ++c.comparisons;
      }
    report.checks.push_back(c);
  }
  {
    CheckResult c{"chsh at reported optimal angles", 0, 0.0, 1e-4};
    const auto s1 = chsh(exp_b, AngleSet::from_doubled(-1.30278, -2.87435, 1.05326, 2.62386),
                         Distinguishability(1.0));
    const auto s0 = chsh(exp_b, AngleSet::from_doubled(0.0837317, -1.0749, 3.05769, 4.21568),
                         Distinguishability(0.0));
    c.max_deviation = std::max(std::abs(s1.S + offset - 2.16569), std::abs(s0.S + offset - 2.11453));
    c.comparisons = 2;
    report.checks.push_back(c);
  }
  {
    CheckResult c{"post-selection normalization", 2, 0.0, 1e-10};
    c.max_deviation = std::max(std::abs(exp_a.trigger_norm() + offset - 13.0),
                               std::abs(exp_b.trigger_norm() + offset - 2.5));
    report.checks.push_back(c);
  }
  {
    CheckResult c{"HOM dip at station a", 2, 0.0, 1e-12};
    const auto dip = hom_scan({std::numbers::pi / 4, 0.0});
    c.max_deviation = std::max(std::abs(dip[0].coincidence + offset), std::abs(dip[1].coincidence + offset - 0.4));
    report.checks.push_back(c);
  }
  {
    CheckResult c{"oracle norm preservation", 0, 0.0, 1e-12};
    const auto psi = oracle::pdc_state();
    auto state = psi;
    const double n0 = psi.norm_squared();
    for (const auto& u : {oracle::beam_splitter_matrix(), oracle::trigger_polarizer_matrix(),
                          oracle::analyzer_matrix(0.3, -1.1)}) {
      state = oracle::apply_matrix(state, u);
      c.max_deviation = std::max(c.max_deviation, std::abs(state.norm_squared() - n0) / n0);
      ++c.comparisons;
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace pdcswap
