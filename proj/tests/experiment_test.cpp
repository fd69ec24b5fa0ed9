#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pdcswap/experiment.hpp"
#include "pdcswap/oracle.hpp"
#include "test_util.hpp"

using namespace pdcswap;
using namespace pdcswap::modes;

namespace {

constexpr double kPi = std::numbers::pi;

const DetectionPattern kCoincA{{1, 1, 0, 0}};
const DetectionPattern kDoublePlusA{{2, 0, 0, 0}};
const DetectionPattern kDoubleMinusA{{0, 2, 0, 0}};
const DetectionPattern kPlusPlus{{1, 0, 1, 0}};
const DetectionPattern kMinusMinus{{0, 1, 0, 1}};
const DetectionPattern kPlusMinus{{1, 0, 0, 1}};
const DetectionPattern kMinusPlus{{0, 1, 1, 0}};

double sq(double x) { return x * x; }

}  // namespace

TEST(BuildPdcState, Coefficients) {
  const auto psi = build_pdc_state();
  EXPECT_EQ(psi.size(), 10u);
  for (const auto& [m, c] : psi.terms()) EXPECT_EQ(m.degree(), 4u);
  // Cross term of the single-source square and the two-source product.
  EXPECT_EQ(psi.coefficient(Monomial{{a_H, 1}, {a_V, 1}, {d_V, 1}, {d_H, 1}}), Complex(2.0));
  EXPECT_EQ(psi.coefficient(Monomial{{a_H, 1}, {d_V, 1}, {e_H, 1}, {b_V, 1}}), Complex(1.0));
  EXPECT_EQ(psi.coefficient(Monomial{{a_H, 2}, {d_V, 2}}), Complex(1.0));
  EXPECT_EQ(psi.coefficient(Monomial{{b_H, 2}, {e_V, 2}}), Complex(1.0));
}

TEST(PostSelect, NormalizationConstants) {
  EXPECT_NEAR(SwappingExperiment(Variant::A).trigger_norm(), 13.0, 1e-10);
  EXPECT_NEAR(SwappingExperiment(Variant::B).trigger_norm(), 2.5, 1e-10);
}

TEST(PostSelect, VariantBStructure) {
  const auto s = triggered_state(Variant::B);
  const Monomial trig{{e_out_V, 1}, {d_out_H, 1}};
  const Complex bunched = s.coefficient(Monomial{{a_H, 1}, {a_V, 1}} * trig);
  const Complex split = s.coefficient(Monomial{{a_H, 1}, {b_V, 1}} * trig);
  EXPECT_EQ(s.size(), 4u);
  // i : 1/2 up to the sign of the split part.
  EXPECT_NEAR(std::abs(bunched / split), 2.0, 1e-14);
  EXPECT_NEAR((bunched / split).real(), 0.0, 1e-14);
  EXPECT_EQ(s.coefficient(Monomial{{b_H, 1}, {b_V, 1}} * trig), bunched);
  EXPECT_EQ(s.coefficient(Monomial{{a_V, 1}, {b_H, 1}} * trig), -split);
}

TEST(PostSelect, EmptySelectionRaises) {
  // Without the beam splitter no photon reaches the trigger modes.
  EXPECT_THROW(post_select(build_pdc_state(), Variant::A), PipelineError);
  EXPECT_THROW(post_select(build_pdc_state(), Variant::B), PipelineError);
}

TEST(PostSelect, VariantBRejectsUnfilteredState) {
  // Skipping the trigger polarizers leaves photons in the rejected
  // polarizations alongside a valid trigger pattern.
  const auto s = substitute(build_pdc_state(), beam_splitter_map());
  EXPECT_NO_THROW(post_select(s, Variant::A));
  const auto raw = CreationPolynomial(Monomial{{e_out_V, 1}, {d_out_H, 1}, {e_out_H, 1}, {a_H, 1}});
  EXPECT_THROW(post_select(raw, Variant::B), PipelineError);
}

TEST(Configuration, RejectsNonFiniteAngles) {
  EXPECT_THROW(Configuration(Variant::A, std::nan(""), 0.0), std::invalid_argument);
  EXPECT_THROW(Configuration(Variant::B, 0.0, -INFINITY), std::invalid_argument);
}

TEST(StationProbabilities, VariantATable) {
  for (int k = 0; k < 10; ++k) {
    const double t1 = testutil::random_angle(), t2 = testutil::random_angle();
    const auto t = station_probabilities(Configuration(Variant::A, t1, t2));
    for (const auto& p : {kCoincA, kDoublePlusA, kDoubleMinusA, DetectionPattern{{0, 0, 1, 1}},
                          DetectionPattern{{0, 0, 2, 0}}, DetectionPattern{{0, 0, 0, 2}}})
      EXPECT_NEAR(t[p], 2.0 / 13.0, 1e-12) << p.to_string();
    EXPECT_NEAR(t[kPlusPlus], sq(std::sin(t1 - t2)) / 26.0, 1e-12);
    EXPECT_NEAR(t[kMinusMinus], sq(std::sin(t1 - t2)) / 26.0, 1e-12);
    EXPECT_NEAR(t[kPlusMinus], sq(std::cos(t1 - t2)) / 26.0, 1e-12);
    EXPECT_NEAR(t[kMinusPlus], sq(std::cos(t1 - t2)) / 26.0, 1e-12);
  }
}

TEST(StationProbabilities, VariantBTable) {
  for (int k = 0; k < 10; ++k) {
    const double t1 = testutil::random_angle(), t2 = testutil::random_angle();
    const auto t = station_probabilities(Configuration(Variant::B, t1, t2));
    EXPECT_NEAR(t[kCoincA], 0.4 * sq(std::cos(2 * t1)), 1e-12);
    EXPECT_NEAR(t[kDoublePlusA], 0.2 * sq(std::sin(2 * t1)), 1e-12);
    EXPECT_NEAR(t[kDoubleMinusA], 0.2 * sq(std::sin(2 * t1)), 1e-12);
    EXPECT_NEAR((t[DetectionPattern{{0, 0, 1, 1}}]), 0.4 * sq(std::cos(2 * t2)), 1e-12);
    EXPECT_NEAR((t[DetectionPattern{{0, 0, 0, 2}}]), 0.2 * sq(std::sin(2 * t2)), 1e-12);
    EXPECT_NEAR(t[kPlusPlus], sq(std::sin(t1 - t2)) / 10.0, 1e-12);
    EXPECT_NEAR(t[kPlusMinus], sq(std::cos(t1 - t2)) / 10.0, 1e-12);
  }
}

TEST(StationProbabilities, VariantBEqualAngles) {
  const auto t = station_probabilities(Configuration(Variant::B, 0.37, 0.37));
  EXPECT_NEAR(t[kPlusPlus], 0.0, 1e-15);
  EXPECT_NEAR(t[kPlusMinus], 0.1, 1e-15);
}

TEST(StationProbabilities, TableHasTenPatternsAndCondition) {
  const auto t = station_probabilities(Configuration(Variant::A, 0.1, 0.2));
  EXPECT_EQ(t.entries().size(), 10u);
  EXPECT_EQ(t.conditioned_on(), trigger_condition(Variant::A));
  for (const auto& [p, prob] : t.entries()) EXPECT_EQ(p.total(), 2u);
}

TEST(HomScan, DipValues) {
  const auto scan = hom_scan({kPi / 4, 0.0, kPi / 8});
  ASSERT_EQ(scan.size(), 3u);
  EXPECT_LT(scan[0].coincidence, 1e-12);
  EXPECT_NEAR(scan[1].coincidence, 0.4, 1e-12);
  EXPECT_NEAR(scan[2].coincidence, 0.2, 1e-12);
}

TEST(Properties, TablesSumToOne) {
  for (Variant v : {Variant::A, Variant::B}) {
    const SwappingExperiment exp(v);
    for (int k = 0; k < 100; ++k) {
      const auto t = exp.probabilities(testutil::random_angle(), testutil::random_angle());
      EXPECT_NEAR(t.total(), 1.0, 1e-9);
      for (const auto& [p, prob] : t.entries()) EXPECT_GE(prob, 0.0);
    }
  }
}

TEST(Properties, VariantADependsOnlyOnAngleDifference) {
  const SwappingExperiment exp(Variant::A);
  for (int k = 0; k < 25; ++k) {
    const double t1 = testutil::random_angle(), t2 = testutil::random_angle(), shift = testutil::random_angle();
    const auto x = exp.probabilities(t1, t2);
    const auto y = exp.probabilities(t1 + shift, t2 + shift);
    for (const auto& p : all_detection_patterns()) EXPECT_NEAR(x[p], y[p], 1e-12);
  }
}

TEST(Properties, VariantBQuarterTurnSwapsStationAOutputs) {
  const SwappingExperiment exp(Variant::B);
  for (int k = 0; k < 25; ++k) {
    const double t1 = testutil::random_angle(), t2 = testutil::random_angle();
    const auto x = exp.probabilities(t1, t2);
    const auto y = exp.probabilities(t1 + kPi / 2, t2);
    for (const auto& p : all_detection_patterns()) {
      const DetectionPattern swapped{{p.counts[1], p.counts[0], p.counts[2], p.counts[3]}};
      EXPECT_NEAR(x[p], y[swapped], 1e-12) << p.to_string();
    }
  }
}

TEST(Properties, HalfTurnInvariance) {
  for (Variant v : {Variant::A, Variant::B}) {
    const SwappingExperiment exp(v);
    const double t1 = testutil::random_angle(), t2 = testutil::random_angle();
    const auto x = exp.probabilities(t1, t2);
    const auto y = exp.probabilities(t1 + kPi, t2 - kPi);
    for (const auto& p : all_detection_patterns()) EXPECT_NEAR(x[p], y[p], 1e-12);
  }
}

TEST(Properties, MatchesDenseOracle) {
  for (Variant v : {Variant::A, Variant::B}) {
    const SwappingExperiment exp(v);
    for (int k = 0; k < 20; ++k) {
      const double t1 = testutil::random_angle(), t2 = testutil::random_angle();
      const auto sparse = exp.probabilities(t1, t2);
      const auto dense = oracle::oracle_probabilities(Configuration(v, t1, t2));
      for (const auto& p : all_detection_patterns()) EXPECT_NEAR(sparse[p], dense[p], 1e-10);
    }
  }
}
