#pragma once

// Brute-force reference model. States are dense maps from full occupation
// tuples to probability amplitudes (normalized Fock basis), and optical
// elements are explicit mode matrices applied basis state by basis state.
// Nothing here goes through CreationPolynomial; the only shared pieces are
// the mode enumeration and the result value types.
//
// Also holds the closed-form expressions for the detection probabilities,
// correlations and CHSH values, used as references by tests and `verify`.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "pdcswap/experiment.hpp"
#include "pdcswap/mode.hpp"

namespace pdcswap::oracle {

using Occupation = std::array<std::uint8_t, kModeCount>;
using Amplitude = std::complex<double>;

inline constexpr unsigned kMaxPhotons = 4;

struct DenseState {
  std::map<Occupation, Amplitude> amplitudes;

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [occ, amp] : amplitudes) s += std::norm(amp);
    return s;
  }
};

/// Row k lists (output mode index, coefficient) for input mode k. Rows for
/// modes the element does not touch are the identity.
using ModeMatrix = std::array<std::vector<std::pair<std::size_t, Amplitude>>, kModeCount>;

inline ModeMatrix identity_matrix() {
  ModeMatrix m;
  for (std::size_t k = 0; k < kModeCount; ++k) m[k] = {{k, 1.0}};
  return m;
}

inline std::size_t idx(ModeId m) { return mode_index(m); }

inline double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double binomial(unsigned n, unsigned k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

inline ModeMatrix beam_splitter_matrix() {
  using namespace modes;
  const double t = 1.0 / std::sqrt(2.0);
  const Amplitude r{0.0, t};
  ModeMatrix m = identity_matrix();
  m[idx(d_H)] = {{idx(d_out_H), t}, {idx(e_out_H), r}};
  m[idx(d_V)] = {{idx(d_out_V), t}, {idx(e_out_V), r}};
  m[idx(e_H)] = {{idx(e_out_H), t}, {idx(d_out_H), r}};
  m[idx(e_V)] = {{idx(e_out_V), t}, {idx(d_out_V), r}};
  return m;
}

inline ModeMatrix analyzer_matrix(double theta_a, double theta_b) {
  using namespace modes;
  ModeMatrix m = identity_matrix();
  auto set = [&](ModeId h, ModeId v, ModeId plus, ModeId minus, double th) {
    m[idx(v)] = {{idx(plus), std::cos(th)}, {idx(minus), std::sin(th)}};
    m[idx(h)] = {{idx(plus), -std::sin(th)}, {idx(minus), std::cos(th)}};
  };
  set(a_H, a_V, a_plus, a_minus, theta_a);
  set(b_H, b_V, b_plus, b_minus, theta_b);
  return m;
}

/// e~ passes V, d~ passes H; the rejected polarizations go to the loss modes.
inline ModeMatrix trigger_polarizer_matrix() {
  using namespace modes;
  ModeMatrix m = identity_matrix();
  m[idx(e_out_H)] = {{idx(loss_e), 1.0}};
  m[idx(d_out_V)] = {{idx(loss_d), 1.0}};
  return m;
}

/// Order-two PDC state by direct enumeration: sum over pair numbers (n, m)
/// with n + m = 2 of (X/sqrt2)^n (Y/sqrt2)^m |0>, expanding each power
/// binomially, X = a_H d_V + a_V d_H, Y = e_H b_V + e_V b_H. The overall
/// factor 1/2 is dropped, matching the sparse pipeline's convention.
inline DenseState pdc_state() {
  using namespace modes;
  DenseState psi;
  for (unsigned n = 0; n <= 2; ++n) {
    const unsigned m = 2 - n;
    for (unsigned k = 0; k <= n; ++k)      // k factors of a_H d_V, n-k of a_V d_H
      for (unsigned l = 0; l <= m; ++l) {  // l factors of e_H b_V, m-l of e_V b_H
        Occupation occ{};
        occ[idx(a_H)] += k;
        occ[idx(d_V)] += k;
        occ[idx(a_V)] += n - k;
        occ[idx(d_H)] += n - k;
        occ[idx(e_H)] += l;
        occ[idx(b_V)] += l;
        occ[idx(e_V)] += m - l;
        occ[idx(b_H)] += m - l;
        // Operator coefficient times sqrt(prod n!) converts to the amplitude
        // in the normalized basis.
        double amp = binomial(n, k) * binomial(m, l);
        for (auto c : occ) amp *= std::sqrt(factorial(c));
        psi.amplitudes[occ] += amp;
      }
  }
  return psi;
}

namespace detail {

inline Amplitude ipow(Amplitude z, unsigned n) {
  Amplitude r = 1.0;
  for (unsigned k = 0; k < n; ++k) r *= z;
  return r;
}

// Distributes `photons` photons of one input mode over the row's outputs,
// accumulating (output occupation, operator coefficient) pairs.
inline void distribute(const std::vector<std::pair<std::size_t, Amplitude>>& row, std::size_t pos,
                       unsigned photons, Occupation occ, Amplitude coef, double multinom,
                       std::vector<std::pair<Occupation, Amplitude>>& out) {
  if (pos + 1 == row.size()) {
    occ[row[pos].first] += photons;
    out.emplace_back(occ, coef * ipow(row[pos].second, photons) * multinom / factorial(photons));
    return;
  }
  for (unsigned j = 0; j <= photons; ++j) {
    Occupation next = occ;
    next[row[pos].first] += j;
    distribute(row, pos + 1, photons - j, next, coef * ipow(row[pos].second, j),
               multinom / factorial(j), out);
  }
}

}  // namespace detail

/// Applies a mode matrix to every basis state. For input occupation n the
/// image is prod_k (sum_j U_kj y_j^dag)^{n_k} / sqrt(n_k!) |0>, expanded
/// multinomially; an output operator monomial with powers m has amplitude
/// sqrt(prod m!) in the normalized basis.
inline DenseState apply_matrix(const DenseState& in, const ModeMatrix& u) {
  DenseState out;
  for (const auto& [occ, amp] : in.amplitudes) {
    std::vector<std::pair<Occupation, Amplitude>> partial{{Occupation{}, amp}};
    for (std::size_t k = 0; k < kModeCount; ++k) {
      if (occ[k] == 0) continue;
      std::vector<std::pair<Occupation, Amplitude>> next;
      for (const auto& [o, c] : partial)
        detail::distribute(u[k], 0, occ[k], o, c / std::sqrt(factorial(occ[k])), factorial(occ[k]),
                           next);
      partial = std::move(next);
    }
    for (const auto& [o, c] : partial) {
      unsigned total = 0;
      double w = 1.0;
      for (auto n : o) {
        total += n;
        w *= factorial(n);
      }
      if (total > kMaxPhotons) continue;
      out.amplitudes[o] += c * std::sqrt(w);
    }
  }
  std::erase_if(out.amplitudes, [](const auto& e) { return std::abs(e.second) < 1e-14; });
  return out;
}

template <typename Pred>
DenseState select(const DenseState& in, Pred pred) {
  DenseState out;
  for (const auto& [occ, amp] : in.amplitudes)
    if (pred(occ)) out.amplitudes.emplace(occ, amp);
  return out;
}

/// Trigger-conditioned state before the analyzers.
inline DenseState dense_triggered_state(Variant v) {
  using namespace modes;
  DenseState s = apply_matrix(pdc_state(), beam_splitter_matrix());
  if (v == Variant::A)
    return select(s, [](const Occupation& o) {
      return o[idx(e_out_H)] + o[idx(e_out_V)] >= 1 && o[idx(d_out_H)] + o[idx(d_out_V)] >= 1;
    });
  s = apply_matrix(s, trigger_polarizer_matrix());
  return select(s, [](const Occupation& o) {
    return o[idx(e_out_V)] == 1 && o[idx(d_out_H)] == 1 && o[idx(loss_e)] == 0 && o[idx(loss_d)] == 0;
  });
}

inline ProbabilityTable oracle_probabilities(const Configuration& config) {
  using namespace modes;
  const DenseState trig = dense_triggered_state(config.variant());
  const double total = trig.norm_squared();
  const DenseState out = apply_matrix(trig, analyzer_matrix(config.theta1(), config.theta2()));
  std::map<DetectionPattern, double> entries;
  for (const auto& pat : all_detection_patterns()) entries.emplace(pat, 0.0);
  for (const auto& [o, amp] : out.amplitudes) {
    const DetectionPattern pat{{o[idx(a_plus)], o[idx(a_minus)], o[idx(b_plus)], o[idx(b_minus)]}};
    entries[pat] += std::norm(amp) / total;
  }
  return ProbabilityTable(std::move(entries), trigger_condition(config.variant()));
}

// ---------------------------------------------------------------------------
// Closed forms

inline double sq(double x) { return x * x; }

inline double closed_form_probability(Variant v, const DetectionPattern& p, double t1, double t2) {
  const double d = t1 - t2;
  const auto& c = p.counts;
  const bool a_only = c[2] + c[3] == 0;
  const bool b_only = c[0] + c[1] == 0;
  const bool same = (c[0] == 1 && c[2] == 1) || (c[1] == 1 && c[3] == 1);
  if (v == Variant::A) {
    if (a_only || b_only) return 2.0 / 13.0;
    return same ? sq(std::sin(d)) / 26.0 : sq(std::cos(d)) / 26.0;
  }
  if (a_only) return c[0] == 1 ? 0.4 * sq(std::cos(2 * t1)) : 0.2 * sq(std::sin(2 * t1));
  if (b_only) return c[2] == 1 ? 0.4 * sq(std::cos(2 * t2)) : 0.2 * sq(std::sin(2 * t2));
  return same ? sq(std::sin(d)) / 10.0 : sq(std::cos(d)) / 10.0;
}

inline double closed_form_correlation(Variant v, double t1, double t2, double alpha) {
  if (v == Variant::A) return -std::cos(2 * t1 - 2 * t2) / 13.0 + 4.0 / 13.0 * (1 + 2 * alpha);
  return -0.2 * std::cos(2 * t1 - 2 * t2) +
         0.4 * (1 - alpha) * (sq(std::cos(2 * t1)) + sq(std::cos(2 * t2))) + 0.8 * alpha;
}

/// CHSH combination of the closed-form correlations; for variant B the
/// single-angle terms in theta1' and theta2' cancel.
inline double closed_form_chsh(Variant v, double t1, double t1p, double t2, double t2p, double alpha) {
  const double bell = std::cos(2 * (t1 - t2)) + std::cos(2 * (t1 - t2p)) + std::cos(2 * (t1p - t2)) -
                      std::cos(2 * (t1p - t2p));
  if (v == Variant::A) return -bell / 13.0 + 8.0 / 13.0 * (1 + 2 * alpha);
  return -0.2 * bell + 0.8 * (1 - alpha) * (sq(std::cos(2 * t1)) + sq(std::cos(2 * t2))) + 1.6 * alpha;
}

/// Analytic maximum over the angles for variant A: the cosine combination
/// reaches 2 sqrt2.
inline double closed_form_chsh_max_a(double alpha) {
  return 2.0 * std::numbers::sqrt2 / 13.0 + 8.0 / 13.0 * (1 + 2 * alpha);
}

}  // namespace pdcswap::oracle
