#pragma once

// Optical elements of the swapping set-up as LinearMaps.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcswap/fock.hpp"

namespace pdcswap {

enum class Station { a, b };
enum class Trigger { e, d };

namespace detail {
inline CreationPolynomial lin(std::initializer_list<std::pair<ModeId, Complex>> terms) {
  CreationPolynomial p;
  for (const auto& [m, c] : terms) p.add_term(Monomial::of(m), c);
  return p;
}
}  // namespace detail

/// 50/50 non-polarizing splitter on the idlers, transmission real and
/// reflection i:
///   d_x -> (d~_x + i e~_x)/sqrt2,  e_x -> (e~_x + i d~_x)/sqrt2,  x in {H, V}.
inline LinearMap beam_splitter_map() {
  using namespace modes;
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex i{0.0, 1.0};
  LinearMap::ImageMap img;
  img.emplace(d_H, detail::lin({{d_out_H, r}, {e_out_H, i * r}}));
  img.emplace(d_V, detail::lin({{d_out_V, r}, {e_out_V, i * r}}));
  img.emplace(e_H, detail::lin({{e_out_H, r}, {d_out_H, i * r}}));
  img.emplace(e_V, detail::lin({{e_out_V, r}, {d_out_V, i * r}}));
  return LinearMap(std::move(img), false);
}

/// Polarizing analyzer at station a or b, oriented at `theta` (radians):
///   x_V -> cos(theta) x_+ + sin(theta) x_-
///   x_H -> -sin(theta) x_+ + cos(theta) x_-
inline LinearMap analyzer_map(Station station, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("analyzer_map: non-finite angle");
  const bool is_a = station == Station::a;
  const ModeId in_H = is_a ? modes::a_H : modes::b_H;
  const ModeId in_V = is_a ? modes::a_V : modes::b_V;
  const ModeId plus = is_a ? modes::a_plus : modes::b_plus;
  const ModeId minus = is_a ? modes::a_minus : modes::b_minus;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  LinearMap::ImageMap img;
  img.emplace(in_V, detail::lin({{plus, c}, {minus, s}}));
  img.emplace(in_H, detail::lin({{plus, -s}, {minus, c}}));
  return LinearMap(std::move(img), false);
}

/// Polarizer in front of a trigger detector: the passing polarization is left
/// in place, the other one is routed to the trigger's loss mode. The map is a
/// unitary relabeling; it is flagged lossy because the loss mode is discarded
/// by post-selection.
inline LinearMap polarizer_filter_map(Trigger trigger, Polarization pass) {
  if (pass == Polarization::none) throw std::invalid_argument("polarizer_filter_map: pass must be H or V");
  const Channel ch = trigger == Trigger::e ? Channel::e_out : Channel::d_out;
  const ModeId loss = trigger == Trigger::e ? modes::loss_e : modes::loss_d;
  const ModeId kept{ch, pass};
  const ModeId blocked{ch, pass == Polarization::H ? Polarization::V : Polarization::H};
  LinearMap::ImageMap img;
  img.emplace(kept, CreationPolynomial::creation(kept));
  img.emplace(blocked, CreationPolynomial::creation(loss));
  return LinearMap(std::move(img), true);
}

}  // namespace pdcswap
