#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pdcswap {

/// Spatial channels of the swapping set-up. `d_out`/`e_out` are the beam
/// splitter outputs watched by the trigger detectors; `loss_*` collect the
/// photons rejected by the trigger-side polarizers.
enum class Channel : std::uint8_t {
  a, b, d, e, d_out, e_out, a_plus, a_minus, b_plus, b_minus, loss_e, loss_d
};

enum class Polarization : std::uint8_t { H, V, none };

/// One optical mode. Polarized channels carry H or V; station outputs and
/// loss modes carry `Polarization::none`.
struct ModeId {
  Channel channel;
  Polarization pol;

  constexpr auto operator<=>(const ModeId&) const = default;
};

constexpr bool is_polarized(Channel c) {
  switch (c) {
    case Channel::a: case Channel::b: case Channel::d: case Channel::e:
    case Channel::d_out: case Channel::e_out:
      return true;
    default:
      return false;
  }
}

constexpr bool is_valid(ModeId m) {
  return is_polarized(m.channel) ? m.pol != Polarization::none
                                 : m.pol == Polarization::none;
}

inline constexpr std::size_t kModeCount = 18;

namespace modes {
inline constexpr ModeId a_H{Channel::a, Polarization::H};
inline constexpr ModeId a_V{Channel::a, Polarization::V};
inline constexpr ModeId b_H{Channel::b, Polarization::H};
inline constexpr ModeId b_V{Channel::b, Polarization::V};
inline constexpr ModeId d_H{Channel::d, Polarization::H};
inline constexpr ModeId d_V{Channel::d, Polarization::V};
inline constexpr ModeId e_H{Channel::e, Polarization::H};
inline constexpr ModeId e_V{Channel::e, Polarization::V};
inline constexpr ModeId d_out_H{Channel::d_out, Polarization::H};
inline constexpr ModeId d_out_V{Channel::d_out, Polarization::V};
inline constexpr ModeId e_out_H{Channel::e_out, Polarization::H};
inline constexpr ModeId e_out_V{Channel::e_out, Polarization::V};
inline constexpr ModeId a_plus{Channel::a_plus, Polarization::none};
inline constexpr ModeId a_minus{Channel::a_minus, Polarization::none};
inline constexpr ModeId b_plus{Channel::b_plus, Polarization::none};
inline constexpr ModeId b_minus{Channel::b_minus, Polarization::none};
inline constexpr ModeId loss_e{Channel::loss_e, Polarization::none};
inline constexpr ModeId loss_d{Channel::loss_d, Polarization::none};
}  // namespace modes

/// The full mode universe in canonical order (the order used by ModeId's
/// comparison operator).
inline constexpr std::array<ModeId, kModeCount> kAllModes = {
    modes::a_H,     modes::a_V,     modes::b_H,     modes::b_V,
    modes::d_H,     modes::d_V,     modes::e_H,     modes::e_V,
    modes::d_out_H, modes::d_out_V, modes::e_out_H, modes::e_out_V,
    modes::a_plus,  modes::a_minus, modes::b_plus,  modes::b_minus,
    modes::loss_e,  modes::loss_d};

constexpr std::size_t mode_index(ModeId m) {
  for (std::size_t i = 0; i < kAllModes.size(); ++i)
    if (kAllModes[i] == m) return i;
  throw std::invalid_argument("mode_index: invalid ModeId");
}

inline std::string to_string(ModeId m) {
  static constexpr std::array<const char*, 12> names = {
      "a", "b", "d", "e", "d~", "e~", "a+", "a-", "b+", "b-", "loss_e", "loss_d"};
  std::string s = names[static_cast<std::size_t>(m.channel)];
  if (m.pol == Polarization::H) s += "_H";
  if (m.pol == Polarization::V) s += "_V";
  return s;
}

}  // namespace pdcswap
