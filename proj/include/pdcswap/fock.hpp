#pragma once

// Polynomials in commuting bosonic creation operators acting on the vacuum.
// A state |psi> is represented by the polynomial P with |psi> = P|0>.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdcswap/mode.hpp"

namespace pdcswap {

using Complex = std::complex<double>;

/// Coefficients with |c| below this are treated as exact zeros.
inline constexpr double kPruneEpsilon = 1e-12;

/// Product of creation operators, stored as (mode, power) pairs sorted by
/// ModeId with no zero powers. This is the unique normal form.
class Monomial {
 public:
  using Entry = std::pair<ModeId, unsigned>;

  Monomial() = default;

  Monomial(std::initializer_list<Entry> entries) {
    for (const auto& [m, n] : entries) multiply_in(m, n);
  }

  static Monomial of(ModeId m, unsigned power = 1) {
    Monomial out;
    out.multiply_in(m, power);
    return out;
  }

  unsigned count(ModeId m) const {
    auto it = find(m);
    return it != occ_.end() && it->first == m ? it->second : 0;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& e : occ_) d += e.second;
    return d;
  }

  bool is_vacuum() const { return occ_.empty(); }

  std::span<const Entry> occupations() const { return occ_; }

  /// Product of factorials of the powers: <0|m^dag m|0>.
  double factorial_weight() const {
    double w = 1.0;
    for (const auto& e : occ_)
      for (unsigned k = 2; k <= e.second; ++k) w *= k;
    return w;
  }

  /// Copy with `m` removed entirely.
  Monomial without(ModeId m) const {
    Monomial out = *this;
    auto it = out.find(m);
    if (it != out.occ_.end() && it->first == m) out.occ_.erase(it);
    return out;
  }

  friend Monomial operator*(const Monomial& x, const Monomial& y) {
    Monomial out = x;
    for (const auto& [m, n] : y.occ_) out.multiply_in(m, n);
    return out;
  }

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  std::string to_string() const {
    if (occ_.empty()) return "1";
    std::string s;
    for (const auto& [m, n] : occ_) {
      if (!s.empty()) s += ' ';
      s += pdcswap::to_string(m);
      if (n > 1) s += '^' + std::to_string(n);
    }
    return s;
  }

 private:
  std::vector<Entry>::iterator find(ModeId m) {
    return std::lower_bound(occ_.begin(), occ_.end(), m,
                            [](const Entry& e, ModeId k) { return e.first < k; });
  }
  std::vector<Entry>::const_iterator find(ModeId m) const {
    return std::lower_bound(occ_.begin(), occ_.end(), m,
                            [](const Entry& e, ModeId k) { return e.first < k; });
  }

  void multiply_in(ModeId m, unsigned n) {
    if (!is_valid(m)) throw std::invalid_argument("Monomial: invalid ModeId");
    if (n == 0) return;
    auto it = find(m);
    if (it != occ_.end() && it->first == m)
      it->second += n;
    else
      occ_.insert(it, {m, n});
  }

  std::vector<Entry> occ_;
};

/// Sparse sum of monomials with complex coefficients.
class CreationPolynomial {
 public:
  using TermMap = std::map<Monomial, Complex>;

  CreationPolynomial() = default;

  /// c * m
  explicit CreationPolynomial(const Monomial& m, Complex c = 1.0) { add_term(m, c); }

  static CreationPolynomial vacuum() { return CreationPolynomial(Monomial{}); }

  static CreationPolynomial creation(ModeId m) { return CreationPolynomial(Monomial::of(m)); }

  CreationPolynomial& add_term(const Monomial& m, Complex c) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kPruneEpsilon) terms_.erase(it);
    return *this;
  }

  Complex coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex{} : it->second;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.first.degree());
    return d;
  }

  CreationPolynomial& prune(double eps = kPruneEpsilon) {
    std::erase_if(terms_, [eps](const auto& t) { return std::abs(t.second) < eps; });
    return *this;
  }

  CreationPolynomial& operator+=(const CreationPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  CreationPolynomial& operator-=(const CreationPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  CreationPolynomial& operator*=(Complex s) {
    for (auto& t : terms_) t.second *= s;
    return prune();
  }

  friend CreationPolynomial operator+(CreationPolynomial p, const CreationPolynomial& q) { return p += q; }
  friend CreationPolynomial operator-(CreationPolynomial p, const CreationPolynomial& q) { return p -= q; }
  friend CreationPolynomial operator*(CreationPolynomial p, Complex s) { return p *= s; }
  friend CreationPolynomial operator*(Complex s, CreationPolynomial p) { return p *= s; }
  friend CreationPolynomial operator*(const CreationPolynomial& p, const CreationPolynomial& q);

  bool operator==(const CreationPolynomial&) const = default;

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") +
           std::to_string(c.imag()) + "i) " + m.to_string();
    }
    return s;
  }

 private:
  TermMap terms_;
};

inline CreationPolynomial multiply(const CreationPolynomial& p, const CreationPolynomial& q) {
  CreationPolynomial out;
  for (const auto& [mp, cp] : p.terms())
    for (const auto& [mq, cq] : q.terms()) out.add_term(mp * mq, cp * cq);
  return out.prune();
}

inline CreationPolynomial operator*(const CreationPolynomial& p, const CreationPolynomial& q) {
  return multiply(p, q);
}

inline CreationPolynomial power(const CreationPolynomial& p, unsigned n) {
  CreationPolynomial out = CreationPolynomial::vacuum();
  for (unsigned k = 0; k < n; ++k) out = multiply(out, p);
  return out;
}

/// <0| P^dag Q |0>. Distinct monomials are orthogonal; a monomial's self
/// overlap is the product of factorials of its powers.
inline Complex inner_product(const CreationPolynomial& p, const CreationPolynomial& q) {
  Complex acc{};
  const auto& small = p.size() <= q.size() ? p : q;
  const auto& large = p.size() <= q.size() ? q : p;
  for (const auto& [m, c] : small.terms()) {
    auto it = large.terms().find(m);
    if (it == large.terms().end()) continue;
    Complex cp = &small == &p ? c : it->second;
    Complex cq = &small == &p ? it->second : c;
    acc += std::conj(cp) * cq * m.factorial_weight();
  }
  return acc;
}

inline double norm_squared(const CreationPolynomial& p) {
  double acc = 0.0;
  for (const auto& [m, c] : p.terms()) acc += std::norm(c) * m.factorial_weight();
  return acc;
}

/// Keeps the terms whose monomial satisfies `pred`; coefficients untouched.
inline CreationPolynomial filter(const CreationPolynomial& p,
                                 const std::function<bool(const Monomial&)>& pred) {
  CreationPolynomial out;
  for (const auto& [m, c] : p.terms())
    if (pred(m)) out.add_term(m, c);
  return out;
}

/// Substitution rule x^dag -> (degree-1 polynomial of output modes) for every
/// mode in its domain. Models a passive optical element.
class LinearMap {
 public:
  using ImageMap = std::map<ModeId, CreationPolynomial>;

  LinearMap() = default;

  /// Throws std::invalid_argument if an image is not homogeneous of degree 1,
  /// or if `lossy` is false and the rows are not orthonormal.
  LinearMap(ImageMap images, bool lossy) : images_(std::move(images)), lossy_(lossy) {
    for (const auto& [in, img] : images_) {
      if (!is_valid(in)) throw std::invalid_argument("LinearMap: invalid input mode");
      if (img.empty()) throw std::invalid_argument("LinearMap: empty image for " + pdcswap::to_string(in));
      for (const auto& t : img.terms())
        if (t.first.degree() != 1)
          throw std::invalid_argument("LinearMap: image of " + pdcswap::to_string(in) +
                                      " is not of degree 1");
    }
    if (!lossy_ && !is_unitary_embedding())
      throw std::invalid_argument("LinearMap: rows are not orthonormal");
  }

  static LinearMap identity() { return LinearMap({}, false); }

  const ImageMap& images() const { return images_; }
  bool lossy() const { return lossy_; }

  bool in_domain(ModeId m) const { return images_.contains(m); }

  /// Image of `m`; modes outside the domain map to themselves.
  CreationPolynomial image(ModeId m) const {
    auto it = images_.find(m);
    return it == images_.end() ? CreationPolynomial::creation(m) : it->second;
  }

  /// Coefficient of output mode `out` in the image of input `in`.
  Complex coefficient(ModeId in, ModeId out) const { return image(in).coefficient(Monomial::of(out)); }

  /// Rows (inputs) orthonormal under the standard inner product on output
  /// coefficients.
  bool is_unitary_embedding(double tol = kPruneEpsilon) const {
    for (auto i = images_.begin(); i != images_.end(); ++i)
      for (auto j = i; j != images_.end(); ++j) {
        Complex dot = inner_product(i->second, j->second);
        Complex expected = i == j ? 1.0 : 0.0;
        if (std::abs(dot - expected) > tol) return false;
      }
    return true;
  }

 private:
  ImageMap images_;
  bool lossy_ = false;
};

/// Replaces every creation operator by its image under `map` and expands.
inline CreationPolynomial substitute(const CreationPolynomial& p, const LinearMap& map) {
  CreationPolynomial out;
  std::map<std::pair<ModeId, unsigned>, CreationPolynomial> powers;
  auto image_power = [&](ModeId m, unsigned n) -> const CreationPolynomial& {
    auto key = std::make_pair(m, n);
    auto it = powers.find(key);
    if (it == powers.end()) it = powers.emplace(key, power(map.image(m), n)).first;
    return it->second;
  };
  for (const auto& [mono, c] : p.terms()) {
    CreationPolynomial term(Monomial{}, c);
    for (const auto& [m, n] : mono.occupations()) term = multiply(term, image_power(m, n));
    out += term;
  }
  return out.prune();
}

/// Sequential composition: the map equivalent to applying `first`, then `second`.
/// Rows of `second` kept outside the domain of `first` may overlap its outputs,
/// in which case the result is flagged lossy.
inline LinearMap compose(const LinearMap& second, const LinearMap& first) {
  LinearMap::ImageMap images;
  for (const auto& [in, img] : first.images()) images.emplace(in, substitute(img, second));
  for (const auto& [in, img] : second.images())
    if (!first.in_domain(in)) images.emplace(in, img);
  LinearMap unchecked(images, true);
  const bool lossy = first.lossy() || second.lossy() || !unchecked.is_unitary_embedding();
  return LinearMap(std::move(images), lossy);
}

/// Union of two maps acting on disjoint domains.
inline LinearMap combine(const LinearMap& x, const LinearMap& y) {
  LinearMap::ImageMap images = x.images();
  for (const auto& [in, img] : y.images())
    if (!images.emplace(in, img).second)
      throw std::invalid_argument("combine: overlapping domains at " + pdcswap::to_string(in));
  return LinearMap(std::move(images), x.lossy() || y.lossy());
}

}  // namespace pdcswap
