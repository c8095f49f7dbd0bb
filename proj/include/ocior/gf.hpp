// Copyright 2026 The ocior Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocior {

/// Binary extension field GF(2^c), 2 <= c <= 16, table driven.
///
/// Elements are stored in a uint16_t; addition is XOR. Multiplication uses
/// log/antilog tables built from a primitive reduction polynomial, so the
/// polynomial root x (= 2) generates the multiplicative group. The default
/// polynomials are:
///
///   c = 3   x^3 + x + 1
///   c = 4   x^4 + x + 1
///   c = 8   x^8 + x^4 + x^3 + x^2 + 1            (0x11D)
///   c = 16  x^16 + x^12 + x^3 + x + 1            (0x1100B)
///
/// and the usual primitive trinomials/pentanomials for the other widths.
class GaloisField {
 public:
  using Element = std::uint16_t;

  GaloisField(unsigned bits, std::uint32_t poly) : bits_(bits), poly_(poly) {
    if (bits < 2 || bits > 16) throw std::invalid_argument("field width must be in [2, 16]");
    if ((poly >> bits) != 1U) throw std::invalid_argument("reduction polynomial degree mismatch");
    const std::uint32_t size = 1U << bits;
    exp_.assign(2 * size, 0);
    log_.assign(size, 0);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i + 1 < size; ++i) {
      if (i > 0 && x == 1) throw std::invalid_argument("reduction polynomial is not primitive");
      exp_[i] = static_cast<Element>(x);
      log_[x] = static_cast<Element>(i);
      x <<= 1;
      if (x & size) x ^= poly;
    }
    if (x != 1) throw std::invalid_argument("reduction polynomial is not primitive");
    for (std::uint32_t i = size - 1; i < 2 * size; ++i) exp_[i] = exp_[i - (size - 1)];
  }

  /// Shared instance with the default polynomial for `bits`.
  static const GaloisField& get(unsigned bits) {
    static std::array<std::unique_ptr<GaloisField>, 17> cache;
    static std::mutex mu;
    if (bits < 2 || bits > 16) throw std::invalid_argument("field width must be in [2, 16]");
    std::lock_guard lock(mu);
    auto& slot = cache[bits];
    if (!slot) slot = std::make_unique<GaloisField>(bits, default_polynomial(bits));
    return *slot;
  }

  static std::uint32_t default_polynomial(unsigned bits) {
    static constexpr std::array<std::uint32_t, 17> kPolys = {
        0,     0,     0x7,    0xB,    0x13,   0x25,   0x43,   0x89,   0x11D,
        0x211, 0x409, 0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};
    return kPolys.at(bits);
  }

  unsigned bits() const { return bits_; }
  std::uint32_t polynomial() const { return poly_; }
  std::uint32_t size() const { return 1U << bits_; }
  Element max_element() const { return static_cast<Element>(size() - 1); }

  bool contains(std::uint32_t v) const { return v < size(); }

  static Element add(Element a, Element b) { return a ^ b; }
  static Element sub(Element a, Element b) { return a ^ b; }

  Element mul(Element a, Element b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  Element inv(Element a) const {
    if (a == 0) throw std::domain_error("inverse of zero in GF(2^" + std::to_string(bits_) + ")");
    return exp_[(size() - 1) - log_[a]];
  }

  Element div(Element a, Element b) const { return mul(a, inv(b)); }

  Element pow(Element a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[(static_cast<std::uint64_t>(log_[a]) * e) % (size() - 1)];
  }

  /// g^e for the generator g = x.
  Element exp(std::uint64_t e) const { return exp_[e % (size() - 1)]; }

  Element log(Element a) const {
    if (a == 0) throw std::domain_error("log of zero");
    return log_[a];
  }

  /// Horner evaluation; coefficients in ascending degree.
  Element eval(const std::vector<Element>& coeffs, Element x) const {
    Element acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = add(mul(acc, x), *it);
    return acc;
  }

  /// Coefficients (ascending) of the unique polynomial of degree < xs.size()
  /// through the given points.
  std::vector<Element> interpolate(const std::vector<Element>& xs,
                                   const std::vector<Element>& ys) const {
    const std::size_t m = xs.size();
    if (ys.size() != m) throw std::invalid_argument("interpolate: size mismatch");
    std::vector<Element> result(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      // basis_j(x) = prod_{l != j} (x - x_l) / (x_j - x_l)
      std::vector<Element> basis{1};
      Element denom = 1;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == j) continue;
        if (xs[l] == xs[j]) throw std::invalid_argument("interpolate: repeated abscissa");
        std::vector<Element> next(basis.size() + 1, 0);
        for (std::size_t d = 0; d < basis.size(); ++d) {
          next[d + 1] = add(next[d + 1], basis[d]);
          next[d] = add(next[d], mul(basis[d], xs[l]));
        }
        basis = std::move(next);
        denom = mul(denom, sub(xs[j], xs[l]));
      }
      const Element scale = mul(ys[j], inv(denom));
      for (std::size_t d = 0; d < m; ++d) result[d] = add(result[d], mul(basis[d], scale));
    }
    return result;
  }

 private:
  unsigned bits_;
  std::uint32_t poly_;
  std::vector<Element> exp_;
  std::vector<Element> log_;
};

}  // namespace ocior
