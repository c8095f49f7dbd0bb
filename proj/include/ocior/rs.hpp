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

// (n, k) Reed-Solomon coding over GF(2^c) with interleaved lanes.
//
// A coded symbol is `lane_count` field elements. Each lane is an independent
// evaluation-form RS code: the k data symbols supply, per lane, the
// coefficients m_0..m_{k-1} of a polynomial P, and symbol i holds P(alpha_i)
// where alpha_i = g^(i-1) for the field generator g.
//
// Symbol width follows cb = ceil(max(l, k * log2(n + 1)) / k) bits where l is
// the configured maximum framed message size in bits; lanes round cb up to a
// multiple of c.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "ocior/common.hpp"
#include "ocior/gf.hpp"

namespace ocior {

using Element = GaloisField::Element;
using Lanes = std::vector<Element>;

/// A message larger than the configured capacity was offered to pack().
class MessageTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Fewer than k symbols were offered to the decoder.
class InsufficientSymbols : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CodeParams {
  std::size_t n = 0;
  std::size_t t = 0;
  std::size_t k = 0;
  unsigned c = 8;
  std::size_t message_bits = 0;  // l
  std::size_t symbol_bits = 0;   // cb
  std::size_t lane_count = 0;
  std::vector<Element> eval_points;  // alpha_1..alpha_n

  /// k used by both protocols for fault bound t.
  static std::size_t default_k(std::size_t t) { return t / 5 + 1; }

  static unsigned default_field_bits(std::size_t n) { return n <= 255 ? 8 : 16; }

  static std::size_t symbol_width(std::size_t n, std::size_t k, std::size_t message_bits) {
    const double floor_bits = static_cast<double>(k) * std::log2(static_cast<double>(n + 1));
    if (static_cast<double>(message_bits) >= floor_bits) return (message_bits + k - 1) / k;
    return static_cast<std::size_t>(std::ceil(floor_bits / static_cast<double>(k)));
  }

  static CodeParams make(std::size_t n, std::size_t t, std::size_t message_bits,
                         std::optional<std::size_t> k = std::nullopt,
                         std::optional<unsigned> c = std::nullopt) {
    CodeParams p;
    p.n = n;
    p.t = t;
    p.k = k.value_or(default_k(t));
    p.c = c.value_or(default_field_bits(n));
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (p.k == 0 || p.k > n) throw std::invalid_argument("k must be in [1, n]");
    const auto& field = GaloisField::get(p.c);
    if (n > field.size() - 1) throw std::invalid_argument("n exceeds 2^c - 1");
    p.message_bits = message_bits;
    p.symbol_bits = symbol_width(n, p.k, message_bits);
    p.lane_count = (p.symbol_bits + p.c - 1) / p.c;
    p.eval_points.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.eval_points[i] = field.exp(i);
    return p;
  }

  const GaloisField& field() const { return GaloisField::get(c); }

  Element alpha(NodeId i) const { return eval_points.at(i - 1); }

  /// Bits available to pack() across the k data symbols.
  std::size_t capacity_bits() const { return k * lane_count * c; }

  /// Bits of protocol content carried by one coded symbol.
  std::size_t wire_symbol_bits() const { return lane_count * c; }
};

struct CodedSymbol {
  std::uint16_t index = 0;  // node index in [1..n]
  Lanes lanes;

  friend bool operator==(const CodedSymbol&, const CodedSymbol&) = default;
  friend auto operator<=>(const CodedSymbol&, const CodedSymbol&) = default;
};

/// node index -> symbol, at most one per index.
using SymbolSet = std::map<NodeId, CodedSymbol>;

using DataSymbols = std::vector<Lanes>;  // k entries

// ---------------------------------------------------------------------------
// Wire layout: index (u16 BE), lane_count (u16 BE), lanes (ceil(c/8) bytes
// each, BE).

inline std::size_t lane_bytes(unsigned c) { return (c + 7) / 8; }

inline void serialize_symbol(Bytes& out, const CodedSymbol& s, unsigned c) {
  out.push_back(static_cast<std::uint8_t>(s.index >> 8));
  out.push_back(static_cast<std::uint8_t>(s.index & 0xFF));
  const auto lanes = static_cast<std::uint16_t>(s.lanes.size());
  out.push_back(static_cast<std::uint8_t>(lanes >> 8));
  out.push_back(static_cast<std::uint8_t>(lanes & 0xFF));
  for (Element e : s.lanes) {
    if (lane_bytes(c) == 2) out.push_back(static_cast<std::uint8_t>(e >> 8));
    out.push_back(static_cast<std::uint8_t>(e & 0xFF));
  }
}

inline Bytes serialize_symbol(const CodedSymbol& s, unsigned c) {
  Bytes out;
  serialize_symbol(out, s, c);
  return out;
}

/// Parses one symbol at `pos`; nullopt on truncation or out-of-field lanes.
inline std::optional<CodedSymbol> parse_symbol(ByteView in, std::size_t& pos, unsigned c) {
  if (in.size() - std::min(pos, in.size()) < 4) return std::nullopt;
  CodedSymbol s;
  s.index = static_cast<std::uint16_t>(in[pos] << 8 | in[pos + 1]);
  const std::size_t lanes = static_cast<std::size_t>(in[pos + 2] << 8 | in[pos + 3]);
  pos += 4;
  const std::size_t width = lane_bytes(c);
  if (in.size() - pos < lanes * width) return std::nullopt;
  s.lanes.resize(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    std::uint32_t v = 0;
    for (std::size_t b = 0; b < width; ++b) v = v << 8 | in[pos++];
    if (v >= (1U << c)) return std::nullopt;
    s.lanes[l] = static_cast<Element>(v);
  }
  return s;
}

inline std::optional<CodedSymbol> parse_symbol(ByteView in, unsigned c) {
  std::size_t pos = 0;
  auto s = parse_symbol(in, pos, c);
  if (!s || pos != in.size()) return std::nullopt;
  return s;
}

/// A symbol is usable by a code iff it has exactly lane_count lanes.
inline bool well_formed(const CodeParams& p, const CodedSymbol& s) {
  return s.lanes.size() == p.lane_count;
}

// ---------------------------------------------------------------------------
// Message framing.
//
// Frame = 0x00 for bottom, or varint(len + 1) || bytes. The frame is written
// MSB-first into the k * lane_count * c capacity and zero padded.

inline Bytes frame_value(const Value& w) {
  Bytes frame;
  if (w.is_bottom()) {
    frame.push_back(0);
    return frame;
  }
  put_varint(frame, w.bytes().size() + 1);
  frame.insert(frame.end(), w.bytes().begin(), w.bytes().end());
  return frame;
}

/// Framed size in bits of a payload of `len` bytes.
inline std::size_t framed_bits(std::size_t len) { return 8 * (varint_size(len + 1) + len); }

inline DataSymbols pack_message(const Value& w, const CodeParams& p) {
  const Bytes frame = frame_value(w);
  if (frame.size() * 8 > p.capacity_bits()) {
    throw MessageTooLarge("message of " + std::to_string(frame.size() * 8) +
                          " framed bits exceeds capacity " + std::to_string(p.capacity_bits()));
  }
  DataSymbols data(p.k, Lanes(p.lane_count, 0));
  std::size_t bit = 0;
  const std::size_t total = frame.size() * 8;
  for (std::size_t j = 0; j < p.k; ++j) {
    for (std::size_t l = 0; l < p.lane_count; ++l) {
      Element e = 0;
      for (unsigned b = 0; b < p.c; ++b, ++bit) {
        e = static_cast<Element>(e << 1);
        if (bit < total && (frame[bit / 8] >> (7 - bit % 8) & 1)) e |= 1;
      }
      data[j][l] = e;
    }
  }
  return data;
}

/// Inverse of pack_message. nullopt if the bits do not hold a valid frame
/// followed by zero padding.
inline std::optional<Value> unpack_message(const DataSymbols& data, const CodeParams& p) {
  if (data.size() != p.k) return std::nullopt;
  Bytes raw((p.capacity_bits() + 7) / 8, 0);
  std::size_t bit = 0;
  for (const auto& lanes : data) {
    if (lanes.size() != p.lane_count) return std::nullopt;
    for (Element e : lanes) {
      for (int b = static_cast<int>(p.c) - 1; b >= 0; --b, ++bit) {
        if (e >> b & 1) raw[bit / 8] |= static_cast<std::uint8_t>(1U << (7 - bit % 8));
      }
    }
  }
  std::size_t pos = 0;
  const auto header = get_varint(raw, pos);
  if (!header) return std::nullopt;
  Value out;
  std::size_t end = pos;
  if (*header != 0) {
    const std::uint64_t len = *header - 1;
    if (len > raw.size() - pos) return std::nullopt;
    end = pos + static_cast<std::size_t>(len);
    out = Value::of(Bytes(raw.begin() + static_cast<std::ptrdiff_t>(pos),
                          raw.begin() + static_cast<std::ptrdiff_t>(end)));
  }
  for (std::size_t i = end; i < raw.size(); ++i) {
    if (raw[i] != 0) return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Encoding.

inline CodedSymbol rs_encode_one(const CodeParams& p, const DataSymbols& data, NodeId i) {
  const auto& f = p.field();
  const Element x = p.alpha(i);
  CodedSymbol s;
  s.index = static_cast<std::uint16_t>(i);
  s.lanes.assign(p.lane_count, 0);
  for (std::size_t l = 0; l < p.lane_count; ++l) {
    Element acc = 0;
    for (std::size_t j = p.k; j-- > 0;) acc = f.add(f.mul(acc, x), data[j][l]);
    s.lanes[l] = acc;
  }
  return s;
}

inline std::vector<CodedSymbol> rs_encode(const CodeParams& p, const DataSymbols& data) {
  if (data.size() != p.k) throw std::invalid_argument("rs_encode: expected k data symbols");
  for (const auto& d : data) {
    if (d.size() != p.lane_count) throw std::invalid_argument("rs_encode: wrong lane count");
  }
  std::vector<CodedSymbol> out;
  out.reserve(p.n);
  for (NodeId i = 1; i <= p.n; ++i) out.push_back(rs_encode_one(p, data, i));
  return out;
}

inline std::vector<CodedSymbol> encode_value(const CodeParams& p, const Value& w) {
  return rs_encode(p, pack_message(w, p));
}

// ---------------------------------------------------------------------------
// Decoding.

namespace detail {

/// Solves A x = b over the field by Gauss-Jordan elimination. Free variables
/// are set to zero. nullopt if inconsistent.
inline std::optional<std::vector<Element>> solve_linear(const GaloisField& f,
                                                        std::vector<std::vector<Element>> a,
                                                        std::vector<Element> b,
                                                        std::size_t cols) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    const Element inv = f.inv(a[r][col]);
    for (std::size_t c = col; c < cols; ++c) a[r][c] = f.mul(a[r][c], inv);
    b[r] = f.mul(b[r], inv);
    for (std::size_t other = 0; other < rows; ++other) {
      if (other == r || a[other][col] == 0) continue;
      const Element factor = a[other][col];
      for (std::size_t c = col; c < cols; ++c) a[other][c] ^= f.mul(factor, a[r][c]);
      b[other] ^= f.mul(factor, b[r]);
    }
    pivot_col.push_back(col);
    ++r;
  }
  for (std::size_t rest = r; rest < rows; ++rest) {
    if (b[rest] != 0) return std::nullopt;
  }
  std::vector<Element> x(cols, 0);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
  return x;
}

/// Polynomial long division; returns quotient, sets `remainder_zero`.
inline std::vector<Element> poly_divide(const GaloisField& f, std::vector<Element> num,
                                        const std::vector<Element>& den, bool& remainder_zero) {
  std::size_t dd = den.size();
  while (dd > 0 && den[dd - 1] == 0) --dd;
  if (dd == 0) throw std::domain_error("division by zero polynomial");
  const Element lead_inv = f.inv(den[dd - 1]);
  std::vector<Element> quot(num.size() >= dd ? num.size() - dd + 1 : 1, 0);
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(num.size()) - 1;
       i >= static_cast<std::ptrdiff_t>(dd) - 1; --i) {
    const Element coef = f.mul(num[static_cast<std::size_t>(i)], lead_inv);
    if (coef == 0) continue;
    const std::size_t shift = static_cast<std::size_t>(i) - (dd - 1);
    quot[shift] = coef;
    for (std::size_t j = 0; j < dd; ++j) num[shift + j] ^= f.mul(coef, den[j]);
  }
  remainder_zero = std::all_of(num.begin(), num.end(), [](Element e) { return e == 0; });
  return quot;
}

/// Berlekamp-Welch on one lane. Returns the message polynomial (k coeffs)
/// and the error locator (monic, degree e), or nullopt.
struct BwResult {
  std::vector<Element> message;
  std::vector<Element> locator;
};

inline std::optional<BwResult> berlekamp_welch(const GaloisField& f,
                                               const std::vector<Element>& xs,
                                               const std::vector<Element>& ys, std::size_t k,
                                               std::size_t e) {
  const std::size_t rows = xs.size();
  const std::size_t qn = e + k;
  const std::size_t cols = qn + e;
  std::vector<std::vector<Element>> a(rows, std::vector<Element>(cols, 0));
  std::vector<Element> b(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    Element xp = 1;
    for (std::size_t j = 0; j < qn; ++j) {
      a[r][j] = xp;
      if (j < e) a[r][qn + j] = f.mul(ys[r], xp);
      xp = f.mul(xp, xs[r]);
    }
    b[r] = f.mul(ys[r], f.pow(xs[r], e));
  }
  auto sol = solve_linear(f, std::move(a), std::move(b), cols);
  if (!sol) return std::nullopt;
  std::vector<Element> q(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(qn));
  std::vector<Element> loc(sol->begin() + static_cast<std::ptrdiff_t>(qn), sol->end());
  loc.push_back(1);
  bool exact = false;
  auto msg = poly_divide(f, q, loc, exact);
  if (!exact) return std::nullopt;
  for (std::size_t d = k; d < msg.size(); ++d) {
    if (msg[d] != 0) return std::nullopt;
  }
  msg.resize(k, 0);
  return BwResult{std::move(msg), std::move(loc)};
}

}  // namespace detail

/// Decodes the k data symbols from a received set.
///
/// At most max_errors corrupted entries are corrected; the bound is clamped
/// to floor((n' - k) / 2) so the result is unique. Entries whose lane count
/// is wrong count as errors. Returns nullopt (decode failure) if no codeword
/// lies within max_errors of the received word.
inline std::optional<DataSymbols> rs_decode(const CodeParams& p, const SymbolSet& received,
                                            std::size_t max_errors) {
  const std::size_t m = received.size();
  if (m < p.k) {
    throw InsufficientSymbols("rs_decode: " + std::to_string(m) + " symbols, need " +
                              std::to_string(p.k));
  }
  max_errors = std::min(max_errors, (m - p.k) / 2);
  const auto& f = p.field();

  std::vector<Element> xs;
  std::vector<const CodedSymbol*> syms;
  xs.reserve(m);
  for (const auto& [idx, sym] : received) {
    if (idx < 1 || idx > p.n) throw std::invalid_argument("rs_decode: index out of range");
    xs.push_back(p.alpha(idx));
    syms.push_back(&sym);
  }
  auto lane_value = [&](std::size_t pos, std::size_t lane) -> Element {
    const auto& s = *syms[pos];
    return well_formed(p, s) ? s.lanes[lane] : Element{0};
  };

  // Interpolation basis over k positions not yet suspected to be corrupted.
  std::set<std::size_t> suspects;
  for (std::size_t pos = 0; pos < m; ++pos) {
    if (!well_formed(p, *syms[pos])) suspects.insert(pos);
  }
  std::vector<std::size_t> basis_pos;
  std::vector<std::vector<Element>> basis_polys;  // Lagrange basis coefficients
  auto rebuild_basis = [&] {
    basis_pos.clear();
    for (std::size_t pos = 0; pos < m && basis_pos.size() < p.k; ++pos) {
      if (!suspects.contains(pos)) basis_pos.push_back(pos);
    }
    for (std::size_t pos = 0; pos < m && basis_pos.size() < p.k; ++pos) {
      if (suspects.contains(pos)) basis_pos.push_back(pos);
    }
    std::vector<Element> bx;
    for (auto pos : basis_pos) bx.push_back(xs[pos]);
    basis_polys.assign(p.k, {});
    for (std::size_t j = 0; j < p.k; ++j) {
      std::vector<Element> unit(p.k, 0);
      unit[j] = 1;
      basis_polys[j] = f.interpolate(bx, unit);
    }
  };
  rebuild_basis();

  // Powers alpha^d for every received position, d < k.
  std::vector<std::vector<Element>> powers(m, std::vector<Element>(p.k, 1));
  for (std::size_t pos = 0; pos < m; ++pos) {
    for (std::size_t d = 1; d < p.k; ++d) powers[pos][d] = f.mul(powers[pos][d - 1], xs[pos]);
  }
  auto eval_at = [&](const std::vector<Element>& poly, std::size_t pos) {
    Element acc = 0;
    for (std::size_t d = 0; d < p.k; ++d) acc ^= f.mul(poly[d], powers[pos][d]);
    return acc;
  };

  DataSymbols data(p.k, Lanes(p.lane_count, 0));
  std::vector<Element> ys(m);
  std::vector<bool> bad(m, false);
  for (std::size_t lane = 0; lane < p.lane_count; ++lane) {
    std::vector<Element> poly(p.k, 0);
    for (std::size_t j = 0; j < p.k; ++j) {
      const Element v = lane_value(basis_pos[j], lane);
      if (v == 0) continue;
      for (std::size_t d = 0; d < p.k; ++d) poly[d] ^= f.mul(basis_polys[j][d], v);
    }
    std::size_t mismatches = 0;
    for (std::size_t pos = 0; pos < m; ++pos) {
      if (eval_at(poly, pos) != lane_value(pos, lane)) ++mismatches;
    }
    if (mismatches > max_errors) {
      for (std::size_t pos = 0; pos < m; ++pos) ys[pos] = lane_value(pos, lane);
      auto bw = detail::berlekamp_welch(f, xs, ys, p.k, max_errors);
      if (!bw) return std::nullopt;
      poly = std::move(bw->message);
      bool grew = false;
      for (std::size_t pos = 0; pos < m; ++pos) {
        if (f.eval(bw->locator, xs[pos]) == 0 && suspects.insert(pos).second) grew = true;
      }
      if (grew) rebuild_basis();
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
      if (eval_at(poly, pos) != lane_value(pos, lane)) bad[pos] = true;
    }
    for (std::size_t j = 0; j < p.k; ++j) data[j][lane] = poly[j];
  }
  for (std::size_t pos = 0; pos < m; ++pos) {
    if (!well_formed(p, *syms[pos])) bad[pos] = true;
  }
  const auto errors = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), true));
  if (errors > max_errors) return std::nullopt;
  return data;
}

// ---------------------------------------------------------------------------
// Online error correction.

/// Number of entries in `received` equal to the re-encoding of `data`.
inline std::size_t count_matches(const CodeParams& p, const DataSymbols& data,
                                 const SymbolSet& received) {
  std::size_t matches = 0;
  for (const auto& [idx, sym] : received) {
    if (!well_formed(p, sym)) continue;
    if (rs_encode_one(p, data, idx) == sym) ++matches;
  }
  return matches;
}

/// One OEC trial. nullopt means "not yet": too few symbols, no decodable
/// candidate, fewer than k + t re-encode matches, or (when `require_content`)
/// a bottom/empty candidate.
inline std::optional<Value> oec_try_decode(const CodeParams& p, const SymbolSet& received,
                                           bool require_content) {
  if (received.size() < p.k + p.t) return std::nullopt;
  const std::size_t e = (received.size() - p.k) / 2;
  auto data = rs_decode(p, received, e);
  if (!data) return std::nullopt;
  auto value = unpack_message(*data, p);
  if (!value) return std::nullopt;
  if (require_content && value->is_empty()) return std::nullopt;
  if (count_matches(p, *data, received) < p.k + p.t) return std::nullopt;
  return value;
}

/// Accumulates symbols as they arrive and retries decoding on each arrival.
class OnlineDecoder {
 public:
  OnlineDecoder(CodeParams params, bool require_content)
      : params_(std::move(params)), require_content_(require_content) {}

  /// Returns the decoded value once available; later calls return it again.
  std::optional<Value> add(NodeId from, CodedSymbol symbol) {
    if (result_) return result_;
    if (!received_.emplace(from, std::move(symbol)).second) return std::nullopt;
    if (received_.size() >= params_.k + params_.t) {
      ++trials_;
      result_ = oec_try_decode(params_, received_, require_content_);
    }
    return result_;
  }

  bool contains(NodeId from) const { return received_.contains(from); }
  std::size_t size() const { return received_.size(); }
  std::size_t trials() const { return trials_; }
  const std::optional<Value>& result() const { return result_; }
  const SymbolSet& received() const { return received_; }

 private:
  CodeParams params_;
  bool require_content_;
  SymbolSet received_;
  std::size_t trials_ = 0;
  std::optional<Value> result_;
};

}  // namespace ocior
