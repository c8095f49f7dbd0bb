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

#include <catch_amalgamated.hpp>

#include "ocior/gf.hpp"
#include "test_oracles.hpp"

using ocior::GaloisField;
using ocior::test::slow_gf_mul;

TEST_CASE("every default polynomial is primitive", "[gf]") {
  for (unsigned c = 2; c <= 16; ++c) {
    INFO("c = " << c);
    REQUIRE_NOTHROW(GaloisField(c, GaloisField::default_polynomial(c)));
  }
}

TEST_CASE("non-primitive polynomial is rejected", "[gf]") {
  // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
  REQUIRE_THROWS_AS(GaloisField(4, 0x1F), std::invalid_argument);
  REQUIRE_THROWS_AS(GaloisField(4, 0x7), std::invalid_argument);
}

TEST_CASE("characteristic-2 identities", "[gf]") {
  for (unsigned c : {3U, 4U, 8U}) {
    const auto& f = GaloisField::get(c);
    for (std::uint32_t x = 0; x < f.size(); ++x) {
      const auto e = static_cast<GaloisField::Element>(x);
      REQUIRE(f.add(e, e) == 0);
      REQUIRE(f.mul(1, e) == e);
      REQUIRE(f.mul(0, e) == 0);
    }
  }
}

TEST_CASE("table multiply agrees with shift-and-reduce", "[gf]") {
  SECTION("GF(2^8) spot value") {
    const auto& f = GaloisField::get(8);
    const auto expected = slow_gf_mul(0x02, 0x87, 8, 0x11D);
    REQUIRE(expected == 0x13);
    REQUIRE(f.mul(0x02, 0x87) == expected);
  }
  SECTION("exhaustive small fields") {
    for (unsigned c : {3U, 4U, 5U, 8U}) {
      const auto& f = GaloisField::get(c);
      for (std::uint32_t a = 0; a < f.size(); ++a) {
        for (std::uint32_t b = 0; b < f.size(); ++b) {
          REQUIRE(f.mul(static_cast<GaloisField::Element>(a), static_cast<GaloisField::Element>(b)) ==
                  slow_gf_mul(a, b, c, f.polynomial()));
        }
      }
    }
  }
  SECTION("sampled GF(2^16)") {
    const auto& f = GaloisField::get(16);
    std::uint32_t a = 1, b = 0xBEEF;
    for (int i = 0; i < 20000; ++i) {
      a = (a * 1103515245U + 12345U) & 0xFFFF;
      b = (b * 2654435761U + 7U) & 0xFFFF;
      REQUIRE(f.mul(static_cast<GaloisField::Element>(a), static_cast<GaloisField::Element>(b)) ==
              slow_gf_mul(a, b, 16, 0x1100B));
    }
  }
}

TEST_CASE("inverse and division", "[gf]") {
  const auto& f = GaloisField::get(8);
  for (std::uint32_t x = 1; x < 256; ++x) {
    const auto e = static_cast<GaloisField::Element>(x);
    REQUIRE(f.mul(e, f.inv(e)) == 1);
    REQUIRE(f.div(e, e) == 1);
  }
  REQUIRE_THROWS_AS(f.inv(0), std::domain_error);
}

TEST_CASE("interpolation passes through its points", "[gf]") {
  const auto& f = GaloisField::get(8);
  const std::vector<GaloisField::Element> xs{1, 2, 4, 8};
  const std::vector<GaloisField::Element> ys{7, 0, 200, 13};
  const auto poly = f.interpolate(xs, ys);
  REQUIRE(poly.size() == 4);
  for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(f.eval(poly, xs[i]) == ys[i]);
  REQUIRE_THROWS(f.interpolate({1, 1}, {2, 3}));
}
