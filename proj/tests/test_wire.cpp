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

#include "ocior/wire.hpp"

using namespace ocior;

TEST_CASE("tag names round-trip", "[wire]") {
  for (const auto& [tag, name] : kTagNames) {
    CHECK(tag_name(tag) == name);
    REQUIRE(tag_from_name(name) == tag);
  }
  CHECK_FALSE(tag_from_name("SYMBOLS").has_value());
  CHECK_FALSE(tag_from_name("").has_value());
}

TEST_CASE("bit and proposal codecs reject malformed payloads", "[wire]") {
  CHECK(decode_bit(encode_bit(0)) == 0);
  CHECK(decode_bit(encode_bit(1)) == 1);
  CHECK(encode_bit(7) == Bytes{1});
  CHECK_FALSE(decode_bit(Bytes{}).has_value());
  CHECK_FALSE(decode_bit(Bytes{2}).has_value());
  CHECK_FALSE(decode_bit(Bytes{0, 0}).has_value());

  CHECK(decode_proposal(Bytes{kNoProposal}) == kNoProposal);
  CHECK(decode_proposal(Bytes{1}) == 1);
  CHECK_FALSE(decode_proposal(Bytes{3}).has_value());
  CHECK_FALSE(decode_proposal(Bytes{}).has_value());
}

TEST_CASE("symbol and pair codecs", "[wire]") {
  const auto p = CodeParams::make(7, 2, 64);
  const auto cw = encode_value(p, Value::of(Bytes{1, 2, 3}));

  SECTION("single symbol round-trips") {
    const auto bytes = encode_symbol(cw[3], p.c);
    REQUIRE(decode_symbol(p, bytes) == cw[3]);
  }
  SECTION("pair round-trips and keeps order") {
    const auto bytes = encode_pair(cw[1], cw[4], p.c);
    auto pair = decode_pair(p, bytes);
    REQUIRE(pair.has_value());
    CHECK(pair->first == cw[1]);
    CHECK(pair->second == cw[4]);
  }
  SECTION("truncation and trailing bytes are malformed") {
    auto bytes = encode_pair(cw[1], cw[4], p.c);
    auto longer = bytes;
    longer.push_back(0);
    CHECK_FALSE(decode_pair(p, longer).has_value());
    bytes.pop_back();
    CHECK_FALSE(decode_pair(p, bytes).has_value());
    CHECK_FALSE(decode_symbol(p, Bytes{0, 1}).has_value());
  }
  SECTION("wrong lane count is malformed") {
    CodedSymbol s{1, Lanes(p.lane_count + 1, 0)};
    CHECK_FALSE(decode_symbol(p, encode_symbol(s, p.c)).has_value());
  }
}

TEST_CASE("full-value codec", "[wire]") {
  const Value w = Value::of(Bytes{9, 8, 7});
  CHECK(decode_full(frame_value(w)) == w);
  CHECK(decode_full(frame_value(Value::bottom())) == Value::bottom());
  CHECK_FALSE(decode_full(Bytes{}).has_value());
  CHECK_FALSE(decode_full(Bytes{4, 1, 2}).has_value());  // claims 3 bytes, has 2
}

TEST_CASE("content bits follow the accounting rules", "[wire]") {
  const auto p = CodeParams::make(4, 1, 256);
  const std::uint64_t sym = p.lane_count * p.c;
  CHECK(content_bits(p, Message{Tag::kSymbol, 0, {}}) == 2 * sym);
  for (Tag t : {Tag::kCorrectSymbolCool, Tag::kLeader, Tag::kInitial, Tag::kCorrectSymbol}) {
    CHECK(content_bits(p, Message{t, 0, {}}) == sym);
  }
  for (Tag t : {Tag::kSiPh1, Tag::kSiPh2, Tag::kBbaV1, Tag::kBbaKing, Tag::kSi1, Tag::kSi2, Tag::kReady}) {
    CHECK(content_bits(p, Message{t, 0, encode_bit(1)}) == 1);
  }
  CHECK(content_bits(p, Message{Tag::kBbaV2, 1, Bytes{kNoProposal}}) == 2);
  CHECK(content_bits(p, Message{Tag::kLeaderFull, 0, Bytes(10, 0)}) == 80);
}

TEST_CASE("to_all addresses every node once, self included", "[wire]") {
  auto out = to_all(5, Message{Tag::kReady, 0, encode_bit(1)});
  REQUIRE(out.size() == 5);
  for (NodeId j = 1; j <= 5; ++j) CHECK(out[j - 1].to == j);
}
