/*
   Copyright 2026 The pbwtphi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include "pbwtphi/errors.hpp"
#include "pbwtphi/phi_index.hpp"
#include "test_helpers.hpp"

using namespace pbwtphi;

namespace {

std::vector<AnyPhiIndex> all_variants(const HaplotypePanel& p, Direction dir) {
    const auto l = haplotype_intervals(p, dir);
    const auto rs = decompose(p, l, 2);
    return {PhiIndexV1::build(p, rs), PhiIndexV2::build(p, rs), BaselinePhiIndex::build(p, l)};
}

std::uint64_t read_u64(const std::vector<std::uint8_t>& b, std::size_t off) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[off + k]) << (8 * k);
    return v;
}

} // namespace

TEST_CASE("header layout") {
    const auto idx = all_variants(test::fig1(), Direction::pred);
    const auto bytes = serialize(idx[1]);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "PBWTPHI1");
    CHECK(read_u64(bytes, 8) == 1);
    CHECK(read_u64(bytes, 16) == 2);
    CHECK(read_u64(bytes, 24) == 0);
    CHECK(read_u64(serialize(all_variants(test::fig1(), Direction::succ)[0]), 24) == 1);
    CHECK(read_u64(bytes, 32) == 5);
    CHECK(read_u64(bytes, 40) == 6);
    CHECK(read_u64(bytes, 48) == 2);
    CHECK(read_u64(bytes, 56) == 24);
    CHECK(bytes.size() == 64 + 8 * 5 + 16 * 24 + 4 * 24);
    CHECK(read_u64(serialize(idx[2]), 48) == 0);
}

TEST_CASE("round trip is byte exact") {
    for (Direction dir : {Direction::pred, Direction::succ}) {
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const auto p = seed == 0 ? test::fig1() : random_panel(1 + seed * 3, 1 + seed * 7 % 50, 2 + seed % 4, seed);
            for (const auto& idx : all_variants(p, dir)) {
                const auto bytes = serialize(idx);
                CHECK(bytes.size() == serialized_size(idx));
                const auto back = deserialize(bytes);
                CHECK(back == idx);
                CHECK(serialize(back) == bytes);
                CHECK(variant_of(back) == variant_of(idx));
                for (Site j = 1; j <= p.m(); ++j) CHECK(query(back, j, 1, 5) == query(idx, j, 1, 5));
            }
        }
    }
}

TEST_CASE("typed loader rejects another variant") {
    const auto idx = all_variants(test::fig1(), Direction::pred);
    const auto v1 = serialize(idx[0]);
    CHECK(deserialize_as<PhiIndexV1>(v1) == std::get<PhiIndexV1>(idx[0]));
    try {
        (void)deserialize_as<PhiIndexV2>(v1);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == 16);
    }
    CHECK_THROWS_AS((void)deserialize_as<BaselinePhiIndex>(serialize(idx[1])), FormatError);
}

TEST_CASE("header corruption") {
    const auto bytes = serialize(all_variants(test::fig1(), Direction::pred)[0]);
    auto expect_offset = [](std::vector<std::uint8_t> b, std::uint64_t off) {
        try {
            (void)deserialize(b);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == off);
        }
    };
    auto b = bytes;
    b[0] = 'X';
    expect_offset(b, 0);
    b = bytes;
    b[8] = 2;
    expect_offset(b, 8);
    b = bytes;
    b[16] = 9;
    expect_offset(b, 16);
    b = bytes;
    b[24] = 2;
    expect_offset(b, 24);
    b = bytes;
    b[48] = 3;
    expect_offset(b, 48);
    b = bytes;
    b.push_back(0);
    expect_offset(b, bytes.size());
    b = bytes;
    b[62] = 0xff; // alpha far beyond the remaining bytes; fails at T.e after X
    expect_offset(b, 64 + 8 * 5);
}

TEST_CASE("truncation at every offset") {
    for (const auto& idx : all_variants(random_panel(7, 9, 3, 5), Direction::pred)) {
        const auto bytes = serialize(idx);
        for (std::size_t n = 0; n < bytes.size(); ++n) {
            const std::span<const std::uint8_t> cut(bytes.data(), n);
            CHECK_THROWS_AS((void)deserialize(cut), FormatError);
        }
    }
}

TEST_CASE("byte flips never crash") {
    SplitMix64 rng(3);
    for (const auto& idx : all_variants(random_panel(6, 10, 2, 8), Direction::pred)) {
        const auto bytes = serialize(idx);
        for (int t = 0; t < 3000; ++t) {
            auto b = bytes;
            b[rng.below(b.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
            try {
                const auto back = deserialize(b);
                for (Site j = 1; j <= 10; ++j)
                    for (Hap i = 1; i <= 6; ++i) (void)query(back, j, i, 6);
            } catch (const FormatError&) {
            } catch (const ConsistencyError&) {
            }
        }
    }
}

TEST_CASE("index files") {
    const auto idx = all_variants(test::fig1(), Direction::pred)[1];
    const std::string path = "test_serialize_tmp.phidx";
    write_index_file(path, idx);
    CHECK(read_index_file(path) == idx);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_index_file("/nonexistent/dir/x.phidx"), IoError);
}
