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

#include <map>

#include "pbwtphi/errors.hpp"
#include "pbwtphi/phi_index.hpp"
#include "test_helpers.hpp"

using namespace pbwtphi;

namespace {

struct Built {
    HaplotypePanel panel;
    IntervalListSet intervals;
    RefinedSegmentTable rs;
    PhiIndexV1 v1;
    PhiIndexV2 v2;
    BaselinePhiIndex base;
};

Built build_all(const HaplotypePanel& p, Direction dir) {
    Built b{p, haplotype_intervals(p, dir), {}, {}, {}, {}};
    b.rs = decompose(p, b.intervals, 2);
    b.v1 = PhiIndexV1::build(p, b.rs);
    b.v2 = PhiIndexV2::build(p, b.rs);
    b.base = BaselinePhiIndex::build(p, b.intervals);
    return b;
}

std::vector<std::vector<Segment>> segs_from(const std::vector<std::vector<std::pair<Site, Site>>>& ends) {
    std::vector<std::vector<Segment>> out;
    for (const auto& l : ends) {
        out.emplace_back();
        for (auto [b, e] : l) out.back().push_back({b, e, 0, false});
    }
    return out;
}

} // namespace

TEST_CASE("fixture triples") {
    const auto b = build_all(test::fig1(), Direction::pred);
    CHECK(b.v1.alpha() == 24);
    CHECK(b.v1.x() == std::vector<std::uint64_t>{0, 5, 10, 15, 19});
    // RS[5][4] = [4,5] has parent color 1 and parent segment RS[1][5] = [5,6].
    const auto g = b.v1.x()[4] + 3;
    CHECK(b.v1.t_e()[g] == 5);
    CHECK(b.v1.t_c()[g] == 1);
    CHECK(b.v1.t_iota()[g] == 5);
    CHECK(b.rs.of(1)[4].b == 5);
    CHECK(b.rs.of(1)[4].e == 6);
    CHECK(b.v1.uses_global_locator());
    const auto p = b.v1.p_values();
    CHECK(p[g] == 6 * 4 + 5);
}

TEST_CASE("fixture I array") {
    const auto b = build_all(test::fig1(), Direction::pred);
    CHECK(b.v2.i_array() == std::vector<std::uint32_t>{1, 3, 5, 1, 2, 3, 4, 5, 1, 2, 4, 5, 1, 2, 3, 2, 3, 4, 5,
                                                        1, 2, 3, 4, 5});
}

TEST_CASE("I array from the figure's segment lists") {
    const auto segs = segs_from({{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 6}},
                                 {{1, 1}, {2, 2}, {3, 4}, {5, 5}, {6, 6}},
                                 {{1, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}},
                                 {{1, 3}, {4, 5}, {6, 6}},
                                 {{1, 1}, {2, 2}, {3, 3}, {4, 5}, {6, 6}}});
    CHECK(build_i_array(segs, 6) ==
          std::vector<std::uint32_t>{1, 2, 5, 1, 2, 3, 5, 1, 3, 4, 5, 1, 2, 3, 2, 3, 4, 5, 1, 2, 3, 4, 5});
}

TEST_CASE("V2 parent lookup for [4,5] of S_5") {
    const auto b = build_all(test::fig1(), Direction::pred);
    std::vector<QueryStep> trace;
    CHECK(b.v2.query(5, 5, 1, &trace) == std::vector<Hap>{1});
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].rho == 4);    // four 1s precede the fourth 5
    CHECK(trace[0].parent == 5); // the following occurrence
    CHECK(trace[0].segment == 5);
    trace.clear();
    CHECK(b.v2.query(4, 5, 1, &trace) == std::vector<Hap>{1});
    CHECK(trace[0].parent == 5);
    CHECK(trace[0].segment == 4);
}

TEST_CASE("exhaustive fixture sweep") {
    for (Direction dir : {Direction::pred, Direction::succ}) {
        const auto b = build_all(test::fig1(), dir);
        const OracleIndex oracle(b.panel);
        for (Site j = 1; j <= 6; ++j)
            for (Hap i = 1; i <= 5; ++i)
                for (std::uint64_t k = 0; k <= 6; ++k) {
                    const auto want = oracle_phi_iter(oracle, j, i, k, dir);
                    CHECK(b.v1.query(j, i, k) == want);
                    CHECK(b.v2.query(j, i, k) == want);
                    CHECK(b.base.query(j, i, k) == want);
                }
        CHECK(b.v1.query(4, 3, 0).empty());
    }
    const auto b = build_all(test::fig1(), Direction::pred);
    CHECK(b.v1.query(4, 3, 1) == std::vector<Hap>{2});
    CHECK(b.v2.query(4, 5, 4) == std::vector<Hap>{1, 4, 3, 2});
    CHECK(build_all(test::fig1(), Direction::succ).v1.query(4, 3, 1) == std::vector<Hap>{4});
}

TEST_CASE("query range errors") {
    const auto b = build_all(test::fig1(), Direction::pred);
    CHECK_THROWS_AS(b.v1.query(0, 1, 1), ArgumentError);
    CHECK_THROWS_AS(b.v2.query(7, 1, 1), ArgumentError);
    CHECK_THROWS_AS(b.base.query(1, 6, 1), ArgumentError);
    CHECK_THROWS_AS(b.v1.query(1, 0, 1), ArgumentError);
}

TEST_CASE("build requires d = 2") {
    const auto p = test::fig1();
    const auto rs = decompose(p, 3);
    CHECK_THROWS_AS(PhiIndexV1::build(p, rs), ArgumentError);
    CHECK_THROWS_AS(PhiIndexV2::build(p, rs), ArgumentError);
    CHECK_THROWS_AS(PhiIndexV1::build(random_panel(4, 4, 2, 1), decompose(p, 2)), ArgumentError);
}

TEST_CASE("single haplotype") {
    const auto b = build_all(parse_panel("0110100"), Direction::pred);
    for (auto c : b.v1.t_c()) CHECK(c == 0);
    for (auto t : b.v1.t_iota()) CHECK(t == 0);
    CHECK(b.v2.i_array() == std::vector<std::uint32_t>(7, 1));
    for (Site j = 1; j <= 7; ++j) {
        CHECK(b.base.query(j, 1, 3).empty());
        CHECK(b.v1.query(j, 1, 3).empty());
        CHECK(b.v2.query(j, 1, 3).empty());
    }
}

TEST_CASE("triples and I re-derived by brute force") {
    for (Direction dir : {Direction::pred, Direction::succ}) {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            const auto p = random_panel(1 + seed % 13, 1 + (seed * 5) % 40, 2 + seed % 3, seed);
            const auto b = build_all(p, dir);
            const OracleIndex oracle(p);
            std::size_t g = 0;
            std::map<Site, std::vector<std::uint32_t>> bucket;
            for (Hap c = 1; c <= p.h(); ++c) {
                for (const auto& s : b.rs.of(c)) {
                    Hap parent = oracle_neighbor(oracle, s.e, c, dir);
                    if (parent == p.h() + 1) parent = 0;
                    std::uint64_t iota = 0;
                    if (parent != 0) {
                        const auto& pl = b.rs.of(parent);
                        for (std::size_t q = 0; q < pl.size(); ++q)
                            if (pl[q].b <= s.e && s.e <= pl[q].e) iota = q + 1;
                    }
                    CHECK(b.v1.t_e()[g] == s.e);
                    CHECK(b.v1.t_c()[g] == parent);
                    CHECK(b.v1.t_iota()[g] == iota);
                    CHECK(b.v2.tc()[g] == parent);
                    bucket[s.e].push_back(c);
                    ++g;
                }
            }
            std::vector<std::uint32_t> want;
            for (auto& [site, cs] : bucket) want.insert(want.end(), cs.begin(), cs.end());
            CHECK(b.v2.i_array() == want);
        }
    }
}

TEST_CASE("three-way differential on random panels") {
    for (Direction dir : {Direction::pred, Direction::succ}) {
        for (auto [h, m] : {std::pair<std::size_t, std::size_t>{32, 128}, {40, 8}, {3, 200}}) {
            const auto p = random_panel(h, m, 2 + h % 3, h * 1000 + m);
            const auto b = build_all(p, dir);
            CHECK(b.v1.uses_global_locator() == (m >= h));
            const OracleIndex oracle(p);
            SplitMix64 rng(h + m);
            for (int q = 0; q < 10000; ++q) {
                const auto j = static_cast<Site>(1 + rng.below(m));
                const auto i = static_cast<Hap>(1 + rng.below(h));
                const auto k = rng.below(h + 1);
                const auto want = oracle_phi_iter(oracle, j, i, k, dir);
                std::vector<QueryStep> t1, t2;
                REQUIRE(b.v1.query(j, i, k, &t1) == want);
                REQUIRE(b.v2.query(j, i, k, &t2) == want);
                REQUIRE(b.base.query(j, i, k) == want);
                REQUIRE(t1.size() == t2.size());
                for (std::size_t s = 0; s < t1.size(); ++s) {
                    CHECK(t1[s].segment + 1 >= t1[s].parent);
                    CHECK(t1[s].segment <= t1[s].parent);
                    CHECK((t2[s].parent == t2[s].rho || t2[s].parent == t2[s].rho + 1));
                    CHECK(t2[s].parent == t1[s].parent);
                }
            }
        }
    }
}

TEST_CASE("injected faults change answers") {
    auto faulty = [](Fault f) {
        std::size_t bad = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto p = random_panel(16, 64, 2, seed);
            auto b = build_all(p, Direction::pred);
            b.v1.set_fault(f);
            b.v2.set_fault(f);
            const OracleIndex oracle(p);
            for (Site j = 1; j <= p.m(); ++j)
                for (Hap i = 1; i <= p.h(); ++i) {
                    const auto want = oracle_phi_iter(oracle, j, i, 16);
                    try {
                        bad += (f == Fault::v1_iota ? b.v1.query(j, i, 16) : b.v2.query(j, i, 16)) != want;
                    } catch (const ConsistencyError&) {
                        ++bad;
                    }
                }
        }
        return bad;
    };
    CHECK(faulty(Fault::v1_iota) > 0);
    CHECK(faulty(Fault::v2_rho) > 0);
}

TEST_CASE("baseline rejects foreign intervals") {
    const auto p = test::fig1();
    CHECK_THROWS_AS(BaselinePhiIndex::build(p, haplotype_intervals(random_panel(5, 6, 2, 3))), ConsistencyError);
    CHECK(parse_variant("v2") == Variant::v2);
    CHECK_THROWS_AS(parse_variant("v3"), ArgumentError);
}
