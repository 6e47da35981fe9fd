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

// Acceptance gate: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cstdio>
#include <set>
#include <string>
#include <tuple>

#include "pbwtphi/errors.hpp"
#include "pbwtphi/harness.hpp"
#include "pbwtphi/phi_index.hpp"

using namespace pbwtphi;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr std::size_t kPanels = 200;
constexpr std::size_t kQueries = 500;
constexpr double kDifferentialBudgetSeconds = 300.0;
constexpr double kLatencyFactor = 1.5;
constexpr std::uint64_t kBenchK = 64;
constexpr std::size_t kSuccinctQueries = 100000;

int g_failed = 0;

void report(int id, bool pass, const std::string& detail, bool informational = false) {
    std::printf("criterion %d %s: %s%s\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
                informational && !pass ? " (informational)" : "");
    std::fflush(stdout);
    if (!pass && !informational) ++g_failed;
}

std::string describe(const Failure* f) {
    if (!f) return "";
    std::string s = " first: trial " + std::to_string(f->trial) + " " + to_string(f->kind) + " " + f->message;
    if (f->variant)
        s += " (" + to_string(*f->variant) + " j=" + std::to_string(f->j) + " i=" + std::to_string(f->i) +
             " k=" + std::to_string(f->k) + ")";
    return s;
}

CampaignConfig base_campaign() {
    CampaignConfig cfg;
    cfg.seed = kSeed;
    cfg.panels = kPanels;
    cfg.queries = kQueries;
    return cfg;
}

void criterion_1() {
    CampaignConfig cfg = base_campaign();
    cfg.check_decomposition = false;
    cfg.threads = 1;
    const auto r = run_campaign(cfg);
    const auto bad = r.count(FailureKind::query);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu queries x 3 indexes vs oracle, %llu mismatches, %.1f s single-threaded (budget %.0f s)",
                  static_cast<unsigned long long>(r.queries_checked()), static_cast<unsigned long long>(bad), r.seconds,
                  kDifferentialBudgetSeconds);
    report(1, bad == 0 && r.seconds < kDifferentialBudgetSeconds, buf + describe(r.first_failure()));
}

void criteria_2_3() {
    CampaignConfig cfg = base_campaign();
    cfg.check_queries = false;
    const auto r = run_campaign(cfg);
    const auto dec = r.count(FailureKind::decomposition);
    const auto prop = r.count(FailureKind::proposition);
    const Failure* first = r.first_failure();
    report(2, dec == 0,
           std::to_string(r.tables_checked()) + " tables (d in {2,3,5}, both directions), " + std::to_string(dec) +
               " violations" + (first && first->kind == FailureKind::decomposition ? describe(first) : ""));
    report(3, prop == 0,
           std::to_string(kPanels * 2) + " interval sets checked for count range and constant neighbour, " +
               std::to_string(prop) + " violations" +
               (first && first->kind == FailureKind::proposition ? describe(first) : ""));
}

void criterion_4() {
    std::vector<std::string> bad;
    auto expect = [&bad](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    const HaplotypePanel p = read_panel_file(std::string(PBWTPHI_FIXTURES) + "/fig1.panel");
    const OracleIndex oracle(p);
    expect(oracle.column(4).order == std::vector<Hap>{2, 3, 4, 1, 5}, "col_4");
    expect(oracle_phi(oracle, 4, 3) == 2, "phi_4(3)");
    expect(oracle_phi_inverse(oracle, 4, 3) == 4, "phi^-1_4(3)");
    const auto l = haplotype_intervals(p);
    expect(l.of(5) == std::vector<Interval>{{1, 1}, {2, 2}, {3, 3}, {4, 5}, {6, 6}}, "S_5 intervals");

    using Ev = std::tuple<std::uint32_t, char, Hap, Site, Site>;
    std::vector<Ev> col5;
    DecomposeOptions opts;
    opts.on_split = [&col5](const SplitEvent& ev) {
        if (ev.j == 5)
            col5.emplace_back(ev.rank, ev.kind == SplitKind::active ? 'A' : 'P', ev.c, ev.segment.b, ev.segment.e);
    };
    const auto rs = decompose(p, l, 2, opts);
    expect(col5 == std::vector<Ev>{{1, 'P', 2, 5, 5}, {2, 'P', 3, 5, 5}, {3, 'A', 4, 4, 5}, {5, 'P', 5, 4, 5}},
           "column-5 splits");
    const auto v1 = PhiIndexV1::build(p, rs);
    const auto g = v1.x()[4] + 3;
    expect(rs.of(5)[3].b == 4 && rs.of(5)[3].e == 5 && v1.t_c()[g] == 1 && rs.of(1)[v1.t_iota()[g] - 1].b == 5 &&
               rs.of(1)[v1.t_iota()[g] - 1].e == 6,
           "parent [4,5] -> [5,6]");

    // No panel matches both col_4(PA) and the 23-entry I, so I is checked on the stated segment lists.
    std::vector<std::vector<Segment>> stated(5);
    const std::vector<std::vector<std::pair<Site, Site>>> ends = {{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 6}},
                                                                 {{1, 1}, {2, 2}, {3, 4}, {5, 5}, {6, 6}},
                                                                 {{1, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}},
                                                                 {{1, 3}, {4, 5}, {6, 6}},
                                                                 {{1, 1}, {2, 2}, {3, 3}, {4, 5}, {6, 6}}};
    for (std::size_t c = 0; c < 5; ++c)
        for (auto [b, e] : ends[c]) stated[c].push_back({b, e, 0, false});
    const auto i_array = build_i_array(stated, 6);
    expect(i_array == std::vector<std::uint32_t>{1, 2, 5, 1, 2, 3, 5, 1, 3, 4, 5, 1, 2, 3, 2, 3, 4, 5, 1, 2, 3, 4, 5},
           "I array (state level)");
    const SeqRankSelect I(i_array, 5);
    expect(I.rank(1, I.select(5, 4)) == 4 && I.select(1, 5) == I.select(5, 4) + 1, "occurrence of 1 after fourth 5");

    std::string detail = "frozen 5x6 panel: col_4, phi, phi^-1, S_5, column-5 splits, parent relation; "
                         "23-entry I at state level (documented downgrade)";
    for (const auto& b : bad) detail += " [failed: " + b + "]";
    report(4, bad.empty(), detail);
}

void criterion_5() {
    SplitMix64 rng(kSeed);
    std::uint64_t checked = 0, bad = 0;
    // Boundary conventions.
    const IntSetIndex empty({}, 100);
    bad += empty.succ(1) != 1 || empty.succ(100) != 1;
    const IntSetIndex two({3, 9}, 12);
    bad += two.succ(4) != 2 || two.succ(10) != 3;
    const SeqRankSelect none({}, 4);
    bad += none.rank(2, 0) != 0;
    checked += 5;

    const std::size_t per_set = kSuccinctQueries / 50;
    for (int t = 0; t < 50; ++t) {
        const std::uint64_t universe = 1 + rng.below(50000);
        const double density = t % 3 == 0 ? 0.95 : (t % 3 == 1 ? 0.0005 : 0.0);
        std::set<std::uint64_t> pick;
        while (pick.size() < static_cast<std::size_t>(density * static_cast<double>(universe)))
            pick.insert(1 + rng.below(universe));
        const std::vector<std::uint64_t> v(pick.begin(), pick.end());
        const IntSetIndex s(v, universe);
        for (std::size_t q = 0; q < per_set; ++q, ++checked) {
            const std::uint64_t x = 1 + rng.below(universe);
            std::size_t want = v.size() + 1;
            for (std::size_t k = 0; k < v.size(); ++k)
                if (v[k] >= x) {
                    want = k + 1;
                    break;
                }
            bad += s.succ(x) != want;
            if (!v.empty()) {
                const std::size_t i = 1 + rng.below(v.size());
                bad += s.access(i) != v[i - 1];
            }
        }

        const auto sigma = static_cast<std::uint32_t>(1 + rng.below(t % 2 ? 5 : 200));
        const std::size_t n = t % 3 == 2 ? 0 : rng.below(4000);
        std::vector<std::uint32_t> a(n);
        for (auto& x : a) x = static_cast<std::uint32_t>(1 + rng.below(sigma));
        const SeqRankSelect seq(a, sigma);
        for (std::size_t q = 0; q < per_set; ++q, ++checked) {
            const auto c = static_cast<std::uint32_t>(1 + rng.below(sigma));
            const std::size_t i = rng.below(n + 1);
            std::size_t want = 0;
            for (std::size_t p = 0; p < i; ++p) want += a[p] == c;
            bad += seq.rank(c, i) != want;
            if (want > 0) {
                std::size_t seen = 0, pos = 0;
                for (std::size_t p = 0; p < n; ++p)
                    if (a[p] == c && ++seen == want) {
                        pos = p + 1;
                        break;
                    }
                bad += seq.select(c, want) != pos;
            }
        }
    }
    report(5, bad == 0,
           std::to_string(checked) + " access/successor/rank/select queries vs scan (dense, sparse, empty), " +
               std::to_string(bad) + " mismatches");
}

void criterion_6() {
    std::uint64_t round_trips = 0, cuts = 0, bad = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto p = random_panel(2 + seed * 3, 3 + seed * 5, 2 + seed % 3, seed);
        for (Direction dir : {Direction::pred, Direction::succ}) {
            const auto l = haplotype_intervals(p, dir);
            const auto rs = decompose(p, l, 2);
            const std::vector<AnyPhiIndex> all = {PhiIndexV1::build(p, rs), PhiIndexV2::build(p, rs),
                                                  BaselinePhiIndex::build(p, l)};
            for (const auto& idx : all) {
                const auto bytes = serialize(idx);
                ++round_trips;
                bad += serialize(deserialize(bytes)) != bytes || !(deserialize(bytes) == idx);
                if (seed > 2) continue;
                for (std::size_t n = 0; n < bytes.size(); ++n, ++cuts) {
                    try {
                        (void)deserialize(std::span<const std::uint8_t>(bytes.data(), n));
                        ++bad;
                    } catch (const FormatError&) {
                    } catch (...) {
                        ++bad;
                    }
                }
            }
        }
    }
    report(6, bad == 0,
           std::to_string(round_trips) + " byte-exact round trips, " + std::to_string(cuts) +
               " truncations all FormatError, " + std::to_string(bad) + " failures");
}

void criterion_7() {
    BenchConfig cfg;
    cfg.seed = kSeed;
    cfg.ks = {kBenchK};
    const auto r = run_bench(cfg);
    const auto* v1 = r.row(Variant::v1, kBenchK);
    const auto* v2 = r.row(Variant::v2, kBenchK);
    const auto* base = r.row(Variant::baseline, kBenchK);
    const bool lat = v1->ns_per_step <= kLatencyFactor * base->ns_per_step &&
                     v2->ns_per_step <= kLatencyFactor * base->ns_per_step;
    const bool size = r.bytes_v2 < r.bytes_v1;
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "h=%zu m=%zu k=%llu ns/step v1 %.1f v2 %.1f baseline %.1f (limit %.1f); bytes v1 %llu v2 %llu "
                  "baseline %llu",
                  cfg.h, cfg.m, static_cast<unsigned long long>(kBenchK), v1->ns_per_step, v2->ns_per_step,
                  base->ns_per_step, kLatencyFactor * base->ns_per_step,
                  static_cast<unsigned long long>(r.bytes_v1), static_cast<unsigned long long>(r.bytes_v2),
                  static_cast<unsigned long long>(r.bytes_baseline));
    report(7, lat && size, buf);
}

void criterion_8() {
    struct Mutant {
        const char* name;
        Fault fault;
        bool split;
    };
    std::string detail;
    bool all = true;
    for (const Mutant& mu : {Mutant{"v2 rho/rho+1 flip", Fault::v2_rho, false},
                             Mutant{"v1 iota/iota-1 flip", Fault::v1_iota, false},
                             Mutant{"split threshold d+1", Fault::none, true}}) {
        CampaignConfig cfg = base_campaign();
        cfg.fault = mu.fault;
        cfg.split_threshold_mutation = mu.split;
        cfg.stop_at_first_failure = true;
        const auto r = run_campaign(cfg);
        const auto c1 = r.count(FailureKind::query);
        const auto c2 = r.count(FailureKind::decomposition);
        const bool caught = c1 + c2 > 0;
        all = all && caught;
        detail += std::string(detail.empty() ? "" : "; ") + mu.name + (caught ? " caught" : " MISSED") + " (c1 " +
                  std::to_string(c1) + ", c2 " + std::to_string(c2) + ")";
    }
    report(8, all, detail);
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    try {
        criterion_1();
        criteria_2_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("acceptance: %d failing criteria, %.1f s\n", g_failed,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return g_failed == 0 ? 0 : 1;
}
