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

#include "pbwtphi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

namespace {

constexpr std::size_t kGridH[] = {1, 2, 5, 16, 64};
constexpr std::size_t kGridM[] = {1, 2, 8, 64, 256};
constexpr std::size_t kGridSigma[] = {2, 4, 8};

volatile std::uint64_t bench_sink = 0; // keeps timed queries from being optimized away

DecomposeOptions mutation_options(const CampaignConfig& cfg, std::uint32_t d) {
    DecomposeOptions opts;
    if (cfg.split_threshold_mutation) opts.split_threshold = d + 1;
    return opts;
}

std::vector<Hap> run_query(const AnyPhiIndex& idx, Site j, Hap i, std::uint64_t k) { return query(idx, j, i, k); }

AnyPhiIndex build_variant(Variant v, const HaplotypePanel& panel, const IntervalListSet& intervals,
                          const RefinedSegmentTable& rs, Fault fault) {
    switch (v) {
    case Variant::v1: {
        auto idx = PhiIndexV1::build(panel, rs);
        idx.set_fault(fault);
        return idx;
    }
    case Variant::v2: {
        auto idx = PhiIndexV2::build(panel, rs);
        idx.set_fault(fault);
        return idx;
    }
    case Variant::baseline: return BaselinePhiIndex::build(panel, intervals);
    }
    throw ArgumentError("unknown variant");
}

// Structural violations of one decomposition, including append-time checks.
std::vector<std::string> decomposition_violations(const HaplotypePanel& panel, const IntervalListSet& intervals,
                                                  std::uint32_t d, const CampaignConfig& cfg, const RunStats& stats,
                                                  const OracleIndex& oracle) {
    std::vector<std::string> out;
    DecomposeOptions opts = mutation_options(cfg, d);
    opts.on_split = [&out, d](const SplitEvent& ev) {
        if (ev.parent_overlap > d)
            out.push_back("append at site " + std::to_string(ev.j) + " for haplotype " + std::to_string(ev.c) +
                          " overlaps " + std::to_string(ev.parent_overlap) + " parent segments");
        if (ev.kind == SplitKind::active && !ev.parent_contains_b)
            out.push_back("active split at site " + std::to_string(ev.j) + " for haplotype " + std::to_string(ev.c) +
                          " starts outside its parent's segments");
    };
    try {
        const auto rs = decompose(panel, intervals, d, opts);
        for (auto& v : validate_refined_segments(rs, intervals, stats, oracle).violations) out.push_back(std::move(v));
        for (auto& v : audit_canonical_sets(rs, oracle).violations) out.push_back(std::move(v));
    } catch (const Error& e) {
        out.push_back(std::string("decomposition threw: ") + e.what());
    }
    return out;
}

std::vector<std::string> proposition_violations(const HaplotypePanel& panel, const IntervalListSet& intervals,
                                                const RunStats& stats, const OracleIndex& oracle) {
    std::vector<std::string> out;
    const std::uint64_t total = intervals.total();
    if (total < stats.r_tilde || total > stats.r_tilde + panel.h())
        out.push_back("interval count " + std::to_string(total) + " outside [" + std::to_string(stats.r_tilde) +
                      ", " + std::to_string(stats.r_tilde + panel.h()) + "]");
    for (Hap c = 1; c <= panel.h(); ++c) {
        for (const Interval& iv : intervals.of(c)) {
            const Hap first = oracle_neighbor(oracle, iv.b, c, intervals.direction);
            for (Site j = iv.b + 1; j <= iv.e; ++j) {
                if (oracle_neighbor(oracle, j, c, intervals.direction) != first) {
                    out.push_back("neighbour of haplotype " + std::to_string(c) + " changes inside [" +
                                  std::to_string(iv.b) + "," + std::to_string(iv.e) + "] at site " + std::to_string(j));
                    break;
                }
            }
        }
    }
    return out;
}

struct QueryOutcome {
    std::vector<Hap> got;
    std::string error;
};

QueryOutcome guarded_query(const AnyPhiIndex& idx, Site j, Hap i, std::uint64_t k) {
    try {
        return {run_query(idx, j, i, k), {}};
    } catch (const Error& e) {
        return {{}, e.what()};
    }
}

HaplotypePanel drop(const HaplotypePanel& panel, std::optional<std::size_t> row, std::optional<std::size_t> col) {
    std::string text;
    for (Hap r = 1; r <= panel.h(); ++r) {
        if (row && *row == r) continue;
        for (Site s = 1; s <= panel.m(); ++s) {
            if (col && *col == s) continue;
            text.push_back(panel.symbol_table()[panel.at(r, s)]);
        }
        text.push_back('\n');
    }
    return parse_panel(text);
}

} // namespace

std::vector<PanelShape> campaign_grid() {
    std::vector<PanelShape> grid;
    for (auto h : kGridH)
        for (auto m : kGridM)
            for (auto s : kGridSigma) grid.push_back({h, m, s});
    return grid;
}

PanelShape trial_shape(std::size_t trial) {
    static const auto grid = campaign_grid();
    return grid[trial % grid.size()];
}

std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t trial) {
    SplitMix64 mix(campaign_seed ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
    return mix.next();
}

std::string to_string(FailureKind kind) {
    switch (kind) {
    case FailureKind::query: return "query";
    case FailureKind::decomposition: return "decomposition";
    case FailureKind::proposition: return "proposition";
    }
    return "unknown";
}

std::uint64_t CampaignReport::count(FailureKind kind) const noexcept {
    std::uint64_t n = 0;
    for (const auto& t : trials) {
        switch (kind) {
        case FailureKind::query: n += t.query_failures; break;
        case FailureKind::decomposition: n += t.decomposition_failures; break;
        case FailureKind::proposition: n += t.proposition_failures; break;
        }
    }
    return n;
}

std::uint64_t CampaignReport::queries_checked() const noexcept {
    std::uint64_t n = 0;
    for (const auto& t : trials) n += t.queries_checked;
    return n;
}

std::uint64_t CampaignReport::tables_checked() const noexcept {
    std::uint64_t n = 0;
    for (const auto& t : trials) n += t.tables_checked;
    return n;
}

bool CampaignReport::ok() const noexcept {
    return count(FailureKind::query) + count(FailureKind::decomposition) + count(FailureKind::proposition) == 0;
}

const Failure* CampaignReport::first_failure() const noexcept {
    for (const auto& t : trials)
        if (t.first_failure) return &*t.first_failure;
    return nullptr;
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PBWTPHI_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

TrialResult run_trial(const CampaignConfig& cfg, std::size_t trial) {
    TrialResult r;
    r.trial = trial;
    r.shape = trial_shape(trial);
    r.panel_seed = trial_seed(cfg.seed, trial);
    const HaplotypePanel panel = random_panel(r.shape.h, r.shape.m, r.shape.sigma, r.panel_seed);
    const OracleIndex oracle(panel);
    const RunStats stats = run_stats(panel);

    auto note = [&r](Failure f) {
        if (!r.first_failure) r.first_failure = std::move(f);
    };
    auto base_failure = [&](FailureKind kind, Direction dir) {
        Failure f;
        f.kind = kind;
        f.trial = trial;
        f.panel_seed = r.panel_seed;
        f.panel = panel;
        f.direction = dir;
        return f;
    };

    for (Direction dir : {Direction::pred, Direction::succ}) {
        const IntervalListSet intervals = haplotype_intervals(panel, dir);
        if (cfg.check_decomposition) {
            for (auto& msg : proposition_violations(panel, intervals, stats, oracle)) {
                ++r.proposition_failures;
                Failure f = base_failure(FailureKind::proposition, dir);
                f.message = std::move(msg);
                note(std::move(f));
            }
            for (std::uint32_t d : cfg.ds) {
                ++r.tables_checked;
                auto violations = decomposition_violations(panel, intervals, d, cfg, stats, oracle);
                r.decomposition_failures += violations.size();
                if (!violations.empty()) {
                    Failure f = base_failure(FailureKind::decomposition, dir);
                    f.d = d;
                    f.message = violations.front();
                    note(std::move(f));
                }
            }
        }
        if (!cfg.check_queries) continue;

        std::vector<std::pair<Variant, AnyPhiIndex>> indexes;
        try {
            const auto rs = decompose(panel, intervals, 2, mutation_options(cfg, 2));
            for (Variant v : {Variant::v1, Variant::v2, Variant::baseline})
                indexes.emplace_back(v, build_variant(v, panel, intervals, rs, cfg.fault));
        } catch (const Error& e) {
            ++r.query_failures;
            Failure f = base_failure(FailureKind::query, dir);
            f.message = std::string("index build threw: ") + e.what();
            note(std::move(f));
            continue;
        }
        const auto& v1 = std::get<PhiIndexV1>(indexes[0].second);
        const auto& v2 = std::get<PhiIndexV2>(indexes[1].second);

        SplitMix64 rng(r.panel_seed ^ (dir == Direction::pred ? 0x51ed270b2f3c4d95ULL : 0xa0761d6478bd642fULL));
        for (std::size_t q = 0; q < cfg.queries; ++q) {
            const auto j = static_cast<Site>(1 + rng.below(panel.m()));
            const auto i = static_cast<Hap>(1 + rng.below(panel.h()));
            const std::uint64_t k = rng.below(panel.h() + 2);
            const auto expected = oracle_phi_iter(oracle, j, i, k, dir);
            ++r.queries_checked;
            bool all_match = true;
            for (const auto& [variant, idx] : indexes) {
                auto outcome = guarded_query(idx, j, i, k);
                if (outcome.error.empty() && outcome.got == expected) continue;
                all_match = false;
                ++r.query_failures;
                Failure f = base_failure(FailureKind::query, dir);
                f.variant = variant;
                f.j = j;
                f.i = i;
                f.k = k;
                f.expected = expected;
                f.got = std::move(outcome.got);
                f.message = outcome.error.empty() ? "sequence mismatch" : outcome.error;
                note(std::move(f));
            }
            if (!all_match || k == 0) continue;
            // The parent index V2 recovers from I must be the one V1 stores.
            std::vector<QueryStep> t1, t2;
            v1.query(j, i, k, &t1);
            v2.query(j, i, k, &t2);
            for (std::size_t s = 0; s < t1.size() && s < t2.size(); ++s) {
                if (t1[s].parent == t2[s].parent && t1[s].segment == t2[s].segment) continue;
                ++r.query_failures;
                Failure f = base_failure(FailureKind::query, dir);
                f.variant = Variant::v2;
                f.j = j;
                f.i = i;
                f.k = k;
                f.expected = expected;
                f.got = expected;
                f.message = "step " + std::to_string(s + 1) + ": V2 parent index " + std::to_string(t2[s].parent) +
                            " (rho " + std::to_string(t2[s].rho) + ") differs from T.iota " +
                            std::to_string(t1[s].parent);
                note(std::move(f));
                break;
            }
        }
    }
    return r;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
    CampaignReport report;
    report.trials.resize(cfg.panels);
    report.threads = std::max(1u, std::min<unsigned>(cfg.threads ? cfg.threads : worker_count(),
                                                     static_cast<unsigned>(std::max<std::size_t>(1, cfg.panels))));
    const auto start = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_fail{std::numeric_limits<std::size_t>::max()};
    auto work = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < cfg.panels;) {
            if (cfg.stop_at_first_failure && t > first_fail.load()) {
                report.trials[t].trial = t;
                report.trials[t].skipped = true;
                continue;
            }
            report.trials[t] = run_trial(cfg, t);
            if (report.trials[t].first_failure) {
                std::size_t cur = first_fail.load();
                while (t < cur && !first_fail.compare_exchange_weak(cur, t)) {
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < report.threads; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

bool reproduces(const Failure& f, const CampaignConfig& cfg) {
    const IntervalListSet intervals = haplotype_intervals(f.panel, f.direction);
    const OracleIndex oracle(f.panel);
    switch (f.kind) {
    case FailureKind::proposition: return !proposition_violations(f.panel, intervals, run_stats(f.panel), oracle).empty();
    case FailureKind::decomposition:
        return !decomposition_violations(f.panel, intervals, f.d, cfg, run_stats(f.panel), oracle).empty();
    case FailureKind::query: break;
    }
    if (!f.variant) {
        try {
            const auto rs = decompose(f.panel, intervals, 2, mutation_options(cfg, 2));
            for (Variant v : {Variant::v1, Variant::v2, Variant::baseline}) build_variant(v, f.panel, intervals, rs, cfg.fault);
            return false;
        } catch (const Error&) {
            return true;
        }
    }
    std::vector<Hap> expected;
    try {
        expected = oracle_phi_iter(oracle, f.j, f.i, f.k, f.direction);
        const auto rs = decompose(f.panel, intervals, 2, mutation_options(cfg, 2));
        const auto idx = build_variant(*f.variant, f.panel, intervals, rs, cfg.fault);
        if (guarded_query(idx, f.j, f.i, f.k).got != expected) return true;
        if (*f.variant != Variant::v2 || f.k == 0) return false;
        const auto v1 = PhiIndexV1::build(f.panel, rs);
        std::vector<QueryStep> t1, t2;
        v1.query(f.j, f.i, f.k, &t1);
        std::get<PhiIndexV2>(idx).query(f.j, f.i, f.k, &t2);
        for (std::size_t s = 0; s < t1.size() && s < t2.size(); ++s)
            if (t1[s].parent != t2[s].parent || t1[s].segment != t2[s].segment) return true;
        return false;
    } catch (const Error&) {
        return true;
    }
}

Failure minimize(Failure f, const CampaignConfig& cfg) {
    if (!reproduces(f, cfg)) return f;
    const bool is_query = f.kind == FailureKind::query && f.variant;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t r = f.panel.h(); r >= 1 && f.panel.h() > 1; --r) {
            if (is_query && r == f.i) continue;
            Failure g = f;
            g.panel = drop(f.panel, r, std::nullopt);
            if (is_query && r < f.i) --g.i;
            if (reproduces(g, cfg)) {
                f = std::move(g);
                changed = true;
            }
        }
        for (std::size_t c = f.panel.m(); c >= 1 && f.panel.m() > 1; --c) {
            if (is_query && c == f.j) continue;
            Failure g = f;
            g.panel = drop(f.panel, std::nullopt, c);
            if (is_query && c < f.j) --g.j;
            if (reproduces(g, cfg)) {
                f = std::move(g);
                changed = true;
            }
        }
        while (is_query && f.k > 1) {
            Failure g = f;
            --g.k;
            if (!reproduces(g, cfg)) break;
            f = std::move(g);
            changed = true;
        }
    }
    if (f.kind != FailureKind::query) {
        const IntervalListSet intervals = haplotype_intervals(f.panel, f.direction);
        const OracleIndex oracle(f.panel);
        const RunStats stats = run_stats(f.panel);
        const auto v = f.kind == FailureKind::decomposition
                           ? decomposition_violations(f.panel, intervals, f.d, cfg, stats, oracle)
                           : proposition_violations(f.panel, intervals, stats, oracle);
        if (!v.empty()) f.message = v.front();
    }
    if (is_query) {
        const OracleIndex oracle(f.panel);
        f.expected = oracle_phi_iter(oracle, f.j, f.i, f.k, f.direction);
        const IntervalListSet intervals = haplotype_intervals(f.panel, f.direction);
        try {
            const auto rs = decompose(f.panel, intervals, 2, mutation_options(cfg, 2));
            auto outcome = guarded_query(build_variant(*f.variant, f.panel, intervals, rs, cfg.fault), f.j, f.i, f.k);
            f.got = std::move(outcome.got);
            if (!outcome.error.empty()) f.message = outcome.error;
        } catch (const Error& e) {
            f.got.clear();
            f.message = e.what();
        }
    }
    return f;
}

const BenchRow* BenchReport::row(Variant v, std::uint64_t k) const noexcept {
    for (const auto& r : rows)
        if (r.variant == v && r.k == k) return &r;
    return nullptr;
}

BenchReport run_bench(const BenchConfig& cfg) {
    BenchReport report;
    report.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();
    const HaplotypePanel panel = random_panel(cfg.h, cfg.m, cfg.sigma, cfg.seed);
    report.r_tilde = run_stats(panel).r_tilde;
    const IntervalListSet intervals = haplotype_intervals(panel, Direction::pred);
    report.intervals = intervals.total();
    std::vector<std::pair<Variant, AnyPhiIndex>> indexes;
    {
        const auto rs = decompose(panel, intervals, 2);
        report.alpha = rs.alpha();
        indexes.emplace_back(Variant::v1, PhiIndexV1::build(panel, rs));
        indexes.emplace_back(Variant::v2, PhiIndexV2::build(panel, rs));
    }
    indexes.emplace_back(Variant::baseline, BaselinePhiIndex::build(panel, intervals));
    report.bytes_v1 = serialized_size(indexes[0].second);
    report.bytes_v2 = serialized_size(indexes[1].second);
    report.bytes_baseline = serialized_size(indexes[2].second);
    report.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    SplitMix64 rng(cfg.seed ^ 0x243f6a8885a308d3ULL);
    std::vector<std::pair<Site, Hap>> probes(cfg.queries);
    for (auto& [j, i] : probes) {
        j = static_cast<Site>(1 + rng.below(cfg.m));
        i = static_cast<Hap>(1 + rng.below(cfg.h));
    }

    std::uint64_t sink = 0;
    for (std::uint64_t k : cfg.ks) {
        // Passes are interleaved across variants so drift hits all of them alike.
        std::vector<std::vector<double>> samples(indexes.size());
        std::vector<std::uint64_t> steps(indexes.size(), 0);
        for (std::size_t rep = 0; rep <= cfg.repeats; ++rep) {
            for (std::size_t v = 0; v < indexes.size(); ++v) {
                std::uint64_t n = 0;
                const auto start = std::chrono::steady_clock::now();
                for (const auto& [j, i] : probes) {
                    const auto out = query(indexes[v].second, j, i, k);
                    n += out.size();
                    if (!out.empty()) sink += out.back();
                }
                const double ns =
                    std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - start).count();
                steps[v] = n;
                if (rep > 0) samples[v].push_back(ns); // first pass only warms caches
            }
        }
        for (std::size_t v = 0; v < indexes.size(); ++v) {
            BenchRow row;
            row.variant = indexes[v].first;
            row.k = k;
            row.steps = steps[v];
            std::ranges::sort(samples[v]);
            row.median_ns = samples[v].empty() ? 0 : samples[v][samples[v].size() / 2];
            row.ns_per_step = row.steps ? row.median_ns / static_cast<double>(row.steps) : 0;
            report.rows.push_back(row);
        }
    }
    bench_sink = sink;
    return report;
}

} // namespace pbwtphi
