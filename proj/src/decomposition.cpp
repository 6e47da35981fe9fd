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

#include "pbwtphi/decomposition.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

namespace {

struct PendingList {
    std::size_t head = 0; // index of the head interval in the original list
    Site head_b = 1;      // left endpoint of the head (moves on Active Split)
};

std::vector<std::vector<Interval>> pending_view(const IntervalListSet& intervals,
                                                const std::vector<PendingList>& pending) {
    std::vector<std::vector<Interval>> out(intervals.h());
    for (std::size_t c = 0; c < intervals.h(); ++c) {
        const auto& list = intervals.lists[c];
        for (std::size_t k = pending[c].head; k < list.size(); ++k) {
            Interval iv = list[k];
            if (k == pending[c].head) iv.b = pending[c].head_b;
            out[c].push_back(iv);
        }
    }
    return out;
}

// 0 when the oracle neighbour is a sentinel.
Hap table_neighbor(const OracleIndex& oracle, Site j, Hap c, Direction dir) {
    const Hap n = oracle_neighbor(oracle, j, c, dir);
    return (n == 0 || n == oracle.h() + 1) ? 0 : n;
}

// site_to_segment[j-1] = 0-based index of the segment of `list` containing j.
std::vector<std::uint32_t> segment_ids_by_site(const std::vector<Segment>& list, std::size_t m) {
    std::vector<std::uint32_t> ids(m, 0);
    for (std::uint32_t k = 0; k < list.size(); ++k)
        for (Site j = list[k].b; j <= list[k].e && j <= m; ++j) ids[j - 1] = k;
    return ids;
}

std::string segment_text(Hap c, const Segment& s) {
    return "RS[" + std::to_string(c) + "] segment [" + std::to_string(s.b) + "," + std::to_string(s.e) + "]";
}

} // namespace

std::uint64_t RefinedSegmentTable::alpha() const noexcept {
    std::uint64_t n = 0;
    for (const auto& list : segs) n += list.size();
    return n;
}

std::uint64_t RefinedSegmentTable::canonical_count() const noexcept {
    std::uint64_t n = 0;
    for (const auto& list : segs)
        n += static_cast<std::uint64_t>(std::ranges::count_if(list, [](const Segment& s) { return s.canonical; }));
    return n;
}

std::uint32_t overlap_count(std::span<const Segment> parent, Site b, Site j) {
    if (parent.empty() || b > j) return 0;
    const auto first = std::ranges::lower_bound(parent, b, {}, &Segment::e);
    const auto last = std::ranges::upper_bound(parent, j, {}, &Segment::b);
    return first < last ? static_cast<std::uint32_t>(last - first) : 0;
}

RefinedSegmentTable decompose(const HaplotypePanel& panel, const IntervalListSet& intervals, std::uint32_t d,
                              const DecomposeOptions& options) {
    if (d < 2) throw ArgumentError("split parameter d must be >= 2, got " + std::to_string(d));
    const Direction dir = intervals.direction;
    if (intervals.h() != panel.h() || haplotype_intervals(panel, dir).lists != intervals.lists)
        throw ConsistencyError("interval lists are not the haplotype intervals of this panel");

    const std::uint32_t threshold = options.split_threshold.value_or(d);
    const std::size_t h = panel.h();
    const auto m = static_cast<Site>(panel.m());

    RefinedSegmentTable rs;
    rs.d = d;
    rs.direction = dir;
    rs.m = m;
    rs.segs.assign(h, {});
    std::vector<PendingList> pending(h);

    if (options.on_column) options.on_column({0, pending_view(intervals, pending), rs.segs});

    OrientedColumns cols(panel, dir);
    for (;;) {
        const Site j = cols.site();
        const auto& order = cols.order();
        for (std::size_t r = 0; r < h; ++r) {
            const Hap c = order[r];
            auto& head = pending[c - 1];
            const Interval& original = intervals.lists[c - 1][head.head];
            const Site b = head.head_b;
            const Site e = original.e;
            const Hap above = r == 0 ? 0 : order[r - 1];
            const std::uint32_t overlap = above == 0 ? 0 : overlap_count(rs.segs[above - 1], b, j);

            std::optional<SplitKind> kind;
            if (j == e) {
                kind = SplitKind::passive;
            } else if (above != 0 && overlap == threshold) {
                kind = SplitKind::active;
            }
            if (!kind) continue;

            const Segment seg{b, j, above, *kind == SplitKind::active};
            if (options.on_split) {
                const auto& parent_list = above == 0 ? rs.segs[c - 1] : rs.segs[above - 1];
                const bool contains = above != 0 && !parent_list.empty() && parent_list.front().b <= b &&
                                      b <= parent_list.back().e;
                options.on_split({j, static_cast<std::uint32_t>(r + 1), c, *kind, seg, above, overlap,
                                  above == 0 ? 0 : parent_list.size(), contains});
            }
            rs.segs[c - 1].push_back(seg);
            if (*kind == SplitKind::passive) {
                ++head.head;
                head.head_b = j + 1;
            } else {
                head.head_b = j + 1;
            }
        }
        if (options.on_column) options.on_column({j, pending_view(intervals, pending), rs.segs});
        if (!cols.has_next()) break;
        cols.advance();
    }
    return rs;
}

RefinedSegmentTable decompose(const HaplotypePanel& panel, std::uint32_t d, Direction dir) {
    return decompose(panel, haplotype_intervals(panel, dir), d);
}

AuditReport audit_canonical_sets(const RefinedSegmentTable& rs, const OracleIndex& oracle) {
    AuditReport report;
    const std::size_t m = oracle.m();
    std::vector<std::vector<std::uint32_t>> ids(rs.h());
    for (std::size_t c = 0; c < rs.h(); ++c) ids[c] = segment_ids_by_site(rs.segs[c], m);

    std::map<std::pair<Hap, std::uint32_t>, std::size_t> membership;
    for (Hap c = 1; c <= rs.h(); ++c) {
        for (const Segment& s : rs.of(c)) {
            if (!s.canonical) continue;
            ++report.checked;
            const Hap parent = table_neighbor(oracle, s.e, c, rs.direction);
            if (parent == 0) {
                report.violations.push_back(segment_text(c, s) + " is canonical but has no neighbour");
                continue;
            }
            const auto& plist = rs.of(parent);
            const std::uint32_t lo = ids[parent - 1][s.b - 1];
            const std::uint32_t hi = ids[parent - 1][s.e - 1];
            const std::uint32_t size = hi - lo + 1;
            if (size != rs.d)
                report.violations.push_back(segment_text(c, s) + " has a canonical set of " + std::to_string(size) +
                                            " segments, expected " + std::to_string(rs.d));
            if (plist[hi].e != s.e)
                report.violations.push_back(segment_text(c, s) + ": canonical set ends at " +
                                            std::to_string(plist[hi].e));
            for (std::uint32_t k = lo; k <= hi; ++k) {
                if (++membership[{parent, k}] == 2)
                    report.violations.push_back(segment_text(parent, plist[k]) +
                                                " belongs to more than one canonical set");
            }
        }
    }
    return report;
}

AuditReport validate_refined_segments(const RefinedSegmentTable& rs, const IntervalListSet& intervals,
                                      const RunStats& stats, const OracleIndex& oracle) {
    AuditReport report;
    auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };
    const std::size_t h = oracle.h();
    const std::size_t m = oracle.m();
    if (rs.h() != h || intervals.h() != h || rs.m != m) {
        fail("table shape does not match the panel");
        return report;
    }

    for (Hap c = 1; c <= h; ++c) {
        const auto& list = rs.of(c);
        Site expect_b = 1;
        for (const Segment& s : list) {
            ++report.checked;
            if (s.b != expect_b || s.e < s.b) fail(segment_text(c, s) + " breaks the partition of [1,m]");
            expect_b = s.e + 1;
            const auto& ivs = intervals.of(c);
            const auto home = std::ranges::find_if(ivs, [&](const Interval& iv) { return iv.b <= s.b && s.b <= iv.e; });
            if (home == ivs.end() || s.e > home->e) fail(segment_text(c, s) + " is not inside one haplotype interval");
            if (s.e < 1 || s.e > m) continue;
            const Hap parent = table_neighbor(oracle, s.e, c, rs.direction);
            if (s.parent != parent)
                fail(segment_text(c, s) + " records parent " + std::to_string(s.parent) + ", oracle says " +
                     std::to_string(parent));
            for (Site j = s.b; j <= s.e; ++j) {
                if (table_neighbor(oracle, j, c, rs.direction) != parent) {
                    fail(segment_text(c, s) + " has a non-constant neighbour at site " + std::to_string(j));
                    break;
                }
            }
        }
        if (expect_b != m + 1) fail("RS[" + std::to_string(c) + "] does not end at m");
    }
    if (!report.ok()) return report;

    std::vector<std::vector<std::uint32_t>> ids(h);
    for (std::size_t c = 0; c < h; ++c) ids[c] = segment_ids_by_site(rs.segs[c], m);
    for (Hap c = 1; c <= h; ++c) {
        for (const Segment& s : rs.of(c)) {
            if (s.parent == 0) continue;
            const std::uint32_t n = ids[s.parent - 1][s.e - 1] - ids[s.parent - 1][s.b - 1] + 1;
            if (n > rs.d)
                fail(segment_text(c, s) + " overlaps " + std::to_string(n) + " segments of RS[" +
                     std::to_string(s.parent) + "], limit " + std::to_string(rs.d));
        }
    }

    const std::uint64_t alpha = rs.alpha();
    const std::uint64_t canonical = rs.canonical_count();
    const std::uint64_t total_l = intervals.total();
    const std::uint64_t alpha_bound = (stats.r_tilde + h) * (1 + ceil_div(1, rs.d - 1));
    if (alpha > alpha_bound)
        fail("alpha " + std::to_string(alpha) + " exceeds bound " + std::to_string(alpha_bound));
    if (canonical != alpha - total_l)
        fail("canonical count " + std::to_string(canonical) + " != alpha - |L| = " + std::to_string(alpha - total_l));
    if (canonical > ceil_div(total_l, rs.d - 1))
        fail("canonical count " + std::to_string(canonical) + " exceeds ceil(|L|/(d-1)) = " +
             std::to_string(ceil_div(total_l, rs.d - 1)));
    if (total_l < stats.r_tilde || total_l > stats.r_tilde + h)
        fail("interval count " + std::to_string(total_l) + " outside [r~, r~+h]");
    return report;
}

std::string render_decomposition_states(const HaplotypePanel& panel, std::uint32_t d, Direction dir) {
    std::ostringstream out;
    DecomposeOptions options;
    options.on_column = [&out](const DecompositionSnapshot& snap) {
        out << "column " << snap.j << '\n';
        for (std::size_t c = 0; c < snap.pending.size(); ++c) {
            out << "  L[" << c + 1 << "]:";
            for (const auto& iv : snap.pending[c]) out << " [" << iv.b << ',' << iv.e << ']';
            out << "\n  RS[" << c + 1 << "]:";
            for (const auto& s : snap.rs[c]) out << " [" << s.b << ',' << s.e << (s.canonical ? "]*" : "]");
            out << '\n';
        }
    };
    decompose(panel, haplotype_intervals(panel, dir), d, options);
    return out.str();
}

} // namespace pbwtphi
