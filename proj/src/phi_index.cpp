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

#include "pbwtphi/phi_index.hpp"

#include <algorithm>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

namespace {

void check_shape(const HaplotypePanel& panel, const RefinedSegmentTable& rs) {
    if (rs.d != 2) throw ArgumentError("indexes need refined segments built with d = 2, got d = " + std::to_string(rs.d));
    if (rs.h() != panel.h() || rs.m != panel.m()) throw ArgumentError("refined segments do not match the panel shape");
}

void check_query(std::size_t h, std::size_t m, Site j, Hap i) {
    if (j < 1 || j > m) throw ArgumentError("site " + std::to_string(j) + " outside [1, " + std::to_string(m) + "]");
    if (i < 1 || i > h) throw ArgumentError("haplotype " + std::to_string(i) + " outside [1, " + std::to_string(h) + "]");
}

std::vector<std::uint64_t> prefix_counts(const RefinedSegmentTable& rs) {
    std::vector<std::uint64_t> x(rs.h(), 0);
    for (std::size_t c = 1; c < rs.h(); ++c) x[c] = x[c - 1] + rs.segs[c - 1].size();
    return x;
}

void check_prefix(const std::vector<std::uint64_t>& x, std::size_t h, std::uint64_t alpha) {
    if (x.size() != h) throw ConsistencyError("X has " + std::to_string(x.size()) + " entries, expected h");
    if (h == 0 || x[0] != 0) throw ConsistencyError("X[1] must be 0");
    for (std::size_t c = 1; c < h; ++c)
        if (x[c] <= x[c - 1]) throw ConsistencyError("X not strictly increasing at " + std::to_string(c + 1));
    if (x[h - 1] >= alpha) throw ConsistencyError("X[h] leaves no segment for haplotype h");
}

void check_dims(std::size_t h, std::size_t m) {
    if (h < 1 || m < 1) throw ConsistencyError("h and m must be positive");
    if (h > 0xffffffffULL || m > 0xffffffffULL || h > (~0ULL) / m) throw ConsistencyError("h * m overflows");
}

// Segment ends of each haplotype must be strictly increasing in [1, m] and end at m.
template <class EndOf>
void check_ends(const std::vector<std::uint64_t>& x, std::uint64_t alpha, std::size_t m, EndOf end_of) {
    const std::size_t h = x.size();
    for (std::size_t c = 0; c < h; ++c) {
        const std::uint64_t lo = x[c];
        const std::uint64_t hi = c + 1 < h ? x[c + 1] : alpha;
        std::uint64_t prev = 0;
        for (std::uint64_t g = lo; g < hi; ++g) {
            const std::uint64_t e = end_of(c, g);
            if (e <= prev || e > m) throw ConsistencyError("segment ends of haplotype " + std::to_string(c + 1) + " are invalid");
            prev = e;
        }
        if (prev != m) throw ConsistencyError("segments of haplotype " + std::to_string(c + 1) + " do not end at m");
    }
}

std::uint64_t count_from(const std::vector<std::uint64_t>& x, std::uint64_t alpha, Hap c) noexcept {
    return (c < x.size() ? x[c] : alpha) - x[c - 1];
}

} // namespace

std::string to_string(Variant v) {
    switch (v) {
    case Variant::v1: return "v1";
    case Variant::v2: return "v2";
    case Variant::baseline: return "baseline";
    }
    return "unknown";
}

Variant parse_variant(const std::string& text) {
    if (text == "v1") return Variant::v1;
    if (text == "v2") return Variant::v2;
    if (text == "baseline") return Variant::baseline;
    throw ArgumentError("unknown variant '" + text + "' (expected v1, v2 or baseline)");
}

std::vector<std::uint32_t> build_i_array(const std::vector<std::vector<Segment>>& segs, std::size_t m) {
    // Ends of each list are increasing, so a cursor per haplotype suffices.
    std::vector<std::size_t> cursor(segs.size(), 0);
    std::vector<std::uint32_t> out;
    for (Site j = 1; j <= m; ++j) {
        for (std::size_t c = 0; c < segs.size(); ++c) {
            if (cursor[c] < segs[c].size() && segs[c][cursor[c]].e == j) {
                out.push_back(static_cast<std::uint32_t>(c + 1));
                ++cursor[c];
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- V1

PhiIndexV1 PhiIndexV1::build(const HaplotypePanel& panel, const RefinedSegmentTable& rs) {
    check_shape(panel, rs);
    PhiIndexV1 idx;
    idx.direction_ = rs.direction;
    idx.h_ = rs.h();
    idx.m_ = rs.m;
    idx.x_ = prefix_counts(rs);
    const std::uint64_t alpha = rs.alpha();
    idx.e_.reserve(alpha);
    idx.c_.reserve(alpha);
    idx.iota_.reserve(alpha);
    for (const auto& list : rs.segs) {
        for (const Segment& s : list) {
            idx.e_.push_back(s.e);
            idx.c_.push_back(s.parent);
            std::uint64_t iota = 0;
            if (s.parent != 0) {
                // The parent may have been emitted after this segment, so this runs on the finished table.
                const auto& plist = rs.segs[s.parent - 1];
                const auto it = std::ranges::lower_bound(plist, s.e, {}, &Segment::e);
                if (it == plist.end()) throw ConsistencyError("parent list does not cover site " + std::to_string(s.e));
                iota = static_cast<std::uint64_t>(it - plist.begin()) + 1;
            }
            idx.iota_.push_back(iota);
        }
    }
    idx.build_locator();
    return idx;
}

PhiIndexV1 PhiIndexV1::from_arrays(Direction dir, std::size_t h, std::size_t m, std::vector<std::uint64_t> x,
                                   std::vector<std::uint64_t> e, std::vector<std::uint64_t> c,
                                   std::vector<std::uint64_t> iota) {
    check_dims(h, m);
    const std::uint64_t alpha = e.size();
    if (c.size() != alpha || iota.size() != alpha) throw ConsistencyError("T arrays differ in length");
    check_prefix(x, h, alpha);
    check_ends(x, alpha, m, [&](std::size_t, std::uint64_t g) { return e[g]; });
    for (std::size_t hap = 0; hap < h; ++hap) {
        const std::uint64_t hi = hap + 1 < h ? x[hap + 1] : alpha;
        for (std::uint64_t g = x[hap]; g < hi; ++g) {
            const std::uint64_t parent = c[g];
            if (parent > h || parent == hap + 1) throw ConsistencyError("bad parent color at T[" + std::to_string(g + 1) + "]");
            if ((parent == 0) != (iota[g] == 0)) throw ConsistencyError("iota and color disagree at T[" + std::to_string(g + 1) + "]");
            if (parent == 0) continue;
            const auto p = static_cast<Hap>(parent);
            if (iota[g] > count_from(x, alpha, p)) throw ConsistencyError("iota out of range at T[" + std::to_string(g + 1) + "]");
            const std::uint64_t pe = e[x[p - 1] + iota[g] - 1];
            const std::uint64_t pprev = iota[g] > 1 ? e[x[p - 1] + iota[g] - 2] : 0;
            if (!(pprev < e[g] && e[g] <= pe)) throw ConsistencyError("parent segment does not contain e at T[" + std::to_string(g + 1) + "]");
        }
    }
    PhiIndexV1 idx;
    idx.direction_ = dir;
    idx.h_ = h;
    idx.m_ = m;
    idx.x_ = std::move(x);
    idx.e_ = std::move(e);
    idx.c_ = std::move(c);
    idx.iota_ = std::move(iota);
    idx.build_locator();
    return idx;
}

void PhiIndexV1::build_locator() {
    per_hap_.clear();
    global_ = IntSetIndex();
    if (uses_global_locator()) {
        global_ = IntSetIndex(p_values(), static_cast<std::uint64_t>(h_) * m_);
        return;
    }
    per_hap_.reserve(h_);
    for (Hap c = 1; c <= h_; ++c) {
        const auto first = e_.begin() + static_cast<std::ptrdiff_t>(x_[c - 1]);
        per_hap_.emplace_back(std::vector<std::uint64_t>(first, first + static_cast<std::ptrdiff_t>(segment_count(c))), m_);
    }
}

std::uint64_t PhiIndexV1::segment_count(Hap c) const noexcept { return count_from(x_, alpha(), c); }

std::vector<std::uint64_t> PhiIndexV1::p_values() const {
    std::vector<std::uint64_t> p(e_.size());
    for (Hap c = 1; c <= h_; ++c) {
        const std::uint64_t hi = c < h_ ? x_[c] : alpha();
        for (std::uint64_t g = x_[c - 1]; g < hi; ++g) p[g] = m_ * (c - 1) + e_[g];
    }
    return p;
}

std::vector<Hap> PhiIndexV1::query(Site j, Hap i, std::uint64_t k, std::vector<QueryStep>* trace) const {
    check_query(h_, m_, j, i);
    std::vector<Hap> out;
    if (k == 0) return out;
    Hap c = i;
    std::uint64_t l = uses_global_locator() ? global_.succ(m_ * (i - 1) + j) - x_[i - 1] : per_hap_[i - 1].succ(j);
    while (out.size() < k) {
        const std::uint64_t g = x_[c - 1] + l - 1;
        const auto next = static_cast<Hap>(c_[g]);
        if (next == 0) break;
        const std::uint64_t iota = iota_[g];
        bool step_back = iota > 1 && j <= e_[x_[next - 1] + iota - 2];
        if (fault_ == Fault::v1_iota) step_back = !step_back;
        l = step_back ? iota - 1 : iota;
        if (l < 1 || l > segment_count(next)) throw ConsistencyError("segment index out of range");
        out.push_back(next);
        if (trace) trace->push_back({next, iota, l, 0});
        c = next;
    }
    return out;
}

std::size_t PhiIndexV1::bytes() const noexcept {
    std::size_t n = (x_.size() + e_.size() + c_.size() + iota_.size()) * sizeof(std::uint64_t) + global_.bytes();
    for (const auto& s : per_hap_) n += s.bytes();
    return n;
}

// ---------------------------------------------------------------- V2

PhiIndexV2 PhiIndexV2::build(const HaplotypePanel& panel, const RefinedSegmentTable& rs) {
    check_shape(panel, rs);
    PhiIndexV2 idx;
    idx.direction_ = rs.direction;
    idx.h_ = rs.h();
    idx.m_ = rs.m;
    idx.x_ = prefix_counts(rs);
    std::vector<std::uint64_t> p, tc;
    p.reserve(rs.alpha());
    tc.reserve(rs.alpha());
    for (std::size_t c = 0; c < rs.h(); ++c) {
        for (const Segment& s : rs.segs[c]) {
            tc.push_back(s.parent);
            p.push_back(idx.m_ * c + s.e);
        }
    }
    idx.p_ = IntSetIndex(std::move(p), static_cast<std::uint64_t>(idx.h_) * idx.m_);
    idx.build_records(tc);
    idx.i_ = SeqRankSelect(build_i_array(rs.segs, rs.m), static_cast<std::uint32_t>(idx.h_));
    return idx;
}

PhiIndexV2 PhiIndexV2::from_arrays(Direction dir, std::size_t h, std::size_t m, std::vector<std::uint64_t> x,
                                   std::vector<std::uint64_t> tc, std::vector<std::uint64_t> p,
                                   std::vector<std::uint32_t> i_array) {
    check_dims(h, m);
    const std::uint64_t alpha = tc.size();
    if (p.size() != alpha || i_array.size() != alpha) throw ConsistencyError("V2 arrays differ in length");
    check_prefix(x, h, alpha);
    std::vector<std::vector<Segment>> segs(h);
    for (std::size_t c = 0; c < h; ++c) {
        const std::uint64_t hi = c + 1 < h ? x[c + 1] : alpha;
        for (std::uint64_t g = x[c]; g < hi; ++g) {
            if (p[g] <= m * c || p[g] > m * (c + 1)) throw ConsistencyError("P value out of its haplotype's range");
            if (tc[g] > h || tc[g] == c + 1) throw ConsistencyError("bad parent color at Tc[" + std::to_string(g + 1) + "]");
            segs[c].push_back({0, static_cast<Site>(p[g] - m * c), static_cast<Hap>(tc[g]), false});
        }
    }
    check_ends(x, alpha, m, [&](std::size_t c, std::uint64_t g) { return p[g] - m * c; });
    if (build_i_array(segs, m) != i_array) throw ConsistencyError("I does not match the segment endpoints");
    PhiIndexV2 idx;
    idx.direction_ = dir;
    idx.h_ = h;
    idx.m_ = m;
    idx.x_ = std::move(x);
    idx.p_ = IntSetIndex(std::move(p), static_cast<std::uint64_t>(h) * m);
    idx.build_records(tc);
    idx.i_ = SeqRankSelect(std::move(i_array), static_cast<std::uint32_t>(h));
    return idx;
}

std::uint64_t PhiIndexV2::segment_count(Hap c) const noexcept { return count_from(x_, alpha(), c); }

void PhiIndexV2::build_records(const std::vector<std::uint64_t>& tc) {
    records_.resize(tc.size());
    for (Hap c = 1; c <= h_; ++c) {
        const std::uint64_t hi = c < h_ ? x_[c] : tc.size();
        for (std::uint64_t g = x_[c - 1]; g < hi; ++g)
            records_[g] = {static_cast<std::uint32_t>(p_[g + 1] - m_ * (c - 1)), static_cast<std::uint32_t>(tc[g])};
    }
}

std::vector<std::uint64_t> PhiIndexV2::tc() const {
    std::vector<std::uint64_t> out(records_.size());
    for (std::size_t g = 0; g < records_.size(); ++g) out[g] = records_[g].tc;
    return out;
}

std::vector<Hap> PhiIndexV2::query(Site j, Hap i, std::uint64_t k, std::vector<QueryStep>* trace) const {
    check_query(h_, m_, j, i);
    std::vector<Hap> out;
    if (k == 0) return out;
    Hap c = i;
    std::uint64_t l = p_.succ(m_ * (i - 1) + j) - x_[i - 1];
    while (out.size() < k) {
        const Record& rec = records_[x_[c - 1] + l - 1];
        const auto next = static_cast<Hap>(rec.tc);
        if (next == 0) break;
        const std::uint64_t e_k = rec.e;
        const std::uint64_t x = i_.select(c, l);
        const std::uint64_t rho = i_.rank(next, x);
        bool take_rho = rho >= 1 && e_k <= end_of(next, rho);
        if (fault_ == Fault::v2_rho) take_rho = !take_rho;
        const std::uint64_t parent = take_rho ? rho : rho + 1;
        const std::uint64_t count = segment_count(next);
        if (parent < 1 || parent > count) throw ConsistencyError("parent index out of range");
        l = parent > 1 && j <= end_of(next, parent - 1) ? parent - 1 : parent;
        out.push_back(next);
        if (trace) trace->push_back({next, parent, l, rho});
        c = next;
    }
    return out;
}

std::size_t PhiIndexV2::bytes() const noexcept {
    return x_.size() * sizeof(std::uint64_t) + records_.size() * sizeof(Record) + p_.bytes() + i_.bytes();
}

// ---------------------------------------------------------------- baseline

BaselinePhiIndex BaselinePhiIndex::build(const HaplotypePanel& panel, const IntervalListSet& intervals) {
    const Direction dir = intervals.direction;
    if (intervals.h() != panel.h() || haplotype_intervals(panel, dir).lists != intervals.lists)
        throw ConsistencyError("interval lists are not the haplotype intervals of this panel");
    const std::size_t h = panel.h();
    std::vector<std::uint64_t> offsets(h + 1, 0);
    for (std::size_t c = 0; c < h; ++c) offsets[c + 1] = offsets[c] + intervals.lists[c].size();
    std::vector<std::uint64_t> endpoints(offsets[h]);
    std::vector<std::uint64_t> values(offsets[h]);
    std::vector<std::size_t> cursor(h, 0);
    OrientedColumns cols(panel, dir);
    for (;;) {
        const Site j = cols.site();
        const auto& order = cols.order();
        for (std::size_t r = 0; r < h; ++r) {
            const Hap c = order[r];
            const auto& list = intervals.lists[c - 1];
            if (cursor[c - 1] < list.size() && list[cursor[c - 1]].e == j) {
                const std::uint64_t g = offsets[c - 1] + cursor[c - 1]++;
                endpoints[g] = j;
                values[g] = r == 0 ? 0 : order[r - 1];
            }
        }
        if (!cols.has_next()) break;
        cols.advance();
    }
    return from_arrays(dir, h, panel.m(), std::move(offsets), std::move(endpoints), std::move(values));
}

BaselinePhiIndex BaselinePhiIndex::from_arrays(Direction dir, std::size_t h, std::size_t m,
                                               std::vector<std::uint64_t> offsets,
                                               std::vector<std::uint64_t> endpoints,
                                               std::vector<std::uint64_t> values) {
    check_dims(h, m);
    if (offsets.size() != h + 1) throw ConsistencyError("offsets need h+1 entries");
    if (offsets[0] != 0 || offsets[h] != endpoints.size() || values.size() != endpoints.size())
        throw ConsistencyError("offsets do not match the interval arrays");
    BaselinePhiIndex idx;
    idx.direction_ = dir;
    idx.h_ = h;
    idx.m_ = m;
    idx.ends_.reserve(h);
    for (std::size_t c = 0; c < h; ++c) {
        if (offsets[c + 1] <= offsets[c]) throw ConsistencyError("haplotype " + std::to_string(c + 1) + " has no intervals");
        std::uint64_t prev = 0;
        for (std::uint64_t g = offsets[c]; g < offsets[c + 1]; ++g) {
            if (endpoints[g] <= prev || endpoints[g] > m) throw ConsistencyError("interval endpoints are invalid");
            if (values[g] > h || values[g] == c + 1) throw ConsistencyError("bad stored neighbour");
            prev = endpoints[g];
        }
        if (prev != m) throw ConsistencyError("intervals of haplotype " + std::to_string(c + 1) + " do not end at m");
        const auto first = endpoints.begin() + static_cast<std::ptrdiff_t>(offsets[c]);
        const auto last = endpoints.begin() + static_cast<std::ptrdiff_t>(offsets[c + 1]);
        idx.ends_.emplace_back(std::vector<std::uint64_t>(first, last), m);
    }
    idx.offsets_ = std::move(offsets);
    idx.values_ = std::move(values);
    return idx;
}

std::vector<Hap> BaselinePhiIndex::query(Site j, Hap i, std::uint64_t k) const {
    check_query(h_, m_, j, i);
    std::vector<Hap> out;
    Hap c = i;
    while (out.size() < k) {
        const std::size_t l = ends_[c - 1].succ(j);
        const auto next = static_cast<Hap>(values_[offsets_[c - 1] + l - 1]);
        if (next == 0) break;
        out.push_back(next);
        c = next;
    }
    return out;
}

std::vector<std::uint64_t> BaselinePhiIndex::endpoints() const {
    std::vector<std::uint64_t> out;
    out.reserve(values_.size());
    for (const auto& s : ends_) out.insert(out.end(), s.values().begin(), s.values().end());
    return out;
}

std::size_t BaselinePhiIndex::bytes() const noexcept {
    std::size_t n = (offsets_.size() + values_.size()) * sizeof(std::uint64_t);
    for (const auto& s : ends_) n += s.bytes();
    return n;
}

Variant variant_of(const AnyPhiIndex& idx) noexcept { return static_cast<Variant>(idx.index() + 1); }

std::vector<Hap> query(const AnyPhiIndex& idx, Site j, Hap i, std::uint64_t k) {
    return std::visit([&](const auto& x) { return x.query(j, i, k); }, idx);
}

} // namespace pbwtphi
