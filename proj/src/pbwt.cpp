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

#include "pbwtphi/pbwt.hpp"

#include <algorithm>
#include <numeric>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

namespace {

void check_query_range(const OracleIndex& oracle, Site j, Hap i) {
    if (j < 1 || j > oracle.m())
        throw ArgumentError("site " + std::to_string(j) + " outside [1, " + std::to_string(oracle.m()) + "]");
    if (i < 1 || i > oracle.h())
        throw ArgumentError("haplotype " + std::to_string(i) + " outside [1, " + std::to_string(oracle.h()) + "]");
}

} // namespace

std::string_view to_string(Direction dir) noexcept { return dir == Direction::pred ? "pred" : "succ"; }

Direction parse_direction(std::string_view text) {
    if (text == "pred") return Direction::pred;
    if (text == "succ") return Direction::succ;
    throw ArgumentError("direction must be pred or succ, got '" + std::string(text) + "'");
}

PAColumn first_column(std::size_t h) {
    PAColumn col;
    col.j = 1;
    col.order.resize(h);
    std::iota(col.order.begin(), col.order.end(), Hap{1});
    return col;
}

PAColumn next_column(const PAColumn& col, const HaplotypePanel& panel) {
    if (col.j >= panel.m()) throw RangeError("no column after site " + std::to_string(col.j));
    const std::size_t sigma = panel.sigma();
    std::vector<std::uint32_t> start(sigma + 1, 0);
    for (Hap c : col.order) ++start[panel.at(c, col.j) + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    PAColumn out;
    out.j = col.j + 1;
    out.order.resize(col.order.size());
    for (Hap c : col.order) out.order[start[panel.at(c, col.j)]++] = c;
    return out;
}

std::vector<std::uint32_t> run_tops(const PAColumn& col, const HaplotypePanel& panel) {
    std::vector<std::uint32_t> tops;
    for (std::size_t r = 0; r < col.order.size(); ++r) {
        if (r == 0 || panel.at(col.order[r], col.j) != panel.at(col.order[r - 1], col.j))
            tops.push_back(static_cast<std::uint32_t>(r + 1));
    }
    return tops;
}

OrientedColumns::OrientedColumns(const HaplotypePanel& panel, Direction dir)
    : panel_(&panel), dir_(dir), col_(first_column(panel.h())) {
    refresh_view();
}

void OrientedColumns::advance() {
    col_ = next_column(col_, *panel_);
    refresh_view();
}

void OrientedColumns::refresh_view() {
    view_ = col_.order;
    if (dir_ == Direction::succ) std::ranges::reverse(view_);
}

RunStats run_stats(const HaplotypePanel& panel) {
    RunStats stats;
    stats.r_per_site.reserve(panel.m());
    PAColumn col = first_column(panel.h());
    for (Site j = 1;; ++j) {
        const auto r = static_cast<std::uint32_t>(run_tops(col, panel).size());
        stats.r_per_site.push_back(r);
        stats.r_tilde += r;
        if (j == panel.m()) break;
        col = next_column(col, panel);
    }
    return stats;
}

std::uint64_t IntervalListSet::total() const noexcept {
    std::uint64_t n = 0;
    for (const auto& list : lists) n += list.size();
    return n;
}

IntervalListSet haplotype_intervals(const HaplotypePanel& panel, Direction dir) {
    const std::size_t h = panel.h();
    const auto m = static_cast<Site>(panel.m());
    IntervalListSet out;
    out.direction = dir;
    out.lists.assign(h, {});
    std::vector<Site> next_b(h, 1);
    OrientedColumns cols(panel, dir);
    for (;;) {
        const Site j = cols.site();
        for (std::size_t r = 0; r < h; ++r) {
            const Hap c = cols.order()[r];
            if (cols.is_run_top(r) || j == m) {
                out.lists[c - 1].push_back({next_b[c - 1], j});
                next_b[c - 1] = j + 1;
            }
        }
        if (!cols.has_next()) break;
        cols.advance();
    }
    return out;
}

OracleIndex::OracleIndex(const HaplotypePanel& panel) : h_(panel.h()), m_(panel.m()) {
    pa_.resize(h_ * m_);
    pos_.resize(h_ * m_);
    PAColumn col = first_column(h_);
    for (Site j = 1;; ++j) {
        for (std::size_t r = 0; r < h_; ++r) {
            pa_[(j - 1) * h_ + r] = col.order[r];
            pos_[(j - 1) * h_ + col.order[r] - 1] = static_cast<std::uint32_t>(r + 1);
        }
        if (j == m_) break;
        col = next_column(col, panel);
    }
}

PAColumn OracleIndex::column(Site j) const {
    PAColumn col;
    col.j = j;
    col.order.assign(pa_.begin() + static_cast<std::ptrdiff_t>((j - 1) * h_),
                     pa_.begin() + static_cast<std::ptrdiff_t>(j * h_));
    return col;
}

Hap oracle_phi(const OracleIndex& oracle, Site j, Hap i) {
    check_query_range(oracle, j, i);
    const auto rank = oracle.rank_of(j, i);
    return rank == 1 ? 0 : oracle.at(j, rank - 1);
}

Hap oracle_phi_inverse(const OracleIndex& oracle, Site j, Hap i) {
    check_query_range(oracle, j, i);
    const auto rank = oracle.rank_of(j, i);
    return rank == oracle.h() ? static_cast<Hap>(oracle.h() + 1) : oracle.at(j, rank + 1);
}

Hap oracle_neighbor(const OracleIndex& oracle, Site j, Hap i, Direction dir) {
    return dir == Direction::pred ? oracle_phi(oracle, j, i) : oracle_phi_inverse(oracle, j, i);
}

std::vector<Hap> oracle_phi_iter(const OracleIndex& oracle, Site j, Hap i, std::uint64_t k, Direction dir) {
    check_query_range(oracle, j, i);
    const auto rank = oracle.rank_of(j, i);
    const std::uint64_t available = dir == Direction::pred ? rank - 1 : oracle.h() - rank;
    const std::uint64_t steps = std::min(k, available);
    std::vector<Hap> out;
    out.reserve(steps);
    for (std::uint64_t s = 1; s <= steps; ++s) {
        const auto r = dir == Direction::pred ? rank - s : rank + s;
        out.push_back(oracle.at(j, static_cast<std::uint32_t>(r)));
    }
    return out;
}

} // namespace pbwtphi
