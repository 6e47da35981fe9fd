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

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pbwtphi/panel.hpp"

namespace pbwtphi {

/// Which neighbour in the prefix-array column a query walks to.
/// pred answers phi (row above, top sentinel 0); succ answers phi^-1 (row
/// below, bottom sentinel h+1).
enum class Direction : std::uint8_t { pred = 0, succ = 1 };

std::string_view to_string(Direction dir) noexcept;
Direction parse_direction(std::string_view text); // throws ArgumentError

/// col_j(PA): order[r] is the haplotype ranked r+1 at site j.
struct PAColumn {
    Site j = 1;
    std::vector<Hap> order;
};

PAColumn first_column(std::size_t h);

/// col_{j+1}(PA) by stable counting sort on the symbols at site col.j.
/// Throws RangeError when col.j == m.
PAColumn next_column(const PAColumn& col, const HaplotypePanel& panel);

/// 1-based ranks that start a run in col_j(PBWT).
std::vector<std::uint32_t> run_tops(const PAColumn& col, const HaplotypePanel& panel);

/**
 * Streams prefix-array columns as seen from one direction. For succ the
 * column is reversed, so rank 1 is the bottom row; run-tops of the reversed
 * column are the run-bottoms of the real one. Every downstream algorithm is
 * written once against this view.
 */
class OrientedColumns {
  public:
    OrientedColumns(const HaplotypePanel& panel, Direction dir);

    [[nodiscard]] Site site() const noexcept { return col_.j; }
    [[nodiscard]] const std::vector<Hap>& order() const noexcept { return view_; }
    /// Symbol of the haplotype at oriented rank r (0-based) at the current site.
    [[nodiscard]] Symbol symbol_at_rank(std::size_t r) const noexcept { return panel_->at(view_[r], col_.j); }
    [[nodiscard]] bool is_run_top(std::size_t r) const noexcept {
        return r == 0 || symbol_at_rank(r) != symbol_at_rank(r - 1);
    }
    [[nodiscard]] bool has_next() const noexcept { return col_.j < panel_->m(); }
    void advance();

  private:
    void refresh_view();

    const HaplotypePanel* panel_;
    Direction dir_;
    PAColumn col_;
    std::vector<Hap> view_;
};

struct RunStats {
    std::vector<std::uint32_t> r_per_site; // r_j for j = 1..m at index j-1
    std::uint64_t r_tilde = 0;
};

RunStats run_stats(const HaplotypePanel& panel);

struct Interval {
    Site b = 0;
    Site e = 0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Per-haplotype haplotype intervals; lists[c-1] partitions [1, m].
struct IntervalListSet {
    Direction direction = Direction::pred;
    std::vector<std::vector<Interval>> lists;

    [[nodiscard]] std::size_t h() const noexcept { return lists.size(); }
    [[nodiscard]] std::uint64_t total() const noexcept;
    [[nodiscard]] const std::vector<Interval>& of(Hap c) const { return lists.at(c - 1); }
};

/// Right endpoints are the sites where c is a run-top (run-bottom for
/// succ), plus m.
IntervalListSet haplotype_intervals(const HaplotypePanel& panel, Direction dir = Direction::pred);

/// Fully materialized prefix array; the ground truth for differential tests.
class OracleIndex {
  public:
    explicit OracleIndex(const HaplotypePanel& panel);

    [[nodiscard]] std::size_t h() const noexcept { return h_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }

    /// Haplotype at 1-based rank `rank` of col_j(PA).
    [[nodiscard]] Hap at(Site j, std::uint32_t rank) const noexcept { return pa_[(j - 1) * h_ + rank - 1]; }
    /// 1-based rank of haplotype c in col_j(PA).
    [[nodiscard]] std::uint32_t rank_of(Site j, Hap c) const noexcept { return pos_[(j - 1) * h_ + c - 1]; }
    [[nodiscard]] PAColumn column(Site j) const;

  private:
    std::size_t h_;
    std::size_t m_;
    std::vector<Hap> pa_;
    std::vector<std::uint32_t> pos_;
};

/// phi_j(i); 0 when i is ranked first. Throws ArgumentError on bad j or i.
Hap oracle_phi(const OracleIndex& oracle, Site j, Hap i);

/// phi^-1_j(i); h+1 when i is ranked last.
Hap oracle_phi_inverse(const OracleIndex& oracle, Site j, Hap i);

/// Neighbour in the given direction, with that direction's sentinel.
Hap oracle_neighbor(const OracleIndex& oracle, Site j, Hap i, Direction dir);

/// phi^1..phi^k (or the inverse chain), truncated before the sentinel.
std::vector<Hap> oracle_phi_iter(const OracleIndex& oracle, Site j, Hap i, std::uint64_t k,
                                 Direction dir = Direction::pred);

} // namespace pbwtphi
