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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbwtphi/panel.hpp"
#include "pbwtphi/pbwt.hpp"

namespace pbwtphi {

struct Segment {
    Site b = 0;
    Site e = 0;
    Hap parent = 0;         // neighbour at e in the table's direction; 0 when c is ranked first
    bool canonical = false; // produced by an Active Split
    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Refined segments per haplotype; segs[c-1] partitions [1, m].
struct RefinedSegmentTable {
    std::uint32_t d = 2;
    Direction direction = Direction::pred;
    std::size_t m = 0;
    std::vector<std::vector<Segment>> segs;

    [[nodiscard]] std::size_t h() const noexcept { return segs.size(); }
    [[nodiscard]] const std::vector<Segment>& of(Hap c) const { return segs.at(c - 1); }
    [[nodiscard]] std::uint64_t alpha() const noexcept;
    [[nodiscard]] std::uint64_t canonical_count() const noexcept;

    friend bool operator==(const RefinedSegmentTable&, const RefinedSegmentTable&) = default;
};

enum class SplitKind : std::uint8_t { passive, active };

/// One append to RS, reported in processing order.
struct SplitEvent {
    Site j = 0;
    std::uint32_t rank = 0; // oriented 1-based rank
    Hap c = 0;
    SplitKind kind = SplitKind::passive;
    Segment segment;
    Hap parent = 0;                   // oriented neighbour above; 0 at rank 1
    std::uint32_t parent_overlap = 0; // segments of RS[parent] meeting [b, j] at append time
    std::size_t parent_size = 0;      // |RS[parent]| at append time
    bool parent_contains_b = false;   // some RS[parent] segment contains b
};

/// Pending L lists and RS lists right after a column has been processed.
struct DecompositionSnapshot {
    Site j = 0; // 0 = initial state
    std::vector<std::vector<Interval>> pending;
    std::vector<std::vector<Segment>> rs;
};

struct DecomposeOptions {
    /// Overlap count that triggers an Active Split; defaults to d. Only the
    /// mutation tests override it.
    std::optional<std::uint32_t> split_threshold;
    std::function<void(const SplitEvent&)> on_split;
    std::function<void(const DecompositionSnapshot&)> on_column;
};

/// Number of segments in `parent` (a partition of [1, last e]) meeting [b, j].
std::uint32_t overlap_count(std::span<const Segment> parent, Site b, Site j);

/**
 * Splits haplotype intervals into refined segments.
 *
 * Columns are streamed left to right, ranks top to bottom (in the intervals'
 * direction). For the haplotype c at each cell, with pending head [b, e]:
 * if j == e the head moves to RS[c] (Passive Split); otherwise, if c is not
 * ranked first and [b, j] meets exactly d segments of the neighbour above,
 * [b, j] moves to RS[c] and the head becomes [j+1, e] (Active Split).
 *
 * Throws ArgumentError for d < 2 and ConsistencyError when `intervals` are
 * not the haplotype intervals of `panel`.
 */
RefinedSegmentTable decompose(const HaplotypePanel& panel, const IntervalListSet& intervals, std::uint32_t d,
                              const DecomposeOptions& options = {});

/// decompose(panel, haplotype_intervals(panel, dir), d).
RefinedSegmentTable decompose(const HaplotypePanel& panel, std::uint32_t d, Direction dir = Direction::pred);

struct AuditReport {
    std::vector<std::string> violations;
    std::uint64_t checked = 0;
    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/**
 * Recomputes each canonical segment's canonical set from the oracle and
 * checks: the set has exactly d members, its largest right endpoint is the
 * canonical segment's e, and no parent segment lies in two sets.
 */
AuditReport audit_canonical_sets(const RefinedSegmentTable& rs, const OracleIndex& oracle);

/**
 * Brute-force check of every structural property of a finished table:
 * per-haplotype partition of [1, m], containment in one haplotype interval,
 * recorded parent = oracle neighbour at e and constant over [b, e], overlap
 * with the parent's list <= d, the alpha and canonical-count bounds, and
 * canonical = alpha - |L|. Does not trust any construction bookkeeping.
 */
AuditReport validate_refined_segments(const RefinedSegmentTable& rs, const IntervalListSet& intervals,
                                      const RunStats& stats, const OracleIndex& oracle);

/// Line-oriented dump of the L and RS states after each column j = 0..m.
std::string render_decomposition_states(const HaplotypePanel& panel, std::uint32_t d, Direction dir);

/// ceil(a / b) for b > 0.
constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept { return (a + b - 1) / b; }

} // namespace pbwtphi
