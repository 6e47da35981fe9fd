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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pbwtphi/decomposition.hpp"
#include "pbwtphi/panel.hpp"
#include "pbwtphi/pbwt.hpp"
#include "pbwtphi/succinct.hpp"

namespace pbwtphi {

enum class Variant : std::uint8_t { v1 = 1, v2 = 2, baseline = 3 };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text); // "v1" | "v2" | "baseline"

/// Deliberate faults for mutation tests. Never set outside tests and `verify`.
enum class Fault : std::uint8_t { none, v1_iota, v2_rho };

/// One step of an iterated query, as resolved by the index.
struct QueryStep {
    Hap color = 0;             // c_{k+1}
    std::uint64_t parent = 0;  // index in RS[color] of the segment containing e_k
    std::uint64_t segment = 0; // l_{k+1}: index in RS[color] of the segment containing j
    std::uint64_t rho = 0;     // V2 only: rank_{color}(I, x)
};

/**
 * Segment-triple index: X, T = (e, c, iota) and a successor structure to find
 * the starting segment. With m < h the starting segment comes from a
 * per-haplotype set of right endpoints, otherwise from one global set of
 * P = m(i-1)+e values.
 */
class PhiIndexV1 {
  public:
    PhiIndexV1() = default;

    /// Throws ArgumentError unless rs.d == 2 and rs matches the panel shape.
    static PhiIndexV1 build(const HaplotypePanel& panel, const RefinedSegmentTable& rs);

    /// Rebuilds the locator from raw arrays; throws ConsistencyError on bad input.
    static PhiIndexV1 from_arrays(Direction dir, std::size_t h, std::size_t m, std::vector<std::uint64_t> x,
                                  std::vector<std::uint64_t> e, std::vector<std::uint64_t> c,
                                  std::vector<std::uint64_t> iota);

    /// phi^1_j(i) .. phi^k_j(i) in the index direction, truncated at the sentinel.
    std::vector<Hap> query(Site j, Hap i, std::uint64_t k, std::vector<QueryStep>* trace = nullptr) const;

    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] std::size_t h() const noexcept { return h_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::uint64_t alpha() const noexcept { return e_.size(); }
    [[nodiscard]] bool uses_global_locator() const noexcept { return m_ >= h_; }
    [[nodiscard]] std::uint64_t segment_count(Hap c) const noexcept;

    [[nodiscard]] const std::vector<std::uint64_t>& x() const noexcept { return x_; }
    [[nodiscard]] const std::vector<std::uint64_t>& t_e() const noexcept { return e_; }
    [[nodiscard]] const std::vector<std::uint64_t>& t_c() const noexcept { return c_; }
    [[nodiscard]] const std::vector<std::uint64_t>& t_iota() const noexcept { return iota_; }
    [[nodiscard]] std::vector<std::uint64_t> p_values() const;

    /// In-memory footprint of arrays and locator.
    [[nodiscard]] std::size_t bytes() const noexcept;

    void set_fault(Fault f) noexcept { fault_ = f; }

    friend bool operator==(const PhiIndexV1& a, const PhiIndexV1& b) {
        return a.direction_ == b.direction_ && a.h_ == b.h_ && a.m_ == b.m_ && a.x_ == b.x_ && a.e_ == b.e_ &&
               a.c_ == b.c_ && a.iota_ == b.iota_;
    }

  private:
    void build_locator();

    Direction direction_ = Direction::pred;
    std::size_t h_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> x_; // x_[i-1] = X[i]
    std::vector<std::uint64_t> e_, c_, iota_;
    std::vector<IntSetIndex> per_hap_; // m < h
    IntSetIndex global_;               // m >= h
    Fault fault_ = Fault::none;
};

/**
 * Color-only index: X, the parent color of each segment, the global P set,
 * and rank/select over I (segment colors ordered by right endpoint, then
 * haplotype). The parent segment is recovered from I at query time.
 */
class PhiIndexV2 {
  public:
    PhiIndexV2() = default;

    static PhiIndexV2 build(const HaplotypePanel& panel, const RefinedSegmentTable& rs);

    static PhiIndexV2 from_arrays(Direction dir, std::size_t h, std::size_t m, std::vector<std::uint64_t> x,
                                  std::vector<std::uint64_t> tc, std::vector<std::uint64_t> p,
                                  std::vector<std::uint32_t> i_array);

    std::vector<Hap> query(Site j, Hap i, std::uint64_t k, std::vector<QueryStep>* trace = nullptr) const;

    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] std::size_t h() const noexcept { return h_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::uint64_t alpha() const noexcept { return records_.size(); }
    [[nodiscard]] std::uint64_t segment_count(Hap c) const noexcept;

    [[nodiscard]] const std::vector<std::uint64_t>& x() const noexcept { return x_; }
    [[nodiscard]] std::vector<std::uint64_t> tc() const;
    [[nodiscard]] const std::vector<std::uint64_t>& p_values() const noexcept { return p_.values(); }
    [[nodiscard]] const std::vector<std::uint32_t>& i_array() const noexcept { return i_.data(); }

    [[nodiscard]] std::size_t bytes() const noexcept;

    void set_fault(Fault f) noexcept { fault_ = f; }

    friend bool operator==(const PhiIndexV2& a, const PhiIndexV2& b) {
        return a.direction_ == b.direction_ && a.h_ == b.h_ && a.m_ == b.m_ && a.x_ == b.x_ && a.tc() == b.tc() &&
               a.p_values() == b.p_values() && a.i_array() == b.i_array();
    }

  private:
    // Right endpoint of RS[c][l], i.e. access(P, X[c]+l) - m(c-1).
    [[nodiscard]] std::uint64_t end_of(Hap c, std::uint64_t l) const noexcept { return records_[x_[c - 1] + l - 1].e; }

    void build_records(const std::vector<std::uint64_t>& tc);

    // Tc and the local endpoint side by side, so one step touches one line for both.
    struct Record {
        std::uint32_t e;
        std::uint32_t tc;
    };

    Direction direction_ = Direction::pred;
    std::size_t h_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> x_;
    std::vector<Record> records_;
    IntSetIndex p_;
    SeqRankSelect i_;
    Fault fault_ = Fault::none;
};

/// The I array: for j = 1..m, for i = 1..h, append i when RS[i] has a segment ending at j.
std::vector<std::uint32_t> build_i_array(const std::vector<std::vector<Segment>>& segs, std::size_t m);

/**
 * One successor query per step: each haplotype keeps its interval right
 * endpoints and the (constant) neighbour over each interval.
 */
class BaselinePhiIndex {
  public:
    BaselinePhiIndex() = default;

    /// Throws ConsistencyError if `intervals` are not the panel's intervals.
    static BaselinePhiIndex build(const HaplotypePanel& panel, const IntervalListSet& intervals);

    static BaselinePhiIndex from_arrays(Direction dir, std::size_t h, std::size_t m,
                                        std::vector<std::uint64_t> offsets, std::vector<std::uint64_t> endpoints,
                                        std::vector<std::uint64_t> values);

    std::vector<Hap> query(Site j, Hap i, std::uint64_t k) const;

    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] std::size_t h() const noexcept { return h_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::uint64_t interval_count() const noexcept { return values_.size(); }

    [[nodiscard]] const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
    [[nodiscard]] std::vector<std::uint64_t> endpoints() const;
    [[nodiscard]] const std::vector<std::uint64_t>& values() const noexcept { return values_; }

    [[nodiscard]] std::size_t bytes() const noexcept;

    friend bool operator==(const BaselinePhiIndex& a, const BaselinePhiIndex& b) {
        return a.direction_ == b.direction_ && a.h_ == b.h_ && a.m_ == b.m_ && a.offsets_ == b.offsets_ &&
               a.endpoints() == b.endpoints() && a.values_ == b.values_;
    }

  private:
    Direction direction_ = Direction::pred;
    std::size_t h_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> offsets_; // h+1 entries
    std::vector<IntSetIndex> ends_;
    std::vector<std::uint64_t> values_;
};

using AnyPhiIndex = std::variant<PhiIndexV1, PhiIndexV2, BaselinePhiIndex>;

Variant variant_of(const AnyPhiIndex& idx) noexcept;
std::vector<Hap> query(const AnyPhiIndex& idx, Site j, Hap i, std::uint64_t k);

/**
 * Binary format, all integers little-endian:
 *   "PBWTPHI1", then u64 version (1), variant (1, 2, 3), direction (0 pred,
 *   1 succ), h, m, d, alpha; then u64 X[1..h] and the payload:
 *   V1: T.e, T.c, T.iota, P (alpha u64 each);
 *   V2: Tc, P (alpha u64 each), I (alpha u32);
 *   baseline: alpha is the interval count, d is 0, and X is replaced by h+1
 *   interval offsets, followed by endpoints and values (alpha u64 each).
 */
std::vector<std::uint8_t> serialize(const PhiIndexV1& idx);
std::vector<std::uint8_t> serialize(const PhiIndexV2& idx);
std::vector<std::uint8_t> serialize(const BaselinePhiIndex& idx);
std::vector<std::uint8_t> serialize(const AnyPhiIndex& idx);

/// Length of serialize(idx) without materializing it.
std::uint64_t serialized_size(const AnyPhiIndex& idx) noexcept;

/// Throws FormatError (with byte offset) on any malformed input.
AnyPhiIndex deserialize(std::span<const std::uint8_t> bytes);

/// As deserialize, but also rejects a different variant tag.
template <class Index> Index deserialize_as(std::span<const std::uint8_t> bytes);

void write_index_file(const std::string& path, const AnyPhiIndex& idx);
AnyPhiIndex read_index_file(const std::string& path);

} // namespace pbwtphi
