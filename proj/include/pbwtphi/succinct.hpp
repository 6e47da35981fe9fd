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
#include <vector>

namespace pbwtphi {

/**
 * Strictly increasing set of integers in [1, universe] with access by rank
 * and successor by value. Ranks are 1-based.
 *
 * Values are kept explicitly; a directory over the universe, in buckets of
 * 2^shift values, narrows each successor search to one bucket.
 */
class IntSetIndex {
  public:
    IntSetIndex() = default;

    /// Throws ArgumentError unless values are strictly increasing in [1, universe].
    IntSetIndex(std::vector<std::uint64_t> values, std::uint64_t universe);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::uint64_t universe() const noexcept { return universe_; }
    [[nodiscard]] const std::vector<std::uint64_t>& values() const noexcept { return values_; }

    /// i-th smallest element, 1 <= i <= size(); RangeError otherwise.
    [[nodiscard]] std::uint64_t access(std::size_t i) const;

    /// Unchecked access for hot loops.
    [[nodiscard]] std::uint64_t operator[](std::size_t i) const noexcept { return values_[i - 1]; }

    /// Smallest rank i with access(i) >= x, or size()+1 if there is none.
    [[nodiscard]] std::size_t succ(std::uint64_t x) const noexcept;

    [[nodiscard]] std::size_t bytes() const noexcept;

  private:
    std::vector<std::uint64_t> values_;
    std::vector<std::uint32_t> directory_; // directory_[b] = #values with (v >> shift_) < b
    std::uint64_t universe_ = 0;
    unsigned shift_ = 0;
};

/**
 * Immutable sequence over [1, sigma] with rank and select, stored as one
 * occurrence set per symbol. select is an access into the symbol's set and
 * rank a successor search in it. Positions are 1-based.
 */
class SeqRankSelect {
  public:
    SeqRankSelect() = default;

    /// Throws ArgumentError if any entry is outside [1, sigma].
    SeqRankSelect(std::vector<std::uint32_t> data, std::uint32_t sigma);

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::uint32_t sigma() const noexcept { return sigma_; }
    [[nodiscard]] const std::vector<std::uint32_t>& data() const noexcept { return data_; }

    /// Occurrences of c in positions 1..i, 0 <= i <= size(). ArgumentError for
    /// c outside [1, sigma]; i is clamped to size().
    [[nodiscard]] std::size_t rank(std::uint32_t c, std::size_t i) const;

    /// Position of the q-th occurrence of c. ArgumentError for a bad symbol,
    /// RangeError unless 1 <= q <= rank(c, size()).
    [[nodiscard]] std::size_t select(std::uint32_t c, std::size_t q) const;

    [[nodiscard]] std::size_t count(std::uint32_t c) const;

    [[nodiscard]] std::size_t bytes() const noexcept;

  private:
    std::vector<std::uint32_t> data_;
    std::vector<IntSetIndex> occurrences_;
    std::uint32_t sigma_ = 0;
};

} // namespace pbwtphi
