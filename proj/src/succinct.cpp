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

#include "pbwtphi/succinct.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

IntSetIndex::IntSetIndex(std::vector<std::uint64_t> values, std::uint64_t universe)
    : values_(std::move(values)), universe_(universe) {
    if (values_.size() >= std::numeric_limits<std::uint32_t>::max())
        throw ArgumentError("integer set too large");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] < 1 || values_[k] > universe_)
            throw ArgumentError("value " + std::to_string(values_[k]) + " outside [1, " + std::to_string(universe_) +
                                "]");
        if (k > 0 && values_[k] <= values_[k - 1])
            throw ArgumentError("values not strictly increasing at rank " + std::to_string(k + 1));
    }
    // About one bucket per element.
    const std::uint64_t per_bucket = values_.empty() ? universe_ + 1 : std::max<std::uint64_t>(1, universe_ / values_.size());
    shift_ = static_cast<unsigned>(std::bit_width(per_bucket) - 1);
    const std::size_t buckets = static_cast<std::size_t>(universe_ >> shift_) + 2;
    directory_.assign(buckets + 1, 0);
    for (std::uint64_t v : values_) ++directory_[(v >> shift_) + 1];
    for (std::size_t b = 1; b < directory_.size(); ++b) directory_[b] += directory_[b - 1];
}

std::uint64_t IntSetIndex::access(std::size_t i) const {
    if (i < 1 || i > values_.size())
        throw RangeError("access rank " + std::to_string(i) + " outside [1, " + std::to_string(values_.size()) + "]");
    return values_[i - 1];
}

std::size_t IntSetIndex::succ(std::uint64_t x) const noexcept {
    if (values_.empty() || x > values_.back()) return values_.size() + 1;
    if (x <= values_.front()) return 1;
    const std::size_t bucket = static_cast<std::size_t>(x >> shift_);
    const auto first = values_.begin() + directory_[bucket];
    const auto last = values_.begin() + directory_[bucket + 1];
    const auto it = std::lower_bound(first, last, x);
    return static_cast<std::size_t>(it - values_.begin()) + 1;
}

std::size_t IntSetIndex::bytes() const noexcept {
    return values_.size() * sizeof(std::uint64_t) + directory_.size() * sizeof(std::uint32_t);
}

SeqRankSelect::SeqRankSelect(std::vector<std::uint32_t> data, std::uint32_t sigma)
    : data_(std::move(data)), sigma_(sigma) {
    if (data_.size() >= std::numeric_limits<std::uint32_t>::max()) throw ArgumentError("sequence too long");
    std::vector<std::vector<std::uint64_t>> positions(sigma_);
    for (std::size_t p = 0; p < data_.size(); ++p) {
        const std::uint32_t c = data_[p];
        if (c < 1 || c > sigma_)
            throw ArgumentError("symbol " + std::to_string(c) + " at position " + std::to_string(p + 1) +
                                " outside [1, " + std::to_string(sigma_) + "]");
        positions[c - 1].push_back(p + 1);
    }
    occurrences_.reserve(sigma_);
    for (auto& list : positions) occurrences_.emplace_back(std::move(list), std::max<std::uint64_t>(1, data_.size()));
}

std::size_t SeqRankSelect::rank(std::uint32_t c, std::size_t i) const {
    if (c < 1 || c > sigma_) throw ArgumentError("symbol " + std::to_string(c) + " outside alphabet");
    if (i == 0) return 0;
    return occurrences_[c - 1].succ(static_cast<std::uint64_t>(std::min(i, data_.size())) + 1) - 1;
}

std::size_t SeqRankSelect::select(std::uint32_t c, std::size_t q) const {
    if (c < 1 || c > sigma_) throw ArgumentError("symbol " + std::to_string(c) + " outside alphabet");
    const auto& occ = occurrences_[c - 1];
    if (q < 1 || q > occ.size())
        throw RangeError("select " + std::to_string(q) + " of symbol " + std::to_string(c) + " outside [1, " +
                         std::to_string(occ.size()) + "]");
    return static_cast<std::size_t>(occ[q]);
}

std::size_t SeqRankSelect::count(std::uint32_t c) const {
    if (c < 1 || c > sigma_) throw ArgumentError("symbol " + std::to_string(c) + " outside alphabet");
    return occurrences_[c - 1].size();
}

std::size_t SeqRankSelect::bytes() const noexcept {
    std::size_t n = data_.size() * sizeof(std::uint32_t);
    for (const auto& occ : occurrences_) n += occ.bytes();
    return n;
}

} // namespace pbwtphi
