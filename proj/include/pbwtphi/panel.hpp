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
#include <string_view>
#include <vector>

namespace pbwtphi {

/// Symbol code stored in a panel cell.
using Symbol = std::uint8_t;

/// Haplotype identifier ("color"). External ids are 1-based; 0 and h+1 are
/// the top and bottom sentinels.
using Hap = std::uint32_t;

/// Site index, 1-based.
using Site = std::uint32_t;

/**
 * An h x m matrix of symbol codes, stored row-major.
 *
 * Codes are assigned in ascending byte order of the original characters, so
 * comparing codes compares characters. Rows may repeat.
 */
class HaplotypePanel {
  public:
    HaplotypePanel() = default;

    /// Validates shape and code ranges; throws ArgumentError.
    HaplotypePanel(std::size_t h, std::size_t m, std::vector<Symbol> codes, std::string symbol_table);

    [[nodiscard]] std::size_t h() const noexcept { return h_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::size_t sigma() const noexcept { return symbol_table_.size(); }
    [[nodiscard]] const std::string& symbol_table() const noexcept { return symbol_table_; }
    [[nodiscard]] std::span<const Symbol> codes() const noexcept { return codes_; }

    /// Symbol of haplotype `hap` (1-based) at site `site` (1-based).
    [[nodiscard]] Symbol at(Hap hap, Site site) const noexcept {
        return codes_[(static_cast<std::size_t>(hap) - 1) * m_ + (site - 1)];
    }

    [[nodiscard]] std::span<const Symbol> row(Hap hap) const noexcept {
        return std::span<const Symbol>(codes_).subspan((static_cast<std::size_t>(hap) - 1) * m_, m_);
    }

    friend bool operator==(const HaplotypePanel&, const HaplotypePanel&) = default;

  private:
    std::size_t h_ = 0;
    std::size_t m_ = 0;
    std::vector<Symbol> codes_;
    std::string symbol_table_;
};

/**
 * Parses haplotype-major text: one row per line, one printable non-whitespace
 * character per site. An optional first line "h m" declares the shape.
 * Trailing empty lines are ignored; '\r' before '\n' is stripped.
 */
HaplotypePanel parse_panel(std::string_view text);

/// Renders rows without a header, each followed by '\n'.
std::string render_panel(const HaplotypePanel& panel);

/**
 * Deterministic random panel.
 *
 * Generator: splitmix64 seeded with `seed`; cells are filled row by row and
 * each takes code floor(next() * sigma / 2^64). The codes are then compacted
 * to the symbols that actually occur (order preserving), and code k maps to
 * character k of "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz{|".
 * Throws ArgumentError unless h, m >= 1 and 2 <= sigma <= 64.
 */
HaplotypePanel random_panel(std::size_t h, std::size_t m, std::size_t sigma, std::uint64_t seed);

HaplotypePanel read_panel_file(const std::string& path);
void write_panel_file(const std::string& path, const HaplotypePanel& panel);

/// splitmix64 step; exposed so fixtures and campaigns share one generator.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound) by multiply-shift.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
    }

  private:
    std::uint64_t state_;
};

} // namespace pbwtphi
