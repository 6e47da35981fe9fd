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

#include "pbwtphi/panel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pbwtphi/errors.hpp"

namespace pbwtphi {

namespace {

constexpr std::string_view kRandomAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz{|";

bool is_symbol_char(char ch) {
    const auto u = static_cast<unsigned char>(ch);
    return u >= 0x21 && u <= 0x7e;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

bool parse_count(std::string_view token, std::size_t& out) {
    if (token.empty()) return false;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

} // namespace

HaplotypePanel::HaplotypePanel(std::size_t h, std::size_t m, std::vector<Symbol> codes, std::string symbol_table)
    : h_(h), m_(m), codes_(std::move(codes)), symbol_table_(std::move(symbol_table)) {
    if (h_ == 0 || m_ == 0) throw ArgumentError("panel needs h >= 1 and m >= 1");
    if (codes_.size() != h_ * m_) throw ArgumentError("panel code count is not h*m");
    if (symbol_table_.empty() || symbol_table_.size() > 256) throw ArgumentError("symbol table size out of range");
    for (std::size_t k = 1; k < symbol_table_.size(); ++k) {
        if (static_cast<unsigned char>(symbol_table_[k - 1]) >= static_cast<unsigned char>(symbol_table_[k]))
            throw ArgumentError("symbol table must be strictly increasing");
    }
    const auto sigma = symbol_table_.size();
    if (std::ranges::any_of(codes_, [sigma](Symbol s) { return s >= sigma; }))
        throw ArgumentError("panel code out of range for its alphabet");
}

HaplotypePanel parse_panel(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(0, 1, 0, "empty panel input");

    std::size_t first_row = 0;
    std::size_t declared_h = 0;
    std::size_t declared_m = 0;
    bool has_header = false;
    if (lines[0].find_first_of(" \t") != std::string_view::npos) {
        std::istringstream header{std::string(lines[0])};
        std::string a, b, rest;
        header >> a >> b >> rest;
        if (!rest.empty() || !parse_count(a, declared_h) || !parse_count(b, declared_m))
            throw ParseError(1, 2, 0, "malformed header, expected \"h m\"");
        has_header = true;
        first_row = 1;
    }

    const std::size_t h = lines.size() - first_row;
    if (h == 0) throw ParseError(lines.size(), 1, 0, "panel has no rows");
    const std::size_t m = lines[first_row].size();

    std::array<bool, 256> present{};
    for (std::size_t r = first_row; r < lines.size(); ++r) {
        const auto line = lines[r];
        if (line.size() != m || m == 0)
            throw ParseError(r + 1, m, line.size(),
                             "expected " + std::to_string(m) + " symbols, got " + std::to_string(line.size()));
        for (char ch : line) {
            if (!is_symbol_char(ch))
                throw ParseError(r + 1, m, line.size(), "non-printable or whitespace symbol");
            present[static_cast<unsigned char>(ch)] = true;
        }
    }
    if (has_header && (declared_h != h || declared_m != m))
        throw ParseError(1, declared_h, h,
                         "header declares " + std::to_string(declared_h) + "x" + std::to_string(declared_m) +
                             " but body is " + std::to_string(h) + "x" + std::to_string(m));

    std::string table;
    std::array<Symbol, 256> code_of{};
    for (int ch = 0; ch < 256; ++ch) {
        if (present[ch]) {
            code_of[ch] = static_cast<Symbol>(table.size());
            table.push_back(static_cast<char>(ch));
        }
    }
    std::vector<Symbol> codes;
    codes.reserve(h * m);
    for (std::size_t r = first_row; r < lines.size(); ++r)
        for (char ch : lines[r]) codes.push_back(code_of[static_cast<unsigned char>(ch)]);
    return HaplotypePanel(h, m, std::move(codes), std::move(table));
}

std::string render_panel(const HaplotypePanel& panel) {
    std::string out;
    out.reserve(panel.h() * (panel.m() + 1));
    const auto& table = panel.symbol_table();
    for (Hap c = 1; c <= panel.h(); ++c) {
        for (Symbol s : panel.row(c)) out.push_back(table[s]);
        out.push_back('\n');
    }
    return out;
}

HaplotypePanel random_panel(std::size_t h, std::size_t m, std::size_t sigma, std::uint64_t seed) {
    if (h == 0 || m == 0) throw ArgumentError("random_panel needs h >= 1 and m >= 1");
    if (sigma < 2 || sigma > kRandomAlphabet.size()) throw ArgumentError("random_panel needs 2 <= sigma <= 64");
    SplitMix64 rng(seed);
    std::vector<Symbol> codes(h * m);
    std::array<bool, 64> used{};
    for (auto& code : codes) {
        code = static_cast<Symbol>(rng.below(sigma));
        used[code] = true;
    }
    std::array<Symbol, 64> remap{};
    std::string table;
    for (std::size_t k = 0; k < sigma; ++k) {
        if (used[k]) {
            remap[k] = static_cast<Symbol>(table.size());
            table.push_back(kRandomAlphabet[k]);
        }
    }
    for (auto& code : codes) code = remap[code];
    return HaplotypePanel(h, m, std::move(codes), std::move(table));
}

HaplotypePanel read_panel_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open panel file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_panel(buf.str());
}

void write_panel_file(const std::string& path, const HaplotypePanel& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write panel file: " + path);
    out << render_panel(panel);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace pbwtphi
