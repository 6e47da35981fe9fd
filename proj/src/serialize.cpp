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

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "pbwtphi/errors.hpp"
#include "pbwtphi/phi_index.hpp"

namespace pbwtphi {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'B', 'W', 'T', 'P', 'H', 'I', '1'};
constexpr std::uint64_t kVersion = 1;

class Writer {
  public:
    void u64(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
    void u32(std::uint32_t v) {
        for (int b = 0; b < 4; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
    void array(const std::vector<std::uint64_t>& v) {
        for (auto x : v) u64(x);
    }
    void array32(const std::vector<std::uint32_t>& v) {
        for (auto x : v) u32(x);
    }
    void header(Variant variant, Direction dir, std::uint64_t h, std::uint64_t m, std::uint64_t d,
                std::uint64_t alpha) {
        out_.insert(out_.end(), kMagic.begin(), kMagic.end());
        u64(kVersion);
        u64(static_cast<std::uint64_t>(variant));
        u64(static_cast<std::uint64_t>(dir));
        u64(h);
        u64(m);
        u64(d);
        u64(alpha);
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

  private:
    std::vector<std::uint8_t> out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    [[nodiscard]] std::size_t offset() const noexcept { return pos_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    std::uint64_t u64() {
        need(8, 1);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
        pos_ += 8;
        return v;
    }

    std::vector<std::uint64_t> array(std::uint64_t n) {
        need(8, n);
        std::vector<std::uint64_t> v(n);
        for (auto& x : v) x = u64();
        return v;
    }

    std::vector<std::uint32_t> array32(std::uint64_t n) {
        need(4, n);
        std::vector<std::uint32_t> v(n);
        for (auto& x : v) {
            x = 0;
            for (int b = 0; b < 4; ++b) x |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
            pos_ += 4;
        }
        return v;
    }

    void magic() {
        if (bytes_.size() < kMagic.size() || std::memcmp(bytes_.data(), kMagic.data(), kMagic.size()) != 0)
            throw FormatError(0, "bad magic");
        pos_ = kMagic.size();
    }

  private:
    // Checked before allocating so a corrupt count cannot trigger a huge allocation.
    void need(std::uint64_t width, std::uint64_t count) const {
        if (count > remaining() / width)
            throw FormatError(pos_, "truncated: need " + std::to_string(count) + " x " + std::to_string(width) +
                                        " bytes, have " + std::to_string(remaining()));
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

struct Header {
    Variant variant;
    Direction direction;
    std::uint64_t h, m, d, alpha;
};

Header read_header(Reader& in) {
    in.magic();
    Header hd{};
    if (const auto version = in.u64(); version != kVersion)
        throw FormatError(8, "unsupported version " + std::to_string(version));
    const auto variant = in.u64();
    if (variant < 1 || variant > 3) throw FormatError(16, "unknown variant tag " + std::to_string(variant));
    hd.variant = static_cast<Variant>(variant);
    const auto dir = in.u64();
    if (dir > 1) throw FormatError(24, "unknown direction tag " + std::to_string(dir));
    hd.direction = static_cast<Direction>(dir);
    hd.h = in.u64();
    if (hd.h < 1 || hd.h > 0xffffffffULL) throw FormatError(32, "h out of range");
    hd.m = in.u64();
    if (hd.m < 1 || hd.m > 0xffffffffULL) throw FormatError(40, "m out of range");
    hd.d = in.u64();
    const std::uint64_t want_d = hd.variant == Variant::baseline ? 0 : 2;
    if (hd.d != want_d) throw FormatError(48, "d must be " + std::to_string(want_d) + " for this variant");
    hd.alpha = in.u64();
    return hd;
}

template <class Build> auto finish(Reader& in, std::size_t payload_offset, Build&& build) {
    if (in.remaining() != 0) throw FormatError(in.offset(), "trailing bytes after index payload");
    try {
        return build();
    } catch (const ConsistencyError& e) {
        throw FormatError(payload_offset, std::string("inconsistent payload: ") + e.what());
    }
}

AnyPhiIndex decode(std::span<const std::uint8_t> bytes, std::optional<Variant> expect) {
    Reader in(bytes);
    const Header hd = read_header(in);
    if (expect && hd.variant != *expect)
        throw FormatError(16, "expected a " + to_string(*expect) + " index, found " + to_string(hd.variant));
    const std::size_t payload = in.offset();
    switch (hd.variant) {
    case Variant::v1: {
        auto x = in.array(hd.h);
        auto e = in.array(hd.alpha);
        auto c = in.array(hd.alpha);
        auto iota = in.array(hd.alpha);
        const std::size_t p_offset = in.offset();
        auto p = in.array(hd.alpha);
        return finish(in, payload, [&]() -> AnyPhiIndex {
            auto idx = PhiIndexV1::from_arrays(hd.direction, hd.h, hd.m, std::move(x), std::move(e), std::move(c),
                                               std::move(iota));
            if (idx.p_values() != p) throw FormatError(p_offset, "P does not match T endpoints");
            return idx;
        });
    }
    case Variant::v2: {
        auto x = in.array(hd.h);
        auto tc = in.array(hd.alpha);
        auto p = in.array(hd.alpha);
        auto ia = in.array32(hd.alpha);
        return finish(in, payload, [&]() -> AnyPhiIndex {
            return PhiIndexV2::from_arrays(hd.direction, hd.h, hd.m, std::move(x), std::move(tc), std::move(p),
                                           std::move(ia));
        });
    }
    case Variant::baseline: {
        auto offsets = in.array(hd.h + 1);
        auto ends = in.array(hd.alpha);
        auto values = in.array(hd.alpha);
        return finish(in, payload, [&]() -> AnyPhiIndex {
            return BaselinePhiIndex::from_arrays(hd.direction, hd.h, hd.m, std::move(offsets), std::move(ends),
                                                 std::move(values));
        });
    }
    }
    throw FormatError(16, "unknown variant");
}

} // namespace

std::vector<std::uint8_t> serialize(const PhiIndexV1& idx) {
    Writer out;
    out.header(Variant::v1, idx.direction(), idx.h(), idx.m(), 2, idx.alpha());
    out.array(idx.x());
    out.array(idx.t_e());
    out.array(idx.t_c());
    out.array(idx.t_iota());
    out.array(idx.p_values());
    return out.take();
}

std::vector<std::uint8_t> serialize(const PhiIndexV2& idx) {
    Writer out;
    out.header(Variant::v2, idx.direction(), idx.h(), idx.m(), 2, idx.alpha());
    out.array(idx.x());
    out.array(idx.tc());
    out.array(idx.p_values());
    out.array32(idx.i_array());
    return out.take();
}

std::vector<std::uint8_t> serialize(const BaselinePhiIndex& idx) {
    Writer out;
    out.header(Variant::baseline, idx.direction(), idx.h(), idx.m(), 0, idx.interval_count());
    out.array(idx.offsets());
    out.array(idx.endpoints());
    out.array(idx.values());
    return out.take();
}

std::vector<std::uint8_t> serialize(const AnyPhiIndex& idx) {
    return std::visit([](const auto& x) { return serialize(x); }, idx);
}

std::uint64_t serialized_size(const AnyPhiIndex& idx) noexcept {
    constexpr std::uint64_t header = 64;
    if (const auto* v1 = std::get_if<PhiIndexV1>(&idx)) return header + 8 * (v1->h() + 4 * v1->alpha());
    if (const auto* v2 = std::get_if<PhiIndexV2>(&idx)) return header + 8 * (v2->h() + 2 * v2->alpha()) + 4 * v2->alpha();
    const auto& b = std::get<BaselinePhiIndex>(idx);
    return header + 8 * (b.h() + 1 + 2 * b.interval_count());
}

AnyPhiIndex deserialize(std::span<const std::uint8_t> bytes) { return decode(bytes, std::nullopt); }

template <class Index> Index deserialize_as(std::span<const std::uint8_t> bytes) {
    constexpr Variant want = std::is_same_v<Index, PhiIndexV1>   ? Variant::v1
                             : std::is_same_v<Index, PhiIndexV2> ? Variant::v2
                                                                 : Variant::baseline;
    return std::get<Index>(decode(bytes, want));
}

template PhiIndexV1 deserialize_as<PhiIndexV1>(std::span<const std::uint8_t>);
template PhiIndexV2 deserialize_as<PhiIndexV2>(std::span<const std::uint8_t>);
template BaselinePhiIndex deserialize_as<BaselinePhiIndex>(std::span<const std::uint8_t>);

void write_index_file(const std::string& path, const AnyPhiIndex& idx) {
    const auto bytes = serialize(idx);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write index file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

AnyPhiIndex read_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

} // namespace pbwtphi
