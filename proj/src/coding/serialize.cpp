#include "cnc/coding/serialize.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace cnc::coding {

namespace {

constexpr char kMagic[4] = {'C', 'N', 'C', '1'};

template <typename T>
void put_le(std::string &buf, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
    }
}

template <typename T>
T get_le(std::string_view bytes) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
    }
    return static_cast<T>(v);
}

} // namespace

void BinaryWriter::u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
void BinaryWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void BinaryWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
}

std::size_t BinaryWriter::begin_record(std::string_view tag, std::uint32_t version) {
    u32(static_cast<std::uint32_t>(tag.size()));
    buf_.append(tag);
    u32(version);
    const std::size_t handle = buf_.size();
    u64(0); // patched by end_record
    return handle;
}

void BinaryWriter::end_record(std::size_t handle) {
    const std::uint64_t len = buf_.size() - handle - sizeof(std::uint64_t);
    std::string patch;
    put_le(patch, len);
    buf_.replace(handle, patch.size(), patch);
}

std::string_view BinaryReader::take(std::size_t n) {
    if (n > data_.size() - pos_) {
        throw FormatError("snapshot truncated");
    }
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(take(1)[0]); }
std::uint32_t BinaryReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t BinaryReader::u64() { return get_le<std::uint64_t>(take(8)); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
    const auto n = u64();
    return std::string(take(n));
}

BinaryReader BinaryReader::record(std::string_view expected_tag, std::uint32_t *version) {
    const auto tag_len = u32();
    const auto tag = take(tag_len);
    if (tag != expected_tag) {
        throw FormatError("expected record '" + std::string(expected_tag) + "', found '" +
                          std::string(tag) + "'");
    }
    const auto v = u32();
    if (version != nullptr) {
        *version = v;
    }
    const auto len = u64();
    return BinaryReader(take(len));
}

std::string BinaryReader::peek_tag() const {
    BinaryReader copy = *this;
    const auto tag_len = copy.u32();
    return std::string(copy.take(tag_len));
}

void BinaryReader::expect_done() const {
    if (!done()) {
        throw FormatError("trailing bytes in record");
    }
}

void write_counts(BinaryWriter &w, const CountTable &counts) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    w.u64(sorted.size());
    for (const auto &[k, c] : sorted) {
        w.u64(k);
        w.u64(c);
    }
}

CountTable read_counts(BinaryReader &r) {
    CountTable out;
    const auto n = r.u64();
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto k = r.u64();
        out[k] = r.u64();
    }
    return out;
}

std::string wrap_snapshot(std::string record) {
    std::string out(kMagic, sizeof(kMagic));
    put_le(out, kSnapshotFormatVersion);
    out += record;
    return out;
}

BinaryReader open_snapshot(std::string_view snapshot) {
    if (snapshot.size() < 8 || std::memcmp(snapshot.data(), kMagic, 4) != 0) {
        throw FormatError("not a model snapshot");
    }
    const auto version = get_le<std::uint32_t>(snapshot.substr(4, 4));
    if (version != kSnapshotFormatVersion) {
        throw FormatError("unsupported snapshot version " + std::to_string(version));
    }
    return BinaryReader(snapshot.substr(8));
}

} // namespace cnc::coding
