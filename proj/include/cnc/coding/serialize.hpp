#pragma once

// Deterministic binary snapshots of model sufficient statistics.
//
// All integers are little-endian fixed width, doubles are their IEEE-754 bit
// pattern as u64. A record is
//
//     u32 tag-length | tag bytes | u32 record-version | u64 payload-length | payload
//
// and records nest (a payload may contain further records). A snapshot is the
// 4-byte magic "CNC1", a u32 format version, then exactly one record. Layout
// details per model live in docs/serialization.md.

#include <cstdint>
#include <unordered_map>
#include <string>
#include <string_view>
#include <vector>

namespace cnc::coding {

inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

class BinaryWriter {
public:
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void bytes(std::string_view s) { buf_.append(s); }

    // Opens a record; returns a handle for end_record.
    std::size_t begin_record(std::string_view tag, std::uint32_t version);
    void end_record(std::size_t handle);

    const std::string &buffer() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();

    // Reads a record header, checks the tag and returns a reader over the
    // payload. The version is written to *version when non-null.
    BinaryReader record(std::string_view expected_tag, std::uint32_t *version = nullptr);
    // Reads the tag of the next record without consuming it.
    std::string peek_tag() const;

    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    std::string_view take(std::size_t n);

    std::string_view data_;
    std::size_t pos_ = 0;
};

// Helpers for the count tables every estimator carries. Keys are written in
// ascending order so equal tables produce equal bytes.
using CountTable = std::unordered_map<std::uint64_t, std::uint64_t>;

void write_counts(BinaryWriter &w, const CountTable &counts);
CountTable read_counts(BinaryReader &r);

std::string wrap_snapshot(std::string record);
BinaryReader open_snapshot(std::string_view snapshot);

} // namespace cnc::coding
