#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "appaudit/errors.hpp"

namespace appaudit {

using Bytes = std::vector<std::uint8_t>;

/// Bounds-checked little-endian reader over a byte span. Every read throws
/// DecodeError instead of walking past the end of the input.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data, std::size_t pos = 0)
        : data_(data), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    std::size_t size() const { return data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool eof() const { return pos_ >= data_.size(); }

    void seek(std::size_t pos) {
        if (pos > data_.size()) throw DecodeError("seek past end of input");
        pos_ = pos;
    }

    void skip(std::size_t n) { seek(pos_ + n); }

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                          (static_cast<std::uint32_t>(data_[pos_ + 1]) << 8) |
                          (static_cast<std::uint32_t>(data_[pos_ + 2]) << 16) |
                          (static_cast<std::uint32_t>(data_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw DecodeError("truncated input: need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Little-endian append-only writer.
class ByteWriter {
public:
    Bytes& data() { return data_; }
    const Bytes& data() const { return data_; }
    std::size_t size() const { return data_.size(); }

    void u8(std::uint8_t v) { data_.push_back(v); }

    void u16(std::uint16_t v) {
        data_.push_back(static_cast<std::uint8_t>(v));
        data_.push_back(static_cast<std::uint8_t>(v >> 8));
    }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) data_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void raw(std::span<const std::uint8_t> b) { data_.insert(data_.end(), b.begin(), b.end()); }

    void raw(const std::string& s) {
        data_.insert(data_.end(), s.begin(), s.end());
    }

    void pad(std::size_t n, std::uint8_t fill = 0) { data_.insert(data_.end(), n, fill); }

    // Patches a previously written u32 in place.
    void patch_u32(std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) data_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
    }

private:
    Bytes data_;
};

} // namespace appaudit
