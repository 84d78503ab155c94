#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "appaudit/bytes.hpp"

namespace appaudit {

/// Reader over an in-memory zip archive (central-directory based;
/// stored and deflate methods).
class ZipReader {
public:
    struct Entry {
        std::string name;
        std::uint16_t method = 0;        // 0 = stored, 8 = deflate
        std::uint32_t compressed_size = 0;
        std::uint32_t uncompressed_size = 0;
        std::uint32_t crc32 = 0;
        std::uint32_t local_header_offset = 0;
    };

    explicit ZipReader(Bytes data);
    static ZipReader open_file(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const { return entries_; }
    bool contains(const std::string& name) const;
    const Entry* find(const std::string& name) const;

    /// Decompresses one entry. Throws DecodeError on a corrupt stream or a
    /// CRC mismatch.
    Bytes read(const std::string& name) const;
    Bytes read(const Entry& entry) const;

    /// Cheap signature probe: does this byte buffer start like a zip archive?
    static bool looks_like_zip(const Bytes& data);

private:
    Bytes data_;
    std::vector<Entry> entries_;
};

/// Minimal zip writer (stored or deflate entries, single central directory).
class ZipWriter {
public:
    void add(const std::string& name, const Bytes& content, bool deflate = false);
    void add(const std::string& name, const std::string& content, bool deflate = false);

    /// Finalizes the archive and returns its bytes.
    Bytes finish();

    void write_file(const std::filesystem::path& path);

private:
    struct Record {
        std::string name;
        std::uint16_t method;
        std::uint32_t crc;
        std::uint32_t compressed_size;
        std::uint32_t uncompressed_size;
        std::uint32_t offset;
    };

    ByteWriter out_;
    std::vector<Record> records_;
};

Bytes read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const Bytes& data);

} // namespace appaudit
