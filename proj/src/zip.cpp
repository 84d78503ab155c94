#include "appaudit/zip.hpp"

#include <algorithm>
#include <fstream>

#include <zlib.h>

#include "appaudit/errors.hpp"

namespace appaudit {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralDirSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::size_t kEocdMinSize = 22;

Bytes inflate_raw(std::span<const std::uint8_t> compressed, std::size_t expected_size) {
    Bytes out(expected_size);
    z_stream zs{};
    // Negative window bits: raw deflate stream, as stored in zip entries.
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw DecodeError("inflateInit failed");
    zs.next_in = const_cast<Bytef*>(compressed.data());
    zs.avail_in = static_cast<uInt>(compressed.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected_size) {
        throw DecodeError("corrupt deflate stream in zip entry");
    }
    return out;
}

Bytes deflate_raw(const Bytes& content) {
    uLong bound = compressBound(static_cast<uLong>(content.size()));
    Bytes out(bound);
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error("deflateInit failed");
    }
    zs.next_in = const_cast<Bytef*>(content.data());
    zs.avail_in = static_cast<uInt>(content.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("deflate failed");
    out.resize(zs.total_out);
    return out;
}

std::uint32_t crc_of(const Bytes& data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, data.empty() ? Z_NULL : data.data(), static_cast<uInt>(data.size())));
}

} // namespace

Bytes read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file_bytes(const std::filesystem::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("short write: " + path.string());
}

bool ZipReader::looks_like_zip(const Bytes& data) {
    return data.size() >= 4 && data[0] == 'P' && data[1] == 'K' &&
           (data[2] == 0x03 || data[2] == 0x05 || data[2] == 0x07);
}

ZipReader::ZipReader(Bytes data) : data_(std::move(data)) {
    if (!looks_like_zip(data_)) throw DecodeError("not a zip archive (bad signature)");

    // Find the end-of-central-directory record by scanning backwards over the
    // trailing comment space.
    if (data_.size() < kEocdMinSize) throw DecodeError("not a zip archive (too small)");
    std::size_t scan_limit = std::min<std::size_t>(data_.size(), kEocdMinSize + 0xFFFF);
    std::optional<std::size_t> eocd_pos;
    for (std::size_t back = kEocdMinSize; back <= scan_limit; ++back) {
        std::size_t pos = data_.size() - back;
        if (data_[pos] == 0x50 && data_[pos + 1] == 0x4b && data_[pos + 2] == 0x05 && data_[pos + 3] == 0x06) {
            eocd_pos = pos;
            break;
        }
    }
    if (!eocd_pos) throw DecodeError("corrupt central directory: no end-of-central-directory record");

    ByteReader eocd(data_, *eocd_pos);
    eocd.u32();                       // signature
    eocd.u16();                       // disk number
    eocd.u16();                       // central directory start disk
    eocd.u16();                       // entries on this disk
    std::uint16_t total_entries = eocd.u16();
    eocd.u32();                       // central directory size
    std::uint32_t cd_offset = eocd.u32();

    if (cd_offset > data_.size()) throw DecodeError("corrupt central directory: offset out of range");
    ByteReader cd(data_, cd_offset);
    for (std::uint16_t i = 0; i < total_entries; ++i) {
        try {
            if (cd.u32() != kCentralDirSig) throw DecodeError("corrupt central directory: bad entry signature");
            cd.u16();                 // version made by
            cd.u16();                 // version needed
            cd.u16();                 // flags
            Entry e;
            e.method = cd.u16();
            cd.u16();                 // mod time
            cd.u16();                 // mod date
            e.crc32 = cd.u32();
            e.compressed_size = cd.u32();
            e.uncompressed_size = cd.u32();
            std::uint16_t name_len = cd.u16();
            std::uint16_t extra_len = cd.u16();
            std::uint16_t comment_len = cd.u16();
            cd.u16();                 // disk start
            cd.u16();                 // internal attributes
            cd.u32();                 // external attributes
            e.local_header_offset = cd.u32();
            auto name_bytes = cd.bytes(name_len);
            e.name.assign(name_bytes.begin(), name_bytes.end());
            cd.skip(extra_len);
            cd.skip(comment_len);
            entries_.push_back(std::move(e));
        } catch (const DecodeError&) {
            throw DecodeError("corrupt central directory: truncated entry " + std::to_string(i));
        }
    }
}

ZipReader ZipReader::open_file(const std::filesystem::path& path) {
    return ZipReader(read_file_bytes(path));
}

bool ZipReader::contains(const std::string& name) const {
    return find(name) != nullptr;
}

const ZipReader::Entry* ZipReader::find(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

Bytes ZipReader::read(const std::string& name) const {
    const Entry* e = find(name);
    if (!e) throw DecodeError("zip entry not found: " + name);
    return read(*e);
}

Bytes ZipReader::read(const Entry& entry) const {
    ByteReader r(data_, entry.local_header_offset);
    if (r.u32() != kLocalHeaderSig) throw DecodeError("corrupt local header for entry: " + entry.name);
    r.u16();                          // version needed
    std::uint16_t flags = r.u16();
    std::uint16_t method = r.u16();
    r.u16();                          // time
    r.u16();                          // date
    r.u32();                          // crc (may be zero with data descriptor)
    r.u32();                          // compressed size
    r.u32();                          // uncompressed size
    std::uint16_t name_len = r.u16();
    std::uint16_t extra_len = r.u16();
    r.skip(name_len);
    r.skip(extra_len);
    (void)flags;

    auto payload = r.bytes(entry.compressed_size);
    Bytes content;
    if (method == 0) {
        if (entry.compressed_size != entry.uncompressed_size) {
            throw DecodeError("stored entry size mismatch: " + entry.name);
        }
        content.assign(payload.begin(), payload.end());
    } else if (method == 8) {
        content = inflate_raw(payload, entry.uncompressed_size);
    } else {
        throw DecodeError("unsupported compression method " + std::to_string(method) + " for entry: " + entry.name);
    }
    if (crc_of(content) != entry.crc32) throw DecodeError("crc mismatch for entry: " + entry.name);
    return content;
}

void ZipWriter::add(const std::string& name, const Bytes& content, bool deflate) {
    Record rec;
    rec.name = name;
    rec.crc = crc_of(content);
    rec.uncompressed_size = static_cast<std::uint32_t>(content.size());
    rec.offset = static_cast<std::uint32_t>(out_.size());

    Bytes payload;
    if (deflate) {
        payload = deflate_raw(content);
        rec.method = 8;
    } else {
        payload = content;
        rec.method = 0;
    }
    rec.compressed_size = static_cast<std::uint32_t>(payload.size());

    out_.u32(kLocalHeaderSig);
    out_.u16(20);                     // version needed
    out_.u16(0);                      // flags
    out_.u16(rec.method);
    out_.u16(0);                      // time
    out_.u16(0x21);                   // date (fixed, keeps output deterministic)
    out_.u32(rec.crc);
    out_.u32(rec.compressed_size);
    out_.u32(rec.uncompressed_size);
    out_.u16(static_cast<std::uint16_t>(name.size()));
    out_.u16(0);                      // extra length
    out_.raw(name);
    out_.raw(payload);
    records_.push_back(std::move(rec));
}

void ZipWriter::add(const std::string& name, const std::string& content, bool deflate) {
    add(name, Bytes(content.begin(), content.end()), deflate);
}

Bytes ZipWriter::finish() {
    std::uint32_t cd_offset = static_cast<std::uint32_t>(out_.size());
    for (const auto& rec : records_) {
        out_.u32(kCentralDirSig);
        out_.u16(20);                 // version made by
        out_.u16(20);                 // version needed
        out_.u16(0);                  // flags
        out_.u16(rec.method);
        out_.u16(0);                  // time
        out_.u16(0x21);               // date
        out_.u32(rec.crc);
        out_.u32(rec.compressed_size);
        out_.u32(rec.uncompressed_size);
        out_.u16(static_cast<std::uint16_t>(rec.name.size()));
        out_.u16(0);                  // extra
        out_.u16(0);                  // comment
        out_.u16(0);                  // disk
        out_.u16(0);                  // internal attrs
        out_.u32(0);                  // external attrs
        out_.u32(rec.offset);
        out_.raw(rec.name);
    }
    std::uint32_t cd_size = static_cast<std::uint32_t>(out_.size()) - cd_offset;
    out_.u32(kEocdSig);
    out_.u16(0);                      // disk
    out_.u16(0);                      // cd disk
    out_.u16(static_cast<std::uint16_t>(records_.size()));
    out_.u16(static_cast<std::uint16_t>(records_.size()));
    out_.u32(cd_size);
    out_.u32(cd_offset);
    out_.u16(0);                      // comment length
    return std::move(out_.data());
}

void ZipWriter::write_file(const std::filesystem::path& path) {
    write_file_bytes(path, finish());
}

} // namespace appaudit
