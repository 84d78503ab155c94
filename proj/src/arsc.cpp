#include "appaudit/arsc.hpp"

#include <cstdio>

#include "appaudit/axml.hpp"
#include "appaudit/bytes.hpp"
#include "appaudit/errors.hpp"

namespace appaudit {

namespace {

constexpr std::uint16_t kEntryFlagComplex = 0x0001;
constexpr std::uint8_t kTypeFlagSparse = 0x01;

// Locale halves are stored as two ASCII bytes, or packed 3-letter codes with
// the high bit set.
std::string unpack_locale_part(std::uint8_t b0, std::uint8_t b1) {
    if (b0 == 0 && b1 == 0) return {};
    if (b0 & 0x80) {
        std::uint16_t v = static_cast<std::uint16_t>(((b1 & 0x7F) << 8) | b0);
        std::string out;
        out.push_back(static_cast<char>('a' + (v & 0x1F)));
        out.push_back(static_cast<char>('a' + ((v >> 5) & 0x1F)));
        out.push_back(static_cast<char>('a' + ((v >> 10) & 0x1F)));
        return out;
    }
    std::string out;
    out.push_back(static_cast<char>(b0));
    out.push_back(static_cast<char>(b1));
    return out;
}

struct TypeChunkResult {
    std::string locale;
};

void parse_type_chunk(std::span<const std::uint8_t> chunk, const StringPool& global_pool,
                      const StringPool& type_pool, const StringPool& key_pool,
                      ArscTable& table) {
    ByteReader r(chunk);
    ChunkHeader h = read_chunk_header(r);

    std::uint8_t type_id = r.u8();
    std::uint8_t flags = r.u8();
    r.u16(); // reserved
    std::uint32_t entry_count = r.u32();
    std::uint32_t entries_start = r.u32();

    if (flags & kTypeFlagSparse) {
        table.warnings.push_back("sparse type chunk skipped");
        return;
    }
    if (type_id == 0 || type_id > type_pool.strings.size()) {
        table.warnings.push_back("type chunk with out-of-range type id " + std::to_string(type_id) + " skipped");
        return;
    }
    const std::string& type_name = type_pool.strings[type_id - 1];

    // ResTable_config: size, then mcc/mnc, then language and country bytes.
    std::uint32_t config_size = r.u32();
    if (config_size < 8 || r.pos() - 4 + config_size > h.chunk_size) {
        throw DecodeError("truncated chunk: resource config exceeds type chunk");
    }
    r.u32(); // imsi (mcc/mnc)
    std::uint8_t lang0 = r.u8(), lang1 = r.u8();
    std::uint8_t country0 = r.u8(), country1 = r.u8();
    std::string locale = unpack_locale_part(lang0, lang1);
    std::string country = unpack_locale_part(country0, country1);
    if (!country.empty()) locale += "-" + country;

    if (h.header_size + 4ull * entry_count > h.chunk_size) {
        throw DecodeError("truncated chunk: type entry offsets exceed chunk");
    }
    ByteReader offsets(chunk, h.header_size);
    for (std::uint32_t i = 0; i < entry_count; ++i) {
        std::uint32_t off = offsets.u32();
        if (off == 0xFFFFFFFFu) continue;
        std::uint64_t at = static_cast<std::uint64_t>(entries_start) + off;
        if (at + 8 > h.chunk_size) throw DecodeError("truncated chunk: entry offset out of range");
        ByteReader er(chunk, static_cast<std::size_t>(at));
        er.u16(); // entry size
        std::uint16_t entry_flags = er.u16();
        std::uint32_t key_index = er.u32();
        if (key_index >= key_pool.strings.size()) {
            throw DecodeError("string-index-out-of-bounds in entry key: " + std::to_string(key_index));
        }
        if (entry_flags & kEntryFlagComplex) {
            continue; // bags (styles, arrays) carry no direct string value
        }
        er.u16(); // value size
        er.u8();  // res0
        std::uint8_t data_type = er.u8();
        std::uint32_t data = er.u32();
        if (data_type != kTypeString) continue;
        if (data >= global_pool.strings.size()) {
            throw DecodeError("string-index-out-of-bounds in entry value: " + std::to_string(data));
        }
        table.entries.push_back({locale, type_name, key_pool.strings[key_index], global_pool.strings[data]});
    }
}

void parse_package(std::span<const std::uint8_t> chunk, const StringPool& global_pool, ArscTable& table) {
    ByteReader r(chunk);
    ChunkHeader h = read_chunk_header(r);
    r.u32();                               // package id
    r.skip(256);                           // package name, UTF-16, fixed width
    std::uint32_t type_strings_off = r.u32();
    r.u32();                               // last public type
    std::uint32_t key_strings_off = r.u32();

    auto pool_at = [&](std::uint32_t off, const char* what) {
        if (off == 0 || off + 8 > h.chunk_size) {
            throw DecodeError(std::string("truncated chunk: ") + what + " pool offset out of range");
        }
        ByteReader pr(chunk, off);
        ChunkHeader ph = read_chunk_header(pr);
        if (ph.chunk_type != kChunkStringPool) {
            throw DecodeError(std::string(what) + " pool missing at declared offset");
        }
        return parse_string_pool(chunk.subspan(off, ph.chunk_size));
    };
    StringPool type_pool = pool_at(type_strings_off, "type-name");
    StringPool key_pool = pool_at(key_strings_off, "key-name");
    for (auto& w : type_pool.warnings) table.warnings.push_back(w);
    for (auto& w : key_pool.warnings) table.warnings.push_back(w);

    std::size_t pos = h.header_size;
    while (pos + 8 <= h.chunk_size) {
        ByteReader cr(chunk.first(h.chunk_size), pos);
        ChunkHeader ch = read_chunk_header(cr);
        switch (ch.chunk_type) {
            case kChunkStringPool:
            case kChunkTableTypeSpec:
                break;
            case kChunkTableType:
                parse_type_chunk(chunk.subspan(pos, ch.chunk_size), global_pool, type_pool, key_pool, table);
                break;
            default: {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "0x%04x", ch.chunk_type);
                table.warnings.push_back(std::string("skipping unknown package sub-chunk ") + buf);
                break;
            }
        }
        pos += ch.chunk_size;
    }
}

} // namespace

ArscTable parse_resource_table(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    ChunkHeader h = read_chunk_header(r);
    if (h.chunk_type != kChunkResourceTable) {
        throw DecodeError("not a resource table (expected chunk code 0x0002)");
    }
    r.u32(); // package count

    ArscTable table;
    StringPool global_pool;
    bool have_pool = false;

    std::size_t pos = h.header_size;
    while (pos + 8 <= h.chunk_size) {
        ByteReader cr(bytes.first(h.chunk_size), pos);
        ChunkHeader ch = read_chunk_header(cr);
        switch (ch.chunk_type) {
            case kChunkStringPool:
                if (!have_pool) {
                    global_pool = parse_string_pool(bytes.subspan(pos, ch.chunk_size));
                    for (auto& w : global_pool.warnings) table.warnings.push_back(w);
                    have_pool = true;
                }
                break;
            case kChunkTablePackage:
                if (!have_pool) throw DecodeError("resource table package appears before value string pool");
                parse_package(bytes.subspan(pos, ch.chunk_size), global_pool, table);
                break;
            default: {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "0x%04x", ch.chunk_type);
                table.warnings.push_back(std::string("skipping unknown table chunk ") + buf);
                break;
            }
        }
        pos += ch.chunk_size;
    }
    return table;
}

} // namespace appaudit
