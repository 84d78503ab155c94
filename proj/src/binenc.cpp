#include "appaudit/binenc.hpp"

#include <cstdio>
#include <cstdlib>

#include "appaudit/errors.hpp"

namespace appaudit {

namespace {

std::vector<std::uint16_t> utf8_to_utf16(const std::string& s) {
    std::vector<std::uint16_t> out;
    std::size_t i = 0;
    auto bad = [&]() -> std::uint32_t {
        ++i;
        return 0xFFFD;
    };
    while (i < s.size()) {
        std::uint8_t b = static_cast<std::uint8_t>(s[i]);
        std::uint32_t cp;
        if (b < 0x80) {
            cp = b;
            ++i;
        } else if ((b & 0xE0) == 0xC0 && i + 1 < s.size()) {
            cp = ((b & 0x1Fu) << 6) | (static_cast<std::uint8_t>(s[i + 1]) & 0x3F);
            i += 2;
        } else if ((b & 0xF0) == 0xE0 && i + 2 < s.size()) {
            cp = ((b & 0x0Fu) << 12) | ((static_cast<std::uint8_t>(s[i + 1]) & 0x3Fu) << 6) |
                 (static_cast<std::uint8_t>(s[i + 2]) & 0x3F);
            i += 3;
        } else if ((b & 0xF8) == 0xF0 && i + 3 < s.size()) {
            cp = ((b & 0x07u) << 18) | ((static_cast<std::uint8_t>(s[i + 1]) & 0x3Fu) << 12) |
                 ((static_cast<std::uint8_t>(s[i + 2]) & 0x3Fu) << 6) |
                 (static_cast<std::uint8_t>(s[i + 3]) & 0x3F);
            i += 4;
        } else {
            cp = bad();
        }
        if (cp >= 0x10000) {
            cp -= 0x10000;
            out.push_back(static_cast<std::uint16_t>(0xD800 + (cp >> 10)));
            out.push_back(static_cast<std::uint16_t>(0xDC00 + (cp & 0x3FF)));
        } else {
            out.push_back(static_cast<std::uint16_t>(cp));
        }
    }
    return out;
}

void align4(ByteWriter& w) {
    while (w.size() % 4 != 0) w.u8(0);
}

// Deterministic string pool builder: indices follow first insertion order.
class PoolBuilder {
public:
    std::uint32_t intern(const std::string& s) {
        auto it = index_.find(s);
        if (it != index_.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(strings_.size());
        strings_.push_back(s);
        index_.emplace(s, id);
        return id;
    }

    const std::vector<std::string>& strings() const { return strings_; }

private:
    std::vector<std::string> strings_;
    std::map<std::string, std::uint32_t> index_;
};

struct TypedValue {
    std::uint32_t raw_index = 0xFFFFFFFFu;
    std::uint8_t data_type = kTypeString;
    std::uint32_t data = 0;
};

// Canonical-text detection, mirroring how decode_axml renders typed values.
TypedValue encode_attr_value(const std::string& value, PoolBuilder& pool) {
    TypedValue tv;
    if (value == "true") {
        tv.data_type = kTypeIntBoolean;
        tv.data = 0xFFFFFFFFu;
        return tv;
    }
    if (value == "false") {
        tv.data_type = kTypeIntBoolean;
        tv.data = 0;
        return tv;
    }
    if (!value.empty() && (value[0] == '-' || (value[0] >= '0' && value[0] <= '9'))) {
        char* end = nullptr;
        long long parsed = std::strtoll(value.c_str(), &end, 10);
        if (end && *end == '\0' && parsed >= INT32_MIN && parsed <= INT32_MAX &&
            std::to_string(parsed) == value) {
            tv.data_type = kTypeIntDec;
            tv.data = static_cast<std::uint32_t>(static_cast<std::int32_t>(parsed));
            return tv;
        }
    }
    if (value.size() == 11 && value.rfind("@0x", 0) == 0) {
        char* end = nullptr;
        unsigned long parsed = std::strtoul(value.c_str() + 3, &end, 16);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "@0x%08lx", parsed);
        if (end && *end == '\0' && value == buf) {
            tv.data_type = kTypeReference;
            tv.data = static_cast<std::uint32_t>(parsed);
            return tv;
        }
    }
    tv.data_type = kTypeString;
    tv.data = pool.intern(value);
    tv.raw_index = tv.data;
    return tv;
}

void write_res_value(ByteWriter& w, const TypedValue& tv) {
    w.u16(8);          // value size
    w.u8(0);           // res0
    w.u8(tv.data_type);
    w.u32(tv.data);
}

void write_node_header(ByteWriter& w, std::uint16_t type, std::uint32_t size) {
    w.u16(type);
    w.u16(16); // node header size: chunk header + line + comment
    w.u32(size);
    w.u32(0);           // line number
    w.u32(0xFFFFFFFFu); // comment
}

std::uint32_t index_or_none(PoolBuilder& pool, const std::string& s) {
    return s.empty() ? 0xFFFFFFFFu : pool.intern(s);
}

void encode_element(ByteWriter& w, const XmlElement& element, PoolBuilder& pool) {
    const std::uint32_t start_size = 36 + 20 * static_cast<std::uint32_t>(element.attributes.size());
    write_node_header(w, kChunkXmlStartElement, start_size);
    w.u32(index_or_none(pool, element.ns));
    w.u32(pool.intern(element.name));
    w.u16(20); // attribute start
    w.u16(20); // attribute size
    w.u16(static_cast<std::uint16_t>(element.attributes.size()));
    w.u16(0);  // id index
    w.u16(0);  // class index
    w.u16(0);  // style index
    for (const auto& attr : element.attributes) {
        w.u32(index_or_none(pool, attr.ns));
        w.u32(pool.intern(attr.name));
        TypedValue tv = encode_attr_value(attr.value, pool);
        w.u32(tv.raw_index);
        write_res_value(w, tv);
    }

    for (const auto& child : element.children) {
        if (const auto* e = std::get_if<XmlElement>(&child.value)) {
            encode_element(w, *e, pool);
        } else {
            write_node_header(w, kChunkXmlCdata, 28);
            std::uint32_t idx = pool.intern(std::get<std::string>(child.value));
            w.u32(idx);
            write_res_value(w, {idx, kTypeString, idx});
        }
    }

    write_node_header(w, kChunkXmlEndElement, 24);
    w.u32(index_or_none(pool, element.ns));
    w.u32(pool.intern(element.name));
}

} // namespace

Bytes encode_string_pool(const std::vector<std::string>& strings, PoolEncoding encoding,
                         bool sorted_flag) {
    ByteWriter data;
    std::vector<std::uint32_t> offsets;
    offsets.reserve(strings.size());
    for (const auto& s : strings) {
        offsets.push_back(static_cast<std::uint32_t>(data.size()));
        if (encoding == PoolEncoding::kUtf8) {
            std::size_t u16len = utf8_to_utf16(s).size();
            auto emit_len = [&](std::size_t len) {
                if (len > 0x7FFF) throw Error("string too long for pool encoding");
                if (len > 0x7F) {
                    data.u8(static_cast<std::uint8_t>(0x80 | (len >> 8)));
                    data.u8(static_cast<std::uint8_t>(len & 0xFF));
                } else {
                    data.u8(static_cast<std::uint8_t>(len));
                }
            };
            emit_len(u16len);
            emit_len(s.size());
            data.raw(s);
            data.u8(0);
        } else {
            std::vector<std::uint16_t> units = utf8_to_utf16(s);
            if (units.size() > 0x7FFF) throw Error("string too long for pool encoding");
            data.u16(static_cast<std::uint16_t>(units.size()));
            for (std::uint16_t u : units) data.u16(u);
            data.u16(0);
        }
    }
    align4(data);

    ByteWriter w;
    const std::uint32_t header_size = 28;
    const std::uint32_t strings_start = header_size + 4 * static_cast<std::uint32_t>(strings.size());
    const std::uint32_t total = strings_start + static_cast<std::uint32_t>(data.size());
    w.u16(kChunkStringPool);
    w.u16(static_cast<std::uint16_t>(header_size));
    w.u32(total);
    w.u32(static_cast<std::uint32_t>(strings.size()));
    w.u32(0); // style count
    std::uint32_t flags = 0;
    if (sorted_flag) flags |= 0x1;
    if (encoding == PoolEncoding::kUtf8) flags |= (1u << 8);
    w.u32(flags);
    w.u32(strings_start);
    w.u32(0); // styles start
    for (std::uint32_t off : offsets) w.u32(off);
    w.raw(data.data());
    return std::move(w.data());
}

Bytes encode_axml(const XmlDocument& doc, PoolEncoding encoding) {
    PoolBuilder pool;
    ByteWriter body;
    for (const auto& ns : doc.namespaces) {
        write_node_header(body, kChunkXmlStartNamespace, 24);
        body.u32(pool.intern(ns.prefix));
        body.u32(pool.intern(ns.uri));
    }
    encode_element(body, doc.root, pool);
    for (auto it = doc.namespaces.rbegin(); it != doc.namespaces.rend(); ++it) {
        write_node_header(body, kChunkXmlEndNamespace, 24);
        body.u32(pool.intern(it->prefix));
        body.u32(pool.intern(it->uri));
    }

    Bytes pool_chunk = encode_string_pool(pool.strings(), encoding);

    ByteWriter w;
    w.u16(kChunkXml);
    w.u16(8);
    w.u32(static_cast<std::uint32_t>(8 + pool_chunk.size() + body.size()));
    w.raw(pool_chunk);
    w.raw(body.data());
    return std::move(w.data());
}

Bytes encode_resource_table(const std::string& package_name, const LocaleStrings& strings,
                            PoolEncoding encoding) {
    PoolBuilder values;
    PoolBuilder keys;
    // Default configuration first, remaining locales in sorted order; keys in
    // first-use order across that sequence.
    std::vector<std::string> locales;
    if (strings.count("")) locales.push_back("");
    for (const auto& [locale, _] : strings) {
        if (!locale.empty()) locales.push_back(locale);
    }
    for (const auto& locale : locales) {
        for (const auto& [key, value] : strings.at(locale)) {
            keys.intern(key);
            values.intern(value);
        }
    }

    Bytes value_pool = encode_string_pool(values.strings(), encoding);
    Bytes type_pool = encode_string_pool({"string"}, encoding);
    Bytes key_pool = encode_string_pool(keys.strings(), encoding);

    const std::uint32_t entry_count = static_cast<std::uint32_t>(keys.strings().size());

    ByteWriter pkg_body;
    // Type spec for type id 1 ("string").
    pkg_body.u16(kChunkTableTypeSpec);
    pkg_body.u16(16);
    pkg_body.u32(16 + 4 * entry_count);
    pkg_body.u8(1);
    pkg_body.u8(0);
    pkg_body.u16(0);
    pkg_body.u32(entry_count);
    for (std::uint32_t i = 0; i < entry_count; ++i) pkg_body.u32(0);

    for (const auto& locale : locales) {
        const auto& entries = strings.at(locale);
        ByteWriter entry_data;
        std::vector<std::uint32_t> offsets(entry_count, 0xFFFFFFFFu);
        for (std::uint32_t i = 0; i < entry_count; ++i) {
            auto it = entries.find(keys.strings()[i]);
            if (it == entries.end()) continue;
            offsets[i] = static_cast<std::uint32_t>(entry_data.size());
            entry_data.u16(8); // entry size
            entry_data.u16(0); // flags
            entry_data.u32(i); // key index
            entry_data.u16(8); // value size
            entry_data.u8(0);
            entry_data.u8(kTypeString);
            entry_data.u32(values.intern(entries.at(keys.strings()[i])));
        }

        const std::uint32_t config_size = 28;
        const std::uint16_t header_size = static_cast<std::uint16_t>(20 + config_size);
        const std::uint32_t entries_start = header_size + 4 * entry_count;
        pkg_body.u16(kChunkTableType);
        pkg_body.u16(header_size);
        pkg_body.u32(entries_start + static_cast<std::uint32_t>(entry_data.size()));
        pkg_body.u8(1); // type id
        pkg_body.u8(0); // flags
        pkg_body.u16(0);
        pkg_body.u32(entry_count);
        pkg_body.u32(entries_start);
        // ResTable_config
        pkg_body.u32(config_size);
        pkg_body.u32(0); // mcc/mnc
        std::string lang, country;
        if (!locale.empty()) {
            std::size_t dash = locale.find('-');
            lang = locale.substr(0, dash);
            if (dash != std::string::npos) country = locale.substr(dash + 1);
            if (lang.size() != 2 || (!country.empty() && country.size() != 2)) {
                throw Error("resource encoder supports two-letter locale codes only: " + locale);
            }
        }
        pkg_body.u8(lang.empty() ? 0 : static_cast<std::uint8_t>(lang[0]));
        pkg_body.u8(lang.empty() ? 0 : static_cast<std::uint8_t>(lang[1]));
        pkg_body.u8(country.empty() ? 0 : static_cast<std::uint8_t>(country[0]));
        pkg_body.u8(country.empty() ? 0 : static_cast<std::uint8_t>(country[1]));
        pkg_body.pad(config_size - 12); // remaining config fields zeroed
        for (std::uint32_t off : offsets) pkg_body.u32(off);
        pkg_body.raw(entry_data.data());
    }

    const std::uint32_t pkg_header_size = 288;
    const std::uint32_t type_strings_off = pkg_header_size;
    const std::uint32_t key_strings_off = type_strings_off + static_cast<std::uint32_t>(type_pool.size());
    const std::uint32_t pkg_size = key_strings_off + static_cast<std::uint32_t>(key_pool.size()) +
                                   static_cast<std::uint32_t>(pkg_body.size());

    ByteWriter pkg;
    pkg.u16(kChunkTablePackage);
    pkg.u16(static_cast<std::uint16_t>(pkg_header_size));
    pkg.u32(pkg_size);
    pkg.u32(0x7f); // package id
    std::vector<std::uint16_t> name_units = utf8_to_utf16(package_name);
    name_units.resize(128, 0);
    for (std::uint16_t u : name_units) pkg.u16(u);
    pkg.u32(type_strings_off);
    pkg.u32(1); // last public type
    pkg.u32(key_strings_off);
    pkg.u32(entry_count); // last public key
    pkg.u32(0);           // type id offset
    pkg.raw(type_pool);
    pkg.raw(key_pool);
    pkg.raw(pkg_body.data());

    ByteWriter w;
    w.u16(kChunkResourceTable);
    w.u16(12);
    w.u32(static_cast<std::uint32_t>(12 + value_pool.size() + pkg.size()));
    w.u32(1); // package count
    w.raw(value_pool);
    w.raw(pkg.data());
    return std::move(w.data());
}

} // namespace appaudit
