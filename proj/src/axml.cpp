#include "appaudit/axml.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

#include "appaudit/errors.hpp"

namespace appaudit {

bool XmlElement::operator==(const XmlElement& other) const {
    return ns == other.ns && name == other.name && attributes == other.attributes &&
           children == other.children;
}

ChunkHeader read_chunk_header(ByteReader& r) {
    std::size_t start = r.pos();
    ChunkHeader h;
    h.chunk_type = r.u16();
    h.header_size = r.u16();
    h.chunk_size = r.u32();
    if (h.header_size < 8 || h.header_size > h.chunk_size) {
        throw DecodeError("truncated chunk: header size " + std::to_string(h.header_size) +
                          " exceeds chunk size " + std::to_string(h.chunk_size));
    }
    if (h.chunk_size > r.size() - start) {
        throw DecodeError("truncated chunk: declared size " + std::to_string(h.chunk_size) +
                          " exceeds remaining input (" + std::to_string(r.size() - start) + " bytes)");
    }
    return h;
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

constexpr std::uint32_t kReplacementChar = 0xFFFD;

std::string utf16le_to_utf8(std::span<const std::uint8_t> units, bool& lossy) {
    std::string out;
    out.reserve(units.size());
    std::size_t n = units.size() / 2;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t u = static_cast<std::uint32_t>(units[2 * i] | (units[2 * i + 1] << 8));
        if (u >= 0xD800 && u <= 0xDBFF) {
            if (i + 1 < n) {
                std::uint32_t lo = static_cast<std::uint32_t>(units[2 * (i + 1)] | (units[2 * (i + 1) + 1] << 8));
                if (lo >= 0xDC00 && lo <= 0xDFFF) {
                    append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
                    ++i;
                    continue;
                }
            }
            lossy = true;
            append_utf8(out, kReplacementChar);
        } else if (u >= 0xDC00 && u <= 0xDFFF) {
            lossy = true;
            append_utf8(out, kReplacementChar);
        } else {
            append_utf8(out, u);
        }
    }
    return out;
}

// Validates UTF-8, replacing malformed sequences with U+FFFD.
std::string sanitize_utf8(std::span<const std::uint8_t> bytes, bool& lossy) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        std::uint8_t b = bytes[i];
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (b < 0x80) {
            len = 1;
            cp = b;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            cp = b & 0x07;
        } else {
            lossy = true;
            append_utf8(out, kReplacementChar);
            ++i;
            continue;
        }
        if (i + len > bytes.size()) {
            lossy = true;
            append_utf8(out, kReplacementChar);
            break;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            if ((bytes[i + k] & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bytes[i + k] & 0x3F);
        }
        if (!ok || (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            lossy = true;
            append_utf8(out, kReplacementChar);
            ++i;
            continue;
        }
        append_utf8(out, cp);
        i += len;
    }
    return out;
}

} // namespace

StringPool parse_string_pool(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    ChunkHeader h = read_chunk_header(r);
    if (h.chunk_type != kChunkStringPool) {
        throw DecodeError("expected string pool chunk (0x0001), got 0x" + std::to_string(h.chunk_type));
    }
    if (h.header_size < 28) throw DecodeError("truncated chunk: string pool header too small");

    std::uint32_t string_count = r.u32();
    std::uint32_t style_count = r.u32();
    std::uint32_t flags = r.u32();
    std::uint32_t strings_start = r.u32();
    std::uint32_t styles_start = r.u32();

    StringPool pool;
    pool.sorted_flag = (flags & 0x1) != 0;
    pool.encoding = (flags & (1u << 8)) ? PoolEncoding::kUtf8 : PoolEncoding::kUtf16;

    std::uint64_t offsets_need = 28ull + 4ull * string_count + 4ull * style_count;
    if (offsets_need > h.chunk_size) throw DecodeError("truncated chunk: string pool offset table exceeds chunk");
    if (strings_start > h.chunk_size && string_count > 0) {
        throw DecodeError("string pool offset-table out of range: stringsStart beyond chunk");
    }

    r.seek(h.header_size);
    std::vector<std::uint32_t> offsets(string_count);
    for (auto& off : offsets) off = r.u32();
    for (std::uint32_t i = 0; i < style_count; ++i) r.u32(); // style offsets, discarded

    const std::size_t data_end = styles_start != 0 && style_count > 0
                                     ? std::min<std::size_t>(h.chunk_size, styles_start)
                                     : h.chunk_size;

    pool.strings.reserve(string_count);
    for (std::uint32_t i = 0; i < string_count; ++i) {
        std::uint64_t pos = static_cast<std::uint64_t>(strings_start) + offsets[i];
        if (pos >= data_end) {
            throw DecodeError("string pool offset-table out of range: string " + std::to_string(i));
        }
        ByteReader sr(bytes.first(data_end), static_cast<std::size_t>(pos));
        bool lossy = false;
        if (pool.encoding == PoolEncoding::kUtf8) {
            std::uint32_t u16len = sr.u8();
            if (u16len & 0x80) u16len = ((u16len & 0x7F) << 8) | sr.u8();
            std::uint32_t u8len = sr.u8();
            if (u8len & 0x80) u8len = ((u8len & 0x7F) << 8) | sr.u8();
            auto data = sr.bytes(u8len);
            pool.strings.push_back(sanitize_utf8(data, lossy));
        } else {
            std::uint32_t len = sr.u16();
            if (len & 0x8000) len = ((len & 0x7FFF) << 16) | sr.u16();
            auto data = sr.bytes(static_cast<std::size_t>(len) * 2);
            pool.strings.push_back(utf16le_to_utf8(data, lossy));
        }
        if (lossy) {
            pool.warnings.push_back("string " + std::to_string(i) +
                                    " contained invalid text; decoded with replacement characters");
        }
    }

    if (style_count > 0) {
        pool.warnings.push_back("string pool carries " + std::to_string(style_count) +
                                " style runs; styles are ignored");
    }
    return pool;
}

namespace {

std::string render_typed_value(std::uint8_t data_type, std::uint32_t data, const StringPool& pool) {
    char buf[32];
    switch (data_type) {
        case kTypeNull:
            return "";
        case kTypeString:
            if (data >= pool.strings.size()) {
                throw DecodeError("string-index-out-of-bounds in attribute value: " + std::to_string(data));
            }
            return pool.strings[data];
        case kTypeIntDec:
            return std::to_string(static_cast<std::int32_t>(data));
        case kTypeIntHex:
            std::snprintf(buf, sizeof(buf), "0x%" PRIx32, data);
            return buf;
        case kTypeIntBoolean:
            return data != 0 ? "true" : "false";
        case kTypeReference:
        case kTypeAttribute:
            std::snprintf(buf, sizeof(buf), "@0x%08" PRIx32, data);
            return buf;
        case kTypeFloat: {
            float f;
            static_assert(sizeof(f) == sizeof(data));
            std::memcpy(&f, &data, sizeof(f));
            std::snprintf(buf, sizeof(buf), "%g", static_cast<double>(f));
            return buf;
        }
        default:
            // Dimensions, fractions, colors: surface the raw word.
            std::snprintf(buf, sizeof(buf), "@0x%08" PRIx32, data);
            return buf;
    }
}

std::string pool_string(const StringPool& pool, std::uint32_t index, const char* what) {
    if (index == 0xFFFFFFFFu) return {};
    if (index >= pool.strings.size()) {
        throw DecodeError(std::string("string-index-out-of-bounds in ") + what + ": " + std::to_string(index));
    }
    return pool.strings[index];
}

} // namespace

XmlDocument decode_axml(std::span<const std::uint8_t> bytes) {
    ByteReader top(bytes);
    ChunkHeader doc_header = read_chunk_header(top);
    if (doc_header.chunk_type != kChunkXml) {
        throw DecodeError("not a binary XML document (expected chunk code 0x0003)");
    }

    XmlDocument doc;
    StringPool pool;
    bool have_pool = false;
    bool have_root = false;

    std::vector<XmlElement> stack; // open elements, innermost last

    std::size_t pos = doc_header.header_size;
    const std::size_t end = doc_header.chunk_size;
    while (pos + 8 <= end) {
        ByteReader r(bytes.first(end), pos);
        ChunkHeader h = read_chunk_header(r);
        const std::size_t node_end = pos + h.chunk_size;

        switch (h.chunk_type) {
            case kChunkStringPool: {
                if (have_pool) {
                    doc.warnings.push_back("multiple string pools; only the first is used");
                    break;
                }
                pool = parse_string_pool(bytes.subspan(pos, h.chunk_size));
                for (auto& w : pool.warnings) doc.warnings.push_back(w);
                have_pool = true;
                break;
            }
            case kChunkXmlResourceMap:
                break; // attribute-resource ids, not needed
            case kChunkXmlStartNamespace: {
                r.seek(pos + h.header_size);
                std::uint32_t prefix = r.u32();
                std::uint32_t uri = r.u32();
                doc.namespaces.push_back({pool_string(pool, prefix, "namespace prefix"),
                                          pool_string(pool, uri, "namespace uri")});
                break;
            }
            case kChunkXmlEndNamespace:
                break;
            case kChunkXmlStartElement: {
                r.seek(pos + h.header_size);
                std::uint32_t ns = r.u32();
                std::uint32_t name = r.u32();
                std::uint16_t attr_start = r.u16();
                std::uint16_t attr_size = r.u16();
                std::uint16_t attr_count = r.u16();
                r.u16(); // id index
                r.u16(); // class index
                r.u16(); // style index

                XmlElement element;
                element.ns = pool_string(pool, ns, "element namespace");
                element.name = pool_string(pool, name, "element name");

                std::size_t attr_pos = pos + h.header_size + attr_start;
                for (std::uint16_t i = 0; i < attr_count; ++i) {
                    if (attr_pos + attr_size > node_end) {
                        throw DecodeError("truncated chunk: attribute record exceeds element chunk");
                    }
                    ByteReader ar(bytes.first(node_end), attr_pos);
                    XmlAttribute attr;
                    attr.ns = pool_string(pool, ar.u32(), "attribute namespace");
                    attr.name = pool_string(pool, ar.u32(), "attribute name");
                    std::uint32_t raw_value = ar.u32();
                    ar.u16();                      // value size
                    ar.u8();                       // res0
                    std::uint8_t data_type = ar.u8();
                    std::uint32_t data = ar.u32();
                    if (raw_value != 0xFFFFFFFFu) {
                        attr.value = pool_string(pool, raw_value, "attribute raw value");
                    } else {
                        attr.value = render_typed_value(data_type, data, pool);
                    }
                    element.attributes.push_back(std::move(attr));
                    attr_pos += attr_size;
                }
                stack.push_back(std::move(element));
                break;
            }
            case kChunkXmlEndElement: {
                r.seek(pos + h.header_size);
                r.u32(); // namespace
                std::uint32_t name = r.u32();
                if (stack.empty()) throw DecodeError("unbalanced element nesting: end without start");
                std::string end_name = pool_string(pool, name, "element name");
                XmlElement closed = std::move(stack.back());
                stack.pop_back();
                if (closed.name != end_name) {
                    throw DecodeError("unbalanced element nesting: <" + closed.name + "> closed by </" + end_name + ">");
                }
                if (stack.empty()) {
                    if (have_root) throw DecodeError("unbalanced element nesting: multiple root elements");
                    doc.root = std::move(closed);
                    have_root = true;
                } else {
                    stack.back().children.push_back(XmlNode{std::move(closed)});
                }
                break;
            }
            case kChunkXmlCdata: {
                r.seek(pos + h.header_size);
                std::uint32_t data = r.u32();
                std::string text = pool_string(pool, data, "cdata");
                if (!stack.empty()) {
                    stack.back().children.push_back(XmlNode{std::move(text)});
                } else {
                    doc.warnings.push_back("text outside any element ignored");
                }
                break;
            }
            default: {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "0x%04x", h.chunk_type);
                doc.warnings.push_back(std::string("skipping unknown chunk type ") + buf);
                break;
            }
        }
        pos = node_end;
    }

    if (!stack.empty()) {
        throw DecodeError("unbalanced element nesting: " + std::to_string(stack.size()) +
                          " element(s) left open at end of document");
    }
    if (!have_root) throw DecodeError("binary XML document has no root element");
    return doc;
}

namespace {

void collect_elements(const XmlElement& element, std::string_view name,
                      std::vector<const XmlElement*>& out) {
    if (element.name == name) out.push_back(&element);
    for (const auto& child : element.children) {
        if (const auto* e = std::get_if<XmlElement>(&child.value)) collect_elements(*e, name, out);
    }
}

} // namespace

std::vector<const XmlElement*> find_elements(const XmlElement& root, std::string_view name) {
    std::vector<const XmlElement*> out;
    collect_elements(root, name, out);
    return out;
}

const XmlAttribute* find_attribute(const XmlElement& element, std::string_view name) {
    for (const auto& attr : element.attributes) {
        if (attr.name == name) return &attr;
    }
    return nullptr;
}

} // namespace appaudit
