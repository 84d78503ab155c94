#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "appaudit/bytes.hpp"

namespace appaudit {

// Android resource container chunk codes (all multi-byte values little-endian).
inline constexpr std::uint16_t kChunkStringPool = 0x0001;
inline constexpr std::uint16_t kChunkResourceTable = 0x0002;
inline constexpr std::uint16_t kChunkXml = 0x0003;
inline constexpr std::uint16_t kChunkXmlStartNamespace = 0x0100;
inline constexpr std::uint16_t kChunkXmlEndNamespace = 0x0101;
inline constexpr std::uint16_t kChunkXmlStartElement = 0x0102;
inline constexpr std::uint16_t kChunkXmlEndElement = 0x0103;
inline constexpr std::uint16_t kChunkXmlCdata = 0x0104;
inline constexpr std::uint16_t kChunkXmlResourceMap = 0x0180;
inline constexpr std::uint16_t kChunkTablePackage = 0x0200;
inline constexpr std::uint16_t kChunkTableType = 0x0201;
inline constexpr std::uint16_t kChunkTableTypeSpec = 0x0202;

// Res_value data types.
inline constexpr std::uint8_t kTypeNull = 0x00;
inline constexpr std::uint8_t kTypeReference = 0x01;
inline constexpr std::uint8_t kTypeAttribute = 0x02;
inline constexpr std::uint8_t kTypeString = 0x03;
inline constexpr std::uint8_t kTypeFloat = 0x04;
inline constexpr std::uint8_t kTypeIntDec = 0x10;
inline constexpr std::uint8_t kTypeIntHex = 0x11;
inline constexpr std::uint8_t kTypeIntBoolean = 0x12;

struct ChunkHeader {
    std::uint16_t chunk_type = 0;
    std::uint16_t header_size = 0;
    std::uint32_t chunk_size = 0;
};

/// Reads and validates a chunk header at the reader's position. Ensures
/// header_size <= chunk_size and chunk_size fits in the remaining input.
ChunkHeader read_chunk_header(ByteReader& r);

enum class PoolEncoding { kUtf8, kUtf16 };

struct StringPool {
    std::vector<std::string> strings;      // decoded to UTF-8
    PoolEncoding encoding = PoolEncoding::kUtf16;
    bool sorted_flag = false;
    std::vector<std::string> warnings;     // lossy decodes, discarded styles
};

/// Parses a string-pool chunk (code 0x0001). Invalid text decodes lossily to
/// U+FFFD with a warning; style runs are parsed and discarded.
StringPool parse_string_pool(std::span<const std::uint8_t> bytes);

struct XmlAttribute {
    std::string ns;        // namespace URI ("" when none)
    std::string name;
    std::string value;     // typed values rendered canonically

    bool operator==(const XmlAttribute&) const = default;
};

struct XmlNode;

struct XmlElement {
    std::string ns;
    std::string name;
    std::vector<XmlAttribute> attributes;
    std::vector<XmlNode> children;

    bool operator==(const XmlElement& other) const;
};

/// Element child: nested element or text run, in document order.
struct XmlNode {
    std::variant<XmlElement, std::string> value;

    bool operator==(const XmlNode&) const = default;
};

struct XmlNamespaceDecl {
    std::string prefix;
    std::string uri;

    bool operator==(const XmlNamespaceDecl&) const = default;
};

struct XmlDocument {
    XmlElement root;
    std::vector<XmlNamespaceDecl> namespaces;
    std::vector<std::string> warnings;

    bool structurally_equal(const XmlDocument& other) const {
        return root == other.root && namespaces == other.namespaces;
    }
};

/// Decodes a binary XML document (chunk code 0x0003). Attribute values are
/// resolved through the embedded string pool; integer, boolean and reference
/// values render as decimal text, "true"/"false" and "@0xNNNNNNNN". Unknown
/// chunk types are skipped with a warning. Truncated chunks, out-of-range
/// string indices and unbalanced nesting raise DecodeError.
XmlDocument decode_axml(std::span<const std::uint8_t> bytes);

/// Depth-first scan for elements with the given (namespace-insensitive) name.
std::vector<const XmlElement*> find_elements(const XmlElement& root, std::string_view name);

/// First attribute with the given local name, ignoring its namespace.
const XmlAttribute* find_attribute(const XmlElement& element, std::string_view name);

} // namespace appaudit
