#pragma once

#include <map>
#include <string>
#include <vector>

#include "appaudit/axml.hpp"
#include "appaudit/bytes.hpp"

namespace appaudit {

/// Encodes a string pool chunk (code 0x0001) in the requested encoding.
Bytes encode_string_pool(const std::vector<std::string>& strings, PoolEncoding encoding,
                         bool sorted_flag = false);

/// Encodes a document as binary XML (chunk code 0x0003). Attribute values in
/// canonical form re-encode as typed values: "true"/"false" as booleans,
/// canonical decimals as integers, "@0xNNNNNNNN" as references; everything
/// else as pool strings. decode_axml(encode_axml(doc)) is structurally equal
/// to doc.
Bytes encode_axml(const XmlDocument& doc, PoolEncoding encoding = PoolEncoding::kUtf8);

/// String resources for one locale ("" = default), name -> value.
using LocaleStrings = std::map<std::string, std::map<std::string, std::string>>;

/// Encodes a minimal resources.arsc (chunk code 0x0002) holding one package
/// with a "string" type and one configuration per locale.
Bytes encode_resource_table(const std::string& package_name, const LocaleStrings& strings,
                            PoolEncoding encoding = PoolEncoding::kUtf8);

} // namespace appaudit
