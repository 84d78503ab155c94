#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace appaudit {

/// One simple (non-complex) entry pulled out of a compiled resource table.
/// Only string-typed values carry text; other value types are left out.
struct ArscEntry {
    std::string locale;      // "" = default configuration
    std::string type_name;   // e.g. "string"
    std::string key;         // resource entry name
    std::string value;       // decoded string value

    bool operator==(const ArscEntry&) const = default;
};

struct ArscTable {
    std::vector<ArscEntry> entries;
    std::vector<std::string> warnings;
};

/// Parses a resources.arsc blob (chunk code 0x0002) and extracts every
/// string-typed entry across all packages and configurations.
ArscTable parse_resource_table(std::span<const std::uint8_t> bytes);

} // namespace appaudit
