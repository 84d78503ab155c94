#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace appaudit {

/// An openable package: a single APK archive, an XAPK bundle of inner APKs,
/// or a directory of already-decoded text resources.
struct PackageSource {
    enum class Kind { kApk, kXapk, kDecodedDir };

    Kind kind = Kind::kApk;
    std::filesystem::path path;
    std::vector<std::string> members;          // inner .apk entry names (XAPK only)
    std::optional<std::string> bundle_manifest; // XAPK manifest.json entry, if any
};

/// Detects the package kind by content, not extension: a zip with a root
/// AndroidManifest.xml is an APK; a zip holding inner *.apk entries is an
/// XAPK; a directory with a text AndroidManifest.xml is a decoded tree.
PackageSource open_package(const std::filesystem::path& path);

struct RawAttribute {
    std::string element_path; // e.g. "manifest/application/activity"
    std::string name;
    std::string value;

    bool operator==(const RawAttribute&) const = default;
};

struct ManifestDoc {
    std::string package_id;
    std::vector<std::string> permissions;      // deduplicated, declaration order
    std::optional<int> min_sdk;
    std::optional<int> target_sdk;
    std::vector<RawAttribute> raw_attributes;  // diagnostics
    std::vector<std::string> warnings;
};

/// Decodes and merges the manifest(s) of a package. XAPK members contribute
/// the union of their permission declarations in first-seen order.
ManifestDoc extract_manifest(const PackageSource& source);

struct ResourceTable {
    struct Entry {
        std::string value;
        std::string provenance;                // "resources.arsc" or source file path

        bool operator==(const Entry&) const = default;
    };

    // (locale, resource name) -> entry; locale "" is the default locale.
    std::map<std::pair<std::string, std::string>, Entry> entries;
    bool low_string_yield = false;
    std::vector<std::string> warnings;

    const Entry* find(const std::string& locale, const std::string& name) const {
        auto it = entries.find({locale, name});
        return it == entries.end() ? nullptr : &it->second;
    }
};

/// Recovers user-facing string resources. APK/XAPK packages read string-typed
/// values from resources.arsc (all configurations); decoded directories scan
/// every res/values*/strings.xml. Merging across XAPK members is first-wins
/// per key. Zero recovered strings sets the low-string-yield flag.
ResourceTable extract_string_resources(const PackageSource& source);

} // namespace appaudit
