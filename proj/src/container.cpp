#include "appaudit/container.hpp"

#include <algorithm>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "appaudit/arsc.hpp"
#include "appaudit/axml.hpp"
#include "appaudit/errors.hpp"
#include "appaudit/zip.hpp"

namespace appaudit {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr const char* kManifestName = "AndroidManifest.xml";
constexpr const char* kArscName = "resources.arsc";

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// --- binary manifest -> ManifestDoc -------------------------------------

void add_permission(ManifestDoc& doc, const std::string& name) {
    if (name.empty()) return;
    if (std::find(doc.permissions.begin(), doc.permissions.end(), name) == doc.permissions.end()) {
        doc.permissions.push_back(name);
    }
}

void walk_raw_attributes(const XmlElement& element, const std::string& parent_path, ManifestDoc& doc) {
    std::string path = parent_path.empty() ? element.name : parent_path + "/" + element.name;
    for (const auto& attr : element.attributes) {
        doc.raw_attributes.push_back({path, attr.name, attr.value});
    }
    for (const auto& child : element.children) {
        if (const auto* e = std::get_if<XmlElement>(&child.value)) walk_raw_attributes(*e, path, doc);
    }
}

void merge_manifest_document(const XmlDocument& xml, ManifestDoc& doc) {
    for (const auto& w : xml.warnings) doc.warnings.push_back(w);
    if (doc.package_id.empty()) {
        if (const auto* attr = find_attribute(xml.root, "package")) doc.package_id = attr->value;
    }
    for (const XmlElement* perm : find_elements(xml.root, "uses-permission")) {
        if (const auto* attr = find_attribute(*perm, "name")) add_permission(doc, attr->value);
    }
    for (const XmlElement* sdk : find_elements(xml.root, "uses-sdk")) {
        auto parse_int = [](const std::string& s) -> std::optional<int> {
            try {
                std::size_t used = 0;
                int v = std::stoi(s, &used);
                if (used == s.size()) return v;
            } catch (...) {
            }
            return std::nullopt;
        };
        if (const auto* a = find_attribute(*sdk, "minSdkVersion"); a && !doc.min_sdk) {
            doc.min_sdk = parse_int(a->value);
        }
        if (const auto* a = find_attribute(*sdk, "targetSdkVersion"); a && !doc.target_sdk) {
            doc.target_sdk = parse_int(a->value);
        }
    }
    walk_raw_attributes(xml.root, "", doc);
}

// --- text XML (decoded directories) --------------------------------------

XmlElement ptree_to_element(const std::string& name, const pt::ptree& node) {
    XmlElement element;
    // Prefixed names keep the prefix as the namespace part.
    std::size_t colon = name.find(':');
    if (colon != std::string::npos) {
        element.ns = name.substr(0, colon);
        element.name = name.substr(colon + 1);
    } else {
        element.name = name;
    }
    for (const auto& [key, child] : node) {
        if (key == "<xmlattr>") {
            for (const auto& [attr_name, attr_node] : child) {
                XmlAttribute attr;
                std::size_t c = attr_name.find(':');
                if (c != std::string::npos) {
                    attr.ns = attr_name.substr(0, c);
                    attr.name = attr_name.substr(c + 1);
                } else {
                    attr.name = attr_name;
                }
                attr.value = attr_node.get_value<std::string>();
                element.attributes.push_back(std::move(attr));
            }
        } else if (key == "<xmltext>") {
            element.children.push_back(XmlNode{child.get_value<std::string>()});
        } else if (key == "<xmlcomment>") {
            continue;
        } else {
            element.children.push_back(XmlNode{ptree_to_element(key, child)});
        }
    }
    return element;
}

XmlDocument parse_text_xml(const fs::path& file) {
    pt::ptree tree;
    try {
        pt::read_xml(file.string(), tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw DecodeError("XML parse error in " + file.string() + ": " + e.what());
    }
    XmlDocument doc;
    bool have_root = false;
    for (const auto& [key, child] : tree) {
        if (key == "<xmlcomment>" || key == "<xmlattr>") continue;
        if (have_root) throw DecodeError("multiple root elements in " + file.string());
        doc.root = ptree_to_element(key, child);
        have_root = true;
    }
    if (!have_root) throw DecodeError("no root element in " + file.string());
    return doc;
}

// --- APK member access ----------------------------------------------------

XmlDocument decode_manifest_bytes(const Bytes& bytes, const std::string& origin) {
    if (bytes.size() >= 2 && bytes[0] == 0x03 && bytes[1] == 0x00) {
        return decode_axml(bytes);
    }
    throw DecodeError(origin + ": manifest is not binary XML");
}

void extract_strings_from_apk_bytes(const Bytes& apk_bytes, const std::string& origin,
                                    ResourceTable& table) {
    ZipReader zip(apk_bytes);
    const auto* entry = zip.find(kArscName);
    if (!entry) {
        table.warnings.push_back(origin + ": no resources.arsc");
        return;
    }
    ArscTable arsc;
    try {
        arsc = parse_resource_table(zip.read(*entry));
    } catch (const Error& e) {
        table.warnings.push_back(origin + ": unreadable resource table: " + e.what());
        return;
    }
    for (const auto& w : arsc.warnings) table.warnings.push_back(origin + ": " + w);
    for (const auto& e : arsc.entries) {
        if (e.type_name != "string") continue;
        table.entries.emplace(std::make_pair(e.locale, e.key),
                              ResourceTable::Entry{e.value, kArscName});
    }
}

std::string locale_of_values_dir(const std::string& dir_name) {
    // "values" -> default; "values-fr" -> "fr"; "values-fr-rFR" -> "fr-FR".
    if (dir_name == "values") return "";
    std::string qualifier = dir_name.substr(std::string("values-").size());
    std::size_t r = qualifier.find("-r");
    if (r != std::string::npos && r + 2 < qualifier.size()) {
        return qualifier.substr(0, r) + "-" + qualifier.substr(r + 2);
    }
    return qualifier;
}

void extract_strings_from_decoded_dir(const fs::path& root, ResourceTable& table) {
    fs::path res = root / "res";
    if (!fs::is_directory(res)) {
        table.warnings.push_back(root.string() + ": no res/ directory");
        return;
    }
    std::vector<fs::path> values_dirs;
    for (const auto& entry : fs::directory_iterator(res)) {
        if (!entry.is_directory()) continue;
        std::string name = entry.path().filename().string();
        if (name == "values" || name.rfind("values-", 0) == 0) values_dirs.push_back(entry.path());
    }
    std::sort(values_dirs.begin(), values_dirs.end());
    for (const auto& dir : values_dirs) {
        fs::path strings_file = dir / "strings.xml";
        if (!fs::exists(strings_file)) continue;
        std::string locale = locale_of_values_dir(dir.filename().string());
        XmlDocument doc;
        try {
            doc = parse_text_xml(strings_file);
        } catch (const Error& e) {
            table.warnings.push_back(std::string("skipping unreadable resource file: ") + e.what());
            continue;
        }
        for (const XmlElement* s : find_elements(doc.root, "string")) {
            const auto* name = find_attribute(*s, "name");
            if (!name) continue;
            std::string value;
            for (const auto& child : s->children) {
                if (const auto* text = std::get_if<std::string>(&child.value)) value += *text;
            }
            table.entries.emplace(std::make_pair(locale, name->value),
                                  ResourceTable::Entry{value, strings_file.lexically_relative(root).string()});
        }
    }
}

} // namespace

PackageSource open_package(const fs::path& path) {
    if (!fs::exists(path)) throw Error("package path does not exist: " + path.string());

    PackageSource source;
    source.path = path;

    if (fs::is_directory(path)) {
        if (!fs::exists(path / kManifestName)) {
            throw DecodeError("not a decoded package directory (no AndroidManifest.xml): " + path.string());
        }
        source.kind = PackageSource::Kind::kDecodedDir;
        return source;
    }

    Bytes data = read_file_bytes(path);
    if (!ZipReader::looks_like_zip(data)) {
        throw DecodeError("not a zip archive: " + path.string());
    }
    ZipReader zip(std::move(data));
    if (zip.contains(kManifestName)) {
        source.kind = PackageSource::Kind::kApk;
        return source;
    }
    for (const auto& entry : zip.entries()) {
        if (has_suffix(entry.name, ".apk")) source.members.push_back(entry.name);
        if (entry.name == "manifest.json") source.bundle_manifest = entry.name;
    }
    if (source.members.empty()) {
        throw DecodeError("zip holds neither AndroidManifest.xml nor inner .apk entries: " + path.string());
    }
    source.kind = PackageSource::Kind::kXapk;
    return source;
}

ManifestDoc extract_manifest(const PackageSource& source) {
    ManifestDoc doc;
    switch (source.kind) {
        case PackageSource::Kind::kApk: {
            ZipReader zip = ZipReader::open_file(source.path);
            const auto* entry = zip.find(kManifestName);
            if (!entry) throw DecodeError("manifest entry missing in " + source.path.string());
            merge_manifest_document(decode_manifest_bytes(zip.read(*entry), source.path.string()), doc);
            break;
        }
        case PackageSource::Kind::kXapk: {
            ZipReader outer = ZipReader::open_file(source.path);
            bool any = false;
            for (const auto& member : source.members) {
                Bytes inner_bytes = outer.read(member);
                ZipReader inner(std::move(inner_bytes));
                const auto* entry = inner.find(kManifestName);
                if (!entry) {
                    doc.warnings.push_back(member + ": manifest entry missing");
                    continue;
                }
                merge_manifest_document(decode_manifest_bytes(inner.read(*entry), member), doc);
                any = true;
            }
            if (!any) throw DecodeError("manifest entry missing in every member of " + source.path.string());
            break;
        }
        case PackageSource::Kind::kDecodedDir: {
            fs::path file = source.path / kManifestName;
            if (!fs::exists(file)) throw DecodeError("manifest entry missing in " + source.path.string());
            merge_manifest_document(parse_text_xml(file), doc);
            break;
        }
    }
    return doc;
}

ResourceTable extract_string_resources(const PackageSource& source) {
    ResourceTable table;
    switch (source.kind) {
        case PackageSource::Kind::kApk:
            extract_strings_from_apk_bytes(read_file_bytes(source.path), source.path.string(), table);
            break;
        case PackageSource::Kind::kXapk: {
            ZipReader outer = ZipReader::open_file(source.path);
            for (const auto& member : source.members) {
                try {
                    extract_strings_from_apk_bytes(outer.read(member), member, table);
                } catch (const Error& e) {
                    table.warnings.push_back(member + ": unreadable member: " + e.what());
                }
            }
            break;
        }
        case PackageSource::Kind::kDecodedDir:
            extract_strings_from_decoded_dir(source.path, table);
            break;
    }
    if (table.entries.empty()) table.low_string_yield = true;
    return table;
}

} // namespace appaudit
