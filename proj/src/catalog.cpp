#include "appaudit/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "appaudit/errors.hpp"
#include "appaudit/text.hpp"

namespace appaudit {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AgeRating r) {
    switch (r) {
        case AgeRating::kEveryone: return "Everyone";
        case AgeRating::kEveryone10Plus: return "Everyone 10+";
        case AgeRating::kTeen: return "Teen";
        case AgeRating::kMature17Plus: return "Mature 17+";
    }
    return "?";
}

std::string_view to_string(AgeBand b) {
    return b == AgeBand::kUnder13 ? "under13" : "thirteen_plus";
}

std::string_view to_string(TriState t) {
    switch (t) {
        case TriState::kYes: return "yes";
        case TriState::kNo: return "no";
        case TriState::kUnknown: return "unknown";
    }
    return "?";
}

AgeRating age_rating_from_string(std::string_view s) {
    if (s == "Everyone") return AgeRating::kEveryone;
    if (s == "Everyone 10+") return AgeRating::kEveryone10Plus;
    if (s == "Teen") return AgeRating::kTeen;
    if (s == "Mature 17+") return AgeRating::kMature17Plus;
    throw SchemaError("unknown age rating: \"" + std::string(s) + "\"");
}

TriState tri_state_from_string(std::string_view s) {
    if (s == "yes") return TriState::kYes;
    if (s == "no") return TriState::kNo;
    if (s == "unknown") return TriState::kUnknown;
    throw SchemaError("unknown tri-state value: \"" + std::string(s) + "\"");
}

const std::array<std::string_view, 12>& known_categories() {
    static const std::array<std::string_view, 12> kCategories = {
        "Education", "Game", "Art & Design", "Health & Fitness", "Music & Audio",
        "Tools", "Entertainment", "Lifestyle", "Communication", "Social",
        "Photography", "Video Players & Editors"};
    return kCategories;
}

bool is_known_category(std::string_view category) {
    const auto& cats = known_categories();
    return std::find(cats.begin(), cats.end(), category) != cats.end();
}

AgeBand classify_age_band(AgeRating rating) {
    switch (rating) {
        case AgeRating::kEveryone:
        case AgeRating::kEveryone10Plus:
            return AgeBand::kUnder13;
        case AgeRating::kTeen:
        case AgeRating::kMature17Plus:
            return AgeBand::kThirteenPlus;
    }
    return AgeBand::kThirteenPlus;
}

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::kAgeRating: return "age_rating";
        case Dimension::kCategory: return "category";
        case Dimension::kCountry: return "country";
        case Dimension::kCategoryByAgeRating: return "category_by_age_rating";
    }
    return "?";
}

std::optional<Dimension> dimension_from_string(std::string_view s) {
    if (s == "age_rating" || s == "age-rating") return Dimension::kAgeRating;
    if (s == "category") return Dimension::kCategory;
    if (s == "country") return Dimension::kCountry;
    if (s == "category_by_age_rating" || s == "category-by-age-rating") return Dimension::kCategoryByAgeRating;
    return std::nullopt;
}

double round_percent(std::size_t count, std::size_t total) {
    if (total == 0) return 0.0;
    double pct = 100.0 * static_cast<double>(count) / static_cast<double>(total);
    return std::floor(pct * 10.0 + 0.5) / 10.0;
}

namespace {

const char* const kKnownKeys[] = {"app_id", "title", "link", "product_id", "serpapi_link",
                                  "thumbnail", "rating", "age_rating", "category", "country",
                                  "teacher_approved", "data_safety"};

std::string entry_ctx(const std::string& origin, std::size_t index) {
    return origin + ": entry " + std::to_string(index);
}

DataSafetyDecl parse_data_safety(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw SchemaError(ctx + ": \"data_safety\" must be an object");
    DataSafetyDecl decl;
    if (!j.contains("collected") || !j["collected"].is_array()) {
        throw SchemaError(ctx + ": \"data_safety.collected\" must be an array");
    }
    for (const auto& item : j["collected"]) {
        if (!item.is_string() || item.get<std::string>().empty()) {
            throw SchemaError(ctx + ": \"data_safety.collected\" entries must be non-empty strings");
        }
        std::string value = item.get<std::string>();
        std::transform(value.begin(), value.end(), value.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        decl.data_collected.insert(std::move(value));
    }
    if (j.contains("shared_third_party")) {
        if (!j["shared_third_party"].is_string()) {
            throw SchemaError(ctx + ": \"data_safety.shared_third_party\" must be a string");
        }
        try {
            decl.shared_with_third_parties = tri_state_from_string(j["shared_third_party"].get<std::string>());
        } catch (const SchemaError&) {
            throw SchemaError(ctx + ": \"data_safety.shared_third_party\" must be yes|no|unknown");
        }
    }
    if (!j.contains("erasure") || !j["erasure"].is_boolean()) {
        throw SchemaError(ctx + ": \"data_safety.erasure\" must be a boolean");
    }
    decl.erasure_offered = j["erasure"].get<bool>();
    return decl;
}

} // namespace

std::vector<AppRecord> parse_catalog(std::string_view json_text,
                                     std::vector<std::string>* warnings,
                                     const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_array()) throw SchemaError(origin + ": catalog must be a JSON array of records");

    std::vector<AppRecord> records;
    std::set<std::string> seen_ids;
    std::size_t index = 0;
    for (const auto& entry : doc) {
        const std::string ctx = entry_ctx(origin, index);
        if (!entry.is_object()) throw SchemaError(ctx + ": record must be an object");

        AppRecord rec;
        auto require_string = [&](const char* key) -> std::string {
            if (!entry.contains(key) || !entry[key].is_string()) {
                throw SchemaError(ctx + ": missing or non-string field \"" + key + "\"");
            }
            return entry[key].get<std::string>();
        };

        rec.app_id = require_string("app_id");
        rec.title = require_string("title");
        rec.store_link = require_string("link");
        rec.product_id = require_string("product_id");
        if (entry.contains("serpapi_link") && !entry["serpapi_link"].is_null()) {
            if (!entry["serpapi_link"].is_string()) throw SchemaError(ctx + ": \"serpapi_link\" must be a string");
            rec.serpapi_link = entry["serpapi_link"].get<std::string>();
        }
        if (entry.contains("thumbnail") && !entry["thumbnail"].is_null()) {
            if (!entry["thumbnail"].is_string()) throw SchemaError(ctx + ": \"thumbnail\" must be a string");
            rec.thumbnail_link = entry["thumbnail"].get<std::string>();
        }
        if (entry.contains("rating") && !entry["rating"].is_null()) {
            if (!entry["rating"].is_number()) throw SchemaError(ctx + ": \"rating\" must be a number");
            double r = entry["rating"].get<double>();
            if (r < 0.0 || r > 5.0) throw SchemaError(ctx + ": \"rating\" out of range [0, 5]: " + std::to_string(r));
            rec.rating = r;
        }
        try {
            rec.age_rating = age_rating_from_string(require_string("age_rating"));
        } catch (const SchemaError& e) {
            throw SchemaError(ctx + ": " + e.what());
        }
        rec.category = require_string("category");
        if (!is_known_category(rec.category)) {
            throw SchemaError(ctx + ": \"category\" is not one of the twelve known categories: \"" + rec.category + "\"");
        }
        if (entry.contains("country") && !entry["country"].is_null()) {
            if (!entry["country"].is_string()) throw SchemaError(ctx + ": \"country\" must be a string or null");
            rec.country = entry["country"].get<std::string>();
        }
        if (entry.contains("teacher_approved")) {
            if (!entry["teacher_approved"].is_boolean()) throw SchemaError(ctx + ": \"teacher_approved\" must be a boolean");
            rec.teacher_approved = entry["teacher_approved"].get<bool>();
        }
        if (entry.contains("data_safety") && !entry["data_safety"].is_null()) {
            rec.data_safety = parse_data_safety(entry["data_safety"], ctx);
        }

        for (auto it = entry.begin(); it != entry.end(); ++it) {
            if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                             [&](const char* k) { return it.key() == k; }) == std::end(kKnownKeys)) {
                if (warnings) warnings->push_back(ctx + ": ignoring unknown key \"" + it.key() + "\"");
            }
        }

        if (!seen_ids.insert(rec.app_id).second) {
            throw SchemaError(ctx + ": duplicate app_id \"" + rec.app_id + "\"");
        }
        records.push_back(std::move(rec));
        ++index;
    }
    return records;
}

std::vector<AppRecord> load_catalog(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open catalog file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_catalog(ss.str(), warnings, path.string());
}

std::string serialize_catalog(const std::vector<AppRecord>& records) {
    ordered_json doc = ordered_json::array();
    for (const auto& rec : records) {
        ordered_json j;
        j["app_id"] = rec.app_id;
        j["title"] = rec.title;
        j["link"] = rec.store_link;
        j["product_id"] = rec.product_id;
        if (rec.serpapi_link) j["serpapi_link"] = *rec.serpapi_link;
        if (rec.thumbnail_link) j["thumbnail"] = *rec.thumbnail_link;
        if (rec.rating) j["rating"] = *rec.rating;
        j["age_rating"] = to_string(rec.age_rating);
        j["category"] = rec.category;
        if (rec.country) j["country"] = *rec.country;
        j["teacher_approved"] = rec.teacher_approved;
        if (rec.data_safety) {
            ordered_json ds;
            ds["collected"] = ordered_json::array();
            for (const auto& c : rec.data_safety->data_collected) ds["collected"].push_back(c);
            ds["shared_third_party"] = to_string(rec.data_safety->shared_with_third_parties);
            ds["erasure"] = rec.data_safety->erasure_offered;
            j["data_safety"] = std::move(ds);
        }
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

DistributionTable aggregate_distribution(const std::vector<AppRecord>& records, Dimension dimension) {
    DistributionTable table;
    table.dimension = dimension;

    std::map<std::vector<std::string>, std::size_t> counts;
    for (const auto& rec : records) {
        std::vector<std::string> keys;
        switch (dimension) {
            case Dimension::kAgeRating:
                keys = {std::string(to_string(rec.age_rating))};
                break;
            case Dimension::kCategory:
                keys = {rec.category};
                break;
            case Dimension::kCountry:
                keys = {rec.country.value_or(std::string(kNullCountryKey))};
                break;
            case Dimension::kCategoryByAgeRating:
                keys = {rec.category, std::string(to_string(rec.age_rating))};
                break;
        }
        ++counts[std::move(keys)];
    }

    for (auto& [keys, count] : counts) {
        table.rows.push_back({keys, count, round_percent(count, records.size())});
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const DistributionTable::Row& a, const DistributionTable::Row& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.keys < b.keys;
              });
    return table;
}

bool detect_teacher_approved(std::string_view store_page) {
    static const Phrase kBadge = {"teacher", "approved"};
    NormalizedText text = normalize(store_page, "store_page");
    if (text.tokens.size() < kBadge.size()) return false;
    for (std::size_t i = 0; i + kBadge.size() <= text.tokens.size(); ++i) {
        if (std::equal(kBadge.begin(), kBadge.end(), text.tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            return true;
        }
    }
    return false;
}

} // namespace appaudit
