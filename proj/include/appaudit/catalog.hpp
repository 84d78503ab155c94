#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace appaudit {

enum class AgeRating { kEveryone, kEveryone10Plus, kTeen, kMature17Plus };
enum class AgeBand { kUnder13, kThirteenPlus };
enum class TriState { kYes, kNo, kUnknown };

std::string_view to_string(AgeRating r);
std::string_view to_string(AgeBand b);
std::string_view to_string(TriState t);
AgeRating age_rating_from_string(std::string_view s);
TriState tri_state_from_string(std::string_view s);

/// The twelve store categories the sample distribution uses.
const std::array<std::string_view, 12>& known_categories();
bool is_known_category(std::string_view category);

/// Developer-declared data-safety statement from the store listing.
struct DataSafetyDecl {
    std::set<std::string> data_collected;            // non-empty lowercase names
    TriState shared_with_third_parties = TriState::kUnknown;
    bool erasure_offered = false;

    bool operator==(const DataSafetyDecl&) const = default;
};

/// One app's store metadata record.
struct AppRecord {
    std::string app_id;
    std::string title;
    std::string store_link;
    std::string product_id;
    std::optional<std::string> serpapi_link;
    std::optional<std::string> thumbnail_link;
    std::optional<double> rating;                    // 0.0 - 5.0 when present
    AgeRating age_rating = AgeRating::kEveryone;
    std::string category;
    std::optional<std::string> country;
    bool teacher_approved = false;
    std::optional<DataSafetyDecl> data_safety;

    bool operator==(const AppRecord&) const = default;
};

/// Everyone and Everyone 10+ ratings address audiences under 13; Teen and
/// Mature 17+ address older audiences.
AgeBand classify_age_band(AgeRating rating);

enum class Dimension { kAgeRating, kCategory, kCountry, kCategoryByAgeRating };

std::string_view to_string(Dimension d);
std::optional<Dimension> dimension_from_string(std::string_view s);

/// Records with no country aggregate under this literal key.
inline constexpr std::string_view kNullCountryKey = "<null>";

struct DistributionTable {
    struct Row {
        std::vector<std::string> keys;
        std::size_t count = 0;
        double percent = 0.0;                        // one decimal, round half up

        bool operator==(const Row&) const = default;
    };

    Dimension dimension = Dimension::kAgeRating;
    std::vector<Row> rows;                           // count desc, then keys ascending

    bool operator==(const DistributionTable&) const = default;
};

/// Loads a catalog JSON array. Optional fields stay absent when missing from
/// the entry; order is preserved. Unknown keys are reported through
/// `warnings` (when given) and otherwise ignored.
std::vector<AppRecord> load_catalog(const std::filesystem::path& path,
                                    std::vector<std::string>* warnings = nullptr);
std::vector<AppRecord> parse_catalog(std::string_view json_text,
                                     std::vector<std::string>* warnings = nullptr,
                                     const std::string& origin = "<memory>");

/// Serializes records back to the catalog file format (round-trips with
/// load_catalog).
std::string serialize_catalog(const std::vector<AppRecord>& records);

DistributionTable aggregate_distribution(const std::vector<AppRecord>& records, Dimension dimension);

/// True iff the store page markup contains the phrase "teacher approved"
/// after normalization (case- and punctuation-insensitive).
bool detect_teacher_approved(std::string_view store_page);

double round_percent(std::size_t count, std::size_t total);

} // namespace appaudit
