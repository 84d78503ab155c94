#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "appaudit/container.hpp"
#include "appaudit/text.hpp"

namespace appaudit {

enum class Feature {
    kGeolocation,
    kAgeVerification,
    kContentReporting,
    kParentalControls,
    kTeacherApproved,
};

inline constexpr std::array<Feature, 5> kAllFeatures = {
    Feature::kGeolocation, Feature::kAgeVerification, Feature::kContentReporting,
    Feature::kParentalControls, Feature::kTeacherApproved};

std::string_view to_string(Feature f);
std::optional<Feature> feature_from_string(std::string_view s);

/// True for features detected from string resources; their absence is
/// unreliable when the string yield was low.
bool is_string_based(Feature f);

enum class DetectionState { kDetected, kNotDetected, kNotEvaluated };

std::string_view to_string(DetectionState s);

struct Evidence {
    struct ManifestPermission {
        std::string name;
        bool operator==(const ManifestPermission&) const = default;
    };
    struct StringResource {
        std::string locale;
        std::string name;
        bool operator==(const StringResource&) const = default;
    };
    struct StorePage {
        bool operator==(const StorePage&) const = default;
    };

    Feature feature = Feature::kGeolocation;
    Phrase matched_phrase;
    std::variant<ManifestPermission, StringResource, StorePage> source;
    std::string raw_context;        // the original, unnormalized text
    bool low_confidence = false;    // e.g. location token in a non-platform permission

    std::string source_description() const;
    bool operator==(const Evidence&) const = default;
};

/// The fixed content-reporting phrase list. No synonym expansion is applied
/// to these.
const std::vector<std::string>& content_reporting_phrases();

/// Default seed phrases per feature; a seeds file may override them.
const std::vector<std::string>& default_age_verification_seeds();
const std::vector<std::string>& default_parental_control_seeds();

/// Optional seed-phrase overrides: JSON object mapping feature name to a list
/// of seed phrases.
struct SeedOverrides {
    std::map<Feature, std::vector<std::string>> seeds;
};

SeedOverrides load_seed_overrides(const std::filesystem::path& path);

std::vector<Evidence> detect_geolocation(const ManifestDoc& manifest,
                                         const SynonymLexicon* lexicon = nullptr);
std::vector<Evidence> detect_content_reporting(const ResourceTable& resources);
std::vector<Evidence> detect_age_verification(const ResourceTable& resources,
                                              const SynonymLexicon& lexicon,
                                              const std::vector<std::string>* seeds = nullptr);
std::vector<Evidence> detect_parental_controls(const ResourceTable& resources,
                                               const SynonymLexicon& lexicon,
                                               const std::vector<std::string>* seeds = nullptr);

struct FeatureDetection {
    DetectionState state = DetectionState::kNotEvaluated;
    std::vector<Evidence> evidence;
};

struct FeatureProfile {
    std::string app_id;
    std::map<Feature, FeatureDetection> features; // exactly one entry per feature
    bool low_string_yield = false;

    const FeatureDetection& of(Feature f) const { return features.at(f); }
    DetectionState state(Feature f) const { return features.at(f).state; }

    /// Profile for an app whose package could not be opened: string- and
    /// manifest-based features are not evaluated; the store flag still
    /// resolves the teacher-approved state when known.
    static FeatureProfile not_evaluated(std::string app_id,
                                        std::optional<bool> teacher_approved = std::nullopt);
};

/// Runs every detector over the extracted inputs. The teacher-approved state
/// mirrors the store flag (store-page source); passing std::nullopt leaves it
/// not evaluated.
FeatureProfile build_feature_profile(std::string app_id, const ManifestDoc& manifest,
                                     const ResourceTable& resources,
                                     std::optional<bool> teacher_approved,
                                     const SynonymLexicon& lexicon,
                                     const SeedOverrides* overrides = nullptr);

} // namespace appaudit
