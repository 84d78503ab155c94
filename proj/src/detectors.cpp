#include "appaudit/detectors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "appaudit/errors.hpp"

namespace appaudit {

using nlohmann::json;

std::string_view to_string(Feature f) {
    switch (f) {
        case Feature::kGeolocation: return "geolocation";
        case Feature::kAgeVerification: return "age_verification";
        case Feature::kContentReporting: return "content_reporting";
        case Feature::kParentalControls: return "parental_controls";
        case Feature::kTeacherApproved: return "teacher_approved";
    }
    return "?";
}

std::optional<Feature> feature_from_string(std::string_view s) {
    for (Feature f : kAllFeatures) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

bool is_string_based(Feature f) {
    return f == Feature::kAgeVerification || f == Feature::kContentReporting ||
           f == Feature::kParentalControls;
}

std::string_view to_string(DetectionState s) {
    switch (s) {
        case DetectionState::kDetected: return "detected";
        case DetectionState::kNotDetected: return "not_detected";
        case DetectionState::kNotEvaluated: return "not_evaluated";
    }
    return "?";
}

std::string Evidence::source_description() const {
    if (const auto* p = std::get_if<ManifestPermission>(&source)) {
        return "manifest permission " + p->name;
    }
    if (const auto* r = std::get_if<StringResource>(&source)) {
        std::string locale = r->locale.empty() ? "default" : r->locale;
        return "string resource " + r->name + " (" + locale + ")";
    }
    return "store page";
}

const std::vector<std::string>& content_reporting_phrases() {
    static const std::vector<std::string> kPhrases = {
        "block and report",
        "block or report",
        "report abuse",
        "report as inappropriate",
        "report bullying",
        "report comment",
        "report content",
        "report explicit image",
        "report extremism",
        "report hate speech",
        "report imminent danger",
        "report inappropriate",
        "report nsfw",
        "report nudity",
        "report or block",
        "report pornograph",
        "report sexually explicit",
        "report this contact",
        "report this group",
        "report this member",
        "report this photo",
        "report this post",
        "report this user",
        "report this video",
        "report user",
        "reportchatchild",
        "reportchatpornography",
        "reportchatviolence",
        "reporting harassment",
        "reporting hateful",
        "reporting nudity",
        "reporting self harm",
        "reporting violence",
        "thanks for reporting",
        "the post you reported has been removed",
    };
    return kPhrases;
}

const std::vector<std::string>& default_age_verification_seeds() {
    static const std::vector<std::string> kSeeds = {
        "age verification", "verify your age", "date of birth", "how old are you"};
    return kSeeds;
}

const std::vector<std::string>& default_parental_control_seeds() {
    static const std::vector<std::string> kSeeds = {
        "parental consent", "parentalconsent", "parental control", "parental controls"};
    return kSeeds;
}

SeedOverrides load_seed_overrides(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open seed-override file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": JSON parse error: " + e.what());
    }
    if (!doc.is_object()) throw SchemaError(path.string() + ": seed overrides must be a JSON object");
    SeedOverrides overrides;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        auto feature = feature_from_string(it.key());
        if (!feature) throw SchemaError(path.string() + ": unknown feature \"" + it.key() + "\"");
        if (!it.value().is_array()) throw SchemaError(path.string() + ": seed list for " + it.key() + " must be an array");
        std::vector<std::string> seeds;
        for (const auto& s : it.value()) {
            if (!s.is_string()) throw SchemaError(path.string() + ": seeds must be strings");
            seeds.push_back(s.get<std::string>());
        }
        overrides.seeds[*feature] = std::move(seeds);
    }
    return overrides;
}

namespace {

std::vector<Phrase> to_phrases(const std::vector<std::string>& seeds) {
    std::vector<Phrase> out;
    out.reserve(seeds.size());
    for (const auto& s : seeds) {
        Phrase p = phrase_of(s);
        if (!p.empty()) out.push_back(std::move(p));
    }
    return out;
}

// Scans resource names and values for keyword phrases; one Evidence per match.
std::vector<Evidence> scan_resources(const ResourceTable& resources, const KeywordSet& keywords,
                                     Feature feature) {
    std::vector<Evidence> out;
    for (const auto& [key, entry] : resources.entries) {
        const auto& [locale, name] = key;
        auto scan = [&](const std::string& text) {
            NormalizedText norm = normalize(text);
            for (const auto& match : match_phrases(norm, keywords)) {
                Evidence ev;
                ev.feature = feature;
                ev.matched_phrase = match.phrase;
                ev.source = Evidence::StringResource{locale, name};
                ev.raw_context = text;
                out.push_back(std::move(ev));
            }
        };
        scan(entry.value);
        scan(name);
    }
    return out;
}

} // namespace

std::vector<Evidence> detect_geolocation(const ManifestDoc& manifest, const SynonymLexicon* lexicon) {
    std::set<std::string> wanted = {"location"};
    if (lexicon) {
        if (const auto* syns = lexicon->find("location")) wanted.insert(syns->begin(), syns->end());
    }
    std::vector<Evidence> out;
    for (const auto& permission : manifest.permissions) {
        NormalizedText norm = normalize(permission);
        for (const auto& token : norm.tokens) {
            if (wanted.count(token)) {
                Evidence ev;
                ev.feature = Feature::kGeolocation;
                ev.matched_phrase = {token};
                ev.source = Evidence::ManifestPermission{permission};
                ev.raw_context = permission;
                ev.low_confidence = permission.rfind("android.permission.", 0) != 0;
                out.push_back(std::move(ev));
                break; // one evidence item per permission
            }
        }
    }
    return out;
}

std::vector<Evidence> detect_content_reporting(const ResourceTable& resources) {
    // The reporting phrase list is fixed; no lexicon expansion.
    static const KeywordSet kKeywords = expand_keywords(to_phrases(content_reporting_phrases()), {});
    return scan_resources(resources, kKeywords, Feature::kContentReporting);
}

std::vector<Evidence> detect_age_verification(const ResourceTable& resources,
                                              const SynonymLexicon& lexicon,
                                              const std::vector<std::string>* seeds) {
    KeywordSet keywords = expand_keywords(
        to_phrases(seeds ? *seeds : default_age_verification_seeds()), lexicon);
    return scan_resources(resources, keywords, Feature::kAgeVerification);
}

std::vector<Evidence> detect_parental_controls(const ResourceTable& resources,
                                               const SynonymLexicon& lexicon,
                                               const std::vector<std::string>* seeds) {
    KeywordSet keywords = expand_keywords(
        to_phrases(seeds ? *seeds : default_parental_control_seeds()), lexicon);
    return scan_resources(resources, keywords, Feature::kParentalControls);
}

FeatureProfile FeatureProfile::not_evaluated(std::string app_id, std::optional<bool> teacher_approved) {
    FeatureProfile profile;
    profile.app_id = std::move(app_id);
    for (Feature f : kAllFeatures) profile.features[f] = {DetectionState::kNotEvaluated, {}};
    if (teacher_approved.has_value()) {
        FeatureDetection ta;
        if (*teacher_approved) {
            ta.state = DetectionState::kDetected;
            Evidence ev;
            ev.feature = Feature::kTeacherApproved;
            ev.matched_phrase = {"teacher", "approved"};
            ev.source = Evidence::StorePage{};
            ev.raw_context = "Teacher Approved";
            ta.evidence.push_back(std::move(ev));
        } else {
            ta.state = DetectionState::kNotDetected;
        }
        profile.features[Feature::kTeacherApproved] = std::move(ta);
    }
    return profile;
}

FeatureProfile build_feature_profile(std::string app_id, const ManifestDoc& manifest,
                                     const ResourceTable& resources,
                                     std::optional<bool> teacher_approved,
                                     const SynonymLexicon& lexicon,
                                     const SeedOverrides* overrides) {
    FeatureProfile profile;
    profile.app_id = std::move(app_id);
    profile.low_string_yield = resources.low_string_yield;

    auto seeds_for = [&](Feature f) -> const std::vector<std::string>* {
        if (!overrides) return nullptr;
        auto it = overrides->seeds.find(f);
        return it == overrides->seeds.end() ? nullptr : &it->second;
    };

    auto set = [&](Feature f, std::vector<Evidence> evidence) {
        profile.features[f] = {evidence.empty() ? DetectionState::kNotDetected : DetectionState::kDetected,
                               std::move(evidence)};
    };

    set(Feature::kGeolocation, detect_geolocation(manifest, &lexicon));
    set(Feature::kContentReporting, detect_content_reporting(resources));
    set(Feature::kAgeVerification,
        detect_age_verification(resources, lexicon, seeds_for(Feature::kAgeVerification)));
    set(Feature::kParentalControls,
        detect_parental_controls(resources, lexicon, seeds_for(Feature::kParentalControls)));

    FeatureDetection ta;
    if (!teacher_approved.has_value()) {
        ta.state = DetectionState::kNotEvaluated;
    } else if (*teacher_approved) {
        ta.state = DetectionState::kDetected;
        Evidence ev;
        ev.feature = Feature::kTeacherApproved;
        ev.matched_phrase = {"teacher", "approved"};
        ev.source = Evidence::StorePage{};
        ev.raw_context = "Teacher Approved";
        ta.evidence.push_back(std::move(ev));
    } else {
        ta.state = DetectionState::kNotDetected;
    }
    profile.features[Feature::kTeacherApproved] = std::move(ta);
    return profile;
}

} // namespace appaudit
