#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace appaudit {

/// A phrase is an ordered token sequence ("age verification" -> {age, verification}).
using Phrase = std::vector<std::string>;

/// Lowercase alphanumeric tokens extracted from a piece of source text.
struct NormalizedText {
    std::vector<std::string> tokens;
    std::string source_ref;

    bool operator==(const NormalizedText&) const = default;
};

/// Tokenizes text: every character outside [a-z0-9] (after ASCII lowercasing)
/// acts as a separator. This covers the special-character strip set
/// < " _ : = . / > [ ] as well as whitespace and all remaining punctuation,
/// so ACCESS_FINE_LOCATION and "teacher-approved" both tokenize cleanly.
NormalizedText normalize(std::string_view text, std::string source_ref = {});

/// Splits a phrase string into its normalized token sequence.
Phrase phrase_of(std::string_view text);

/// Token -> synonym tokens, all normalized on load.
struct SynonymLexicon {
    std::map<std::string, std::set<std::string>> entries;

    const std::set<std::string>* find(const std::string& token) const;
    bool operator==(const SynonymLexicon&) const = default;
};

/// Parses the line format "seed|syn1,syn2,...". '#' starts a comment line,
/// blank lines are ignored, duplicate seed lines merge by set union.
SynonymLexicon parse_lexicon(std::string_view content, const std::string& origin = "<memory>");
SynonymLexicon load_lexicon(const std::filesystem::path& path);

/// The lexicon shipped with the tool (curated English synonym sets for the
/// detector seed vocabulary).
const SynonymLexicon& builtin_lexicon();
std::string_view builtin_lexicon_text();

/// Seed phrases plus their synonym expansions. Seeds are always contained in
/// the expansion; per-seed output is capped at 64 variants.
struct KeywordSet {
    std::vector<Phrase> seed_phrases;
    std::vector<Phrase> expanded_phrases;

    bool operator==(const KeywordSet&) const = default;
};

inline constexpr std::size_t kMaxVariantsPerSeed = 64;

/// Expands each seed by the cartesian product of per-token alternatives
/// {token} + lexicon[token]. Variants are emitted in lexicographic order and
/// truncated to kMaxVariantsPerSeed per seed; the seed itself is always kept.
KeywordSet expand_keywords(const std::vector<Phrase>& seeds, const SynonymLexicon& lexicon);

struct PhraseMatch {
    Phrase phrase;
    std::size_t offset = 0; // token offset of the first phrase token

    bool operator==(const PhraseMatch&) const = default;
    auto operator<=>(const PhraseMatch&) const = default;
};

/// Reports every occurrence of every keyword phrase as a contiguous token run
/// in the text, sorted by (offset, phrase).
std::vector<PhraseMatch> match_phrases(const NormalizedText& text, const KeywordSet& keywords);

} // namespace appaudit
