#include "appaudit/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "appaudit/errors.hpp"

namespace appaudit {

NormalizedText normalize(std::string_view text, std::string source_ref) {
    NormalizedText out;
    out.source_ref = std::move(source_ref);
    std::string token;
    for (unsigned char c : text) {
        if (c >= 'A' && c <= 'Z') {
            token.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            token.push_back(static_cast<char>(c));
        } else if (!token.empty()) {
            out.tokens.push_back(std::move(token));
            token.clear();
        }
    }
    if (!token.empty()) out.tokens.push_back(std::move(token));
    return out;
}

Phrase phrase_of(std::string_view text) {
    return normalize(text).tokens;
}

const std::set<std::string>* SynonymLexicon::find(const std::string& token) const {
    auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
}

SynonymLexicon parse_lexicon(std::string_view content, const std::string& origin) {
    SynonymLexicon lex;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string_view line = content.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
        ++line_no;

        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (line[first] == '#') continue;

        std::size_t bar = line.find('|');
        if (bar == std::string_view::npos) {
            throw SchemaError(origin + ":" + std::to_string(line_no) + ": lexicon line has no '|' separator");
        }
        Phrase seed_tokens = phrase_of(line.substr(0, bar));
        if (seed_tokens.size() != 1) {
            throw SchemaError(origin + ":" + std::to_string(line_no) + ": lexicon seed must be a single token");
        }
        auto& syns = lex.entries[seed_tokens[0]];
        std::string_view rest = line.substr(bar + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            std::size_t comma = rest.find(',', start);
            std::string_view item = rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            start = comma == std::string_view::npos ? rest.size() + 1 : comma + 1;
            Phrase toks = phrase_of(item);
            if (toks.empty()) continue;
            if (toks.size() != 1) {
                throw SchemaError(origin + ":" + std::to_string(line_no) + ": lexicon synonyms must be single tokens");
            }
            if (toks[0] != seed_tokens[0]) syns.insert(toks[0]);
        }
    }
    return lex;
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_lexicon(ss.str(), path.string());
}

std::string_view builtin_lexicon_text() {
    // Synonym sets for the detector seed vocabulary, derived from a public
    // English lexical database and curated to single-token entries.
    static constexpr std::string_view kText =
        "# token|synonym,synonym,...\n"
        "verification|check,confirmation,validation,authentication\n"
        "verify|check,confirm,validate,authenticate\n"
        "consent|permission,assent,approval\n"
        "control|restriction,supervision\n"
        "controls|restrictions\n"
        "parental|parent,guardian\n"
        "location|geolocation,whereabouts,position\n";
    return kText;
}

const SynonymLexicon& builtin_lexicon() {
    static const SynonymLexicon lex = parse_lexicon(builtin_lexicon_text(), "<builtin>");
    return lex;
}

namespace {

// Emits the cartesian product of per-token alternatives in lexicographic
// order, stopping once `limit` variants have been collected.
void enumerate_variants(const std::vector<std::vector<std::string>>& alternatives,
                        std::size_t position, Phrase& current,
                        std::vector<Phrase>& out, std::size_t limit) {
    if (out.size() >= limit) return;
    if (position == alternatives.size()) {
        out.push_back(current);
        return;
    }
    for (const auto& token : alternatives[position]) {
        current.push_back(token);
        enumerate_variants(alternatives, position + 1, current, out, limit);
        current.pop_back();
        if (out.size() >= limit) return;
    }
}

} // namespace

KeywordSet expand_keywords(const std::vector<Phrase>& seeds, const SynonymLexicon& lexicon) {
    KeywordSet set;
    set.seed_phrases = seeds;
    std::set<Phrase> seen;
    for (const auto& seed : seeds) {
        if (seed.empty()) continue;
        std::vector<std::vector<std::string>> alternatives;
        alternatives.reserve(seed.size());
        for (const auto& token : seed) {
            std::set<std::string> alts{token};
            if (const auto* syns = lexicon.find(token)) alts.insert(syns->begin(), syns->end());
            alternatives.emplace_back(alts.begin(), alts.end());
        }
        std::vector<Phrase> variants;
        Phrase scratch;
        enumerate_variants(alternatives, 0, scratch, variants, kMaxVariantsPerSeed);
        if (std::find(variants.begin(), variants.end(), seed) == variants.end()) {
            // The seed sorts beyond the cap; it replaces the lexicographically
            // last kept variant so the cap still holds.
            variants.back() = seed;
        }
        for (auto& v : variants) {
            if (seen.insert(v).second) set.expanded_phrases.push_back(std::move(v));
        }
    }
    return set;
}

std::vector<PhraseMatch> match_phrases(const NormalizedText& text, const KeywordSet& keywords) {
    std::vector<PhraseMatch> matches;
    const auto& tokens = text.tokens;
    for (const auto& phrase : keywords.expanded_phrases) {
        if (phrase.empty() || phrase.size() > tokens.size()) continue;
        for (std::size_t offset = 0; offset + phrase.size() <= tokens.size(); ++offset) {
            if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(offset))) {
                matches.push_back({phrase, offset});
            }
        }
    }
    std::sort(matches.begin(), matches.end(),
              [](const PhraseMatch& a, const PhraseMatch& b) {
                  return a.offset != b.offset ? a.offset < b.offset : a.phrase < b.phrase;
              });
    return matches;
}

} // namespace appaudit
