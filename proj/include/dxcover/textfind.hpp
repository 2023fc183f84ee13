#pragma once

// Dictionary-based symptom mention extraction plus NegEx-style negation
// scoping over clinical note text. Matching is case-insensitive
// longest-match over tokenized sentences; negation is a pure function of
// the sentence a mention sits in.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dxcover/ehr.hpp"

namespace dxcover::textfind {

struct Mention {
    std::string symptom;   // canonical name
    Polarity polarity = Polarity::present;
    std::size_t sentence_index = 0;
    std::size_t token_begin = 0;  // within the sentence
    std::size_t token_end = 0;    // exclusive
};

/// Trigger phrases and scope parameters. The classic NegEx defaults are
/// baked in; alternate rule sets load from a JSON file.
struct NegationRules {
    std::vector<std::string> pre_triggers{"no", "denies", "without", "not", "negative for"};
    std::vector<std::string> post_triggers{"is ruled out"};
    std::vector<std::string> terminators{"but", "however", ";", "."};
    std::size_t window = 6;

    void validate() const {
        if (window < 1) throw std::invalid_argument("negation window must be >= 1");
        if (pre_triggers.empty() || post_triggers.empty())
            throw std::invalid_argument("negation trigger lists must be non-empty");
    }
};

inline NegationRules rules_from_json(const nlohmann::ordered_json& j) {
    NegationRules rules;
    if (j.contains("pre_triggers")) rules.pre_triggers = j.at("pre_triggers").get<std::vector<std::string>>();
    if (j.contains("post_triggers")) rules.post_triggers = j.at("post_triggers").get<std::vector<std::string>>();
    if (j.contains("terminators")) rules.terminators = j.at("terminators").get<std::vector<std::string>>();
    if (j.contains("window")) rules.window = j.at("window").get<std::size_t>();
    rules.validate();
    return rules;
}

namespace detail {

inline bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '\'' || c == '-';
}

}  // namespace detail

/// Lowercased word tokens; punctuation marks become their own tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (detail::is_word_char(c)) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            continue;
        }
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
        if (!std::isspace(static_cast<unsigned char>(c)))
            tokens.push_back(std::string(1, c));
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

/// Sentences split on . ! ? and newline; delimiters are dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string current;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            if (!current.empty()) {
                sentences.push_back(current);
                current.clear();
            }
            continue;
        }
        current += c;
    }
    if (!current.empty()) sentences.push_back(current);
    return sentences;
}

namespace detail {

// Token-sequence dictionary: surface token lists -> canonical symptom.
// Canonical names match both as-is and with underscores read as spaces.
struct MatchDict {
    std::map<std::vector<std::string>, std::string> entries;
    std::size_t max_len = 0;

    void add(std::string_view surface, const std::string& canonical) {
        std::string spaced(surface);
        std::replace(spaced.begin(), spaced.end(), '_', ' ');
        std::vector<std::string> toks = tokenize(spaced);
        if (toks.empty()) return;
        max_len = std::max(max_len, toks.size());
        entries.emplace(std::move(toks), canonical);
    }
};

inline MatchDict build_dict(const SymptomUniverse& universe) {
    MatchDict dict;
    for (const auto& canonical : universe.symptoms()) dict.add(canonical, canonical);
    for (const auto& [surface, canonical] : universe.synonym_map()) dict.add(surface, canonical);
    return dict;
}

// Positions of trigger phrase occurrences, as [begin, end) token ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> find_phrases(
    const std::vector<std::string>& tokens, const std::vector<std::string>& phrases) {
    std::vector<std::pair<std::size_t, std::size_t>> hits;
    for (const auto& phrase : phrases) {
        const std::vector<std::string> ptoks = tokenize(phrase);
        if (ptoks.empty() || ptoks.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + ptoks.size() <= tokens.size(); ++i) {
            if (std::equal(ptoks.begin(), ptoks.end(), tokens.begin() + i))
                hits.emplace_back(i, i + ptoks.size());
        }
    }
    return hits;
}

}  // namespace detail

/// Longest-match, leftmost dictionary lookup over one tokenized sentence.
inline std::vector<Mention> match_sentence(const std::vector<std::string>& tokens,
                                           std::size_t sentence_index,
                                           const detail::MatchDict& dict) {
    std::vector<Mention> mentions;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t best_len = 0;
        const std::string* best_canonical = nullptr;
        const std::size_t cap = std::min(dict.max_len, tokens.size() - i);
        std::vector<std::string> probe;
        probe.reserve(cap);
        for (std::size_t len = 1; len <= cap; ++len) {
            probe.push_back(tokens[i + len - 1]);
            auto it = dict.entries.find(probe);
            if (it != dict.entries.end()) {
                best_len = len;
                best_canonical = &it->second;
            }
        }
        if (best_canonical) {
            mentions.push_back(Mention{*best_canonical, Polarity::present, sentence_index, i,
                                       i + best_len});
            i += best_len;
        } else {
            ++i;
        }
    }
    return mentions;
}

/// Scan the full text for universe symptoms and synonyms. Polarity is
/// provisionally `present`; run detect_negation per sentence to finalize.
inline std::vector<Mention> match_entities(std::string_view text,
                                           const SymptomUniverse& universe) {
    const detail::MatchDict dict = detail::build_dict(universe);
    std::vector<Mention> mentions;
    const std::vector<std::string> sentences = split_sentences(text);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const std::vector<std::string> tokens = tokenize(sentences[s]);
        for (Mention& m : match_sentence(tokens, s, dict)) mentions.push_back(std::move(m));
    }
    return mentions;
}

/// Assign final polarity to mentions of one sentence. A mention is absent iff
/// a pre-trigger ends within `window` tokens before it with no terminator in
/// between, or a post-trigger starts within `window` tokens after it.
inline std::vector<Mention> detect_negation(const std::vector<std::string>& sentence_tokens,
                                            const std::vector<Mention>& mentions,
                                            const NegationRules& rules) {
    rules.validate();
    const auto pre = detail::find_phrases(sentence_tokens, rules.pre_triggers);
    const auto post = detail::find_phrases(sentence_tokens, rules.post_triggers);
    const auto term = detail::find_phrases(sentence_tokens, rules.terminators);

    auto terminator_between = [&](std::size_t lo, std::size_t hi) {
        for (const auto& [tb, te] : term)
            if (tb >= lo && te <= hi) return true;
        return false;
    };

    std::vector<Mention> out = mentions;
    for (Mention& m : out) {
        bool negated = false;
        for (const auto& [pb, pe] : pre) {
            if (pe > m.token_begin) continue;  // trigger must precede the mention
            if (m.token_begin - pe >= rules.window) continue;
            if (terminator_between(pe, m.token_begin)) continue;
            negated = true;
            break;
        }
        if (!negated) {
            for (const auto& [pb, pe] : post) {
                if (pb < m.token_end) continue;  // trigger must follow the mention
                if (pb - m.token_end >= rules.window) continue;
                negated = true;
                break;
            }
        }
        m.polarity = negated ? Polarity::absent : Polarity::present;
    }
    return out;
}

/// Full pipeline over a note: match entities sentence by sentence and settle
/// polarity. Returns mentions in reading order.
inline std::vector<Mention> extract_mentions(std::string_view note,
                                             const SymptomUniverse& universe,
                                             const NegationRules& rules) {
    const detail::MatchDict dict = detail::build_dict(universe);
    std::vector<Mention> all;
    const std::vector<std::string> sentences = split_sentences(note);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const std::vector<std::string> tokens = tokenize(sentences[s]);
        const std::vector<Mention> raw = match_sentence(tokens, s, dict);
        for (Mention& m : detect_negation(tokens, raw, rules)) all.push_back(std::move(m));
    }
    return all;
}

/// Deduplicated (symptom, polarity) pairs from a note. Conflicting polarities
/// for the same symptom are both kept.
inline std::vector<Finding> note_findings(std::string_view note,
                                          const SymptomUniverse& universe,
                                          const NegationRules& rules) {
    std::vector<Finding> findings;
    for (const Mention& m : extract_mentions(note, universe, rules)) {
        Finding f{m.symptom, m.polarity};
        auto it = std::lower_bound(findings.begin(), findings.end(), f);
        if (it == findings.end() || *it != f) findings.insert(it, std::move(f));
    }
    return findings;
}

/// One row of the labeled negation mini-corpus.
struct MiniCorpusRow {
    std::string sentence;
    std::string symptom;
    Polarity gold = Polarity::present;
};

/// Tab-separated: sentence \t symptom \t polarity. Lines starting with '#'
/// are comments.
inline std::vector<MiniCorpusRow> read_minicorpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mini-corpus: " + path);
    std::vector<MiniCorpusRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 tab-separated fields");
        rows.push_back(MiniCorpusRow{line.substr(0, t1),
                                     line.substr(t1 + 1, t2 - t1 - 1),
                                     parse_polarity(line.substr(t2 + 1))});
    }
    return rows;
}

/// Fraction of mini-corpus rows whose detected polarity matches gold. A row
/// whose symptom is not detected at all counts as wrong.
inline double minicorpus_accuracy(const std::vector<MiniCorpusRow>& rows,
                                  const SymptomUniverse& universe,
                                  const NegationRules& rules) {
    if (rows.empty()) throw std::invalid_argument("empty mini-corpus");
    std::size_t correct = 0;
    for (const auto& row : rows) {
        const std::vector<Mention> mentions = extract_mentions(row.sentence, universe, rules);
        bool found = false, match = false;
        for (const Mention& m : mentions) {
            if (m.symptom != row.symptom) continue;
            found = true;
            match = m.polarity == row.gold;
            break;  // first mention of the symptom decides the row
        }
        if (found && match) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace dxcover::textfind
