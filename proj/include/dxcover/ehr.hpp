#pragma once

// Core domain types shared by the whole pipeline: encounters, patient
// timelines, electronic phenotypes, the symptom universe, and clinical cases.
// All types are plain values, immutable by convention after construction.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dxcover/rng.hpp"

namespace dxcover {

enum class VisitClass { outpatient, inpatient, other };

inline std::string to_string(VisitClass vc) {
    switch (vc) {
        case VisitClass::outpatient: return "outpatient";
        case VisitClass::inpatient: return "inpatient";
        case VisitClass::other: return "other";
    }
    return "other";
}

inline VisitClass parse_visit_class(std::string_view s) {
    if (s == "outpatient") return VisitClass::outpatient;
    if (s == "inpatient") return VisitClass::inpatient;
    if (s == "other") return VisitClass::other;
    throw std::invalid_argument("unknown visit_class: " + std::string(s));
}

/// ICD codes are opaque strings, compared exactly after trimming and
/// uppercasing. No hierarchical prefix matching.
inline std::string normalize_code(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string out(raw.substr(b, e - b));
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

/// One visit: day offset since corpus epoch, visit class, billing codes, note.
struct Encounter {
    std::string encounter_id;
    int time = 0;  // integer day offset, >= 0
    VisitClass visit_class = VisitClass::outpatient;
    std::set<std::string> icd_codes;
    std::string note;
};

/// A patient's chronologically ordered encounters.
struct Timeline {
    std::string patient_id;
    std::optional<int> age;  // optional hook for demographic filtering
    std::vector<Encounter> encounters;
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Accepts iff encounter times strictly increase, ids are unique and times
/// are non-negative. Violations are reported, never thrown.
inline ValidationResult validate_timeline(const Timeline& t) {
    ValidationResult result;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < t.encounters.size(); ++i) {
        const Encounter& e = t.encounters[i];
        if (e.time < 0) {
            result.violations.push_back("encounter " + std::to_string(i) +
                                        ": negative time " + std::to_string(e.time));
        }
        if (!seen_ids.insert(e.encounter_id).second) {
            result.violations.push_back("encounter " + std::to_string(i) +
                                        ": duplicate encounter_id '" + e.encounter_id + "'");
        }
        if (i > 0) {
            const int prev = t.encounters[i - 1].time;
            if (e.time == prev) {
                result.violations.push_back("encounter " + std::to_string(i) +
                                            ": duplicate time " + std::to_string(e.time));
            } else if (e.time < prev) {
                result.violations.push_back("encounter " + std::to_string(i) +
                                            ": time " + std::to_string(e.time) +
                                            " not after " + std::to_string(prev));
            }
        }
    }
    return result;
}

/// The set of diagnosis codes that identify one disease state.
class Phenotype {
public:
    Phenotype() = default;
    Phenotype(std::string disease, const std::vector<std::string>& raw_codes)
        : disease_(std::move(disease)) {
        for (const auto& c : raw_codes) {
            const std::string norm = normalize_code(c);
            if (!norm.empty()) codes_.insert(norm);
        }
        if (codes_.empty())
            throw std::invalid_argument("phenotype '" + disease_ + "' has no codes");
    }

    const std::string& disease() const { return disease_; }
    const std::set<std::string>& codes() const { return codes_; }

    bool contains(std::string_view code) const {
        return codes_.count(normalize_code(code)) > 0;
    }

    /// True if the encounter carries at least one phenotype code.
    bool matches(const Encounter& e) const {
        for (const auto& code : e.icd_codes)
            if (codes_.count(normalize_code(code))) return true;
        return false;
    }

private:
    std::string disease_;
    std::set<std::string> codes_;
};

/// Ordered list of K canonical symptom names plus a surface-form synonym map.
/// The ordering fixes the feature layout for every model downstream.
class SymptomUniverse {
public:
    SymptomUniverse() = default;
    SymptomUniverse(std::vector<std::string> symptoms,
                    std::unordered_map<std::string, std::string> synonyms = {})
        : symptoms_(std::move(symptoms)), synonyms_(std::move(synonyms)) {
        for (std::size_t i = 0; i < symptoms_.size(); ++i) {
            if (!index_.emplace(symptoms_[i], i).second)
                throw std::invalid_argument("duplicate canonical symptom: " + symptoms_[i]);
        }
        for (const auto& [surface, canonical] : synonyms_) {
            if (!index_.count(canonical))
                throw std::invalid_argument("synonym '" + surface +
                                            "' maps to unknown symptom '" + canonical + "'");
        }
    }

    std::size_t size() const { return symptoms_.size(); }
    const std::vector<std::string>& symptoms() const { return symptoms_; }
    const std::unordered_map<std::string, std::string>& synonym_map() const { return synonyms_; }

    std::optional<std::size_t> index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

    /// Content hash binding model artifacts to the universe they were trained on.
    std::uint64_t hash() const {
        std::uint64_t h = rng::kFnvOffset;
        for (const auto& s : symptoms_) {
            h = rng::fnv1a64(s, h);
            h = rng::fnv1a64("\x1f", h);
        }
        return h;
    }

private:
    std::vector<std::string> symptoms_;
    std::unordered_map<std::string, std::string> synonyms_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class Polarity { present, absent };

inline std::string to_string(Polarity p) {
    return p == Polarity::present ? "present" : "absent";
}

inline Polarity parse_polarity(std::string_view s) {
    if (s == "present") return Polarity::present;
    if (s == "absent") return Polarity::absent;
    throw std::invalid_argument("unknown polarity: " + std::string(s));
}

/// A patient-facing symptom with polarity. Equality is (symptom, polarity):
/// a case may legitimately contain both fever:present and fever:absent.
struct Finding {
    std::string symptom;
    Polarity polarity = Polarity::present;

    friend auto operator<=>(const Finding&, const Finding&) = default;
};

/// One labeled training/evaluation example.
struct ClinicalCase {
    std::string patient_id;
    std::vector<Finding> findings;  // kept sorted and deduplicated
    std::string label;

    void add_finding(Finding f) {
        auto it = std::lower_bound(findings.begin(), findings.end(), f);
        if (it == findings.end() || *it != f) findings.insert(it, std::move(f));
    }

    bool has_finding(const Finding& f) const {
        return std::binary_search(findings.begin(), findings.end(), f);
    }
};

}  // namespace dxcover
