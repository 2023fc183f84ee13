#pragma once

// Clinical case construction from patient timelines: identify patients
// carrying a phenotype, find resolved disease windows, and extract findings
// from the first note of each window.
//
// Resolution rule: a run of consecutive phenotype-coded encounters resolves
// when no encounter of ANY kind follows within tau days of the run's last
// encounter. A same-phenotype encounter inside tau extends the run; any
// other encounter inside tau discards it (a different-phenotype confound is
// the special case of that rule).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dxcover/ehr.hpp"
#include "dxcover/textfind.hpp"

namespace dxcover::casebuild {

/// Maximal run of phenotype-coded encounters treated as one disease episode.
struct EncounterWindow {
    std::string patient_id;
    std::size_t start_index = 0;  // indices into the timeline
    std::size_t end_index = 0;    // inclusive
    int start_time = 0;
    int end_time = 0;
};

/// Why candidate runs were kept or dropped; surfaced by the CLI per disease.
struct WindowStats {
    std::size_t resolved = 0;
    std::size_t blocked_by_other_phenotype = 0;
    std::size_t blocked_by_uncoded_followup = 0;
};

/// Patients with at least one outpatient encounter carrying a phenotype code.
/// Output order follows corpus order. Age bounds are optional hooks.
inline std::vector<std::string> identify_patients(const std::vector<Timeline>& corpus,
                                                  const Phenotype& phenotype,
                                                  std::optional<int> min_age = std::nullopt,
                                                  std::optional<int> max_age = std::nullopt) {
    std::vector<std::string> out;
    for (const Timeline& t : corpus) {
        if (min_age && (!t.age || *t.age < *min_age)) continue;
        if (max_age && (!t.age || *t.age > *max_age)) continue;
        for (const Encounter& e : t.encounters) {
            if (e.visit_class == VisitClass::outpatient && phenotype.matches(e)) {
                out.push_back(t.patient_id);
                break;
            }
        }
    }
    return out;
}

/// All resolved disease windows of one timeline. `all_phenotypes` is used
/// only to classify discards (confound vs plain follow-up) in `stats`.
inline std::vector<EncounterWindow> resolved_windows(const Timeline& timeline,
                                                     const Phenotype& phenotype,
                                                     const std::vector<Phenotype>& all_phenotypes,
                                                     int tau,
                                                     WindowStats* stats = nullptr) {
    if (tau < 1) throw std::invalid_argument("tau must be >= 1 day");
    const auto& encs = timeline.encounters;
    std::vector<EncounterWindow> windows;

    auto matches_other_phenotype = [&](const Encounter& e) {
        for (const Phenotype& p : all_phenotypes)
            if (p.disease() != phenotype.disease() && p.matches(e)) return true;
        return false;
    };

    std::size_t i = 0;
    while (i < encs.size()) {
        if (!phenotype.matches(encs[i])) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t last = i;
        bool blocked = false;
        bool blocked_by_confound = false;
        std::size_t j = last + 1;
        while (j < encs.size()) {
            const int gap = encs[j].time - encs[last].time;
            if (gap >= tau) break;  // quiet long enough: resolved before j
            if (phenotype.matches(encs[j])) {
                last = j;  // same-phenotype follow-up extends the episode
                j = last + 1;
                continue;
            }
            blocked = true;
            blocked_by_confound = matches_other_phenotype(encs[j]);
            break;
        }
        if (!blocked) {
            windows.push_back(EncounterWindow{timeline.patient_id, start, last,
                                              encs[start].time, encs[last].time});
            if (stats) ++stats->resolved;
            i = last + 1;
        } else {
            if (stats) {
                if (blocked_by_confound)
                    ++stats->blocked_by_other_phenotype;
                else
                    ++stats->blocked_by_uncoded_followup;
            }
            i = j + 1;  // resume past the blocking encounter
        }
    }
    return windows;
}

/// Findings from the note of the FIRST encounter in the window only.
inline std::vector<Finding> extract_findings(const EncounterWindow& window,
                                             const Timeline& timeline,
                                             const SymptomUniverse& universe,
                                             const textfind::NegationRules& rules) {
    if (window.start_index >= timeline.encounters.size() ||
        window.end_index >= timeline.encounters.size() ||
        window.start_index > window.end_index)
        throw std::invalid_argument("window does not fit timeline " + timeline.patient_id);
    const std::string& note = timeline.encounters[window.start_index].note;
    return textfind::note_findings(note, universe, rules);
}

/// Algorithm for constructing the clinical cases of a single disease:
/// identify_patients -> resolved_windows -> extract_findings, dropping
/// windows whose extracted finding set is empty.
inline std::vector<ClinicalCase> build_cases(const std::vector<Timeline>& corpus,
                                             const std::string& disease,
                                             const Phenotype& phenotype,
                                             const std::vector<Phenotype>& all_phenotypes,
                                             const SymptomUniverse& universe,
                                             const textfind::NegationRules& rules,
                                             int tau,
                                             WindowStats* stats = nullptr,
                                             std::optional<int> min_age = std::nullopt,
                                             std::optional<int> max_age = std::nullopt) {
    const std::vector<std::string> patients =
        identify_patients(corpus, phenotype, min_age, max_age);
    std::vector<ClinicalCase> cases;
    std::size_t pi = 0;
    for (const Timeline& t : corpus) {
        if (pi >= patients.size()) break;
        if (t.patient_id != patients[pi]) continue;
        ++pi;
        for (const EncounterWindow& w : resolved_windows(t, phenotype, all_phenotypes, tau, stats)) {
            ClinicalCase c;
            c.patient_id = t.patient_id;
            c.label = disease;
            for (Finding& f : extract_findings(w, t, universe, rules)) c.add_finding(std::move(f));
            if (!c.findings.empty()) cases.push_back(std::move(c));
        }
    }
    return cases;
}

}  // namespace dxcover::casebuild
