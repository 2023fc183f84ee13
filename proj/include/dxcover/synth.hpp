#pragma once

// Synthetic EHR corpus generation. Stands in for hospital data: tunable
// disease count, symptom-support overlap, prevalence skew, and a mix of the
// four encounter-window scenarios (clean resolution, repeat episodes,
// confounding phenotype inside tau, same-phenotype follow-up inside tau).
//
// Overlap construction: disease supports of size m are sampled from a shared
// symptom zone of size ~m/overlap, so the mean pairwise support overlap
// |A∩B|/min(|A|,|B|) lands on the requested value in expectation. overlap=0
// allocates pairwise-disjoint supports instead.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dxcover/ehr.hpp"
#include "dxcover/io.hpp"
#include "dxcover/rng.hpp"

namespace dxcover::synth {

struct DiseaseProfile {
    std::string disease;
    Phenotype phenotype;
    std::map<std::string, double> finding_probs;  // symptom -> P(mentioned present)
    std::map<std::string, double> negated_probs;  // symptom -> P(mentioned negated)
    double prevalence_weight = 1.0;
};

struct World {
    SymptomUniverse universe;
    std::vector<DiseaseProfile> profiles;
    double overlap = 0.0;
    std::uint64_t seed = 0;
};

/// Probabilities over the four Figure-style patient scenarios.
struct ScenarioMix {
    double clean = 1.0;       // A: one resolved window
    double repeat = 0.0;      // B: two separate windows
    double confound = 0.0;    // C: different phenotype inside tau, window discarded
    double followup = 0.0;    // D: same-phenotype follow-up inside tau extends the window

    void validate() const {
        const double sum = clean + repeat + confound + followup;
        if (clean < 0 || repeat < 0 || confound < 0 || followup < 0 ||
            std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("scenario mix must be non-negative and sum to 1");
    }
};

struct GenConfig {
    std::size_t n_patients = 0;
    ScenarioMix scenario_mix;
    int tau = 30;
    double noise = 0.0;  // probability of spurious/conflicting/missing mentions

    void validate() const {
        scenario_mix.validate();
        if (tau < 1) throw std::invalid_argument("tau must be >= 1 day");
        if (noise < 0.0 || noise > 1.0)
            throw std::invalid_argument("noise must be in [0,1]");
    }
};

/// Generator shape knobs; mention-count targets are exposed but the emitted
/// distributions make no fidelity claim.
struct WorldOptions {
    std::size_t support_size = 10;   // symptoms with positive mention probability
    double mean_present = 6.0;       // target expected present mentions per case
    std::size_t n_negated = 4;       // negation candidates per disease
    double mean_negated = 2.0;       // target expected negated mentions per case
};

namespace detail {

inline const std::vector<std::string>& symptom_bank() {
    static const std::vector<std::string> bank = {
        "fever", "cough", "headache", "fatigue", "nausea", "vomiting", "diarrhea",
        "chest pain", "sore throat", "back pain", "shortness of breath", "runny nose",
        "nasal congestion", "urinary frequency", "neck stiffness", "joint pain",
        "abdominal pain", "blurred vision", "ear pain", "leg swelling", "dizziness",
        "rash", "chills", "wheezing", "palpitations", "dysuria", "constipation",
        "heartburn", "itching", "hoarseness", "sneezing", "muscle aches", "night sweats",
        "loss of appetite", "weight loss", "swollen glands", "eye redness", "mouth ulcers",
        "nosebleed", "tingling", "numbness", "tremor", "insomnia", "anxiety",
        "low back pain", "knee pain", "shoulder pain", "facial pain", "jaw pain",
        "bloating", "belching", "flank pain", "pelvic pain", "dry mouth", "bad breath",
        "hair loss"};
    return bank;
}

inline const std::unordered_map<std::string, std::string>& bank_synonyms() {
    static const std::unordered_map<std::string, std::string> syn = {
        {"pyrexia", "fever"},
        {"febrile", "fever"},
        {"cephalgia", "headache"},
        {"rhinorrhea", "runny nose"},
        {"dyspnea", "shortness of breath"},
        {"emesis", "vomiting"},
        {"vertigo", "dizziness"},
        {"pruritus", "itching"},
    };
    return syn;
}

/// Deterministic pseudo-word for symptom indices beyond the bank.
inline std::string pseudo_symptom(std::size_t i) {
    static const char* s1[] = {"bra", "cle", "dro", "fla", "gri", "ka", "lu", "mo",
                               "ne", "pla", "qua", "ro", "sta", "tri", "vex", "zo"};
    static const char* s2[] = {"ba", "den", "fi", "gor", "lin", "ma", "nu", "pel",
                               "ra", "sto", "tu", "vi"};
    static const char* s3[] = {"sis", "tia", "rum", "lex", "von", "dra", "phy", "gos",
                               "nid", "kel", "mur", "zet"};
    std::string name = s1[i % 16];
    name += s2[(i / 16) % 12];
    name += s3[(i / 192) % 12];
    if (i >= 16 * 12 * 12) name += std::to_string(i);
    return name;
}

inline std::string disease_name(std::size_t i) {
    static const char* pre[] = {"cardi", "gastr",  "derm",   "neur",  "pulm",
                                "hepat", "nephr",  "arthr",  "rhin",  "ot",
                                "enter", "col",    "bronch", "cyst",  "myel",
                                "phleb", "sinus",  "lymph",  "vascul", "thyro"};
    static const char* mid[] = {"o", "a", "i", "oxy", "ara", "eno",
                                "ita", "ulo", "emi", "ora", "ize", "ano"};
    static const char* suf[] = {"itis", "osis", "algia", "opathy", "emia", "oma"};
    std::string name = pre[i % 20];
    name += mid[(i / 20) % 12];
    name += suf[(i / 240) % 6];
    if (i >= 20 * 12 * 6) name += std::to_string(i);
    return name;
}

inline std::vector<std::string> phenotype_codes(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%03zu", static_cast<char>('A' + i % 26), i);
    std::vector<std::string> codes{std::string(buf) + ".0"};
    if (i % 2 == 1) codes.push_back(std::string(buf) + ".1");
    return codes;
}

}  // namespace detail

/// Deterministic world construction. With overlap=0, disease supports are
/// pairwise disjoint; prevalence weights follow (rank+1)^-skew.
inline World generate_world(std::size_t n_diseases, std::size_t k_symptoms, double overlap,
                            double prevalence_skew, std::uint64_t seed,
                            const WorldOptions& opts = {}) {
    if (n_diseases < 1) throw std::invalid_argument("n_diseases must be >= 1");
    if (k_symptoms < n_diseases)
        throw std::invalid_argument("k_symptoms must be >= n_diseases");
    if (overlap < 0.0 || overlap > 1.0)
        throw std::invalid_argument("overlap must be in [0,1]");
    if (prevalence_skew < 0.0)
        throw std::invalid_argument("prevalence_skew must be >= 0");
    if (opts.support_size < 1) throw std::invalid_argument("support_size must be >= 1");

    const auto& bank = detail::symptom_bank();
    std::vector<std::string> symptoms;
    symptoms.reserve(k_symptoms);
    for (std::size_t i = 0; i < k_symptoms; ++i)
        symptoms.push_back(i < bank.size() ? bank[i] : detail::pseudo_symptom(i - bank.size()));
    std::unordered_map<std::string, std::string> synonyms;
    for (const auto& [surface, canonical] : detail::bank_synonyms())
        if (std::find(symptoms.begin(), symptoms.end(), canonical) != symptoms.end())
            synonyms.emplace(surface, canonical);

    World world;
    world.universe = SymptomUniverse(std::move(symptoms), std::move(synonyms));
    world.overlap = overlap;
    world.seed = seed;

    rng::Rng world_rng(rng::derive(seed, "world"));

    // Symptom pool the supports draw from.
    std::vector<std::size_t> order(k_symptoms);
    for (std::size_t i = 0; i < k_symptoms; ++i) order[i] = i;
    world_rng.shuffle(order);

    std::size_t m = std::min(opts.support_size, k_symptoms);
    std::size_t zone = k_symptoms;
    if (overlap == 0.0) {
        m = std::min(m, k_symptoms / n_diseases);
        if (m == 0) m = 1;
    } else {
        const auto wanted = static_cast<std::size_t>(std::llround(static_cast<double>(m) / overlap));
        zone = std::clamp<std::size_t>(wanted, m, k_symptoms);
    }

    for (std::size_t d = 0; d < n_diseases; ++d) {
        DiseaseProfile profile;
        profile.disease = detail::disease_name(d);
        profile.phenotype = Phenotype(profile.disease, detail::phenotype_codes(d));
        profile.prevalence_weight = std::pow(static_cast<double>(d + 1), -prevalence_skew);

        rng::Rng prof_rng(rng::derive(seed, "profile", d));
        std::vector<std::size_t> support;
        if (overlap == 0.0) {
            for (std::size_t j = 0; j < m; ++j) support.push_back(order[d * m + j]);
        } else {
            for (std::size_t pick : prof_rng.sample_without_replacement(zone, m))
                support.push_back(order[pick]);
        }

        // Mention probabilities: one leading symptom, the rest scaled so the
        // expected present-mention count tracks opts.mean_present.
        const double primary = prof_rng.uniform(0.8, 0.95);
        std::vector<double> raw(support.size(), 0.0);
        double raw_sum = 0.0;
        for (std::size_t j = 1; j < support.size(); ++j) {
            raw[j] = prof_rng.uniform(0.3, 0.9);
            raw_sum += raw[j];
        }
        const double budget = std::max(0.0, opts.mean_present - primary);
        const double scale = raw_sum > 0.0 ? budget / raw_sum : 0.0;
        profile.finding_probs[world.universe.symptoms()[support[0]]] = primary;
        for (std::size_t j = 1; j < support.size(); ++j) {
            const double p = std::clamp(raw[j] * scale, 0.05, 0.95);
            profile.finding_probs[world.universe.symptoms()[support[j]]] = p;
        }

        // Differential negations: symptoms outside the support, preferring the
        // shared zone so "NOT x" carries signal between confusable diseases.
        const std::size_t negation_pool = overlap > 0.0 ? zone : k_symptoms;
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < negation_pool && candidates.size() < opts.n_negated * 4; ++j) {
            const std::size_t sym = order[j];
            if (std::find(support.begin(), support.end(), sym) == support.end())
                candidates.push_back(sym);
        }
        const std::size_t n_neg = std::min(opts.n_negated, candidates.size());
        if (n_neg > 0) {
            const double base = opts.mean_negated / static_cast<double>(n_neg);
            for (std::size_t pick : prof_rng.sample_without_replacement(candidates.size(), n_neg)) {
                const double p = std::clamp(base + prof_rng.uniform(-0.1, 0.1), 0.05, 0.95);
                profile.negated_probs[world.universe.symptoms()[candidates[pick]]] = p;
            }
        }
        world.profiles.push_back(std::move(profile));
    }
    return world;
}

namespace detail {

struct NoteFinding {
    std::string symptom;
    Polarity polarity;
};

inline std::string surface_form(const std::string& canonical, const World& world,
                                rng::Rng& r) {
    if (r.bernoulli(0.2)) {
        std::vector<const std::string*> alts;
        for (const auto& [surface, canon] : world.universe.synonym_map())
            if (canon == canonical) alts.push_back(&surface);
        if (!alts.empty()) {
            std::sort(alts.begin(), alts.end(),
                      [](const std::string* a, const std::string* b) { return *a < *b; });
            return *alts[r.below(alts.size())];
        }
    }
    return canonical;
}

inline std::string render_note(std::vector<NoteFinding> findings, const World& world,
                               rng::Rng& r) {
    static const char* present_tpl[] = {"Patient reports %s.", "Complains of %s.",
                                        "Reports %s for several days.", "Presents with %s."};
    static const char* absent_tpl[] = {"No %s.", "Denies %s.", "Without %s.",
                                       "Negative for %s."};
    r.shuffle(findings);

    std::string note;
    std::size_t i = 0;
    while (i < findings.size()) {
        char buf[160];
        const std::string surface = surface_form(findings[i].symptom, world, r);
        // Occasionally join an absent and a present finding with "but" to
        // exercise negation scope termination.
        if (i + 1 < findings.size() && findings[i].polarity == Polarity::absent &&
            findings[i + 1].polarity == Polarity::present && r.bernoulli(0.25)) {
            const std::string surface2 = surface_form(findings[i + 1].symptom, world, r);
            std::snprintf(buf, sizeof(buf), "Denies %s but reports %s.", surface.c_str(),
                          surface2.c_str());
            note += buf;
            note += ' ';
            i += 2;
            continue;
        }
        if (findings[i].polarity == Polarity::present) {
            std::snprintf(buf, sizeof(buf), present_tpl[r.below(4)], surface.c_str());
        } else {
            std::snprintf(buf, sizeof(buf), absent_tpl[r.below(4)], surface.c_str());
        }
        note += buf;
        note += ' ';
        ++i;
    }
    if (!note.empty() && note.back() == ' ') note.pop_back();
    return note;
}

/// Sample the findings mentioned in an index note for one episode.
inline std::vector<NoteFinding> sample_findings(const DiseaseProfile& profile,
                                                const World& world, double noise,
                                                rng::Rng& r) {
    std::vector<NoteFinding> sampled;
    const std::string* best = nullptr;
    double best_p = -1.0;
    for (const auto& [symptom, p] : profile.finding_probs) {
        if (p > best_p) {
            best_p = p;
            best = &symptom;
        }
        if (r.bernoulli(p)) sampled.push_back({symptom, Polarity::present});
    }
    // A case with no present finding is uninformative; mention the leading
    // symptom instead of emitting an empty note.
    const bool any_present =
        std::any_of(sampled.begin(), sampled.end(),
                    [](const NoteFinding& f) { return f.polarity == Polarity::present; });
    if (!any_present && best) sampled.push_back({*best, Polarity::present});

    for (const auto& [symptom, p] : profile.negated_probs)
        if (r.bernoulli(p)) sampled.push_back({symptom, Polarity::absent});

    if (noise > 0.0) {
        const auto& symptoms = world.universe.symptoms();
        if (r.bernoulli(noise))  // spurious present mention
            sampled.push_back({symptoms[r.below(symptoms.size())], Polarity::present});
        if (r.bernoulli(noise))  // spurious negated mention
            sampled.push_back({symptoms[r.below(symptoms.size())], Polarity::absent});
        if (r.bernoulli(noise)) {
            // Conflicting re-mention: the same symptom recorded present in one
            // sentence and negated in another, as real notes do.
            std::vector<std::size_t> present_idx;
            for (std::size_t i = 0; i < sampled.size(); ++i)
                if (sampled[i].polarity == Polarity::present) present_idx.push_back(i);
            if (!present_idx.empty()) {
                const auto& victim = sampled[present_idx[r.below(present_idx.size())]];
                sampled.push_back({victim.symptom, Polarity::absent});
            }
        }
        if (r.bernoulli(noise)) {
            // Missing mention: drop one present finding, keeping at least one.
            std::vector<std::size_t> present_idx;
            for (std::size_t i = 0; i < sampled.size(); ++i)
                if (sampled[i].polarity == Polarity::present) present_idx.push_back(i);
            if (present_idx.size() >= 2)
                sampled.erase(sampled.begin() +
                              static_cast<std::ptrdiff_t>(present_idx[r.below(present_idx.size())]));
        }
    }
    return sampled;
}

inline VisitClass random_distractor_class(rng::Rng& r) {
    const double u = r.uniform();
    if (u < 0.6) return VisitClass::outpatient;
    if (u < 0.8) return VisitClass::inpatient;
    return VisitClass::other;
}

inline std::string pick_code(const Phenotype& phenotype, rng::Rng& r) {
    std::vector<std::string> codes(phenotype.codes().begin(), phenotype.codes().end());
    return codes[r.below(codes.size())];
}

}  // namespace detail

/// Generate one timeline per patient. Deterministic: each patient's stream is
/// derived from (world.seed, patient index), so generation order never
/// matters. Every emitted timeline passes validate_timeline.
inline std::vector<Timeline> generate_timelines(const World& world, const GenConfig& cfg) {
    cfg.validate();
    if (world.profiles.empty()) throw std::invalid_argument("world has no disease profiles");

    std::vector<double> weights;
    for (const auto& p : world.profiles) weights.push_back(p.prevalence_weight);

    std::vector<Timeline> corpus;
    corpus.reserve(cfg.n_patients);
    for (std::size_t pi = 0; pi < cfg.n_patients; ++pi) {
        rng::Rng r(rng::derive(world.seed, "patient", pi));
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "p%06zu", pi);

        Timeline t;
        t.patient_id = idbuf;
        t.age = static_cast<int>(r.uniform_int(18, 50));

        const DiseaseProfile& profile = world.profiles[r.weighted_index(weights)];
        const double u = r.uniform();
        const ScenarioMix& mix = cfg.scenario_mix;
        enum class Scenario { A, B, C, D } scenario;
        if (u < mix.clean)
            scenario = Scenario::A;
        else if (u < mix.clean + mix.repeat)
            scenario = Scenario::B;
        else if (u < mix.clean + mix.repeat + mix.confound)
            scenario = Scenario::C;
        else
            scenario = Scenario::D;

        int day = static_cast<int>(r.uniform_int(0, 3650));
        std::size_t enc_idx = 0;
        auto push = [&](int time, VisitClass vc, std::vector<std::string> codes,
                        std::string note) {
            Encounter e;
            char eb[24];
            std::snprintf(eb, sizeof(eb), "%s-e%02zu", idbuf, enc_idx++);
            e.encounter_id = eb;
            e.time = time;
            e.visit_class = vc;
            for (auto& c : codes) e.icd_codes.insert(std::move(c));
            e.note = std::move(note);
            t.encounters.push_back(std::move(e));
        };

        // Optional unrelated visit well before the index episode.
        if (day > 3 * cfg.tau && r.bernoulli(0.3)) {
            push(day - static_cast<int>(r.uniform_int(cfg.tau, 2 * cfg.tau)),
                 detail::random_distractor_class(r), {"Z00.0"}, "Routine visit.");
        }

        const int small_gap_hi = std::max(1, std::min(cfg.tau - 1, 9));
        auto emit_run = [&](int start_day) -> int {
            int tday = start_day;
            const std::size_t run_len = cfg.tau >= 2 && r.bernoulli(0.35) ? 2 : 1;
            for (std::size_t k = 0; k < run_len; ++k) {
                std::string note;
                if (k == 0) {
                    note = detail::render_note(
                        detail::sample_findings(profile, world, cfg.noise, r), world, r);
                } else {
                    note = "Symptoms improving.";
                }
                push(tday, VisitClass::outpatient, {detail::pick_code(profile.phenotype, r)},
                     std::move(note));
                if (k + 1 < run_len) tday += static_cast<int>(r.uniform_int(1, small_gap_hi));
            }
            return tday;  // day of the run's last encounter
        };

        int last = emit_run(day);
        switch (scenario) {
            case Scenario::A:
                break;
            case Scenario::B: {
                const int next = last + cfg.tau + static_cast<int>(r.uniform_int(0, 60));
                last = emit_run(next);
                break;
            }
            case Scenario::C: {
                // Encounter coded for a different phenotype inside tau.
                const DiseaseProfile* other = &profile;
                if (world.profiles.size() > 1) {
                    std::size_t oi = r.below(world.profiles.size());
                    if (world.profiles[oi].disease == profile.disease)
                        oi = (oi + 1) % world.profiles.size();
                    other = &world.profiles[oi];
                }
                const int when = last + static_cast<int>(r.uniform_int(1, std::max(1, cfg.tau - 1)));
                if (other != &profile) {
                    push(when, detail::random_distractor_class(r),
                         {detail::pick_code(other->phenotype, r)}, "Seen for a separate concern.");
                } else {
                    push(when, detail::random_distractor_class(r), {},
                         "Seen for a separate concern.");
                }
                last = when;
                break;
            }
            case Scenario::D: {
                if (cfg.tau >= 2) {
                    const int when =
                        last + static_cast<int>(r.uniform_int(std::max(1, cfg.tau / 3),
                                                              cfg.tau - 1));
                    push(when, VisitClass::outpatient, {detail::pick_code(profile.phenotype, r)},
                         "Symptoms improving.");
                    last = when;
                }
                break;
            }
        }

        // Optional unrelated visit after resolution.
        if (r.bernoulli(0.3)) {
            push(last + cfg.tau + static_cast<int>(r.uniform_int(0, 90)),
                 detail::random_distractor_class(r), {"Z00.0"}, "Routine visit.");
        }

        corpus.push_back(std::move(t));
    }
    return corpus;
}

inline io::ordered_json world_to_json(const World& world) {
    io::ordered_json j;
    j["seed"] = world.seed;
    j["overlap"] = world.overlap;
    io::ordered_json ju;
    ju["symptoms"] = world.universe.symptoms();
    std::map<std::string, std::string> sorted_syn(world.universe.synonym_map().begin(),
                                                  world.universe.synonym_map().end());
    ju["synonyms"] = sorted_syn;
    j["universe"] = std::move(ju);
    io::ordered_json profiles = io::ordered_json::array();
    for (const DiseaseProfile& p : world.profiles) {
        io::ordered_json jp;
        jp["disease"] = p.disease;
        jp["codes"] = std::vector<std::string>(p.phenotype.codes().begin(),
                                               p.phenotype.codes().end());
        jp["prevalence_weight"] = p.prevalence_weight;
        jp["finding_probs"] = p.finding_probs;
        jp["negated_probs"] = p.negated_probs;
        profiles.push_back(std::move(jp));
    }
    j["profiles"] = std::move(profiles);
    return j;
}

inline World world_from_json(const io::ordered_json& j) {
    World world;
    world.seed = j.at("seed").get<std::uint64_t>();
    world.overlap = j.at("overlap").get<double>();
    std::vector<std::string> symptoms =
        j.at("universe").at("symptoms").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::string> synonyms;
    for (const auto& [surface, canonical] : j.at("universe").at("synonyms").items())
        synonyms.emplace(surface, canonical.get<std::string>());
    world.universe = SymptomUniverse(std::move(symptoms), std::move(synonyms));

    std::set<std::string> seen_names;
    std::set<std::string> seen_codes;
    for (const auto& jp : j.at("profiles")) {
        DiseaseProfile p;
        p.disease = jp.at("disease").get<std::string>();
        if (!seen_names.insert(p.disease).second)
            throw std::invalid_argument("duplicate disease in world: " + p.disease);
        p.phenotype = Phenotype(p.disease, jp.at("codes").get<std::vector<std::string>>());
        for (const auto& code : p.phenotype.codes())
            if (!seen_codes.insert(code).second)
                throw std::invalid_argument("phenotype code shared by two diseases: " + code);
        p.prevalence_weight = jp.at("prevalence_weight").get<double>();
        bool any_positive = false;
        for (const auto& [symptom, prob] : jp.at("finding_probs").items()) {
            const double pr = prob.get<double>();
            if (pr < 0.0 || pr > 1.0 || !world.universe.contains(symptom))
                throw std::invalid_argument("bad finding_prob for " + symptom);
            if (pr > 0.0) any_positive = true;
            p.finding_probs[symptom] = pr;
        }
        if (!any_positive)
            throw std::invalid_argument("profile " + p.disease + " has no positive finding prob");
        for (const auto& [symptom, prob] : jp.at("negated_probs").items()) {
            const double pr = prob.get<double>();
            if (pr < 0.0 || pr > 1.0 || !world.universe.contains(symptom))
                throw std::invalid_argument("bad negated_prob for " + symptom);
            p.negated_probs[symptom] = pr;
        }
        if (p.prevalence_weight <= 0.0)
            throw std::invalid_argument("prevalence_weight must be positive");
        world.profiles.push_back(std::move(p));
    }
    return world;
}

inline void write_world(const std::string& path, const World& world) {
    io::write_file(path, world_to_json(world).dump(2) + "\n");
}

inline World read_world(const std::string& path) {
    return world_from_json(io::ordered_json::parse(io::read_file(path)));
}

/// Phenotypes of every profile, in world order.
inline std::vector<Phenotype> world_phenotypes(const World& world) {
    std::vector<Phenotype> out;
    out.reserve(world.profiles.size());
    for (const auto& p : world.profiles) out.push_back(p.phenotype);
    return out;
}

}  // namespace dxcover::synth
