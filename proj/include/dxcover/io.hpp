#pragma once

// File formats. Corpora and cases travel as JSONL (one record per line);
// everything is written with a fixed key order and shortest round-trip
// number formatting so reruns are byte-identical.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dxcover/ehr.hpp"
#include "dxcover/rng.hpp"

namespace dxcover::io {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips the double.
inline std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Content digest recorded in run manifests.
inline std::string file_digest(const std::string& path) {
    const std::uint64_t h = rng::fnv1a64(read_file(path));
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

inline ordered_json timeline_to_json(const Timeline& t) {
    ordered_json j;
    j["patient_id"] = t.patient_id;
    if (t.age) j["age"] = *t.age;
    ordered_json encs = ordered_json::array();
    for (const Encounter& e : t.encounters) {
        ordered_json je;
        je["encounter_id"] = e.encounter_id;
        je["time"] = e.time;
        je["visit_class"] = to_string(e.visit_class);
        je["icd_codes"] = std::vector<std::string>(e.icd_codes.begin(), e.icd_codes.end());
        je["note"] = e.note;
        encs.push_back(std::move(je));
    }
    j["encounters"] = std::move(encs);
    return j;
}

inline Timeline timeline_from_json(const ordered_json& j) {
    Timeline t;
    t.patient_id = j.at("patient_id").get<std::string>();
    if (j.contains("age") && !j.at("age").is_null()) t.age = j.at("age").get<int>();
    for (const auto& je : j.at("encounters")) {
        Encounter e;
        e.encounter_id = je.at("encounter_id").get<std::string>();
        e.time = je.at("time").get<int>();
        e.visit_class = parse_visit_class(je.at("visit_class").get<std::string>());
        for (const auto& c : je.at("icd_codes")) e.icd_codes.insert(c.get<std::string>());
        e.note = je.at("note").get<std::string>();
        t.encounters.push_back(std::move(e));
    }
    return t;
}

inline std::string timeline_to_line(const Timeline& t) { return timeline_to_json(t).dump(); }

inline Timeline timeline_from_line(const std::string& line) {
    return timeline_from_json(ordered_json::parse(line));
}

inline void write_corpus(const std::string& path, const std::vector<Timeline>& corpus) {
    std::string out;
    for (const Timeline& t : corpus) {
        out += timeline_to_line(t);
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<Timeline> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path);
    std::vector<Timeline> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            corpus.push_back(timeline_from_line(line));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed timeline record: " + ex.what());
        }
    }
    return corpus;
}

inline ordered_json case_to_json(const ClinicalCase& c) {
    ordered_json j;
    j["patient_id"] = c.patient_id;
    j["label"] = c.label;
    ordered_json fs = ordered_json::array();
    for (const Finding& f : c.findings) {
        ordered_json jf;
        jf["symptom"] = f.symptom;
        jf["polarity"] = to_string(f.polarity);
        fs.push_back(std::move(jf));
    }
    j["findings"] = std::move(fs);
    return j;
}

inline ClinicalCase case_from_json(const ordered_json& j) {
    ClinicalCase c;
    c.patient_id = j.at("patient_id").get<std::string>();
    c.label = j.at("label").get<std::string>();
    for (const auto& jf : j.at("findings")) {
        c.add_finding(Finding{jf.at("symptom").get<std::string>(),
                              parse_polarity(jf.at("polarity").get<std::string>())});
    }
    return c;
}

inline void write_cases(const std::string& path, const std::vector<ClinicalCase>& cases) {
    std::string out;
    for (const ClinicalCase& c : cases) {
        out += case_to_json(c).dump();
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<ClinicalCase> read_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cases file: " + path);
    std::vector<ClinicalCase> cases;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            cases.push_back(case_from_json(ordered_json::parse(line)));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed case record: " + ex.what());
        }
    }
    return cases;
}

/// Phenotype map file: JSON object, disease name -> list of ICD code strings.
inline std::vector<Phenotype> read_phenotypes(const std::string& path) {
    const ordered_json j = ordered_json::parse(read_file(path));
    if (!j.is_object()) throw std::runtime_error("phenotype map must be a JSON object: " + path);
    std::vector<Phenotype> out;
    for (const auto& [disease, codes] : j.items()) {
        std::vector<std::string> list;
        for (const auto& c : codes) list.push_back(c.get<std::string>());
        out.emplace_back(disease, list);
    }
    return out;
}

inline void write_phenotypes(const std::string& path, const std::vector<Phenotype>& phenotypes) {
    ordered_json j = ordered_json::object();
    for (const Phenotype& p : phenotypes)
        j[p.disease()] = std::vector<std::string>(p.codes().begin(), p.codes().end());
    write_file(path, j.dump(2) + "\n");
}

}  // namespace dxcover::io
