// Copyright 2026 The Valleyscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "valleyscope/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace valleyscope {

using nlohmann::json;

json model_to_json(const RbmParams& p, const ModelMeta& meta) {
    p.validate();
    json w = json::array();
    for (int i = 0; i < p.n_h; ++i)
        for (int j = 0; j < p.n_v; ++j) w.push_back(p.w(i, j));
    json b = json::array();
    for (int j = 0; j < p.n_v; ++j) b.push_back(p.b[j]);
    json c = json::array();
    for (int i = 0; i < p.n_h; ++i) c.push_back(p.c[i]);
    return json{{"n_v", p.n_v},
                {"n_h", p.n_h},
                {"w", std::move(w)},
                {"b", std::move(b)},
                {"c", std::move(c)},
                {"label_units", p.label_units},
                {"meta",
                 {{"seed", meta.seed},
                  {"epochs", meta.epochs},
                  {"dataset-id", meta.dataset_id},
                  {"w_cap", p.w_cap}}}};
}

RbmParams model_from_json(const json& doc, ModelMeta* meta) {
    RbmParams p;
    p.n_v = doc.at("n_v").get<int>();
    p.n_h = doc.at("n_h").get<int>();
    const auto& w = doc.at("w");
    if (static_cast<int>(w.size()) != p.n_v * p.n_h)
        throw std::runtime_error("model: weight array size mismatch");
    p.w = Mat(p.n_h, p.n_v);
    for (int i = 0; i < p.n_h; ++i)
        for (int j = 0; j < p.n_v; ++j) p.w(i, j) = w[i * p.n_v + j].get<double>();
    p.b = Vec(p.n_v);
    for (int j = 0; j < p.n_v; ++j) p.b[j] = doc.at("b")[j].get<double>();
    p.c = Vec(p.n_h);
    for (int i = 0; i < p.n_h; ++i) p.c[i] = doc.at("c")[i].get<double>();
    p.label_units = doc.at("label_units").get<std::vector<int>>();
    if (doc.contains("meta")) {
        const json& m = doc["meta"];
        p.w_cap = m.value("w_cap", 0.5);
        if (meta) {
            meta->seed = m.value("seed", std::uint64_t{0});
            meta->epochs = m.value("epochs", 0);
            meta->dataset_id = m.value("dataset-id", std::string{});
        }
    }
    p.validate();
    return p;
}

void save_model(const std::string& path, const RbmParams& p, const ModelMeta& meta) {
    write_file(path, model_to_json(p, meta).dump(2) + "\n");
}

RbmParams load_model(const std::string& path, ModelMeta* meta) {
    return model_from_json(json::parse(read_file(path)), meta);
}

json problem_to_json(const IsingProblem& problem) {
    json h = json::object();
    for (int q = 0; q < problem.n_qubits; ++q) h[std::to_string(q)] = problem.h[q];
    json couplings = json::object();
    for (std::size_t k = 0; k < problem.couplers.size(); ++k) {
        const auto [a, b] = problem.couplers[k];
        couplings[std::to_string(a) + "," + std::to_string(b)] =
            problem.j[static_cast<Eigen::Index>(k)];
    }
    return json{{"h", std::move(h)},
                {"J", std::move(couplings)},
                {"meta",
                 {{"M", problem.meta.rows},
                  {"N", problem.meta.cols},
                  {"c", problem.meta.half},
                  {"s", problem.meta.scale},
                  {"chain_coupling", problem.meta.chain_coupling},
                  {"convention", "E = -sum J s s - sum h s"}}}};
}

IsingProblem problem_from_json(const json& doc) {
    IsingProblem problem;
    int max_index = -1;
    for (const auto& [key, value] : doc.at("h").items()) {
        (void)value;
        max_index = std::max(max_index, std::stoi(key));
    }
    for (const auto& [key, value] : doc.at("J").items()) {
        (void)value;
        const auto comma = key.find(',');
        max_index = std::max({max_index, std::stoi(key.substr(0, comma)),
                              std::stoi(key.substr(comma + 1))});
    }
    if (max_index < 0) throw std::runtime_error("problem: empty document");
    problem.n_qubits = max_index + 1;
    problem.h = Vec::Zero(problem.n_qubits);
    for (const auto& [key, value] : doc.at("h").items())
        problem.h[std::stoi(key)] = value.get<double>();
    problem.couplers.reserve(doc.at("J").size());
    std::vector<double> j_values;
    for (const auto& [key, value] : doc.at("J").items()) {
        const auto comma = key.find(',');
        const int a = std::stoi(key.substr(0, comma));
        const int b = std::stoi(key.substr(comma + 1));
        problem.couplers.emplace_back(std::min(a, b), std::max(a, b));
        j_values.push_back(value.get<double>());
    }
    problem.j = Eigen::Map<Vec>(j_values.data(), static_cast<Eigen::Index>(j_values.size()));
    if (doc.contains("meta")) {
        const json& m = doc["meta"];
        problem.meta.rows = m.value("M", 0);
        problem.meta.cols = m.value("N", 0);
        problem.meta.half = m.value("c", 0);
        problem.meta.scale = m.value("s", 1.0);
        problem.meta.chain_coupling = m.value("chain_coupling", 1.0);
    }
    return problem;
}

json sampleset_to_json(const SampleSet& sample) {
    json reads = json::array();
    for (const AnnealRead& r : sample.reads) {
        json spins = json::array();
        for (std::int8_t s : r.spins) spins.push_back(static_cast<int>(s));
        reads.push_back(
            json{{"spins", std::move(spins)}, {"energy", r.energy}, {"num", r.multiplicity}});
    }
    return json{{"reads", std::move(reads)},
                {"num_reads", sample.num_reads},
                {"backend", sample.backend},
                {"seed", sample.seed},
                {"schedule", sample.schedule}};
}

namespace {

json record_to_json(const std::string& key, const ValleyRecord& rec) {
    json out{{"state", key}, {"energy", rec.min_energy}, {"hits", rec.hits}};
    if (rec.e_act) out["e_act"] = *rec.e_act;
    if (rec.width) out["width"] = *rec.width;
    if (rec.fit) {
        json points = json::array();
        for (const auto& [t, rate] : rec.fit->points) points.push_back(json::array({t, rate}));
        out["fit"] = json{{"e_act", rec.fit->e_act},
                          {"ln_prefactor", rec.fit->ln_prefactor},
                          {"r_squared", rec.fit->r_squared},
                          {"points", std::move(points)}};
    }
    return out;
}

}  // namespace

void save_registry_jsonl(const std::string& path, const ValleyRegistry& reg) {
    std::string out;
    out += json{{"fingerprint", reg.fingerprint}, {"sources", reg.sources}}.dump() + "\n";
    for (const auto& [key, rec] : reg.records) out += record_to_json(key, rec).dump() + "\n";
    write_file(path, out);
}

ValleyRegistry load_registry_jsonl(const std::string& path, int n_v, int n_h) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("registry: empty file " + path);
    json header = json::parse(line);
    ValleyRegistry reg;
    reg.fingerprint = header.at("fingerprint").get<std::string>();
    reg.sources = header.at("sources").get<std::vector<std::string>>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json doc = json::parse(line);
        ValleyRecord rec;
        const std::string key = doc.at("state").get<std::string>();
        rec.id = state_from_key(key, n_v, n_h);
        rec.min_energy = doc.at("energy").get<double>();
        rec.hits = doc.at("hits").get<std::map<std::string, long>>();
        if (doc.contains("e_act")) rec.e_act = doc["e_act"].get<double>();
        if (doc.contains("width")) rec.width = doc["width"].get<double>();
        reg.records.emplace(key, std::move(rec));
    }
    return reg;
}

std::string format_double(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) buffer_ += ',';
        buffer_ += header[k];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) buffer_ += ',';
        buffer_ += cells[k];
    }
    buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
    try {
        write_file(path_, buffer_);
    } catch (...) {
        // destructor must not throw; the file is simply not written
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

}  // namespace valleyscope
