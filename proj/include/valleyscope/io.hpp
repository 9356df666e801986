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

#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "valleyscope/annealer.hpp"
#include "valleyscope/chimera.hpp"
#include "valleyscope/rbm.hpp"
#include "valleyscope/valleys.hpp"

namespace valleyscope {

inline constexpr const char* kVersion = "valleyscope 0.1.0";

struct ModelMeta {
    std::uint64_t seed = 0;
    int epochs = 0;
    std::string dataset_id;
};

// Model document: {"n_v","n_h","w" (row-major, hidden-major),"b","c",
// "label_units","meta":{seed,epochs,dataset-id,w_cap}}. Doubles survive the
// round trip bit-exactly.
nlohmann::json model_to_json(const RbmParams& p, const ModelMeta& meta);
RbmParams model_from_json(const nlohmann::json& doc, ModelMeta* meta = nullptr);
void save_model(const std::string& path, const RbmParams& p, const ModelMeta& meta);
RbmParams load_model(const std::string& path, ModelMeta* meta = nullptr);

// Problem dump: {"h":{index:value},"J":{"a,b":value},"meta":{...}} in the
// internal sign convention.
nlohmann::json problem_to_json(const IsingProblem& problem);
IsingProblem problem_from_json(const nlohmann::json& doc);

nlohmann::json sampleset_to_json(const SampleSet& sample);

// one ValleyRecord per line
void save_registry_jsonl(const std::string& path, const ValleyRegistry& reg);
ValleyRegistry load_registry_jsonl(const std::string& path, int n_v, int n_h);

// shortest representation that parses back to the same double
std::string format_double(double value);

// minimal deterministic CSV writer
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    static std::string cell(double value) { return format_double(value); }
    static std::string cell(long value) { return std::to_string(value); }
    static std::string cell(int value) { return std::to_string(value); }

private:
    std::string path_;
    std::string buffer_;
    std::size_t columns_;

public:
    ~CsvWriter();
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t value);

}  // namespace valleyscope
