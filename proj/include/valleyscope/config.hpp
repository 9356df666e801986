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

#include <cstdint>
#include <string>
#include <vector>

#include "valleyscope/datasets.hpp"
#include "valleyscope/rbm.hpp"

namespace valleyscope {

// Experiment configuration; every field has a default, a JSON file
// overrides selectively, and the canonical JSON form round-trips
// losslessly.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    struct Dataset {
        std::string kind = "optdigits";  // optdigits | bas | patterns
        std::vector<std::string> files = {"data/optdigits.tes"};
        int threshold = 8;
        int train_count = 1024;
        int test_count = 440;
        std::string column_drop = "right";  // right | left | merge-max
        int bas_n = 8;
        std::string train_file;  // kind = patterns
        std::string test_file;
    } dataset;

    struct Model {
        int n_hidden = 64;
        double w_cap = 0.5;
        double init_scale = 0.01;
    } model;

    struct Train {
        int cd_steps = 5;
        double learning_rate = 0.05;
        double weight_decay = 2e-4;
        double decay_power = 2.0;
        int epochs = 100;
        double temperature = 1.0;
        bool exact_gradient = false;
        int checkpoint_every = 0;  // 0 = final model only
    } train;

    struct Embedding {
        int rows = 16;
        int cols = 16;
        int cell = 4;
        double scale = 4.0;
        double chain_coupling = 1.0;
        double j_floor = 1e-4;  // diagnostics only
    } embedding;

    struct Backend {
        std::string kind = "local-sa";  // local-sa | remote | gibbs
        std::string endpoint = "http://127.0.0.1:8799";
        double beta_min = 0.1;
        double beta_max = 10.0;
        int sweeps = 1000;
    } backend;

    struct Reads {
        int task = 1000;       // classification / reconstruction / generation
        int sampling = 10000;  // valley comparison
    } reads;

    struct Classify {
        int gibbs_sweeps = 100;  // MCMC baseline chain length
        int relax_sweeps = 1000;
        bool label_fallback = false;  // free-energy one-hot completion
    } classify;

    struct Reconstruct {
        std::string mask = "bottom-half";  // bottom-half | none | explicit list
        std::vector<int> mask_indices;
    } reconstruct;

    struct Generate {
        int per_class = 5;
    } generate;

    struct Compare {
        int pre_steps = 1;
        int relax_sweeps = 1000;
        std::vector<double> eact_temps = {0.10, 0.15, 0.20, 0.25, 0.30, 0.40};
        int eact_trials = 8;
        long eact_max_jumps = 1500;
        int eact_low_t_count = 4;
        int eact_max_valleys = 0;  // 0 = analyze every annealer valley
        int width_runs = 2;
        int width_sweeps_per_rung = 30;
        int energy_bins = 12;
        int value_bins = 10;  // for the e_act / width histograms
    } compare;

    struct Sweep {
        std::vector<double> scales = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        int test_count = 32;
        int reads = 100;
    } sweep;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig load(const std::string& path);
    void validate() const;

    std::string fingerprint() const;
    TrainConfig train_config() const;
    PreprocessOptions preprocess_options() const;
};

}  // namespace valleyscope
