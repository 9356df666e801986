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

#include <cstdint>
#include <string>
#include <vector>

#include "valleyscope/chimera.hpp"

namespace valleyscope {

// One anneal outcome. The energy is always Eq.-(4)-style embedded energy
// recomputed from the spins; ingest verifies it to 1e-9.
struct AnnealRead {
    std::vector<std::int8_t> spins;
    double energy = 0.0;
    int multiplicity = 1;
};

struct SampleSet {
    std::vector<AnnealRead> reads;  // ascending energy
    int num_reads = 0;              // requested; multiplicities sum to this
    std::string backend;
    std::uint64_t seed = 0;
    std::string schedule;

    int total_multiplicity() const;
    // re-verifies every read's energy against the problem and the
    // multiplicity/ordering invariants
    void validate(const IsingProblem& problem) const;
};

// Geometric inverse-temperature ladder for the local annealer.
struct AnnealSchedule {
    double beta_min = 0.1;
    double beta_max = 10.0;
    int sweeps = 1000;

    std::string descriptor() const;
    std::vector<double> betas() const;
};

// Local simulated-annealing backend: num_reads independent single-flip
// Metropolis anneals over the beta ladder, one RNG stream per read.
// Deterministic given the seed regardless of scheduling.
SampleSet solve_sa(const IsingProblem& problem, int num_reads, const AnnealSchedule& schedule,
                   std::uint64_t seed);

// Distinct spin vectors with summed multiplicities, sorted by energy with
// first-seen order breaking ties.
std::vector<AnnealRead> dedupe(const SampleSet& sample);

}  // namespace valleyscope
