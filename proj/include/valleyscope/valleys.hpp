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

// Valley analysis: attribute sampled states to local valleys of the RBM
// energy landscape, aggregate registries, and characterize valleys by
// escape barrier (simulated warming + Arrhenius) and width.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valleyscope/gibbs.hpp"
#include "valleyscope/rbm.hpp"

namespace valleyscope {

struct ArrheniusFit {
    double e_act = 0.0;         // -slope of ln(rate) vs 1/T
    double ln_prefactor = 0.0;  // intercept
    double r_squared = 1.0;
    std::vector<std::pair<double, double>> points;  // (T, rate) as supplied
    std::vector<int> low_t_subset;                  // indices used in the fit
};

// One local valley, keyed by its relaxation endpoint.
struct ValleyRecord {
    SpinState id;
    double min_energy = 0.0;
    std::map<std::string, long> hits;  // source tag -> count
    std::optional<double> e_act;
    std::optional<double> width;
    std::optional<ArrheniusFit> fit;
};

struct ValleyRegistry {
    std::map<std::string, ValleyRecord> records;  // spin_key(id) -> record
    std::string fingerprint;                      // params_fingerprint of the model
    std::vector<std::string> sources;

    long total_hits() const;
};

// pre_steps Gibbs sweeps at T=1, then T=0 relaxation; returns the canonical
// minimum of the valley the state fell into.
SpinState attribute(const RbmParams& p, const Vec& v, int pre_steps, Rng& rng,
                    int relax_sweeps = 1000);

// Attributes every state (stream per index) and aggregates hit counts
// under the tag.
ValleyRegistry registry_from_states(const RbmParams& p, const std::vector<Vec>& states,
                                    const std::string& tag, int pre_steps, std::uint64_t seed,
                                    int relax_sweeps = 1000);

// valley count normalized to the number of training patterns
double normalized_valley_count(const ValleyRegistry& reg, long n_patterns);

struct OverlapStats {
    long n_a = 0;
    long n_b = 0;
    long shared = 0;
    double missed_by_b_fraction = 0.0;  // of a's valleys, absent from b
    double missed_by_a_fraction = 0.0;  // of b's valleys, absent from a
};

OverlapStats overlap_stats(const ValleyRegistry& a, const ValleyRegistry& b);

struct HistogramRow {
    double lo = 0.0;
    double hi = 0.0;
    long total = 0;
    long shared = 0;  // also present in the partition registry
    long only = 0;    // absent from the partition registry
};

// Histogram of valley minimum energies over [min, max]; with a partition
// registry the counts split into shared / only-this, mirroring the
// dark/light bars of the sample-comparison figures.
std::vector<HistogramRow> energy_histogram(const ValleyRegistry& reg, int bins,
                                           const ValleyRegistry* partition = nullptr);

struct EscapeStats {
    double rate = 0.0;        // 1 / mean(jumps to escape)
    double mean_jumps = 0.0;  // censored trials contribute max_jumps
    int censored = 0;
    int trials = 0;
    // mean energy of the last state still attributed to the valley
    double mean_pre_escape_energy = 0.0;
};

// Fixed-temperature Metropolis escape measurement: after every accepted
// jump the current state is tested for membership by relaxing a copy at
// T=0 and comparing the attribution to valley_id.
EscapeStats escape_rate(const RbmParams& p, const SpinState& valley_id, double T, int trials,
                        long max_jumps, std::uint64_t seed, int relax_sweeps = 1000);

// Least squares of ln(rate) against 1/T over the low_t_count lowest-T
// usable points (rate > 0).
ArrheniusFit arrhenius_fit(const std::vector<std::pair<double, double>>& points,
                           int low_t_count);

// Measures escape rates over the temperature grid and fits the Arrhenius
// form on the low-T side. Fully censored points are dropped (their rate is
// only a bound). Returns nothing when fewer than 3 points are usable.
std::optional<ArrheniusFit> fit_escape_arrhenius(const RbmParams& p, const SpinState& valley_id,
                                                 const std::vector<double>& temps, int trials,
                                                 long max_jumps, int low_t_count,
                                                 std::uint64_t seed, int relax_sweeps = 1000);

// Square-well width proxy: distinct states across the warming traces that
// relax back to valley_id and sit strictly below min_energy + e_act,
// divided by e_act.
double width_parameter(const RbmParams& p, const SpinState& valley_id, double e_act,
                       const std::vector<std::vector<TrajectoryPoint>>& traces,
                       std::uint64_t seed, int relax_sweeps = 1000);

// Same counting rule, but runs n_runs warming trajectories internally and
// deduplicates on the fly (no trace materialization).
double width_from_warming(const RbmParams& p, const SpinState& valley_id, double e_act,
                          const WarmingSchedule& schedule, int n_runs, std::uint64_t seed,
                          int relax_sweeps = 1000);

// Exact escape barrier by the threshold algorithm on the fully enumerated
// landscape (n_v + n_h <= 20): states are merged into single-flip
// components in ascending energy order; the barrier is the lowest level at
// which valley_id's component absorbs a minimum of a different valley.
// Returns +infinity for a single-valley landscape.
double exact_barrier(const RbmParams& p, const SpinState& valley_id);

}  // namespace valleyscope
