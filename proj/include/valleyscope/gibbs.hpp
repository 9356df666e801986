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

#include <functional>
#include <vector>

#include "valleyscope/rbm.hpp"
#include "valleyscope/rng.hpp"

namespace valleyscope {

// Clamp mask over units; 1 marks a coordinate that no sampler may touch.
struct ClampMask {
    std::vector<std::uint8_t> v;
    std::vector<std::uint8_t> h;

    static ClampMask none(int n_v, int n_h) {
        return ClampMask{std::vector<std::uint8_t>(n_v, 0), std::vector<std::uint8_t>(n_h, 0)};
    }
};

struct WarmingRung {
    double temperature = 0.0;
    int sweeps = 1;
};

// Temperature ladder for simulated warming (or a fixed-T run).
struct WarmingSchedule {
    std::vector<WarmingRung> ladder;
    bool warming_mode = true;  // requires non-decreasing temperatures

    void validate() const;

    // T in {0.1, 0.2, ..., 1.2}, 200 sweeps per rung
    static WarmingSchedule default_warming(int sweeps_per_rung = 200);
};

struct TrajectoryPoint {
    SpinState state;
    double temperature = 0.0;
    double energy = 0.0;
    long jump_index = 0;
};

// Block Gibbs update: resample all h from p(h|v), then all v from p(v|h).
// Clamped coordinates keep their values.
SpinState gibbs_sweep(const RbmParams& p, SpinState s, double T, Rng& rng,
                      const ClampMask* mask = nullptr);

// `steps` block sweeps from (v0, h ~ p(h|v0)). steps = 0 just samples h.
SpinState gibbs_chain(const RbmParams& p, const Vec& v0, int steps, double T, Rng& rng,
                      const ClampMask* mask = nullptr);

// Zero-temperature single-site relaxation, randomized sweep order. Accepts
// every strictly descending flip and flat (dE = 0) flips with probability
// 1/2; stops once a full sweep makes no strictly descending move and the
// state verifies as a single-flip minimum. Never returns a state that
// admits a descending flip, and never raises the energy.
SpinState relax_t0(const RbmParams& p, SpinState s, int max_sweeps, Rng& rng,
                   const ClampMask* mask = nullptr);

// true iff no single spin flip (outside the mask) lowers the energy
bool is_single_flip_minimum(const RbmParams& p, const SpinState& s,
                            const ClampMask* mask = nullptr);

// Visitor for warming trajectories; return false to stop the run early.
using WarmingSink = std::function<bool(const SpinState& s, double T, double energy, long jump)>;

// Single-site Metropolis through the schedule's rungs, reporting the state
// after every accepted jump (jump 0 reports the start). The trajectory is
// seed-deterministic.
void simulated_warming(const RbmParams& p, const SpinState& start,
                       const WarmingSchedule& schedule, Rng& rng, const WarmingSink& sink,
                       const ClampMask* mask = nullptr);

// convenience wrapper collecting the full trajectory
std::vector<TrajectoryPoint> simulated_warming_trace(const RbmParams& p, const SpinState& start,
                                                     const WarmingSchedule& schedule, Rng& rng,
                                                     const ClampMask* mask = nullptr);

}  // namespace valleyscope
