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

#include "valleyscope/gibbs.hpp"

#include <cmath>
#include <stdexcept>

#include "local_moves.hpp"

namespace valleyscope {

void WarmingSchedule::validate() const {
    if (ladder.empty()) throw std::invalid_argument("WarmingSchedule: empty ladder");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i].temperature < 0)
            throw std::invalid_argument("WarmingSchedule: negative temperature");
        if (ladder[i].sweeps < 1) throw std::invalid_argument("WarmingSchedule: sweeps must be >= 1");
        if (warming_mode && i > 0 && ladder[i].temperature < ladder[i - 1].temperature)
            throw std::invalid_argument("WarmingSchedule: warming mode requires non-decreasing T");
    }
}

WarmingSchedule WarmingSchedule::default_warming(int sweeps_per_rung) {
    WarmingSchedule s;
    for (int i = 1; i <= 12; ++i)
        s.ladder.push_back({0.1 * i, sweeps_per_rung});
    return s;
}

namespace {

void check_mask(const RbmParams& p, const ClampMask* mask) {
    if (!mask) return;
    if (mask->v.size() != static_cast<std::size_t>(p.n_v) ||
        mask->h.size() != static_cast<std::size_t>(p.n_h))
        throw std::invalid_argument("ClampMask: shape mismatch");
}

}  // namespace

SpinState gibbs_sweep(const RbmParams& p, SpinState s, double T, Rng& rng,
                      const ClampMask* mask) {
    if (T <= 0) throw std::invalid_argument("gibbs_sweep: T must be > 0 (use relax_t0)");
    if (s.v.size() != p.n_v || s.h.size() != p.n_h)
        throw std::invalid_argument("gibbs_sweep: state shape mismatch");
    check_mask(p, mask);

    const Vec ph = cond_prob_h(p, s.v, T);
    for (int i = 0; i < p.n_h; ++i) {
        if (mask && mask->h[i]) continue;
        s.h[i] = rng.uniform() < ph[i] ? 1.0 : -1.0;
    }
    const Vec pv = cond_prob_v(p, s.h, T);
    for (int j = 0; j < p.n_v; ++j) {
        if (mask && mask->v[j]) continue;
        s.v[j] = rng.uniform() < pv[j] ? 1.0 : -1.0;
    }
    return s;
}

SpinState gibbs_chain(const RbmParams& p, const Vec& v0, int steps, double T, Rng& rng,
                      const ClampMask* mask) {
    if (steps < 0) throw std::invalid_argument("gibbs_chain: steps must be >= 0");
    if (T <= 0) throw std::invalid_argument("gibbs_chain: T must be > 0");
    if (v0.size() != p.n_v) throw std::invalid_argument("gibbs_chain: v0 shape mismatch");
    check_mask(p, mask);

    SpinState s{v0, Vec(p.n_h)};
    const Vec ph = cond_prob_h(p, v0, T);
    for (int i = 0; i < p.n_h; ++i) s.h[i] = rng.uniform() < ph[i] ? 1.0 : -1.0;
    for (int step = 0; step < steps; ++step) s = gibbs_sweep(p, std::move(s), T, rng, mask);
    return s;
}

bool is_single_flip_minimum(const RbmParams& p, const SpinState& s, const ClampMask* mask) {
    check_mask(p, mask);
    detail::LocalMoves moves(p, s);
    return moves.single_flip_minimal(detail::LocalMoves::free_sites(p, mask));
}

SpinState relax_t0(const RbmParams& p, SpinState s, int max_sweeps, Rng& rng,
                   const ClampMask* mask) {
    if (max_sweeps < 1) throw std::invalid_argument("relax_t0: max_sweeps must be >= 1");
    if (s.v.size() != p.n_v || s.h.size() != p.n_h)
        throw std::invalid_argument("relax_t0: state shape mismatch");
    check_mask(p, mask);

    detail::LocalMoves moves(p, std::move(s));
    std::vector<int> sites = detail::LocalMoves::free_sites(p, mask);
    if (sites.empty()) return std::move(moves).take_state();

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        valleyscope::shuffle(sites.data(), sites.size(), rng);
        bool descended = false;
        for (int site : sites) {
            const double d = moves.delta(site);
            if (d < 0.0) {
                moves.flip(site);
                descended = true;
            } else if (d == 0.0 && rng.uniform() < 0.5) {
                moves.flip(site);  // plateau traversal; does not reset the stop rule
            }
        }
        if (!descended && moves.single_flip_minimal(sites)) return std::move(moves).take_state();
    }
    // sweep budget exhausted (plateau wandering); finish deterministically
    moves.greedy_descent(sites);
    return std::move(moves).take_state();
}

void simulated_warming(const RbmParams& p, const SpinState& start,
                       const WarmingSchedule& schedule, Rng& rng, const WarmingSink& sink,
                       const ClampMask* mask) {
    schedule.validate();
    if (start.v.size() != p.n_v || start.h.size() != p.n_h)
        throw std::invalid_argument("simulated_warming: state shape mismatch");
    check_mask(p, mask);

    detail::LocalMoves moves(p, start);
    std::vector<int> sites = detail::LocalMoves::free_sites(p, mask);
    long jump = 0;
    if (!sink(moves.state(), schedule.ladder.front().temperature, moves.energy(), jump)) return;
    if (sites.empty()) return;

    for (const WarmingRung& rung : schedule.ladder) {
        const double T = rung.temperature;
        for (int sweep = 0; sweep < rung.sweeps; ++sweep) {
            valleyscope::shuffle(sites.data(), sites.size(), rng);
            for (int site : sites) {
                const double d = moves.delta(site);
                bool accept;
                if (d < 0.0) {
                    accept = true;
                } else if (T == 0.0) {
                    accept = d == 0.0 && rng.uniform() < 0.5;
                } else {
                    accept = rng.uniform() < std::exp(-d / T);
                }
                if (accept) {
                    moves.flip(site);
                    ++jump;
                    if (!sink(moves.state(), T, moves.energy(), jump)) return;
                }
            }
        }
    }
}

std::vector<TrajectoryPoint> simulated_warming_trace(const RbmParams& p, const SpinState& start,
                                                     const WarmingSchedule& schedule, Rng& rng,
                                                     const ClampMask* mask) {
    std::vector<TrajectoryPoint> out;
    simulated_warming(
        p, start, schedule, rng,
        [&](const SpinState& s, double T, double energy, long jump) {
            out.push_back(TrajectoryPoint{s, T, energy, jump});
            return true;
        },
        mask);
    return out;
}

}  // namespace valleyscope
