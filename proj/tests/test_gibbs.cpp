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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "valleyscope/gibbs.hpp"

using namespace valleyscope;

namespace {

// two-well model: one visible spin coupled uniformly to n_h hiddens; the
// wells sit at the two fully aligned states
RbmParams double_well(int n_h, double omega, double bias) {
    RbmParams p = RbmParams::zeros(1, n_h);
    p.w.setConstant(omega);
    p.b[0] = bias;
    return p;
}

}  // namespace

TEST_CASE("gibbs_sweep: zero parameters sample uniformly") {
    const RbmParams p = RbmParams::zeros(3, 2);
    Rng rng(1);
    SpinState s{Vec::Ones(3), Vec::Ones(2)};
    const int n = 100000;
    Vec sum = Vec::Zero(3);
    for (int t = 0; t < n; ++t) {
        s = gibbs_sweep(p, std::move(s), 1.0, rng);
        sum += s.v;
    }
    const double three_sigma = 3.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(sum[j] / n) <= three_sigma);
}

TEST_CASE("gibbs_sweep: fully clamped mask returns the state unchanged") {
    const RbmParams p = oracle::random_params(4, 3, 1.0, 2);
    Rng rng(3);
    const SpinState s = oracle::random_state(4, 3, rng);
    ClampMask mask{std::vector<std::uint8_t>(4, 1), std::vector<std::uint8_t>(3, 1)};
    const SpinState out = gibbs_sweep(p, s, 1.0, rng, &mask);
    CHECK((out.v - s.v).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.h - s.h).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gibbs_sweep: a huge weight pins the hidden unit") {
    RbmParams p = RbmParams::zeros(1, 1);
    p.w(0, 0) = 10.0;
    ClampMask mask{{1}, {0}};  // keep v fixed at +1
    Rng rng(4);
    SpinState s{Vec::Ones(1), Vec::Ones(1)};
    const int n = 100000;
    long plus = 0;
    for (int t = 0; t < n; ++t) {
        s = gibbs_sweep(p, std::move(s), 1.0, rng, &mask);
        plus += s.h[0] > 0;
    }
    // P(h=+1 | v=+1) = sigma(20) = 1 - 2e-9
    CHECK(static_cast<double>(plus) / n >= 1.0 - 1e-4);
}

TEST_CASE("gibbs_sweep: rejects non-positive temperature") {
    const RbmParams p = RbmParams::zeros(2, 2);
    Rng rng(5);
    SpinState s{Vec::Ones(2), Vec::Ones(2)};
    CHECK_THROWS_AS(gibbs_sweep(p, s, 0.0, rng), std::invalid_argument);
}

TEST_CASE("gibbs_chain: zero steps keeps the visible layer, samples h") {
    const RbmParams p = oracle::random_params(4, 3, 0.5, 6);
    Rng rng(7);
    const Vec v0 = spins_from_index(11, 4);
    const SpinState s = gibbs_chain(p, v0, 0, 1.0, rng);
    CHECK((s.v - v0).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s.h[i]) == 1.0);
}

TEST_CASE("gibbs_chain: stationary distribution matches exact Boltzmann") {
    const RbmParams p = oracle::random_params(3, 2, 0.6, 8);

    // exact joint probabilities
    const double z = oracle::enum_partition(p);
    std::vector<double> want(32);
    for (std::uint64_t idx = 0; idx < 32; ++idx)
        want[idx] = std::exp(-oracle::naive_energy(p, oracle::joint_state(p, idx))) / z;

    Rng rng(9);
    SpinState s{Vec::Ones(3), Vec::Ones(2)};
    for (int burn = 0; burn < 1000; ++burn) s = gibbs_sweep(p, std::move(s), 1.0, rng);

    const long samples = 1000000;
    const int lag = 7;
    std::vector<long> counts(32, 0);
    for (long t = 0; t < samples; ++t) {
        for (int l = 0; l < lag; ++l) s = gibbs_sweep(p, std::move(s), 1.0, rng);
        counts[oracle::joint_index(p, s)]++;
    }
    double stat = 0.0;
    for (int idx = 0; idx < 32; ++idx) {
        const double expect = want[idx] * samples;
        stat += (counts[idx] - expect) * (counts[idx] - expect) / expect;
    }
    const double pvalue = oracle::chi_square_pvalue(stat, 31);
    CHECK(pvalue > 0.01);
}

TEST_CASE("gibbs_chain: same seed gives the identical trajectory") {
    const RbmParams p = oracle::random_params(4, 3, 0.8, 10);
    Rng a(11), b(11);
    const SpinState sa = gibbs_chain(p, spins_from_index(5, 4), 50, 1.0, a);
    const SpinState sb = gibbs_chain(p, spins_from_index(5, 4), 50, 1.0, b);
    CHECK(spin_key(sa) == spin_key(sb));
}

TEST_CASE("relax_t0: a strict local minimum is returned unchanged") {
    RbmParams p = RbmParams::zeros(3, 2);
    p.b << 2, 2, 2;
    p.c << 2, 2;
    const SpinState top{Vec::Ones(3), Vec::Ones(2)};
    REQUIRE(is_single_flip_minimum(p, top));
    Rng rng(12);
    const SpinState out = relax_t0(p, top, 1000, rng);
    CHECK(spin_key(out) == spin_key(top));
    CHECK(energy(p, out) == energy(p, top));
}

TEST_CASE("relax_t0: result always passes the exhaustive single-flip check") {
    for (int t = 0; t < 50; ++t) {
        const RbmParams p = oracle::random_params(3, 3, 1.0, 900 + t);
        Rng rng(t);
        const SpinState start = oracle::random_state(3, 3, rng);
        const SpinState out = relax_t0(p, start, 1000, rng);
        CHECK(is_single_flip_minimum(p, out));
        CHECK(energy(p, out) <= energy(p, start) + 1e-12);
    }
}

TEST_CASE("relax_t0: lands on a true minimum of the exhaustive landscape") {
    const RbmParams p = oracle::random_params(3, 2, 0.9, 21);
    const oracle::Landscape land = oracle::full_landscape(p);
    Rng rng(22);
    for (std::uint64_t idx = 0; idx < 32; ++idx) {
        const SpinState start = oracle::joint_state(p, idx);
        const SpinState out = relax_t0(p, start, 1000, rng);
        const std::uint64_t out_idx = oracle::joint_index(p, out);
        const auto reachable = oracle::reachable_minima(land, idx);
        CHECK(reachable.count(out_idx) == 1);
    }
}

TEST_CASE("relax_t0: clamped coordinates are inviolable") {
    const RbmParams p = oracle::random_params(5, 4, 1.0, 30);
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const SpinState start = oracle::random_state(5, 4, rng);
        ClampMask mask = ClampMask::none(5, 4);
        mask.v[1] = 1;
        mask.v[3] = 1;
        mask.h[0] = 1;
        const SpinState out = relax_t0(p, start, 1000, rng, &mask);
        CHECK(out.v[1] == start.v[1]);
        CHECK(out.v[3] == start.v[3]);
        CHECK(out.h[0] == start.h[0]);
    }
}

TEST_CASE("simulated_warming: a single T=0 rung never accepts an uphill jump") {
    const RbmParams p = oracle::random_params(4, 3, 1.0, 40);
    Rng relax_rng(41);
    const SpinState minimum = relax_t0(p, oracle::random_state(4, 3, relax_rng), 1000, relax_rng);
    WarmingSchedule sched;
    sched.ladder = {{0.0, 200}};
    Rng rng(42);
    const auto trace = simulated_warming_trace(p, minimum, sched, rng);
    for (std::size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k].energy <= trace[k - 1].energy + 1e-12);
}

TEST_CASE("simulated_warming: escape from a double well slows as T drops") {
    const RbmParams p = double_well(11, 0.1, 0.03);
    const SpinState start{Vec::Ones(1), Vec::Ones(11)};
    REQUIRE(is_single_flip_minimum(p, start));

    // escaped once the walker is strictly inside the opposite basin: the
    // visible spin flipped and the hidden majority past the ridge
    auto mean_jumps_to_cross = [&](double T, std::uint64_t seed) {
        const int runs = 30;
        double total = 0.0;
        for (int r = 0; r < runs; ++r) {
            WarmingSchedule sched;
            sched.ladder = {{T, 1000000}};
            Rng rng(seed, r);
            long crossed_at = -1;
            simulated_warming(p, start, sched, rng,
                              [&](const SpinState& s, double, double, long jump) {
                                  if (s.v[0] < 0 && s.h.sum() < 0) {
                                      crossed_at = jump;
                                      return false;
                                  }
                                  return true;
                              });
            REQUIRE(crossed_at > 0);
            total += static_cast<double>(crossed_at);
        }
        return total / runs;
    };

    const double slow = mean_jumps_to_cross(0.35, 50);
    const double fast = mean_jumps_to_cross(0.60, 51);
    CHECK(slow > fast);
}

TEST_CASE("simulated_warming: seed-deterministic trajectory") {
    const RbmParams p = oracle::random_params(3, 3, 0.8, 60);
    Rng relax_rng(61);
    const SpinState minimum = relax_t0(p, oracle::random_state(3, 3, relax_rng), 1000, relax_rng);
    const WarmingSchedule sched = WarmingSchedule::default_warming(20);
    Rng a(62), b(62);
    const auto ta = simulated_warming_trace(p, minimum, sched, a);
    const auto tb = simulated_warming_trace(p, minimum, sched, b);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
        CHECK(spin_key(ta[k].state) == spin_key(tb[k].state));
        CHECK(ta[k].jump_index == tb[k].jump_index);
    }
}

TEST_CASE("WarmingSchedule: validation rules") {
    WarmingSchedule s;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.ladder = {{0.5, 10}, {0.3, 10}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.warming_mode = false;
    CHECK_NOTHROW(s.validate());
    s.ladder = {{0.5, 0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
