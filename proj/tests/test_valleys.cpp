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
#include <set>

#include "oracles.hpp"
#include "valleyscope/valleys.hpp"

using namespace valleyscope;

namespace {

RbmParams double_well(int n_h, double omega, double bias) {
    RbmParams p = RbmParams::zeros(1, n_h);
    p.w.setConstant(omega);
    p.b[0] = bias;
    return p;
}

// heterogeneous couplings keep the escape path essentially one-dimensional,
// so the jump-count Arrhenius slope tracks the energy barrier
RbmParams staircase_well(int n_h, double w0, double growth, double bias) {
    RbmParams p = RbmParams::zeros(1, n_h);
    for (int i = 0; i < n_h; ++i) p.w(i, 0) = w0 * (1.0 + growth * i);
    p.b[0] = bias;
    return p;
}

SpinState aligned_state(int n_h, double sign) {
    return SpinState{Vec::Constant(1, sign), Vec::Constant(n_h, sign)};
}

ValleyRegistry synthetic_registry(const std::string& fingerprint, int count, int offset,
                                  double base_energy) {
    ValleyRegistry reg;
    reg.fingerprint = fingerprint;
    for (int k = 0; k < count; ++k) {
        ValleyRecord rec;
        rec.id = SpinState{spins_from_index(static_cast<std::uint64_t>(offset + k), 6), Vec(0)};
        rec.min_energy = base_energy + k;
        rec.hits["synthetic"] = 1;
        reg.records.emplace(spin_key(rec.id), std::move(rec));
    }
    return reg;
}

}  // namespace

TEST_CASE("attribute: a strict minimum with no presteps returns itself") {
    RbmParams p = RbmParams::zeros(3, 2);
    p.b << 1, 1, 1;
    p.c << 1, 1;
    Rng rng(1);
    const SpinState out = attribute(p, Vec::Ones(3), 0, rng);
    CHECK(spin_key(out) == spin_key(SpinState{Vec::Ones(3), Vec::Ones(2)}));
}

TEST_CASE("attribute: endpoints always lie in the oracle's minima set") {
    const RbmParams p = oracle::random_params(3, 2, 0.9, 71);
    const oracle::Landscape land = oracle::full_landscape(p);
    const std::set<std::uint64_t> minima(land.minima.begin(), land.minima.end());
    for (int t = 0; t < 30; ++t) {
        Rng rng(100 + t);
        const SpinState out = attribute(p, spins_from_index(t % 8, 3), 1, rng);
        CHECK(minima.count(oracle::joint_index(p, out)) == 1);
    }
}

TEST_CASE("attribute: seed-deterministic") {
    const RbmParams p = oracle::random_params(4, 3, 0.8, 72);
    Rng a(5), b(5);
    CHECK(spin_key(attribute(p, spins_from_index(9, 4), 3, a)) ==
          spin_key(attribute(p, spins_from_index(9, 4), 3, b)));
}

TEST_CASE("registry_from_states: duplicates aggregate into one record") {
    // every input is itself a minimum of this strongly biased model
    RbmParams p = RbmParams::zeros(3, 2);
    p.b << 2, 2, 2;
    p.c << 2, 2;
    const Vec v = Vec::Ones(3);
    const ValleyRegistry reg = registry_from_states(p, {v, v, v}, "tag", 0, 9);
    REQUIRE(reg.records.size() == 1);
    CHECK(reg.records.begin()->second.hits.at("tag") == 3);
    CHECK_THROWS_AS(registry_from_states(p, {}, "tag", 0, 9), std::invalid_argument);
}

TEST_CASE("registry_from_states: matches the oracle basin map on a toy model") {
    // find a toy model (deterministic seed scan) with several visible
    // patterns whose zero-prestep descent is unambiguous for every hidden
    // completion, so the expected registry is exact
    RbmParams p;
    std::vector<Vec> patterns;
    std::map<std::uint64_t, long> expected;
    oracle::Landscape land;
    for (std::uint64_t seed = 73; seed < 120 && patterns.size() < 2; ++seed) {
        p = oracle::random_params(3, 2, 1.4, seed);
        land = oracle::full_landscape(p);
        patterns.clear();
        expected.clear();
        for (std::uint64_t vi = 0; vi < 8 && patterns.size() < 6; ++vi) {
            std::set<std::uint64_t> joint_minima;
            for (std::uint64_t hi = 0; hi < 4; ++hi) {
                const auto reach = oracle::reachable_minima(land, vi | (hi << 3));
                joint_minima.insert(reach.begin(), reach.end());
            }
            if (joint_minima.size() == 1) {
                patterns.push_back(spins_from_index(vi, 3));
                expected[*joint_minima.begin()] += 1;
            }
        }
    }
    REQUIRE(patterns.size() >= 2);

    const ValleyRegistry reg = registry_from_states(p, patterns, "mcmc", 0, 10);
    REQUIRE(reg.records.size() == expected.size());
    for (const auto& [key, rec] : reg.records) {
        const std::uint64_t idx = oracle::joint_index(p, rec.id);
        REQUIRE(expected.count(idx) == 1);
        CHECK(rec.hits.at("mcmc") == expected.at(idx));
        CHECK(rec.min_energy == doctest::Approx(land.energies[idx]).epsilon(1e-12));
        CHECK(is_single_flip_minimum(p, rec.id));
    }
}

TEST_CASE("registry_from_states: identical seeds build identical registries") {
    const RbmParams p = oracle::random_params(4, 3, 0.8, 74);
    std::vector<Vec> states;
    for (std::uint64_t vi = 0; vi < 16; ++vi) states.push_back(spins_from_index(vi, 4));
    const ValleyRegistry a = registry_from_states(p, states, "t", 1, 33);
    const ValleyRegistry b = registry_from_states(p, states, "t", 1, 33);
    REQUIRE(a.records.size() == b.records.size());
    auto ita = a.records.begin();
    auto itb = b.records.begin();
    for (; ita != a.records.end(); ++ita, ++itb) {
        CHECK(ita->first == itb->first);
        CHECK(ita->second.hits == itb->second.hits);
    }
    CHECK(normalized_valley_count(a, 16) ==
          doctest::Approx(a.records.size() / 16.0).epsilon(1e-15));
}

TEST_CASE("overlap_stats: identical and disjoint registries") {
    const ValleyRegistry a = synthetic_registry("fp", 5, 0, -10.0);
    const OverlapStats self = overlap_stats(a, a);
    CHECK(self.shared == 5);
    CHECK(self.missed_by_b_fraction == 0.0);
    CHECK(self.missed_by_a_fraction == 0.0);

    const ValleyRegistry b = synthetic_registry("fp", 4, 10, -8.0);
    const OverlapStats disjoint = overlap_stats(a, b);
    CHECK(disjoint.shared == 0);
    CHECK(disjoint.missed_by_b_fraction == 1.0);
    CHECK(disjoint.missed_by_a_fraction == 1.0);
}

TEST_CASE("overlap_stats: hand-built 4-shared-of-10 fixture") {
    const ValleyRegistry a = synthetic_registry("fp", 10, 0, -10.0);
    const ValleyRegistry b = synthetic_registry("fp", 7, 6, -4.0);  // states 6..12, 4 shared
    const OverlapStats stats = overlap_stats(a, b);
    CHECK(stats.n_a == 10);
    CHECK(stats.n_b == 7);
    CHECK(stats.shared == 4);
    CHECK(stats.missed_by_b_fraction == doctest::Approx(0.6).epsilon(1e-15));

    const OverlapStats swapped = overlap_stats(b, a);
    CHECK(swapped.missed_by_b_fraction == doctest::Approx(stats.missed_by_a_fraction));
    CHECK(swapped.missed_by_a_fraction == doctest::Approx(stats.missed_by_b_fraction));

    const ValleyRegistry other = synthetic_registry("different", 3, 0, 0.0);
    CHECK_THROWS_AS(overlap_stats(a, other), std::invalid_argument);
}

TEST_CASE("energy_histogram: single valley, self partition, hand counts") {
    const ValleyRegistry one = synthetic_registry("fp", 1, 0, -3.0);
    const auto rows = energy_histogram(one, 4);
    long nonzero = 0, total = 0;
    for (const auto& r : rows) {
        nonzero += r.total > 0;
        total += r.total;
    }
    CHECK(nonzero == 1);
    CHECK(total == 1);

    const ValleyRegistry reg = synthetic_registry("fp", 10, 0, 0.0);  // energies 0..9
    const auto self_rows = energy_histogram(reg, 3, &reg);
    for (const auto& r : self_rows) CHECK(r.only == 0);

    // bins [0,3), [3,6), [6,9]: counts 3, 3, 4
    CHECK(self_rows[0].total == 3);
    CHECK(self_rows[1].total == 3);
    CHECK(self_rows[2].total == 4);

    const ValleyRegistry part = synthetic_registry("fp", 5, 0, 0.0);  // shares states 0..4
    const auto split = energy_histogram(reg, 3, &part);
    CHECK(split[0].shared == 3);
    CHECK(split[0].only == 0);
    CHECK(split[1].shared == 2);
    CHECK(split[1].only == 1);
    CHECK(split[2].shared == 0);
    CHECK(split[2].only == 4);
    long sum = 0;
    for (const auto& r : split) sum += r.total;
    CHECK(sum == static_cast<long>(reg.records.size()));

    CHECK_THROWS_AS(energy_histogram(reg, 0), std::invalid_argument);
    ValleyRegistry empty;
    CHECK_THROWS_AS(energy_histogram(empty, 3), std::invalid_argument);
}

TEST_CASE("escape_rate: high temperature escapes almost immediately") {
    const RbmParams p = double_well(6, 0.3, 0.05);
    const EscapeStats stats = escape_rate(p, aligned_state(6, 1.0), 5.0, 10, 10000, 21);
    CHECK(stats.censored == 0);
    CHECK(stats.mean_jumps < 50.0);
    CHECK(stats.rate > 1.0 / 50.0);
}

TEST_CASE("escape_rate: slower escape at lower temperature") {
    const RbmParams p = double_well(11, 0.1, 0.03);
    const SpinState well = aligned_state(11, 1.0);
    const EscapeStats cold = escape_rate(p, well, 0.30, 20, 200000, 22);
    const EscapeStats warm = escape_rate(p, well, 0.60, 20, 200000, 23);
    CHECK(cold.censored == 0);
    CHECK(warm.censored == 0);
    CHECK(cold.rate < warm.rate);
}

TEST_CASE("escape_rate: a single-valley model censors every trial") {
    RbmParams p = RbmParams::zeros(3, 2);
    p.b << 1.5, 1.5, 1.5;
    p.c << 1.5, 1.5;
    // unique minimum at all-plus; verified by exhaustive search
    const oracle::Landscape land = oracle::full_landscape(p);
    REQUIRE(land.minima.size() == 1);
    const SpinState only_min{Vec::Ones(3), Vec::Ones(2)};
    const EscapeStats stats = escape_rate(p, only_min, 1.0, 5, 300, 24);
    CHECK(stats.censored == stats.trials);
    CHECK(stats.rate == doctest::Approx(1.0 / 300.0));
}

TEST_CASE("escape_rate: rejects a non-minimum start") {
    const RbmParams p = double_well(6, 0.3, 0.05);
    SpinState not_min = aligned_state(6, 1.0);
    not_min.h[0] = -1.0;
    CHECK_THROWS_AS(escape_rate(p, not_min, 1.0, 5, 100, 25), std::invalid_argument);
}

TEST_CASE("arrhenius_fit: recovers synthetic exact parameters") {
    const double e_true = 1.5, a_true = 2.0;
    std::vector<std::pair<double, double>> points;
    for (double T = 0.2; T <= 1.01; T += 0.1)
        points.emplace_back(T, a_true * std::exp(-e_true / T));
    const ArrheniusFit fit = arrhenius_fit(points, static_cast<int>(points.size()));
    CHECK(fit.e_act == doctest::Approx(e_true).epsilon(1e-9));
    CHECK(fit.ln_prefactor == doctest::Approx(std::log(a_true)).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("arrhenius_fit: constant rates give zero activation energy") {
    std::vector<std::pair<double, double>> points{{0.2, 0.5}, {0.4, 0.5}, {0.8, 0.5}};
    const ArrheniusFit fit = arrhenius_fit(points, 3);
    CHECK(fit.e_act == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("arrhenius_fit: tolerates noise and reports r-squared") {
    const double e_true = 0.9;
    Rng rng(26);
    std::vector<std::pair<double, double>> points;
    for (double T = 0.2; T <= 1.01; T += 0.05) {
        const double noise = 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
        points.emplace_back(T, std::exp(std::log(3.0 * std::exp(-e_true / T)) * 1.0) * noise);
    }
    const ArrheniusFit fit = arrhenius_fit(points, static_cast<int>(points.size()));
    CHECK(std::abs(fit.e_act - e_true) / e_true <= 0.10);
    CHECK(fit.r_squared > 0.9);
    CHECK(fit.r_squared <= 1.0);

    std::vector<std::pair<double, double>> short_list{{0.2, 0.5}, {0.4, 0.0}};
    CHECK_THROWS_AS(arrhenius_fit(short_list, 3), std::invalid_argument);
}

TEST_CASE("exact_barrier: hand-computable double well") {
    // E(v=+1, k hidden flipped) = -(n-2k)w - b; saddle at the v flip after
    // climbing to k = n/2, so the barrier is n*w + 2b from the deep well
    // and n*w from the shallow one
    const int n = 4;
    const double w = 0.25, b = 0.05;
    const RbmParams p = double_well(n, w, b);
    CHECK(exact_barrier(p, aligned_state(n, 1.0)) ==
          doctest::Approx(n * w + 2 * b).epsilon(1e-12));
    CHECK(exact_barrier(p, aligned_state(n, -1.0)) == doctest::Approx(n * w).epsilon(1e-12));
}

TEST_CASE("exact_barrier: single-valley landscape reports +infinity") {
    RbmParams p = RbmParams::zeros(3, 2);
    p.b << 1.5, 1.5, 1.5;
    p.c << 1.5, 1.5;
    CHECK(std::isinf(exact_barrier(p, SpinState{Vec::Ones(3), Vec::Ones(2)})));
}

TEST_CASE("exact_barrier: nonnegative on random landscapes") {
    for (int t = 0; t < 10; ++t) {
        const RbmParams p = oracle::random_params(4, 3, 1.0, 950 + t);
        Rng rng(t);
        const SpinState minimum = relax_t0(p, oracle::random_state(4, 3, rng), 1000, rng);
        const double barrier = exact_barrier(p, minimum);
        CHECK(barrier >= 0.0);
    }
    const RbmParams p = double_well(4, 0.25, 0.05);
    SpinState not_min = aligned_state(4, 1.0);
    not_min.h[0] = -1.0;
    CHECK_THROWS_AS(exact_barrier(p, not_min), std::invalid_argument);
    CHECK_THROWS_AS(exact_barrier(RbmParams::zeros(12, 12), SpinState{Vec::Ones(12), Vec::Ones(12)}),
                    std::invalid_argument);
}

TEST_CASE("escape-rate Arrhenius fit approximates the exact barrier") {
    const RbmParams p = staircase_well(6, 0.10, 0.60, 0.03);
    const SpinState well = aligned_state(6, 1.0);
    const double barrier = exact_barrier(p, well);
    REQUIRE(barrier >= 0.5);

    const std::vector<double> temps{0.10, 0.12, 0.14, 0.17, 0.20};
    const auto fit = fit_escape_arrhenius(p, well, temps, 60, 500000, 5, 1000);
    REQUIRE(fit.has_value());
    CHECK(std::abs(fit->e_act - barrier) / barrier <= 0.30);
}

TEST_CASE("width_parameter: only the minimum qualifies") {
    const RbmParams p = double_well(4, 0.25, 0.05);
    const SpinState well = aligned_state(4, 1.0);
    const double e_act = 0.1;  // below the cheapest excitation (2w = 0.5)
    std::vector<std::vector<TrajectoryPoint>> traces{
        {TrajectoryPoint{well, 0.1, energy(p, well), 0},
         TrajectoryPoint{well, 0.1, energy(p, well), 1}}};
    CHECK(width_parameter(p, well, e_act, traces, 31) == doctest::Approx(1.0 / e_act));
    CHECK_THROWS_AS(width_parameter(p, well, 0.0, traces, 31), std::invalid_argument);
}

TEST_CASE("width_parameter: matches exhaustive basin enumeration on a small fixture") {
    const int n = 4;
    const RbmParams p = double_well(n, 0.25, 0.05);
    const SpinState well = aligned_state(n, 1.0);
    // strictly below the saddle so no state sits exactly at the threshold
    // and every sub-threshold state has an unambiguous basin
    const double e_act = 0.95 * exact_barrier(p, well);

    // oracle count: states strictly below the threshold whose non-increasing
    // descent can only reach this valley
    const oracle::Landscape land = oracle::full_landscape(p);
    const std::uint64_t well_idx = oracle::joint_index(p, well);
    long expected = 0;
    for (std::uint64_t idx = 0; idx < (1u << (n + 1)); ++idx) {
        if (land.energies[idx] >= land.energies[well_idx] + e_act) continue;
        const auto reach = oracle::reachable_minima(land, idx);
        if (reach.size() == 1 && *reach.begin() == well_idx) expected += 1;
    }

    // long warming below the escape scale visits the whole basin
    WarmingSchedule sched;
    sched.ladder = {{0.2, 2000}, {0.35, 3000}, {0.5, 3000}};
    std::vector<std::vector<TrajectoryPoint>> traces;
    for (int run = 0; run < 10; ++run) {
        Rng rng(40, run);
        traces.push_back(simulated_warming_trace(p, well, sched, rng));
    }
    const double width = width_parameter(p, well, e_act, traces, 41);
    CHECK(width == doctest::Approx(static_cast<double>(expected) / e_act).epsilon(1e-12));

    // streaming variant counts the same states
    CHECK(width_from_warming(p, well, e_act, sched, 10, 40) == doctest::Approx(width));
}
