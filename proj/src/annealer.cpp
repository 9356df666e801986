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

#include "valleyscope/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace valleyscope {

int SampleSet::total_multiplicity() const {
    return std::accumulate(reads.begin(), reads.end(), 0,
                           [](int acc, const AnnealRead& r) { return acc + r.multiplicity; });
}

void SampleSet::validate(const IsingProblem& problem) const {
    if (total_multiplicity() != num_reads)
        throw std::invalid_argument("SampleSet: multiplicities do not sum to num_reads");
    double prev = -std::numeric_limits<double>::infinity();
    for (const AnnealRead& r : reads) {
        if (r.multiplicity < 1) throw std::invalid_argument("SampleSet: multiplicity < 1");
        if (r.energy < prev) throw std::invalid_argument("SampleSet: reads not energy-sorted");
        prev = r.energy;
        for (std::int8_t s : r.spins)
            if (s != 1 && s != -1) throw std::invalid_argument("SampleSet: spins must be +/-1");
        if (std::abs(embedded_energy(problem, r.spins) - r.energy) > 1e-9)
            throw std::invalid_argument("SampleSet: read energy does not match its spins");
    }
}

std::string AnnealSchedule::descriptor() const {
    return "geometric beta " + std::to_string(beta_min) + "->" + std::to_string(beta_max) +
           ", " + std::to_string(sweeps) + " sweeps";
}

std::vector<double> AnnealSchedule::betas() const {
    if (beta_min <= 0 || beta_max < beta_min || sweeps < 1)
        throw std::invalid_argument("AnnealSchedule: need 0 < beta_min <= beta_max, sweeps >= 1");
    std::vector<double> out(static_cast<std::size_t>(sweeps));
    if (sweeps == 1) {
        out[0] = beta_max;
        return out;
    }
    const double ratio = std::log(beta_max / beta_min) / (sweeps - 1);
    for (int t = 0; t < sweeps; ++t) out[static_cast<std::size_t>(t)] = beta_min * std::exp(ratio * t);
    return out;
}

namespace {

// flat adjacency lists compiled once per solve
struct CompiledIsing {
    int n = 0;
    std::vector<double> h;
    std::vector<int> row_start;    // n + 1 offsets into neighbor/weight
    std::vector<int> neighbor;
    std::vector<double> weight;

    explicit CompiledIsing(const IsingProblem& p)
        : n(p.n_qubits), h(p.h.data(), p.h.data() + p.n_qubits) {
        std::vector<int> degree(n, 0);
        for (const auto& [a, b] : p.couplers) {
            degree[a]++;
            degree[b]++;
        }
        row_start.assign(n + 1, 0);
        for (int q = 0; q < n; ++q) row_start[q + 1] = row_start[q] + degree[q];
        neighbor.resize(row_start[n]);
        weight.resize(row_start[n]);
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (std::size_t k = 0; k < p.couplers.size(); ++k) {
            const auto [a, b] = p.couplers[k];
            const double jv = p.j[static_cast<Eigen::Index>(k)];
            neighbor[fill[a]] = b;
            weight[fill[a]++] = jv;
            neighbor[fill[b]] = a;
            weight[fill[b]++] = jv;
        }
        // normalize each row by neighbor index so the local-field summation
        // order (and thus every accept decision) is independent of the
        // coupler order the problem arrived in
        for (int q = 0; q < n; ++q) {
            std::vector<std::pair<int, double>> row;
            for (int k = row_start[q]; k < row_start[q + 1]; ++k)
                row.emplace_back(neighbor[k], weight[k]);
            std::sort(row.begin(), row.end());
            for (int k = row_start[q]; k < row_start[q + 1]; ++k) {
                neighbor[k] = row[k - row_start[q]].first;
                weight[k] = row[k - row_start[q]].second;
            }
        }
    }
};

void anneal_once(const CompiledIsing& c, const std::vector<double>& betas,
                 std::vector<std::int8_t>& s, Rng& rng) {
    for (int q = 0; q < c.n; ++q) s[q] = rng.uniform() < 0.5 ? 1 : -1;
    for (const double beta : betas) {
        for (int q = 0; q < c.n; ++q) {
            double field = c.h[q];
            for (int k = c.row_start[q]; k < c.row_start[q + 1]; ++k)
                field += c.weight[k] * s[c.neighbor[k]];
            const double delta = 2.0 * s[q] * field;
            if (delta <= 0.0) {
                s[q] = -s[q];
            } else {
                const double x = delta * beta;
                // x > 44 would need a uniform draw below e^-44; skip the exp
                if (x < 44.0 && rng.uniform() < std::exp(-x)) s[q] = -s[q];
            }
        }
    }
}

}  // namespace

SampleSet solve_sa(const IsingProblem& problem, int num_reads, const AnnealSchedule& schedule,
                   std::uint64_t seed) {
    problem.validate();
    if (num_reads < 1) throw std::invalid_argument("solve_sa: num_reads must be >= 1");
    const std::vector<double> betas = schedule.betas();
    const CompiledIsing compiled(problem);

    SampleSet out;
    out.num_reads = num_reads;
    out.backend = "local-sa";
    out.seed = seed;
    out.schedule = schedule.descriptor();
    out.reads.resize(static_cast<std::size_t>(num_reads));

    for (int r = 0; r < num_reads; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        AnnealRead& read = out.reads[static_cast<std::size_t>(r)];
        read.spins.resize(static_cast<std::size_t>(problem.n_qubits));
        anneal_once(compiled, betas, read.spins, rng);
        read.energy = embedded_energy(problem, read.spins);
        read.multiplicity = 1;
    }
    std::stable_sort(out.reads.begin(), out.reads.end(),
                     [](const AnnealRead& a, const AnnealRead& b) { return a.energy < b.energy; });
    return out;
}

std::vector<AnnealRead> dedupe(const SampleSet& sample) {
    std::map<std::vector<std::int8_t>, std::size_t> first_at;
    std::vector<AnnealRead> distinct;
    std::vector<std::size_t> first_seen;
    for (std::size_t i = 0; i < sample.reads.size(); ++i) {
        const AnnealRead& r = sample.reads[i];
        auto [it, inserted] = first_at.emplace(r.spins, distinct.size());
        if (inserted) {
            distinct.push_back(r);
            first_seen.push_back(i);
        } else {
            distinct[it->second].multiplicity += r.multiplicity;
        }
    }
    std::vector<std::size_t> order(distinct.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (distinct[a].energy != distinct[b].energy) return distinct[a].energy < distinct[b].energy;
        return first_seen[a] < first_seen[b];
    });
    std::vector<AnnealRead> out;
    out.reserve(order.size());
    for (std::size_t idx : order) out.push_back(std::move(distinct[idx]));
    return out;
}

}  // namespace valleyscope
