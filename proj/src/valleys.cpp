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

#include "valleyscope/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "local_moves.hpp"

namespace valleyscope {

long ValleyRegistry::total_hits() const {
    long total = 0;
    for (const auto& [key, rec] : records)
        for (const auto& [tag, count] : rec.hits) total += count;
    return total;
}

SpinState attribute(const RbmParams& p, const Vec& v, int pre_steps, Rng& rng,
                    int relax_sweeps) {
    SpinState s = gibbs_chain(p, v, pre_steps, 1.0, rng);
    return relax_t0(p, std::move(s), relax_sweeps, rng);
}

ValleyRegistry registry_from_states(const RbmParams& p, const std::vector<Vec>& states,
                                    const std::string& tag, int pre_steps, std::uint64_t seed,
                                    int relax_sweeps) {
    if (states.empty()) throw std::invalid_argument("registry_from_states: no states");
    ValleyRegistry reg;
    reg.fingerprint = params_fingerprint(p);
    reg.sources.push_back(tag);
    for (std::size_t i = 0; i < states.size(); ++i) {
        Rng rng(seed, i);
        SpinState id = attribute(p, states[i], pre_steps, rng, relax_sweeps);
        const std::string key = spin_key(id);
        auto it = reg.records.find(key);
        if (it == reg.records.end()) {
            ValleyRecord rec;
            rec.min_energy = energy(p, id);
            rec.id = std::move(id);
            rec.hits[tag] = 1;
            reg.records.emplace(key, std::move(rec));
        } else {
            it->second.hits[tag] += 1;
        }
    }
    return reg;
}

double normalized_valley_count(const ValleyRegistry& reg, long n_patterns) {
    if (n_patterns <= 0) throw std::invalid_argument("normalized_valley_count: bad denominator");
    return static_cast<double>(reg.records.size()) / static_cast<double>(n_patterns);
}

OverlapStats overlap_stats(const ValleyRegistry& a, const ValleyRegistry& b) {
    if (a.fingerprint != b.fingerprint)
        throw std::invalid_argument("overlap_stats: registries were built for different models");
    OverlapStats out;
    out.n_a = static_cast<long>(a.records.size());
    out.n_b = static_cast<long>(b.records.size());
    for (const auto& [key, rec] : a.records) out.shared += b.records.count(key);
    if (out.n_a > 0)
        out.missed_by_b_fraction = static_cast<double>(out.n_a - out.shared) / out.n_a;
    if (out.n_b > 0)
        out.missed_by_a_fraction = static_cast<double>(out.n_b - out.shared) / out.n_b;
    return out;
}

std::vector<HistogramRow> energy_histogram(const ValleyRegistry& reg, int bins,
                                           const ValleyRegistry* partition) {
    if (bins < 1) throw std::invalid_argument("energy_histogram: bins must be >= 1");
    if (reg.records.empty()) throw std::invalid_argument("energy_histogram: empty registry");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [key, rec] : reg.records) {
        lo = std::min(lo, rec.min_energy);
        hi = std::max(hi, rec.min_energy);
    }
    const double span = hi - lo;
    std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        rows[k].lo = lo + span * k / bins;
        rows[k].hi = lo + span * (k + 1) / bins;
    }
    for (const auto& [key, rec] : reg.records) {
        int k = span > 0 ? static_cast<int>((rec.min_energy - lo) / span * bins) : 0;
        k = std::clamp(k, 0, bins - 1);
        rows[k].total += 1;
        const bool shared = partition && partition->records.count(key) > 0;
        if (shared)
            rows[k].shared += 1;
        else
            rows[k].only += 1;
    }
    return rows;
}

namespace {

// membership memo shared across trials of one measurement; relaxation
// endpoints only depend on the state up to the rng draws, so memoizing the
// first verdict keeps everything deterministic
struct MembershipTester {
    const RbmParams* p;
    std::string valley_key;
    Rng rng;
    int relax_sweeps;
    std::unordered_map<std::string, bool> memo;

    bool in_valley(const SpinState& s) {
        const std::string key = spin_key(s);
        if (key == valley_key) return true;
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const SpinState endpoint = relax_t0(*p, s, relax_sweeps, rng);
        const bool inside = spin_key(endpoint) == valley_key;
        memo.emplace(key, inside);
        return inside;
    }
};

}  // namespace

EscapeStats escape_rate(const RbmParams& p, const SpinState& valley_id, double T, int trials,
                        long max_jumps, std::uint64_t seed, int relax_sweeps) {
    if (T <= 0) throw std::invalid_argument("escape_rate: T must be > 0");
    if (trials < 1 || max_jumps < 1)
        throw std::invalid_argument("escape_rate: trials and max_jumps must be >= 1");
    if (!is_single_flip_minimum(p, valley_id))
        throw std::invalid_argument("escape_rate: valley_id is not a local minimum");

    MembershipTester tester{&p, spin_key(valley_id), Rng(seed, 0x4D454D42ull), relax_sweeps, {}};

    EscapeStats stats;
    stats.trials = trials;
    double total_jumps = 0.0;
    double pre_escape_energy_sum = 0.0;
    long escaped_trials = 0;

    std::vector<int> sites;
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed, static_cast<std::uint64_t>(t));
        detail::LocalMoves moves(p, valley_id);
        sites.resize(moves.n_sites());
        std::iota(sites.begin(), sites.end(), 0);

        long jumps = 0;
        double last_inside_energy = moves.energy();
        bool escaped = false;
        while (!escaped && jumps < max_jumps) {
            valleyscope::shuffle(sites.data(), sites.size(), rng);
            for (int site : sites) {
                const double d = moves.delta(site);
                const bool accept = d <= 0.0 || rng.uniform() < std::exp(-d / T);
                if (!accept) continue;
                moves.flip(site);
                ++jumps;
                if (!tester.in_valley(moves.state())) {
                    escaped = true;
                    break;
                }
                last_inside_energy = moves.energy();
                if (jumps >= max_jumps) break;
            }
        }
        if (escaped) {
            ++escaped_trials;
            pre_escape_energy_sum += last_inside_energy;
        } else {
            ++stats.censored;
        }
        total_jumps += static_cast<double>(jumps);
    }
    stats.mean_jumps = total_jumps / trials;
    stats.rate = 1.0 / stats.mean_jumps;
    stats.mean_pre_escape_energy =
        escaped_trials > 0 ? pre_escape_energy_sum / escaped_trials : 0.0;
    return stats;
}

ArrheniusFit arrhenius_fit(const std::vector<std::pair<double, double>>& points,
                           int low_t_count) {
    if (low_t_count < 3) throw std::invalid_argument("arrhenius_fit: low_t_count must be >= 3");
    std::vector<int> usable;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].second > 0.0 && points[i].first > 0.0)
            usable.push_back(static_cast<int>(i));
    if (usable.size() < 3)
        throw std::invalid_argument("arrhenius_fit: fewer than 3 usable points");

    std::sort(usable.begin(), usable.end(),
              [&](int a, int b) { return points[a].first < points[b].first; });
    if (static_cast<int>(usable.size()) > low_t_count) usable.resize(low_t_count);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(usable.size());
    for (int idx : usable) {
        const double x = 1.0 / points[idx].first;
        const double y = std::log(points[idx].second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("arrhenius_fit: degenerate temperature grid");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (int idx : usable) {
        const double x = 1.0 / points[idx].first;
        const double y = std::log(points[idx].second);
        ss_res += (y - (slope * x + intercept)) * (y - (slope * x + intercept));
        ss_tot += (y - mean_y) * (y - mean_y);
    }

    ArrheniusFit fit;
    fit.e_act = -slope;
    fit.ln_prefactor = intercept;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.points = points;
    fit.low_t_subset = std::move(usable);
    return fit;
}

std::optional<ArrheniusFit> fit_escape_arrhenius(const RbmParams& p, const SpinState& valley_id,
                                                 const std::vector<double>& temps, int trials,
                                                 long max_jumps, int low_t_count,
                                                 std::uint64_t seed, int relax_sweeps) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < temps.size(); ++i) {
        const EscapeStats stats =
            escape_rate(p, valley_id, temps[i], trials, max_jumps, seed + i, relax_sweeps);
        if (stats.censored == stats.trials) continue;  // rate is only a lower bound
        points.emplace_back(temps[i], stats.rate);
    }
    if (points.size() < 3) return std::nullopt;
    return arrhenius_fit(points, low_t_count);
}

namespace {

double count_width_states(const RbmParams& p, const SpinState& valley_id, double e_act,
                          MembershipTester& tester, double min_energy,
                          const std::unordered_map<std::string, SpinState>& candidates) {
    long count = 0;
    for (const auto& [key, state] : candidates) {
        if (energy(p, state) >= min_energy + e_act) continue;
        if (tester.in_valley(state)) ++count;
    }
    return static_cast<double>(count) / e_act;
}

}  // namespace

double width_parameter(const RbmParams& p, const SpinState& valley_id, double e_act,
                       const std::vector<std::vector<TrajectoryPoint>>& traces,
                       std::uint64_t seed, int relax_sweeps) {
    if (e_act <= 0) throw std::invalid_argument("width_parameter: e_act must be > 0");
    const double min_energy = energy(p, valley_id);
    std::unordered_map<std::string, SpinState> candidates;
    for (const auto& trace : traces)
        for (const TrajectoryPoint& pt : trace) candidates.try_emplace(spin_key(pt.state), pt.state);
    MembershipTester tester{&p, spin_key(valley_id), Rng(seed, 0x57494454ull), relax_sweeps, {}};
    return count_width_states(p, valley_id, e_act, tester, min_energy, candidates);
}

double width_from_warming(const RbmParams& p, const SpinState& valley_id, double e_act,
                          const WarmingSchedule& schedule, int n_runs, std::uint64_t seed,
                          int relax_sweeps) {
    if (e_act <= 0) throw std::invalid_argument("width_from_warming: e_act must be > 0");
    const double min_energy = energy(p, valley_id);
    std::unordered_map<std::string, SpinState> candidates;
    for (int run = 0; run < n_runs; ++run) {
        Rng rng(seed, static_cast<std::uint64_t>(run));
        simulated_warming(p, valley_id, schedule, rng,
                          [&](const SpinState& s, double, double e, long) {
                              // cheap incremental-energy prefilter; exact check below
                              if (e < min_energy + e_act + 1e-9)
                                  candidates.try_emplace(spin_key(s), s);
                              return true;
                          });
    }
    MembershipTester tester{&p, spin_key(valley_id), Rng(seed, 0x57494454ull), relax_sweeps, {}};
    return count_width_states(p, valley_id, e_act, tester, min_energy, candidates);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    std::vector<std::uint8_t> has_valley;
    std::vector<std::uint8_t> has_other;

    explicit UnionFind(std::size_t n) : parent(n), has_valley(n, 0), has_other(n, 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // returns the surviving root
    int unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        parent[b] = a;
        has_valley[a] |= has_valley[b];
        has_other[a] |= has_other[b];
        return a;
    }
};

}  // namespace

double exact_barrier(const RbmParams& p, const SpinState& valley_id) {
    const int n = p.n_v + p.n_h;
    if (n > 20) throw std::invalid_argument("exact_barrier: more than 20 spins");
    if (!is_single_flip_minimum(p, valley_id))
        throw std::invalid_argument("exact_barrier: valley_id is not a local minimum");

    const std::uint64_t count = std::uint64_t{1} << n;
    const auto state_of = [&](std::uint64_t idx) {
        SpinState s{spins_from_index(idx & ((std::uint64_t{1} << p.n_v) - 1), p.n_v),
                    spins_from_index(idx >> p.n_v, p.n_h)};
        return s;
    };
    std::vector<double> e(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) e[idx] = energy(p, state_of(idx));

    const std::uint64_t valley_idx =
        index_from_spins(valley_id.v) | (index_from_spins(valley_id.h) << p.n_v);
    const double min_energy = e[valley_idx];

    // weak minima (no strictly descending flip)
    std::vector<std::uint8_t> is_min(count, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        bool minimal = true;
        for (int bit = 0; bit < n && minimal; ++bit)
            if (e[idx ^ (std::uint64_t{1} << bit)] < e[idx]) minimal = false;
        is_min[idx] = minimal;
    }

    // minima reachable from valley_id through its equal-energy plateau are
    // the same valley, not escape targets
    std::vector<std::uint8_t> same_valley(count, 0);
    {
        std::queue<std::uint64_t> frontier;
        frontier.push(valley_idx);
        same_valley[valley_idx] = 1;
        while (!frontier.empty()) {
            const std::uint64_t cur = frontier.front();
            frontier.pop();
            for (int bit = 0; bit < n; ++bit) {
                const std::uint64_t nxt = cur ^ (std::uint64_t{1} << bit);
                if (!same_valley[nxt] && e[nxt] == min_energy) {
                    same_valley[nxt] = 1;
                    frontier.push(nxt);
                }
            }
        }
    }

    std::vector<std::uint64_t> order(count);
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
        if (e[a] != e[b]) return e[a] < e[b];
        return a < b;
    });

    UnionFind uf(count);
    std::vector<std::uint8_t> added(count, 0);
    std::size_t pos = 0;
    while (pos < count) {
        // add the whole equal-energy level before testing for the merge
        std::size_t level_end = pos;
        const double level = e[order[pos]];
        while (level_end < count && e[order[level_end]] == level) ++level_end;
        for (std::size_t k = pos; k < level_end; ++k) {
            const std::uint64_t idx = order[k];
            added[idx] = 1;
            int root = uf.find(static_cast<int>(idx));
            if (idx == valley_idx) uf.has_valley[root] = 1;
            if (is_min[idx] && !same_valley[idx]) uf.has_other[root] = 1;
            for (int bit = 0; bit < n; ++bit) {
                const std::uint64_t nxt = idx ^ (std::uint64_t{1} << bit);
                if (added[nxt]) root = uf.unite(root, uf.find(static_cast<int>(nxt)));
            }
        }
        const int valley_root = uf.find(static_cast<int>(valley_idx));
        if (added[valley_idx] && uf.has_valley[valley_root] && uf.has_other[valley_root])
            return level - min_energy;
        pos = level_end;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace valleyscope
