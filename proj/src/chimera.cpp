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

#include "valleyscope/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace valleyscope {

ChimeraGraph ChimeraGraph::build(int M, int N, int c) {
    if (M < 1 || N < 1 || c < 1) throw std::invalid_argument("ChimeraGraph: M, N, c must be >= 1");
    ChimeraGraph g;
    g.rows = M;
    g.cols = N;
    g.half = c;
    g.couplers.reserve(static_cast<std::size_t>(c) * c * M * N + c * (M - 1) * N +
                       c * M * (N - 1));
    // intra-cell K_{c,c}
    for (int r = 0; r < M; ++r)
        for (int col = 0; col < N; ++col)
            for (int k = 0; k < c; ++k)
                for (int m = 0; m < c; ++m)
                    g.couplers.emplace_back(g.qubit_index(r, col, 0, k),
                                            g.qubit_index(r, col, 1, m));
    // vertical, left side
    for (int r = 0; r + 1 < M; ++r)
        for (int col = 0; col < N; ++col)
            for (int k = 0; k < c; ++k)
                g.couplers.emplace_back(g.qubit_index(r, col, 0, k),
                                        g.qubit_index(r + 1, col, 0, k));
    // horizontal, right side
    for (int r = 0; r < M; ++r)
        for (int col = 0; col + 1 < N; ++col)
            for (int m = 0; m < c; ++m)
                g.couplers.emplace_back(g.qubit_index(r, col, 1, m),
                                        g.qubit_index(r, col + 1, 1, m));
    return g;
}

void IsingProblem::validate() const {
    if (n_qubits <= 0) throw std::invalid_argument("IsingProblem: empty problem");
    if (h.size() != n_qubits || j.size() != static_cast<Eigen::Index>(couplers.size()))
        throw std::logic_error("IsingProblem: shape mismatch");
    for (Eigen::Index q = 0; q < h.size(); ++q)
        if (!(std::abs(h[q]) <= 2.0))
            throw std::logic_error("IsingProblem: bias out of [-2, 2] at qubit " +
                                   std::to_string(q));
    for (Eigen::Index k = 0; k < j.size(); ++k)
        if (!(std::abs(j[k]) <= 1.0))
            throw std::logic_error("IsingProblem: coupling out of [-1, 1] at coupler " +
                                   std::to_string(k));
    for (const auto& [a, b] : couplers)
        if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits || a == b)
            throw std::logic_error("IsingProblem: coupler endpoints out of range");
}

ChimeraGraph derive_graph(const IsingProblem& p) {
    ChimeraGraph g;
    g.rows = p.meta.rows;
    g.cols = p.meta.cols;
    g.half = p.meta.half;
    g.couplers = p.couplers;
    return g;
}

std::pair<IsingProblem, Embedding> embed_rbm(const RbmParams& p, const ChimeraGraph& g,
                                             double scale, double chain_coupling) {
    p.validate();
    if (scale < 1.0) throw std::invalid_argument("embed_rbm: scale must be >= 1");
    if (chain_coupling <= 0.0 || chain_coupling > 1.0)
        throw std::invalid_argument("embed_rbm: chain coupling must be in (0, 1]");
    if (p.n_v > g.half * g.cols || p.n_h > g.half * g.rows)
        throw std::invalid_argument("embed_rbm: model does not fit the lattice (need n_v <= c*N"
                                    " and n_h <= c*M)");

    Embedding emb;
    emb.n_v = p.n_v;
    emb.n_h = p.n_h;
    emb.chains.resize(p.n_v + p.n_h);
    emb.qubit_unit.assign(g.num_qubits(), -1);
    emb.crossing = Eigen::MatrixXi::Constant(p.n_h, p.n_v, -1);

    for (int u = 0; u < p.n_v; ++u) {
        const int col = u / g.half, offset = u % g.half;
        for (int r = 0; r < g.rows; ++r) {
            const int q = g.qubit_index(r, col, 0, offset);
            emb.chains[u].push_back(q);
            emb.qubit_unit[q] = u;
        }
    }
    for (int u = 0; u < p.n_h; ++u) {
        const int row = u / g.half, offset = u % g.half;
        for (int col = 0; col < g.cols; ++col) {
            const int q = g.qubit_index(row, col, 1, offset);
            emb.chains[p.n_v + u].push_back(q);
            emb.qubit_unit[q] = p.n_v + u;
        }
    }

    IsingProblem problem;
    problem.n_qubits = g.num_qubits();
    problem.couplers = g.couplers;
    problem.h = Vec::Zero(problem.n_qubits);
    problem.j = Vec::Zero(static_cast<Eigen::Index>(g.couplers.size()));
    problem.meta = {g.rows, g.cols, g.half, scale, chain_coupling};

    // couplers: chain bonds at +chain_coupling, crossings at w/s
    for (std::size_t k = 0; k < g.couplers.size(); ++k) {
        const auto [a, b] = g.couplers[k];
        const int ua = emb.qubit_unit[a], ub = emb.qubit_unit[b];
        if (ua < 0 || ub < 0) continue;
        if (ua == ub) {
            problem.j[static_cast<Eigen::Index>(k)] = chain_coupling;
            emb.chain_coupler_index.push_back(static_cast<int>(k));
        } else if (emb.is_visible_unit(ua) != emb.is_visible_unit(ub)) {
            const int vis = emb.is_visible_unit(ua) ? ua : ub;
            const int hid = (emb.is_visible_unit(ua) ? ub : ua) - p.n_v;
            problem.j[static_cast<Eigen::Index>(k)] = p.w(hid, vis) / scale;
            emb.crossing(hid, vis) = static_cast<int>(k);
        }
    }

    // split logical biases equally over the chain
    for (int u = 0; u < p.n_v; ++u) {
        const double split = p.b[u] / (scale * static_cast<double>(emb.chains[u].size()));
        for (int q : emb.chains[u]) problem.h[q] = split;
    }
    for (int u = 0; u < p.n_h; ++u) {
        const double split =
            p.c[u] / (scale * static_cast<double>(emb.chains[p.n_v + u].size()));
        for (int q : emb.chains[p.n_v + u]) problem.h[q] = split;
    }

    // every (v,h) pair must have found its one crossing coupler
    for (int i = 0; i < p.n_h; ++i)
        for (int jv = 0; jv < p.n_v; ++jv)
            if (emb.crossing(i, jv) < 0)
                throw std::logic_error("embed_rbm: missing crossing coupler");
    problem.validate();
    return {std::move(problem), std::move(emb)};
}

IsingProblem clamp_units(IsingProblem problem, const Embedding& emb,
                         const std::map<int, double>& assignments) {
    for (const auto& [unit, value] : assignments) {
        if (unit < 0 || unit >= emb.unit_count())
            throw std::out_of_range("clamp_units: unknown unit id " + std::to_string(unit));
        if (value != 1.0 && value != -1.0)
            throw std::invalid_argument("clamp_units: clamp value must be -1 or +1");
        for (int q : emb.chains[unit]) problem.h[q] = 2.0 * value;
    }
    problem.validate();
    return problem;
}

std::pair<SpinState, ChainReport> decode(const Embedding& emb,
                                         const std::vector<std::int8_t>& qubit_state, Rng& rng) {
    for (const auto& chain : emb.chains)
        for (int q : chain)
            if (q >= static_cast<int>(qubit_state.size()))
                throw std::invalid_argument("decode: qubit state does not cover the embedding");

    SpinState s{Vec(emb.n_v), Vec(emb.n_h)};
    ChainReport report;
    report.agreement.resize(emb.unit_count());
    report.tie.assign(emb.unit_count(), 0);

    for (int u = 0; u < emb.unit_count(); ++u) {
        const auto& chain = emb.chains[u];
        int plus = 0;
        for (int q : chain) plus += qubit_state[q] > 0;
        const int minus = static_cast<int>(chain.size()) - plus;
        double value;
        if (plus > minus) {
            value = 1.0;
        } else if (minus > plus) {
            value = -1.0;
        } else {
            value = rng.uniform() < 0.5 ? 1.0 : -1.0;
            report.tie[u] = 1;
        }
        report.agreement[u] =
            static_cast<double>(std::max(plus, minus)) / static_cast<double>(chain.size());
        if (report.agreement[u] < 1.0) ++report.broken_chains;
        if (emb.is_visible_unit(u))
            s.v[u] = value;
        else
            s.h[u - emb.n_v] = value;
    }
    return {std::move(s), std::move(report)};
}

std::vector<std::int8_t> encode(const Embedding& emb, const SpinState& s, int n_qubits) {
    if (s.v.size() != emb.n_v || s.h.size() != emb.n_h)
        throw std::invalid_argument("encode: state shape mismatch");
    std::vector<std::int8_t> out(static_cast<std::size_t>(n_qubits), 1);
    for (int u = 0; u < emb.unit_count(); ++u) {
        const double value = emb.is_visible_unit(u) ? s.v[u] : s.h[u - emb.n_v];
        for (int q : emb.chains[u]) out[static_cast<std::size_t>(q)] = value > 0 ? 1 : -1;
    }
    return out;
}

double embedded_energy(const IsingProblem& problem, const std::vector<std::int8_t>& state) {
    if (state.size() != static_cast<std::size_t>(problem.n_qubits))
        throw std::invalid_argument("embedded_energy: state does not cover all qubits");
    double e = 0.0;
    for (std::size_t k = 0; k < problem.couplers.size(); ++k) {
        const auto [a, b] = problem.couplers[k];
        e -= problem.j[static_cast<Eigen::Index>(k)] * state[a] * state[b];
    }
    for (int q = 0; q < problem.n_qubits; ++q) e -= problem.h[q] * state[q];
    return e;
}

double chain_energy_offset(const IsingProblem& problem, const Embedding& emb) {
    return -problem.meta.chain_coupling * static_cast<double>(emb.chain_coupler_index.size());
}

ScaleSweepResult sweep_scale(
    const RbmParams& p, const ChimeraGraph& g, const std::vector<double>& scales,
    const std::function<double(const IsingProblem&, const Embedding&, double)>& eval) {
    if (scales.empty()) throw std::invalid_argument("sweep_scale: no scales given");
    ScaleSweepResult result;
    double best = std::numeric_limits<double>::infinity();
    for (double s : scales) {
        const auto [problem, emb] = embed_rbm(p, g, s);
        const double metric = eval(problem, emb, s);
        result.table.emplace_back(s, metric);
        if (metric < best) {
            best = metric;
            result.argmin_scale = s;
        }
    }
    return result;
}

}  // namespace valleyscope
