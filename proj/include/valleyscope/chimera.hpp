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
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "valleyscope/rbm.hpp"
#include "valleyscope/rng.hpp"

namespace valleyscope {

// Chimera lattice of M x N unit cells, each a complete bipartite K_{c,c}.
// Qubit index = ((row * N + col) * 2c) + side * c + offset, side 0 = left
// column, side 1 = right column. Left qubits connect vertically to the
// same offset in the row above/below; right qubits connect horizontally.
// The lattice is flawless: no missing qubits or couplers.
struct ChimeraGraph {
    int rows = 0;  // M
    int cols = 0;  // N
    int half = 4;  // c, qubits per cell column

    // couplers as (a, b) with a < b; intra-cell first, then vertical, then
    // horizontal, each block in ascending qubit order
    std::vector<std::pair<int, int>> couplers;

    int num_qubits() const { return rows * cols * 2 * half; }
    int qubit_index(int row, int col, int side, int offset) const {
        return ((row * cols + col) * 2 * half) + side * half + offset;
    }

    static ChimeraGraph build(int M, int N, int c = 4);
};

// Physical Ising problem over a Chimera graph, internal sign convention
//   E(s) = -sum_{couplers} J_ab s_a s_b - sum_q h_q s_q
// Couplings live only on couplers of the graph by construction.
struct IsingProblem {
    int n_qubits = 0;
    std::vector<std::pair<int, int>> couplers;
    Vec h;  // per qubit, in [-2, 2]
    Vec j;  // per coupler, in [-1, 1]

    struct Meta {
        int rows = 0, cols = 0, half = 0;
        double scale = 1.0;
        double chain_coupling = 1.0;
    } meta;

    void validate() const;  // range bounds; throws std::logic_error on a construction bug
};

// Which logical unit each qubit clone belongs to. Visible unit u occupies
// the left-side qubits at offset (u mod c) in every cell of cell-column
// u / c; hidden unit u the right-side qubits at offset (u mod c) in every
// cell of cell-row u / c.
struct Embedding {
    int n_v = 0;
    int n_h = 0;
    std::vector<std::vector<int>> chains;  // units 0..n_v-1 visible, then hidden
    std::vector<int> qubit_unit;           // qubit -> unit id, -1 for unused
    Eigen::MatrixXi crossing;              // (hidden i, visible j) -> coupler index
    std::vector<int> chain_coupler_index;  // couplers binding clones together

    int unit_count() const { return n_v + n_h; }
    bool is_visible_unit(int u) const { return u < n_v; }
};

ChimeraGraph derive_graph(const IsingProblem& p);

// Embeds the RBM at scale s >= 1: chain couplers get +chain_coupling
// (ferromagnetic at the maximum magnitude), the (v,h) crossing coupler
// gets w_hv / s, and the logical bias is split equally over the chain, so
// each clone gets beta / (s * L).
std::pair<IsingProblem, Embedding> embed_rbm(const RbmParams& p, const ChimeraGraph& g,
                                             double scale, double chain_coupling = 1.0);

// Clamps whole units by saturating every clone's bias at +2 or -2,
// overriding the split logical bias; couplings untouched.
IsingProblem clamp_units(IsingProblem problem, const Embedding& emb,
                         const std::map<int, double>& assignments);

struct ChainReport {
    std::vector<double> agreement;  // per unit, majority fraction
    std::vector<std::uint8_t> tie;  // per unit, 1 when an exact tie was coin-flipped
    int broken_chains = 0;          // chains with agreement < 1
};

// Majority vote per chain; exact ties on even chains resolved by a seeded
// coin flip and flagged.
std::pair<SpinState, ChainReport> decode(const Embedding& emb,
                                         const std::vector<std::int8_t>& qubit_state, Rng& rng);

// Chain-consistent encoding of a logical state; qubits outside every chain
// are set to +1.
std::vector<std::int8_t> encode(const Embedding& emb, const SpinState& s, int n_qubits);

double embedded_energy(const IsingProblem& problem, const std::vector<std::int8_t>& state);

// For chain-consistent states, embedded_energy = rbm energy / scale + C with
// C = -(number of chain couplers) * chain_coupling.
double chain_energy_offset(const IsingProblem& problem, const Embedding& emb);

struct ScaleSweepResult {
    std::vector<std::pair<double, double>> table;  // (scale, metric)
    double argmin_scale = 0.0;
};

// Embeds at each scale and evaluates the supplied metric; ties on the
// minimum resolve to the first scale.
ScaleSweepResult sweep_scale(
    const RbmParams& p, const ChimeraGraph& g, const std::vector<double>& scales,
    const std::function<double(const IsingProblem&, const Embedding&, double)>& eval);

}  // namespace valleyscope
