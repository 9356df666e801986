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

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "valleyscope/rng.hpp"

namespace valleyscope {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Joint spin configuration in Ising convention: every entry is exactly
// -1.0 or +1.0. Spins are stored as doubles so they feed straight into
// the linear algebra.
struct SpinState {
    Vec v;
    Vec h;
};

// RBM parameters in Ising convention:
//   E(v,h) = -sum_ij w_ij h_i v_j - sum_j b_j v_j - sum_i c_i h_i
struct RbmParams {
    int n_v = 0;
    int n_h = 0;
    Mat w;  // n_h x n_v
    Vec b;  // visible biases, length n_v
    Vec c;  // hidden biases, length n_h
    std::vector<int> label_units;  // one-hot class units among the visibles
    double w_cap = 0.5;            // hard ceiling on max |w_ij| after decay

    static RbmParams zeros(int n_v, int n_h);

    // shapes, finiteness, distinct in-range label indices
    void validate() const;
};

struct GradientEstimate {
    Mat dw;
    Vec db;
    Vec dc;
};

struct TrainConfig {
    int cd_steps = 5;          // k of CD-k
    double learning_rate = 0.05;
    double weight_decay = 2e-4;   // lambda
    double decay_power = 2.0;     // p in |w|^p shrinkage
    int epochs = 100;
    std::uint64_t seed = 1;
    double temperature = 1.0;
    bool use_exact_gradient = false;  // desk-scale ascent mode (no sampling)

    void validate() const;
};

struct EpochMetrics {
    int epoch = 0;
    double recon_error = 0.0;  // one-step stochastic reconstruction mismatch
    double max_abs_w = 0.0;
    std::optional<double> log_likelihood;  // exact, desk scale only
};

// --- energies and probabilities ------------------------------------------

double energy(const RbmParams& p, const SpinState& s);

// F(v) = -b.v - sum_i ln(2 cosh(w_i.v + c_i)); ln Sum_h e^{-E(v,h)} closed form
double free_energy(const RbmParams& p, const Vec& v);

// P(h_i = +1 | v) = sigma(2 (w_i.v + c_i) / T),  sigma(x) = 1/(1+e^-x)
Vec cond_prob_h(const RbmParams& p, const Vec& v, double T = 1.0);
Vec cond_prob_v(const RbmParams& p, const Vec& h, double T = 1.0);

// numerically stable ln(2 cosh x)
double ln_2cosh(double x);

// --- exact desk-scale quantities (n_v + n_h <= kExactSizeLimit) ----------

inline constexpr int kExactSizeLimit = 24;

double exact_log_partition(const RbmParams& p);
double exact_partition(const RbmParams& p);
double exact_log_likelihood(const RbmParams& p, const std::vector<Vec>& data);

// target is a dense table over the 2^{n_v} visible states; bit j of the
// index set means v_j = +1. Must sum to 1 within 1e-12.
double exact_kl(const RbmParams& p, const std::vector<double>& target);

GradientEstimate exact_gradient(const RbmParams& p, const std::vector<Vec>& data);

// --- training --------------------------------------------------------------

// CD-k gradient averaged over the batch; one k-step Gibbs chain per pattern,
// each chain on its own RNG stream.
GradientEstimate cd_gradient(const RbmParams& p, const std::vector<Vec>& batch,
                             int k, double T, Rng& rng);

// w_ij <- w_ij - lambda sign(w_ij) |w_ij|^p, then uniform rescale so that
// max |w_ij| <= p.w_cap. b, c untouched.
RbmParams apply_weight_decay(RbmParams p, double lambda, double power);

RbmParams train(RbmParams p, const std::vector<Vec>& data, const TrainConfig& cfg,
                std::vector<EpochMetrics>* metrics = nullptr);

// --- state helpers ----------------------------------------------------------

// bit j of idx set -> spin j = +1
Vec spins_from_index(std::uint64_t idx, int n);
std::uint64_t index_from_spins(const Vec& s);

// "+-+..." over v then h; canonical map key for states
std::string spin_key(const SpinState& s);
std::string spin_key(const Vec& v);
SpinState state_from_key(const std::string& key, int n_v, int n_h);

// FNV-1a over the canonical JSON of the parameters; ties registries to the
// exact model they were computed for.
std::string params_fingerprint(const RbmParams& p);

}  // namespace valleyscope
