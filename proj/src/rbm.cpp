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

#include "valleyscope/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <stdexcept>

namespace valleyscope {

namespace {

void check_spins(const Vec& s, const char* what) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] != 1.0 && s[i] != -1.0)
            throw std::invalid_argument(std::string(what) + ": entries must be -1 or +1");
    }
}

void check_visible(const RbmParams& p, const Vec& v) {
    if (v.size() != p.n_v) throw std::invalid_argument("visible vector size mismatch");
}

void check_desk_scale(const RbmParams& p) {
    if (p.n_v + p.n_h > kExactSizeLimit)
        throw std::invalid_argument("exact computation refused: n_v + n_h exceeds " +
                                    std::to_string(kExactSizeLimit));
}

double logsumexp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace

RbmParams RbmParams::zeros(int n_v, int n_h) {
    RbmParams p;
    p.n_v = n_v;
    p.n_h = n_h;
    p.w = Mat::Zero(n_h, n_v);
    p.b = Vec::Zero(n_v);
    p.c = Vec::Zero(n_h);
    return p;
}

void RbmParams::validate() const {
    if (n_v <= 0 || n_h <= 0) throw std::invalid_argument("RbmParams: empty layer");
    if (w.rows() != n_h || w.cols() != n_v || b.size() != n_v || c.size() != n_h)
        throw std::invalid_argument("RbmParams: shape mismatch");
    if (!w.allFinite() || !b.allFinite() || !c.allFinite())
        throw std::invalid_argument("RbmParams: non-finite entries");
    std::set<int> seen;
    for (int u : label_units) {
        if (u < 0 || u >= n_v) throw std::invalid_argument("RbmParams: label unit out of range");
        if (!seen.insert(u).second) throw std::invalid_argument("RbmParams: duplicate label unit");
    }
}

void TrainConfig::validate() const {
    if (cd_steps < 1) throw std::invalid_argument("TrainConfig: cd_steps must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (weight_decay < 0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (decay_power <= 0) throw std::invalid_argument("TrainConfig: decay_power must be > 0");
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (temperature <= 0) throw std::invalid_argument("TrainConfig: temperature must be > 0");
}

double energy(const RbmParams& p, const SpinState& s) {
    if (s.v.size() != p.n_v || s.h.size() != p.n_h)
        throw std::invalid_argument("energy: state shape mismatch");
    return -s.h.dot(p.w * s.v) - p.b.dot(s.v) - p.c.dot(s.h);
}

double ln_2cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a));
}

double free_energy(const RbmParams& p, const Vec& v) {
    check_visible(p, v);
    const Vec theta = p.w * v + p.c;
    double acc = -p.b.dot(v);
    for (Eigen::Index i = 0; i < theta.size(); ++i) acc -= ln_2cosh(theta[i]);
    return acc;
}

namespace {

Vec sigmoid_of(const Vec& field, double T) {
    if (T <= 0) throw std::invalid_argument("cond_prob: temperature must be > 0");
    Vec out(field.size());
    for (Eigen::Index i = 0; i < field.size(); ++i)
        out[i] = 1.0 / (1.0 + std::exp(-2.0 * field[i] / T));
    return out;
}

}  // namespace

Vec cond_prob_h(const RbmParams& p, const Vec& v, double T) {
    check_visible(p, v);
    return sigmoid_of(p.w * v + p.c, T);
}

Vec cond_prob_v(const RbmParams& p, const Vec& h, double T) {
    if (h.size() != p.n_h) throw std::invalid_argument("hidden vector size mismatch");
    return sigmoid_of(p.w.transpose() * h + p.b, T);
}

double exact_log_partition(const RbmParams& p) {
    check_desk_scale(p);
    // enumerate the smaller layer; the other is summed out in closed form
    const bool over_visible = p.n_v <= p.n_h;
    const int n = over_visible ? p.n_v : p.n_h;
    std::vector<double> terms;
    terms.reserve(std::size_t{1} << n);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
        const Vec s = spins_from_index(idx, n);
        if (over_visible) {
            terms.push_back(-free_energy(p, s));
        } else {
            // dual free energy over hidden states
            const Vec theta = p.w.transpose() * s + p.b;
            double acc = p.c.dot(s);
            for (Eigen::Index j = 0; j < theta.size(); ++j) acc += ln_2cosh(theta[j]);
            terms.push_back(acc);
        }
    }
    return logsumexp(terms);
}

double exact_partition(const RbmParams& p) { return std::exp(exact_log_partition(p)); }

double exact_log_likelihood(const RbmParams& p, const std::vector<Vec>& data) {
    if (data.empty()) throw std::invalid_argument("exact_log_likelihood: empty data");
    check_desk_scale(p);
    const double ln_z = exact_log_partition(p);
    double acc = 0.0;
    for (const Vec& v : data) acc += -free_energy(p, v);
    return acc / static_cast<double>(data.size()) - ln_z;
}

double exact_kl(const RbmParams& p, const std::vector<double>& target) {
    check_desk_scale(p);
    const std::uint64_t n_states = std::uint64_t{1} << p.n_v;
    if (target.size() != n_states)
        throw std::invalid_argument("exact_kl: target table must cover all visible states");
    double sum = 0.0;
    for (double t : target) {
        if (t < 0) throw std::invalid_argument("exact_kl: negative target probability");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("exact_kl: target does not sum to 1");
    const double ln_z = exact_log_partition(p);
    double kl = 0.0;
    for (std::uint64_t idx = 0; idx < n_states; ++idx) {
        const double t = target[idx];
        if (t == 0.0) continue;  // 0 ln 0 = 0
        const double ln_pm = -free_energy(p, spins_from_index(idx, p.n_v)) - ln_z;
        kl += t * (std::log(t) - ln_pm);
    }
    return kl;
}

GradientEstimate exact_gradient(const RbmParams& p, const std::vector<Vec>& data) {
    if (data.empty()) throw std::invalid_argument("exact_gradient: empty data");
    check_desk_scale(p);

    GradientEstimate g{Mat::Zero(p.n_h, p.n_v), Vec::Zero(p.n_v), Vec::Zero(p.n_h)};

    // positive phase: data average of (tanh(theta(v)) v^T, v, tanh(theta(v)))
    for (const Vec& v : data) {
        const Vec t = (p.w * v + p.c).array().tanh();  // 2 p(H=1|v) - 1
        g.dw += t * v.transpose();
        g.db += v;
        g.dc += t;
    }
    const double inv_k = 1.0 / static_cast<double>(data.size());
    g.dw *= inv_k;
    g.db *= inv_k;
    g.dc *= inv_k;

    // negative phase: model expectation by full visible enumeration
    const double ln_z = exact_log_partition(p);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << p.n_v); ++idx) {
        const Vec v = spins_from_index(idx, p.n_v);
        const double pm = std::exp(-free_energy(p, v) - ln_z);
        const Vec t = (p.w * v + p.c).array().tanh();
        g.dw -= pm * (t * v.transpose());
        g.db -= pm * v;
        g.dc -= pm * t;
    }
    return g;
}

namespace {

Vec sample_spins(const Vec& prob_plus, Rng& rng) {
    Vec s(prob_plus.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s[i] = rng.uniform() < prob_plus[i] ? 1.0 : -1.0;
    return s;
}

// CD-k contribution of a single pattern; chain restarts at the pattern.
void cd_accumulate(const RbmParams& p, const Vec& v0, int k, double T, Rng& rng,
                   GradientEstimate& g) {
    const Vec t_data = ((p.w * v0 + p.c) / T).array().tanh();
    g.dw += t_data * v0.transpose();
    g.db += v0;
    g.dc += t_data;

    Vec v = v0;
    for (int step = 0; step < k; ++step) {
        const Vec h = sample_spins(cond_prob_h(p, v, T), rng);
        v = sample_spins(cond_prob_v(p, h, T), rng);
    }
    const Vec t_model = ((p.w * v + p.c) / T).array().tanh();
    g.dw -= t_model * v.transpose();
    g.db -= v;
    g.dc -= t_model;
}

}  // namespace

GradientEstimate cd_gradient(const RbmParams& p, const std::vector<Vec>& batch, int k,
                             double T, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("cd_gradient: empty batch");
    if (k < 1) throw std::invalid_argument("cd_gradient: k must be >= 1");
    if (T <= 0) throw std::invalid_argument("cd_gradient: temperature must be > 0");

    GradientEstimate g{Mat::Zero(p.n_h, p.n_v), Vec::Zero(p.n_v), Vec::Zero(p.n_h)};
    const std::uint64_t base = rng.next_u64();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        check_visible(p, batch[i]);
        check_spins(batch[i], "cd_gradient batch");
        Rng chain_rng(base, i);  // stream per pattern; reduction is index-ordered
        cd_accumulate(p, batch[i], k, T, chain_rng, g);
    }
    const double inv_k = 1.0 / static_cast<double>(batch.size());
    g.dw *= inv_k;
    g.db *= inv_k;
    g.dc *= inv_k;
    return g;
}

RbmParams apply_weight_decay(RbmParams p, double lambda, double power) {
    if (lambda < 0) throw std::invalid_argument("apply_weight_decay: lambda must be >= 0");
    if (power <= 0) throw std::invalid_argument("apply_weight_decay: power must be > 0");
    if (lambda > 0) {
        for (Eigen::Index i = 0; i < p.w.rows(); ++i) {
            for (Eigen::Index j = 0; j < p.w.cols(); ++j) {
                const double w = p.w(i, j);
                if (w == 0.0) continue;
                const double shrunk = std::abs(w) - lambda * std::pow(std::abs(w), power);
                p.w(i, j) = std::copysign(std::max(shrunk, 0.0), w);
            }
        }
    }
    const double max_abs = p.w.size() ? p.w.cwiseAbs().maxCoeff() : 0.0;
    if (max_abs > p.w_cap) p.w *= p.w_cap / max_abs;
    return p;
}

namespace {

double reconstruction_error(const RbmParams& p, const std::vector<Vec>& data, double T,
                            Rng& rng) {
    long mismatched = 0;
    long total = 0;
    for (const Vec& v : data) {
        const Vec h = sample_spins(cond_prob_h(p, v, T), rng);
        const Vec vr = sample_spins(cond_prob_v(p, h, T), rng);
        for (Eigen::Index j = 0; j < v.size(); ++j) mismatched += vr[j] != v[j];
        total += v.size();
    }
    return static_cast<double>(mismatched) / static_cast<double>(total);
}

}  // namespace

RbmParams train(RbmParams p, const std::vector<Vec>& data, const TrainConfig& cfg,
                std::vector<EpochMetrics>* metrics) {
    cfg.validate();
    p.validate();
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    for (const Vec& v : data) {
        check_visible(p, v);
        check_spins(v, "train data");
    }

    const bool desk_scale = p.n_v + p.n_h <= kExactSizeLimit;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.use_exact_gradient) {
            const GradientEstimate g = exact_gradient(p, data);
            p.w += cfg.learning_rate * g.dw;
            p.b += cfg.learning_rate * g.db;
            p.c += cfg.learning_rate * g.dc;
            p = apply_weight_decay(std::move(p), cfg.weight_decay, cfg.decay_power);
        } else {
            // one full pass, every pattern participating exactly once
            Rng order_rng(cfg.seed, 0x0EA50000ull + static_cast<std::uint64_t>(epoch));
            valleyscope::shuffle(order.data(), order.size(), order_rng);
            for (std::size_t i = 0; i < order.size(); ++i) {
                GradientEstimate g{Mat::Zero(p.n_h, p.n_v), Vec::Zero(p.n_v), Vec::Zero(p.n_h)};
                Rng chain_rng(cfg.seed,
                              (static_cast<std::uint64_t>(epoch) << 32) | (i + 1));
                cd_accumulate(p, data[order[i]], cfg.cd_steps, cfg.temperature, chain_rng, g);
                p.w += cfg.learning_rate * g.dw;
                p.b += cfg.learning_rate * g.db;
                p.c += cfg.learning_rate * g.dc;
                p = apply_weight_decay(std::move(p), cfg.weight_decay, cfg.decay_power);
            }
        }
        if (metrics) {
            EpochMetrics m;
            m.epoch = epoch + 1;
            Rng metrics_rng(cfg.seed, 0x3E7121C5ull + static_cast<std::uint64_t>(epoch));
            m.recon_error = reconstruction_error(p, data, cfg.temperature, metrics_rng);
            m.max_abs_w = p.w.size() ? p.w.cwiseAbs().maxCoeff() : 0.0;
            if (desk_scale) m.log_likelihood = exact_log_likelihood(p, data);
            metrics->push_back(m);
        }
    }
    return p;
}

Vec spins_from_index(std::uint64_t idx, int n) {
    Vec s(n);
    for (int j = 0; j < n; ++j) s[j] = (idx >> j) & 1 ? 1.0 : -1.0;
    return s;
}

std::uint64_t index_from_spins(const Vec& s) {
    std::uint64_t idx = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s[j] > 0) idx |= std::uint64_t{1} << j;
    return idx;
}

std::string spin_key(const Vec& v) {
    std::string key(static_cast<std::size_t>(v.size()), '-');
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (v[j] > 0) key[static_cast<std::size_t>(j)] = '+';
    return key;
}

std::string spin_key(const SpinState& s) { return spin_key(s.v) + spin_key(s.h); }

SpinState state_from_key(const std::string& key, int n_v, int n_h) {
    if (key.size() != static_cast<std::size_t>(n_v + n_h))
        throw std::invalid_argument("state_from_key: length mismatch");
    SpinState s{Vec(n_v), Vec(n_h)};
    for (int j = 0; j < n_v; ++j) s.v[j] = key[j] == '+' ? 1.0 : -1.0;
    for (int i = 0; i < n_h; ++i) s.h[i] = key[n_v + i] == '+' ? 1.0 : -1.0;
    return s;
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
}

}  // namespace

std::string params_fingerprint(const RbmParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const std::int64_t dims[2] = {p.n_v, p.n_h};
    fnv_bytes(h, dims, sizeof dims);
    fnv_bytes(h, p.w.data(), sizeof(double) * static_cast<std::size_t>(p.w.size()));
    fnv_bytes(h, p.b.data(), sizeof(double) * static_cast<std::size_t>(p.b.size()));
    fnv_bytes(h, p.c.data(), sizeof(double) * static_cast<std::size_t>(p.c.size()));
    for (int u : p.label_units) fnv_bytes(h, &u, sizeof u);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace valleyscope
