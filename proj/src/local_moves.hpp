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

// Internal single-site move engine shared by the relaxation, warming and
// escape-rate code paths. Keeps the local fields of both layers so a flip
// costs O(1) to evaluate and O(n) to commit.

#pragma once

#include <vector>

#include "valleyscope/gibbs.hpp"
#include "valleyscope/rbm.hpp"

namespace valleyscope::detail {

class LocalMoves {
public:
    LocalMoves(const RbmParams& p, SpinState s) : p_(&p), s_(std::move(s)) {
        field_v_ = p.w.transpose() * s_.h + p.b;  // per visible site
        field_h_ = p.w * s_.v + p.c;              // per hidden site
        energy_ = -s_.h.dot(p.w * s_.v) - p.b.dot(s_.v) - p.c.dot(s_.h);
    }

    int n_sites() const { return p_->n_v + p_->n_h; }
    bool is_visible(int site) const { return site < p_->n_v; }

    // energy change of flipping `site`; site ids order visibles before hiddens
    double delta(int site) const {
        return is_visible(site) ? 2.0 * s_.v[site] * field_v_[site]
                                : 2.0 * s_.h[site - p_->n_v] * field_h_[site - p_->n_v];
    }

    void flip(int site) {
        energy_ += delta(site);
        if (is_visible(site)) {
            const double old = s_.v[site];
            s_.v[site] = -old;
            field_h_ -= 2.0 * old * p_->w.col(site);
        } else {
            const int i = site - p_->n_v;
            const double old = s_.h[i];
            s_.h[i] = -old;
            field_v_ -= 2.0 * old * p_->w.row(i).transpose();
        }
    }

    const SpinState& state() const { return s_; }
    SpinState take_state() && { return std::move(s_); }
    double energy() const { return energy_; }

    // sites not excluded by the mask, in ascending order
    static std::vector<int> free_sites(const RbmParams& p, const ClampMask* mask) {
        std::vector<int> sites;
        sites.reserve(p.n_v + p.n_h);
        for (int j = 0; j < p.n_v; ++j)
            if (!mask || !mask->v[j]) sites.push_back(j);
        for (int i = 0; i < p.n_h; ++i)
            if (!mask || !mask->h[i]) sites.push_back(p.n_v + i);
        return sites;
    }

    // true iff no free single flip strictly lowers the energy
    bool single_flip_minimal(const std::vector<int>& sites) const {
        for (int site : sites)
            if (delta(site) < 0.0) return false;
        return true;
    }

    // greedy strict descent until minimal; deterministic, always terminates
    void greedy_descent(const std::vector<int>& sites) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int site : sites) {
                if (delta(site) < 0.0) {
                    flip(site);
                    moved = true;
                }
            }
        }
    }

private:
    const RbmParams* p_;
    SpinState s_;
    Vec field_v_;
    Vec field_h_;
    double energy_;
};

}  // namespace valleyscope::detail
