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

namespace valleyscope {

// splitmix64 step; used for state seeding and stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ generator. All sampling in the library goes through this
// type, so identical (seed, stream) pairs give identical draws on every
// platform and standard library. Independent streams are derived from the
// same seed by mixing the stream id into the seeding sequence; chains,
// anneal reads and escape trials each own a stream keyed by their index,
// which keeps results reproducible no matter how work is scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
        for (auto& w : s_) w = splitmix64_next(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform double in [0, 1), 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n); n > 0
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // independent generator derived from the current state
    Rng fork() {
        const std::uint64_t a = next_u64();
        const std::uint64_t b = next_u64();
        return Rng(a, b);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// In-place Fisher-Yates shuffle; std::shuffle's draw pattern is
// implementation-defined, this one is not.
template <typename T>
void shuffle(T* data, std::size_t n, Rng& rng) {
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        T tmp = data[i - 1];
        data[i - 1] = data[j];
        data[j] = tmp;
    }
}

}  // namespace valleyscope
