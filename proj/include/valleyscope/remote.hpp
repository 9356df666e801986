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

// Remote-annealer wire client and the bundled mock service speaking the
// same protocol. The wire uses the hardware sign convention
//   E(s) = +sum J_ab s_a s_b + sum h_q s_q
// (ferromagnetic chain bonds are -1 there), so J and h are negated at this
// boundary in both directions; energies are numerically identical in both
// conventions and travel unchanged.
//
//   POST /v1/solve  {"h":{"q":v,...},"J":{"a,b":v,...},"num_reads":n,
//                    "seed":s,"schedule":{"beta_min":..,"beta_max":..,"sweeps":..}}
//     -> {"reads":[{"spins":[...],"energy":e,"num":m},...]}
//   GET  /v1/health -> {"ok":true}

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "valleyscope/annealer.hpp"

namespace valleyscope {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// POSTs the problem in hardware convention, parses and verifies the reads
// (energy recheck <= 1e-6), and retries up to 3 times on transport
// failure. Never returns a partial SampleSet.
SampleSet remote_solve(const std::string& endpoint, const IsingProblem& problem, int num_reads,
                       const AnnealSchedule& schedule, std::uint64_t seed,
                       int timeout_seconds = 60);

// Stateless mock annealer backed by solve_sa; one HTTP server thread.
class MockService {
public:
    // binds immediately; port 0 picks a free port
    MockService(const std::string& host, int port, std::uint64_t default_seed,
                int max_qubits = 4096);
    ~MockService();

    MockService(const MockService&) = delete;
    MockService& operator=(const MockService&) = delete;

    int port() const { return port_; }
    std::string endpoint() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string host_;
    int port_ = 0;
};

}  // namespace valleyscope
