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

#include "valleyscope/remote.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace valleyscope {

using nlohmann::json;

namespace {

json problem_to_wire(const IsingProblem& problem, int num_reads, const AnnealSchedule& schedule,
                     std::uint64_t seed) {
    json h = json::object();
    for (int q = 0; q < problem.n_qubits; ++q) h[std::to_string(q)] = -problem.h[q];
    json couplings = json::object();
    for (std::size_t k = 0; k < problem.couplers.size(); ++k) {
        const auto [a, b] = problem.couplers[k];
        couplings[std::to_string(a) + "," + std::to_string(b)] =
            -problem.j[static_cast<Eigen::Index>(k)];
    }
    return json{{"h", std::move(h)},
                {"J", std::move(couplings)},
                {"num_reads", num_reads},
                {"seed", seed},
                {"schedule",
                 {{"beta_min", schedule.beta_min},
                  {"beta_max", schedule.beta_max},
                  {"sweeps", schedule.sweeps}}}};
}

IsingProblem problem_from_wire(const json& body) {
    if (!body.contains("h") || !body["h"].is_object() || !body.contains("J") ||
        !body["J"].is_object())
        throw ProtocolError("solve request needs object fields h and J");
    int max_index = -1;
    for (const auto& [key, value] : body["h"].items()) {
        (void)value;
        max_index = std::max(max_index, std::stoi(key));
    }
    std::vector<std::pair<int, int>> couplers;
    for (const auto& [key, value] : body["J"].items()) {
        (void)value;
        const auto comma = key.find(',');
        if (comma == std::string::npos) throw ProtocolError("J key must look like \"a,b\"");
        const int a = std::stoi(key.substr(0, comma));
        const int b = std::stoi(key.substr(comma + 1));
        if (a == b) throw ProtocolError("J key couples a qubit to itself");
        couplers.emplace_back(std::min(a, b), std::max(a, b));
        max_index = std::max({max_index, a, b});
    }
    if (max_index < 0) throw ProtocolError("empty problem");

    IsingProblem problem;
    problem.n_qubits = max_index + 1;
    problem.couplers = std::move(couplers);
    problem.h = Vec::Zero(problem.n_qubits);
    problem.j = Vec::Zero(static_cast<Eigen::Index>(problem.couplers.size()));
    for (const auto& [key, value] : body["h"].items())
        problem.h[std::stoi(key)] = -value.get<double>();
    // wire order of J entries matches the couplers vector built above
    Eigen::Index slot = 0;
    for (const auto& [key, value] : body["J"].items()) {
        (void)key;
        problem.j[slot++] = -value.get<double>();
    }
    return problem;
}

json sample_to_wire(const SampleSet& sample) {
    json reads = json::array();
    for (const AnnealRead& r : sample.reads) {
        json spins = json::array();
        for (std::int8_t s : r.spins) spins.push_back(static_cast<int>(s));
        reads.push_back(json{{"spins", std::move(spins)},
                             {"energy", r.energy},
                             {"num", r.multiplicity}});
    }
    return json{{"reads", std::move(reads)}};
}

SampleSet sample_from_wire(const json& body, const IsingProblem& problem, int num_reads,
                           const AnnealSchedule& schedule, std::uint64_t seed) {
    if (!body.contains("reads") || !body["reads"].is_array())
        throw ProtocolError("response lacks a reads array");
    SampleSet out;
    out.num_reads = num_reads;
    out.backend = "remote";
    out.seed = seed;
    out.schedule = schedule.descriptor();
    for (const json& entry : body["reads"]) {
        if (!entry.contains("spins") || !entry["spins"].is_array() || !entry.contains("energy") ||
            !entry.contains("num"))
            throw ProtocolError("read entry needs spins, energy and num");
        AnnealRead read;
        read.spins.reserve(entry["spins"].size());
        for (const json& s : entry["spins"]) {
            const int v = s.get<int>();
            if (v != 1 && v != -1) throw ProtocolError("read spin outside {-1, +1}");
            read.spins.push_back(static_cast<std::int8_t>(v));
        }
        if (read.spins.size() != static_cast<std::size_t>(problem.n_qubits))
            throw ProtocolError("read spin vector has the wrong length");
        read.energy = entry["energy"].get<double>();
        read.multiplicity = entry["num"].get<int>();
        if (read.multiplicity < 1) throw ProtocolError("read multiplicity must be >= 1");
        // energies are convention-invariant; verify against the local problem,
        // then keep the locally computed value as canonical
        const double local = embedded_energy(problem, read.spins);
        if (std::abs(local - read.energy) > 1e-6)
            throw ProtocolError("read energy does not match its spins after reconversion");
        read.energy = local;
        out.reads.push_back(std::move(read));
    }
    if (out.total_multiplicity() != num_reads)
        throw ProtocolError("read multiplicities do not sum to num_reads");
    std::stable_sort(out.reads.begin(), out.reads.end(),
                     [](const AnnealRead& a, const AnnealRead& b) { return a.energy < b.energy; });
    return out;
}

}  // namespace

SampleSet remote_solve(const std::string& endpoint, const IsingProblem& problem, int num_reads,
                       const AnnealSchedule& schedule, std::uint64_t seed, int timeout_seconds) {
    problem.validate();
    if (num_reads < 1) throw std::invalid_argument("remote_solve: num_reads must be >= 1");

    const json request = problem_to_wire(problem, num_reads, schedule, seed);
    const std::string body = request.dump();

    httplib::Client client(endpoint);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);

    httplib::Result result;
    for (int attempt = 0; attempt < 3; ++attempt) {
        result = client.Post("/v1/solve", body, "application/json");
        if (result) break;
    }
    if (!result)
        throw TransportError("no response from " + endpoint + " after 3 attempts: " +
                             httplib::to_string(result.error()));
    if (result->status != 200)
        throw ProtocolError("solver returned HTTP " + std::to_string(result->status) + ": " +
                            result->body);

    json parsed;
    try {
        parsed = json::parse(result->body);
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed solver response: ") + e.what());
    }
    return sample_from_wire(parsed, problem, num_reads, schedule, seed);
}

struct MockService::Impl {
    httplib::Server server;
    std::thread worker;
    std::uint64_t default_seed = 0;
    int max_qubits = 4096;
};

MockService::MockService(const std::string& host, int port, std::uint64_t default_seed,
                         int max_qubits)
    : impl_(std::make_unique<Impl>()), host_(host) {
    impl_->default_seed = default_seed;
    impl_->max_qubits = max_qubits;

    impl_->server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"ok", true}}.dump(), "application/json");
    });

    impl_->server.Post("/v1/solve", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const json body = json::parse(req.body);
            IsingProblem problem = problem_from_wire(body);
            if (problem.n_qubits > impl_->max_qubits) {
                res.status = 400;
                res.set_content(json{{"error", "problem exceeds qubit limit of " +
                                                   std::to_string(impl_->max_qubits)}}
                                    .dump(),
                                "application/json");
                return;
            }
            const int num_reads = body.value("num_reads", 0);
            if (num_reads < 1) {
                res.status = 400;
                res.set_content(json{{"error", "num_reads must be >= 1"}}.dump(),
                                "application/json");
                return;
            }
            AnnealSchedule schedule;
            if (body.contains("schedule")) {
                const json& s = body["schedule"];
                schedule.beta_min = s.value("beta_min", schedule.beta_min);
                schedule.beta_max = s.value("beta_max", schedule.beta_max);
                schedule.sweeps = s.value("sweeps", schedule.sweeps);
            }
            const std::uint64_t seed = body.value("seed", impl_->default_seed);
            const SampleSet sample = solve_sa(problem, num_reads, schedule, seed);
            res.set_content(sample_to_wire(sample).dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });

    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host.c_str());
        if (port_ < 0) throw TransportError("mock service failed to bind on " + host);
    } else {
        if (!impl_->server.bind_to_port(host.c_str(), port))
            throw TransportError("mock service failed to bind " + host + ":" +
                                 std::to_string(port));
        port_ = port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

MockService::~MockService() { stop(); }

std::string MockService::endpoint() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

void MockService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace valleyscope
