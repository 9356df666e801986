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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "valleyscope/remote.hpp"

// httplib last: it drags in <resolv.h>, whose _res macro mangles Eigen
#include <httplib.h>

#include <thread>

using namespace valleyscope;

namespace {

std::pair<IsingProblem, Embedding> small_problem() {
    const RbmParams p = oracle::random_params(2, 2, 0.5, 2024);
    return embed_rbm(p, ChimeraGraph::build(1, 1, 2), 1.0);
}

}  // namespace

TEST_CASE("mock service: health endpoint") {
    MockService mock("127.0.0.1", 0, 1);
    httplib::Client client(mock.endpoint());
    const auto res = client.Get("/v1/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body.find("\"ok\"") != std::string::npos);
}

TEST_CASE("remote_solve: equals the local annealer for matching seeds") {
    const auto [problem, emb] = small_problem();
    MockService mock("127.0.0.1", 0, 1);
    AnnealSchedule schedule;
    schedule.sweeps = 200;
    const std::uint64_t seed = 424242;

    const SampleSet local = solve_sa(problem, 64, schedule, seed);
    const SampleSet remote = remote_solve(mock.endpoint(), problem, 64, schedule, seed);

    REQUIRE(remote.reads.size() == local.reads.size());
    for (std::size_t i = 0; i < local.reads.size(); ++i) {
        CHECK(remote.reads[i].spins == local.reads[i].spins);
        CHECK(remote.reads[i].energy == local.reads[i].energy);
        CHECK(remote.reads[i].multiplicity == local.reads[i].multiplicity);
    }
    CHECK(remote.num_reads == local.num_reads);
}

TEST_CASE("remote_solve: identical requests give identical answers") {
    const auto [problem, emb] = small_problem();
    MockService mock("127.0.0.1", 0, 1);
    const SampleSet a = remote_solve(mock.endpoint(), problem, 16, AnnealSchedule{}, 7);
    const SampleSet b = remote_solve(mock.endpoint(), problem, 16, AnnealSchedule{}, 7);
    REQUIRE(a.reads.size() == b.reads.size());
    for (std::size_t i = 0; i < a.reads.size(); ++i) {
        CHECK(a.reads[i].spins == b.reads[i].spins);
        CHECK(a.reads[i].energy == b.reads[i].energy);
    }
}

TEST_CASE("remote_solve: zero reads rejected client-side") {
    const auto [problem, emb] = small_problem();
    CHECK_THROWS_AS(remote_solve("http://127.0.0.1:1", problem, 0, AnnealSchedule{}, 1),
                    std::invalid_argument);
}

TEST_CASE("remote_solve: transport error when nothing is listening") {
    const auto [problem, emb] = small_problem();
    CHECK_THROWS_AS(remote_solve("http://127.0.0.1:1", problem, 4, AnnealSchedule{}, 1, 1),
                    TransportError);
}

TEST_CASE("remote_solve: malformed response raises a protocol error") {
    httplib::Server garbage;
    garbage.Post("/v1/solve", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"reads\": \"not-an-array\"}", "application/json");
    });
    const int port = garbage.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { garbage.listen_after_bind(); });
    garbage.wait_until_ready();

    const auto [problem, emb] = small_problem();
    CHECK_THROWS_AS(
        remote_solve("http://127.0.0.1:" + std::to_string(port), problem, 4, AnnealSchedule{}, 1),
        ProtocolError);

    garbage.stop();
    worker.join();
}

TEST_CASE("mock service: enforces its qubit-count limit") {
    MockService mock("127.0.0.1", 0, 1, /*max_qubits=*/4);
    const RbmParams p = oracle::random_params(4, 4, 0.4, 11);
    const auto [problem, emb] = embed_rbm(p, ChimeraGraph::build(1, 1, 4), 1.0);  // 8 qubits
    CHECK_THROWS_AS(remote_solve(mock.endpoint(), problem, 4, AnnealSchedule{}, 1),
                    ProtocolError);
}

TEST_CASE("mock service: rejects bad num_reads server-side") {
    const auto [problem, emb] = small_problem();
    MockService mock("127.0.0.1", 0, 1);
    httplib::Client client(mock.endpoint());
    const auto res = client.Post("/v1/solve", "{\"h\":{\"0\":0.1},\"J\":{},\"num_reads\":0}",
                                 "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
}
