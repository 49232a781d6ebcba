#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "qfabric/embedding.hpp"
#include "qfabric/topology.hpp"

using namespace qfabric::embedding;
using qfabric::topology::CouplerKind;
using qfabric::topology::QubitCoordinate;
using qfabric::topology::build_topology;
using qfabric::topology::find_triangles;

namespace {

bool has_violation(const ValidationReport& report, ViolationKind kind) {
    return std::any_of(report.violations.begin(), report.violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("problem parsing") {
    const auto p = IsingProblem::from_json(R"({"h": [0.1, -0.2, 0.0], "J": [[1, 0, -1.0], [1, 2, 0.5]]})");
    CHECK(p.num_variables() == 3);
    CHECK(p.h[1] == doctest::Approx(-0.2));
    // Keys are normalized to i < j.
    CHECK(p.j.at({0, 1}) == doctest::Approx(-1.0));
    CHECK(p.j.at({1, 2}) == doctest::Approx(0.5));

    CHECK_THROWS_AS(IsingProblem::from_json("[]"), std::invalid_argument);
    CHECK_THROWS_AS(IsingProblem::from_json(R"({"h": []})"), std::invalid_argument);
    CHECK_THROWS_AS(IsingProblem::from_json(R"({"h": [0], "J": [[0, 0, 1.0]]})"),
                    std::invalid_argument);  // diagonal
    CHECK_THROWS_AS(IsingProblem::from_json(R"({"h": [0, 0], "J": [[0, 1, 1.0], [1, 0, 2.0]]})"),
                    std::invalid_argument);  // duplicate after normalization
    CHECK_THROWS_AS(IsingProblem::from_json(R"({"h": [0, 0], "J": [[0, 5, 1.0]]})"),
                    std::invalid_argument);  // out of range
    CHECK_THROWS_AS(IsingProblem::from_json(R"({"h": [0], "J": [[0, 1]]})"),
                    std::invalid_argument);  // malformed triple

    const auto round = IsingProblem::from_json(p.to_json().dump());
    CHECK(round.h == p.h);
    CHECK(round.j == p.j);
}

TEST_CASE("embedding parsing") {
    const auto e = Embedding::from_json(R"({"0": [[0,0,0,0], [0,0,0,0]], "2": []})");
    CHECK(e.chains.size() == 2);
    CHECK(e.chains.at(0).size() == 1);  // duplicates collapse
    CHECK(e.chains.at(2).empty());

    CHECK_THROWS_AS(Embedding::from_json("[]"), std::invalid_argument);
    CHECK_THROWS_AS(Embedding::from_json(R"({"x": []})"), std::invalid_argument);
    CHECK_THROWS_AS(Embedding::from_json(R"({"-1": []})"), std::invalid_argument);
    CHECK_THROWS_AS(Embedding::from_json(R"({"0": [[1, 2]]})"), std::invalid_argument);

    const auto round = Embedding::from_json(e.to_json().dump());
    CHECK(round.chains == e.chains);
}

TEST_CASE("a triangle of singleton chains validates") {
    const auto g = build_topology(2);
    const auto tri = find_triangles(g, 1).at(0);

    IsingProblem p;
    p.h = {0.0, 0.0, 0.0};
    p.j[{0, 1}] = -1.0;
    p.j[{0, 2}] = -1.0;
    p.j[{1, 2}] = -1.0;

    Embedding e;
    e.chains[0] = {tri[0]};
    e.chains[1] = {tri[1]};
    e.chains[2] = {tri[2]};

    const auto report = validate_embedding(g, p, e);
    INFO(report.to_json().dump());
    CHECK(report.valid());

    const auto stats = chain_statistics(e);
    CHECK(stats.max_length == 1);
    CHECK(stats.mean_length == doctest::Approx(1.0));
    CHECK(stats.length_histogram == std::map<std::size_t, std::size_t>{{1, 3}});
}

TEST_CASE("each defect kind is reported") {
    const auto g = build_topology(3);
    IsingProblem p;
    p.h = {0.0, 0.0};
    p.j[{0, 1}] = 1.0;

    SUBCASE("missing and empty chains") {
        Embedding e;
        e.chains[1] = {};
        const auto report = validate_embedding(g, p, e);
        CHECK(has_violation(report, ViolationKind::missing_chain));
        CHECK(has_violation(report, ViolationKind::empty_chain));
        CHECK_FALSE(report.valid());
    }

    SUBCASE("unknown variable and unknown vertex") {
        Embedding e;
        e.chains[0] = {{0, 0, 0, 0}};
        e.chains[1] = {{1, 0, 0, 0}};
        e.chains[7] = {{0, 9, 0, 0}};
        const auto report = validate_embedding(g, p, e);
        CHECK(has_violation(report, ViolationKind::unknown_variable));
        CHECK(has_violation(report, ViolationKind::unknown_vertex));
    }

    SUBCASE("overlapping chains") {
        Embedding e;
        e.chains[0] = {{0, 0, 0, 0}};
        e.chains[1] = {{0, 0, 0, 0}};
        const auto report = validate_embedding(g, p, e);
        CHECK(has_violation(report, ViolationKind::overlapping_chains));
    }

    SUBCASE("disconnected chain") {
        Embedding e;
        // Two far-apart vertical qubits share no coupler.
        e.chains[0] = {{0, 0, 0, 0}, {0, 2, 5, 1}};
        e.chains[1] = {{1, 0, 0, 0}};
        const auto report = validate_embedding(g, p, e);
        CHECK(has_violation(report, ViolationKind::disconnected_chain));
    }

    SUBCASE("missing coupler") {
        Embedding e;
        e.chains[0] = {{0, 0, 0, 0}};
        e.chains[1] = {{0, 2, 11, 1}};
        const auto report = validate_embedding(g, p, e);
        CHECK(has_violation(report, ViolationKind::missing_coupler));
    }

    SUBCASE("zero couplings need no coupler") {
        p.j[{0, 1}] = 0.0;
        Embedding e;
        e.chains[0] = {{0, 0, 0, 0}};
        e.chains[1] = {{0, 2, 11, 1}};
        const auto report = validate_embedding(g, p, e);
        CHECK_FALSE(has_violation(report, ViolationKind::missing_coupler));
        CHECK(report.valid());
    }
}

TEST_CASE("chains along external couplers are connected") {
    const auto g = build_topology(3);
    IsingProblem p;
    p.h = {0.0};

    Embedding e;
    e.chains[0] = {{0, 0, 0, 0}, {0, 0, 0, 1}};  // adjacent along the body
    CHECK(validate_embedding(g, p, e).valid());

    e.chains[0] = {{0, 0, 0, 0}, {0, 0, 1, 1}};  // different tracks, no coupler
    CHECK(has_violation(validate_embedding(g, p, e), ViolationKind::disconnected_chain));
}

TEST_CASE("randomized tree chains validate and corruptions are caught") {
    const auto g = build_topology(3);
    const auto adj = qfabric::topology::adjacency(g);
    std::mt19937_64 rng(0x5eedULL);

    for (int trial = 0; trial < 10; ++trial) {
        CAPTURE(trial);
        // Grow disjoint random connected chains greedily.
        std::set<std::size_t> used;
        std::vector<std::vector<std::size_t>> chains;
        for (int v = 0; v < 4; ++v) {
            std::vector<std::size_t> chain;
            for (int attempt = 0; attempt < 50 && chain.empty(); ++attempt) {
                const auto root = rng() % g.vertices.size();
                if (!used.count(root)) chain.push_back(root);
            }
            REQUIRE(!chain.empty());
            used.insert(chain[0]);
            const auto target = 1 + rng() % 5;
            while (chain.size() < target) {
                const auto& from = chain[rng() % chain.size()];
                std::vector<std::size_t> options;
                for (auto next : adj[from])
                    if (!used.count(next)) options.push_back(next);
                if (options.empty()) break;
                const auto pick = options[rng() % options.size()];
                used.insert(pick);
                chain.push_back(pick);
            }
            chains.push_back(std::move(chain));
        }

        IsingProblem p;
        p.h.assign(4, 0.0);
        Embedding e;
        for (int v = 0; v < 4; ++v)
            for (auto idx : chains[static_cast<std::size_t>(v)])
                e.chains[v].push_back(g.vertices[idx]);
        for (auto& [variable, chain] : e.chains) {
            (void)variable;
            std::sort(chain.begin(), chain.end());
        }

        const auto report = validate_embedding(g, p, e);
        INFO(report.to_json().dump());
        CHECK(report.valid());

        // Fuse chain 1 into chain 0: every shared qubit is an overlap.
        auto overlapping = e;
        overlapping.chains[0].insert(overlapping.chains[0].end(), e.chains[1].begin(),
                                     e.chains[1].end());
        std::sort(overlapping.chains[0].begin(), overlapping.chains[0].end());
        CHECK(has_violation(validate_embedding(g, p, overlapping),
                            ViolationKind::overlapping_chains));
    }
}

TEST_CASE("chain statistics") {
    CHECK(chain_statistics(Embedding{}).max_length == 0);
    CHECK(chain_statistics(Embedding{}).mean_length == doctest::Approx(0.0));

    Embedding e;
    e.chains[0] = {{0, 0, 0, 0}};
    e.chains[1] = {{0, 0, 1, 0}, {0, 0, 2, 0}, {0, 0, 3, 0}};
    e.chains[2] = {{1, 0, 0, 0}};
    const auto stats = chain_statistics(e);
    CHECK(stats.max_length == 3);
    CHECK(stats.mean_length == doctest::Approx(5.0 / 3.0));
    CHECK(stats.length_histogram == std::map<std::size_t, std::size_t>{{1, 2}, {3, 1}});
}

TEST_CASE("logical energy scale divides by chain length") {
    CHECK(logical_energy_scale(1, 2.5) == doctest::Approx(2.5));
    CHECK(logical_energy_scale(4, 2.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(logical_energy_scale(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(logical_energy_scale(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(logical_energy_scale(2, -1.0), std::invalid_argument);
}

TEST_CASE("report document shape") {
    const auto g = build_topology(2);
    const auto tri = find_triangles(g, 1).at(0);
    IsingProblem p;
    p.h = {0.0, 0.0};
    p.j[{0, 1}] = -0.5;
    Embedding e;
    e.chains[0] = {tri[0]};
    e.chains[1] = {tri[1]};

    const auto doc = embedding_report(g, p, e, 2.0);
    CHECK(doc["valid"] == true);
    CHECK(doc["violations"].empty());
    CHECK(doc["chain_stats"]["max_length"] == 1);
    CHECK(doc["scales"].size() == 2);
    CHECK(doc["scales"][0]["scale"].get<double>() == doctest::Approx(2.0));

    // A chain spanning the whole triangle halves... thirds the scale.
    e.chains[0] = {tri[0], tri[1], tri[2]};
    e.chains[1] = {};
    const auto doc2 = embedding_report(g, p, e, 2.0);
    CHECK(doc2["valid"] == false);
    CHECK(doc2["scales"].size() == 1);
    CHECK(doc2["scales"][0]["chain_length"] == 3);
    CHECK(doc2["scales"][0]["scale"].get<double>() == doctest::Approx(2.0 / 3.0));
}
