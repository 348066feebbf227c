#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>

#include "pim/errors.hpp"
#include "pim/graph.hpp"
#include "pim/io.hpp"
#include "pim/rng.hpp"

using namespace pim;

namespace {

// independent route: dense eigensolver on the same matrix
double eigen_spectral_radius(const InfluenceMatrix &m) {
    Eigen::MatrixXd a(m.n, m.n);
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) a(i, j) = m.at(i, j);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    double radius = 0.0;
    for (int i = 0; i < m.n; ++i) radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
    return radius;
}

InfluenceGraph random_valid_graph(int n, int in_degree, uint64_t seed) {
    return make_random(n, in_degree, seed, NodeParams{});
}

}  // namespace

TEST_CASE("ring construction") {
    const InfluenceGraph g = make_ring(4, NodeParams{});
    CHECK(g.node_count() == 4);
    const auto edges = g.edges();
    CHECK(edges == std::vector<std::pair<int, int>>{{3, 0}, {0, 1}, {1, 2}, {2, 3}});
    for (int v = 0; v < 4; ++v) {
        REQUIRE(g.in_edges(v).size() == 1);
        CHECK(g.in_edges(v)[0].weight == 1.0);
        CHECK(g.self_weight(v) == 0.0);
    }

    const InfluenceGraph two = make_ring(2, NodeParams{});
    CHECK(two.has_edge(0, 1));
    CHECK(two.has_edge(1, 0));

    CHECK(make_ring(10, NodeParams{}).validate().empty());
    CHECK_THROWS_AS(make_ring(1, NodeParams{}), Error);
}

TEST_CASE("line construction") {
    const InfluenceGraph g = make_line(3, NodeParams{});
    CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(g.self_weight(0) == 1.0);
    CHECK(g.self_weight(1) == 0.0);
    CHECK(g.validate().empty());

    CHECK(make_line(2, NodeParams{}).edges() ==
          std::vector<std::pair<int, int>>{{0, 1}});
    const InfluenceGraph ten = make_line(10, NodeParams{});
    CHECK(ten.edge_count() == 9);
    for (const auto &[u, v] : ten.edges()) {
        CHECK(ten.in_edges(v)[0].weight == 1.0);
        CHECK(u + 1 == v);
    }
    CHECK_THROWS_AS(make_line(1, NodeParams{}), Error);
}

TEST_CASE("random generator") {
    CHECK_THROWS_AS(make_random(5, 5, 1, NodeParams{}), Error);
    CHECK_THROWS_AS(make_random(6, 0, 1, NodeParams{}), Error);

    const InfluenceGraph a = make_random(4, 1, 7, NodeParams{});
    const InfluenceGraph b = make_random(4, 1, 7, NodeParams{});
    CHECK(graph_to_json(a) == graph_to_json(b));  // determinism, byte-for-byte

    const InfluenceGraph g = make_random(6, 2, 3, NodeParams{});
    CHECK(g.validate().empty());
    for (int v = 0; v < 6; ++v) {
        CHECK(g.in_edges(v).size() == 2);  // every column sums to the in-degree
        for (const auto &e : g.in_edges(v)) CHECK(e.from != v);
    }
}

TEST_CASE("validate reports violations as data") {
    CHECK(make_ring(4, NodeParams{}).validate().empty());

    InfluenceGraph g(4, NodeParams{});
    for (int v = 0; v < 4; ++v) g.add_edge(v, (v + 1) % 4, v == 0 ? 0.5 : 1.0);
    const auto violations = g.validate();
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("node 1") != std::string::npos);

    InfluenceGraph bad = make_ring(4, NodeParams{});
    bad.params(2).alpha = 1.2;
    const auto range = bad.validate();
    REQUIRE(range.size() == 1);
    CHECK(range[0].find("alpha") != std::string::npos);
    CHECK(range[0].find("node 2") != std::string::npos);
}

TEST_CASE("influence matrix") {
    NodeParams p;
    p.alpha = 0.8;

    SUBCASE("ring(3) is a scaled cycle") {
        const InfluenceMatrix m = influence_matrix(make_ring(3, p));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double expected = (j == (i + 1) % 3) ? 0.8 : 0.0;
                CHECK(m.at(i, j) == doctest::Approx(expected));
            }
        }
    }

    SUBCASE("pure self-weights give a scaled identity") {
        NodeParams q;
        q.alpha = 0.5;
        InfluenceGraph g(3, q);
        for (int v = 0; v < 3; ++v) g.set_self_weight(v, 1.0);
        const InfluenceMatrix m = influence_matrix(g);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(m.at(i, j) == doctest::Approx(i == j ? 0.5 : 0.0));
            }
        }
    }

    SUBCASE("line(2): source self-weight shows on the diagonal") {
        const InfluenceMatrix m = influence_matrix(make_line(2, p));
        CHECK(m.at(0, 1) == doctest::Approx(0.8));
        CHECK(m.at(0, 0) == doctest::Approx(0.8));  // node 0 carries self-weight 1
        CHECK(m.at(1, 1) == doctest::Approx(0.0));
        CHECK(m.at(1, 0) == doctest::Approx(0.0));
    }

    SUBCASE("invalid graph is rejected") {
        InfluenceGraph g(2, p);  // weights don't sum to 1
        CHECK_THROWS_AS(influence_matrix(g), Error);
    }
}

TEST_CASE("spectral radius") {
    SUBCASE("diagonal") {
        InfluenceMatrix m;
        m.n = 3;
        m.entries = {0.5, 0, 0, 0, 0.5, 0, 0, 0, 0.5};
        CHECK(spectral_radius(m) == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("zero matrix") {
        InfluenceMatrix m;
        m.n = 3;
        m.entries.assign(9, 0.0);
        CHECK(spectral_radius(m) == doctest::Approx(0.0));
    }

    SUBCASE("ring(10) against the dense eigensolver") {
        NodeParams p;
        p.alpha = 0.8;
        const InfluenceMatrix m = influence_matrix(make_ring(10, p));
        const double rho = spectral_radius(m);
        CHECK(rho == doctest::Approx(0.8).epsilon(1e-8));
        CHECK(rho == doctest::Approx(eigen_spectral_radius(m)).epsilon(1e-8));
    }

    SUBCASE("random graphs against the dense eigensolver") {
        for (uint64_t seed = 0; seed < 8; ++seed) {
            const InfluenceMatrix m = influence_matrix(
                random_valid_graph(7, 2 + static_cast<int>(seed % 3), seed));
            CHECK(spectral_radius(m) ==
                  doctest::Approx(eigen_spectral_radius(m)).epsilon(1e-8));
        }
    }

    SUBCASE("permutation invariance") {
        const InfluenceGraph g = random_valid_graph(8, 3, 11);
        const InfluenceMatrix m = influence_matrix(g);
        std::vector<int> perm{3, 1, 4, 0, 6, 7, 2, 5};
        InfluenceMatrix pm;
        pm.n = m.n;
        pm.entries.assign(m.entries.size(), 0.0);
        for (int i = 0; i < m.n; ++i) {
            for (int j = 0; j < m.n; ++j) pm.at(perm[i], perm[j]) = m.at(i, j);
        }
        CHECK(spectral_radius(pm) == doctest::Approx(spectral_radius(m)).epsilon(1e-8));
    }

    SUBCASE("homogeneity") {
        const InfluenceMatrix m = influence_matrix(random_valid_graph(6, 2, 5));
        for (double c : {0.0, 0.3, 2.0, 7.5}) {
            InfluenceMatrix cm = m;
            for (double &e : cm.entries) e *= c;
            CHECK(spectral_radius(cm) ==
                  doctest::Approx(c * spectral_radius(m)).epsilon(1e-8));
        }
    }
}

TEST_CASE("graph JSON round-trip is value-identical") {
    const InfluenceGraph g = make_random(6, 2, 9, NodeParams{0.7, 0.2, 0.3, 0.4});
    const std::string once = graph_to_json(g);
    const std::string twice = graph_to_json(graph_from_json(once));
    CHECK(once == twice);
}
