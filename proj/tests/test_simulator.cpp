#include <doctest.h>

#include <cmath>

#include "pim/errors.hpp"
#include "pim/io.hpp"
#include "pim/simulator.hpp"

using namespace pim;

namespace {

PimParams section_v_params(int steps, uint64_t seed) {
    PimParams p;
    p.reset_depth = 5;
    p.reset = ResetSchedule{0.5, 0.75};
    p.beta = 0.75;
    p.m_bar = 1;
    p.steps = steps;
    p.burn_in = 200;
    p.seed = seed;
    return p;
}

NodeParams section_v_node() { return NodeParams{0.8, 0.167, 0.4, 0.5}; }

}  // namespace

TEST_CASE("resolve_reset_probability") {
    CHECK(resolve_reset_probability(ResetSpec{0.9}, 100, 5) == doctest::Approx(0.9));

    // schedule at the reference configuration: 1 - sqrt(2999)/(0.75*2994)
    const double p = resolve_reset_probability(ResetSpec{ResetSchedule{0.5, 0.75}}, 3000, 5);
    CHECK(p == doctest::Approx(1.0 - std::sqrt(2999.0) / (0.75 * 2994.0)).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.97561).epsilon(1e-4));

    // (T-1)^0.5/(0.75*1) = 3.27 > 1 leaves nothing for p
    CHECK_THROWS_AS(resolve_reset_probability(ResetSpec{ResetSchedule{0.5, 0.75}}, 7, 5),
                    Error);
    CHECK_THROWS_AS(resolve_reset_probability(ResetSpec{0.0}, 100, 5), Error);
    CHECK_THROWS_AS(resolve_reset_probability(ResetSpec{1.5}, 100, 5), Error);
    try {
        resolve_reset_probability(ResetSpec{ResetSchedule{0.5, 0.75}}, 7, 5);
        FAIL("expected infeasible schedule");
    } catch (const Error &e) {
        CHECK(e.fault() == Fault::infeasible_schedule);
    }
}

TEST_CASE("sample_m") {
    Rng rng(1);
    SUBCASE("cap zero forces one sample") {
        for (int i = 0; i < 100; ++i) CHECK(sample_m(0.7, 0.4, 0, rng) == 1);
    }
    SUBCASE("zero slope forces one sample") {
        for (int i = 0; i < 100; ++i) CHECK(sample_m(1.0, 0.0, 3, rng) == 1);
    }
    SUBCASE("Poisson tail at x=1, slope 0.4, cap 1") {
        // P(M = 2) = P(Poisson(0.4) >= 1) = 1 - exp(-0.4)
        const int draws = 1000000;
        int twos = 0;
        for (int i = 0; i < draws; ++i) {
            const int m = sample_m(1.0, 0.4, 1, rng);
            CHECK(m >= 1);
            CHECK(m <= 2);
            twos += m == 2 ? 1 : 0;
        }
        const double freq = static_cast<double>(twos) / draws;
        CHECK(std::abs(freq - (1.0 - std::exp(-0.4))) < 0.002);
    }
}

TEST_CASE("simulate: closed nodes settle to the intrinsic point") {
    // alpha -> 0 is outside the open range, so use the smallest usable value
    // with a degenerate fluctuation: X converges to (1-beta)z + beta*l.
    NodeParams np;
    np.alpha = 1e-12;
    np.bias = 0.3;
    np.zbar = 0.5;
    InfluenceGraph g(3, np);
    for (int v = 0; v < 3; ++v) g.set_self_weight(v, 1.0);

    PimParams params;
    params.reset_depth = 1;
    params.reset = 1.0;
    params.beta = 0.75;
    params.m_bar = 0;
    params.steps = 50;
    params.burn_in = 5;
    params.seed = 3;
    params.z_law = FluctuationLaw::degenerate;

    const Trajectory traj = simulate(g, params);
    const double fixed_point = (1.0 - params.beta) * np.zbar + params.beta * np.bias;
    for (int t = 1; t < traj.steps; ++t) {
        for (int v = 0; v < 3; ++v) {
            CHECK(traj.latent_at(t, v) == doctest::Approx(fixed_point).epsilon(1e-9));
        }
    }
}

TEST_CASE("simulate: p=1 disables resets entirely") {
    PimParams params = section_v_params(500, 11);
    params.reset = 1.0;
    const Trajectory traj = simulate(make_ring(6, section_v_node()), params);
    for (int t = 0; t < traj.steps; ++t) {
        CHECK(traj.coin[t] == 1);
        CHECK(traj.effective_index[t] == t);
    }
}

TEST_CASE("simulate: reference configuration invariants over T=3000") {
    const Trajectory traj = simulate(make_ring(10, section_v_node()),
                                     section_v_params(3000, 17));
    CHECK(traj.steps == 3000);
    CHECK(traj.reset_probability == doctest::Approx(0.97561).epsilon(1e-4));
    for (int t = 0; t < traj.steps; ++t) {
        if (t < traj.reset_depth + 1) CHECK(traj.coin[t] == 1);
        for (int v = 0; v < traj.node_count; ++v) {
            const int m = traj.sample_count(t, v);
            const int n = traj.success_count(t, v);
            CHECK(m >= 1);
            CHECK(m <= traj.m_bar + 1);
            CHECK(n >= 0);
            CHECK(n <= m);
            CHECK(traj.latent_at(t, v) >= 0.0);
            CHECK(traj.latent_at(t, v) <= 1.0);
        }
    }
}

TEST_CASE("simulate: effective-index replay matches the stored sequence") {
    PimParams params = section_v_params(2000, 23);
    params.reset = 0.9;  // plenty of resets
    const Trajectory traj = simulate(make_ring(5, section_v_node()), params);
    std::vector<int32_t> replay(traj.steps, 0);
    int resets = 0;
    for (int t = 0; t + 1 < traj.steps; ++t) {
        if (traj.coin[t] == 1) {
            replay[t + 1] = replay[t] + 1;
        } else {
            replay[t + 1] = replay[t - traj.reset_depth] + 1;
            ++resets;
        }
    }
    CHECK(resets > 0);
    CHECK(replay == traj.effective_index);
}

TEST_CASE("simulate: reset frequency concentrates around 1-p") {
    PimParams params = section_v_params(100000, 29);
    params.reset = 0.9;
    params.burn_in = 0;
    const int d = params.reset_depth;
    const Trajectory traj = simulate(make_ring(4, section_v_node()), params);
    int tails = 0;
    for (int t = 0; t < traj.steps; ++t) tails += traj.coin[t] == 0 ? 1 : 0;
    const double eligible = static_cast<double>(traj.steps - d - 1);
    const double rate = tails / eligible;
    const double sigma = std::sqrt(0.9 * 0.1 / eligible);
    CHECK(std::abs(rate - 0.1) < 3.0 * sigma);
}

TEST_CASE("simulate: deterministic byte-for-byte") {
    const PimParams params = section_v_params(400, 31);
    const InfluenceGraph g = make_line(7, section_v_node());
    const Trajectory a = simulate(g, params);
    const Trajectory b = simulate(g, params);
    CHECK(trajectory_to_jsonl(a) == trajectory_to_jsonl(b));
    CHECK(hidden_to_jsonl(a) == hidden_to_jsonl(b));

    // the coin substream must not move when m_bar changes
    PimParams bigger = params;
    bigger.m_bar = 3;
    const Trajectory c = simulate(g, bigger);
    CHECK(c.coin == a.coin);
}

TEST_CASE("stationary_mean_estimate") {
    SUBCASE("constant and alternating sequences") {
        Trajectory traj;
        traj.node_count = 1;
        traj.steps = 4;
        traj.m_bar = 1;
        traj.sample_counts = {2, 2, 2, 2};
        traj.success_counts = {1, 1, 1, 1};
        CHECK(stationary_mean_estimate(traj, 0) == doctest::Approx(0.5));
        traj.sample_counts = {1, 1, 1, 1};
        traj.success_counts = {0, 1, 0, 1};
        CHECK(stationary_mean_estimate(traj, 0) == doctest::Approx(0.5));
    }

    SUBCASE("degenerate dynamics hit the closed-form mean") {
        NodeParams np;
        np.alpha = 1e-12;
        np.bias = 0.3;
        np.zbar = 0.5;
        InfluenceGraph g(2, np);
        for (int v = 0; v < 2; ++v) g.set_self_weight(v, 1.0);
        PimParams params;
        params.reset_depth = 1;
        params.reset = 1.0;
        params.beta = 0.75;
        params.m_bar = 0;
        params.steps = 20000;
        params.burn_in = 10;
        params.seed = 5;
        params.z_law = FluctuationLaw::degenerate;
        const Trajectory traj = simulate(g, params);
        const double mean = (1.0 - params.beta) * np.zbar + params.beta * np.bias;
        const double sigma = std::sqrt(mean * (1.0 - mean) / params.steps);
        CHECK(std::abs(stationary_mean_estimate(traj, 0) - mean) < 3.0 * sigma);
    }
}
