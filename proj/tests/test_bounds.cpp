#include <doctest.h>

#include <cmath>

#include "pim/bounds.hpp"
#include "pim/errors.hpp"

using namespace pim;

TEST_CASE("support size") {
    const SupportSize s1 = support_size(1);
    CHECK(s1.size == 3);
    CHECK(s1.symbols == std::vector<Symbol>{Symbol::of(0, 1), Symbol::of(1, 2),
                                            Symbol::of(1, 1)});

    const SupportSize s2 = support_size(2);
    CHECK(s2.size == 5);
    CHECK(s2.symbols[1] == Symbol::of(1, 3));

    CHECK(support_size(0).size == 2);

    // the closed form is an upper bound, tight only while no reduced
    // fraction repeats across denominators (1/2 = 2/4 appears at m_bar 3)
    for (int m_bar = 0; m_bar <= 20; ++m_bar) {
        const int enumerated = support_size(m_bar).size;
        CHECK(enumerated <= chi_bound(m_bar));
        if (m_bar <= 2) {
            CHECK(enumerated == chi_bound(m_bar));
        } else {
            CHECK(enumerated < chi_bound(m_bar));
        }
    }
}

TEST_CASE("pmax bound") {
    CHECK(pmax_bound(2.0, 1) == 2);   // floor(log2(3) + 1)
    CHECK(pmax_bound(1.0, 1) == 4);   // floor(2*log2(3) + 1)
    CHECK(pmax_bound(1e9, 1) == 1);   // vanishing term leaves floor(1 + eps)
    CHECK_THROWS_AS(pmax_bound(0.0, 1), Error);
}

TEST_CASE("xi size") {
    CHECK(xi_size(1, 2).value == 81);  // 3^4
    CHECK(xi_size(1, 0).value == 9);   // |chi|^2
    CHECK(xi_size(0, 1).value == 8);   // 2^3
    CHECK(!xi_size(1, 2).overflow);
    CHECK(xi_size(10, 40).overflow);   // 43^42 blows past 2^62
}

TEST_CASE("t_min") {
    CHECK(t_min(9, 2) == 4);
    CHECK(t_min(13, 2) == 5);  // floor(16/3)
    for (int64_t t = 1; t <= 40; ++t) CHECK(t_min(t, 1) == t / 2);
    for (int64_t t = 2; t <= 60; ++t) {
        CHECK(t_min(t, 1) <= t);
        CHECK(t_min(t, 3) <= t);
    }
}

TEST_CASE("mixing condition") {
    const MixingCondition section_v = mixing_condition(0.4, 0.4, 0.8);
    CHECK(section_v.value == doctest::Approx(1.28));
    CHECK(!section_v.satisfied);

    CHECK(mixing_condition(0.0, 0.0, 0.9).value == doctest::Approx(0.0));
    CHECK(mixing_condition(0.0, 0.0, 0.9).satisfied);

    const MixingCondition mild = mixing_condition(0.1, 0.1, 0.5);
    CHECK(mild.value == doctest::Approx(0.2));
    CHECK(mild.satisfied);
}

TEST_CASE("sample-size theorem") {
    BoundInputs base;
    base.m_bar = 1;
    base.node_count = 10;
    base.gamma = 0.1;
    base.epsilon = 0.2;
    base.epsilon_prime = 0.2;
    base.delta = 0.001;
    base.delta_prime = 0.001;
    base.c = 1.0;
    base.c1 = 0.01;
    base.alpha_exp = 0.5;
    base.beta1 = 0.75;
    base.reset_depth = 5;
    base.mu_bar = 0.1;
    base.lipschitz = 0.1;
    base.rho = 0.5;

    SUBCASE("frozen evaluation of both branches") {
        const SampleSizeResult r = required_sample_size(base);
        CHECK(r.applicable);
        CHECK(r.pmax == 16);
        CHECK(r.xi.value == 387420489ULL);
        CHECK(r.term_reset == doctest::Approx(8039.1627648858).epsilon(1e-9));
        CHECK(r.term_concentration == doctest::Approx(22.0).epsilon(1e-9));
        CHECK(r.t_required == 8040);
        CHECK(r.schedule_feasible);
    }

    SUBCASE("reference parameters sit outside the mixing regime") {
        BoundInputs v = base;
        v.mu_bar = 0.4;
        v.lipschitz = 0.4;
        v.rho = 0.8;
        const SampleSizeResult r = required_sample_size(v);
        CHECK(!r.applicable);
        CHECK(r.t_required == -1);
        CHECK(r.mixing.value == doctest::Approx(1.28));
        CHECK(r.term_reset == doctest::Approx(8039.1627648858).epsilon(1e-9));
    }

    SUBCASE("monotone in gamma, node count and depth") {
        const SampleSizeResult r0 = required_sample_size(base);
        BoundInputs easier = base;
        easier.gamma = 0.5;
        CHECK(required_sample_size(easier).t_required <= r0.t_required);
        BoundInputs bigger = base;
        bigger.node_count = 20;
        CHECK(required_sample_size(bigger).t_required > r0.t_required);
        BoundInputs deeper = base;
        deeper.reset_depth = 9;
        CHECK(required_sample_size(deeper).t_required >= r0.t_required);

        // property sweep over random-ish valid inputs
        for (int i = 0; i < 20; ++i) {
            BoundInputs a = base;
            a.gamma = 0.05 + 0.04 * i;
            if (a.gamma >= 1.0) break;
            BoundInputs b = a;
            b.gamma = a.gamma / 2.0;
            CHECK(required_sample_size(b).t_required >=
                  required_sample_size(a).t_required);
        }
    }

    SUBCASE("infeasible delta pairing is rejected by name") {
        BoundInputs bad = base;
        bad.delta = 0.2;  // 0.2*log2(|xi|/0.2) far exceeds epsilon/4
        try {
            required_sample_size(bad);
            FAIL("expected infeasible pairing");
        } catch (const Error &e) {
            CHECK(e.fault() == Fault::validation);
            CHECK(std::string(e.what()).find("delta") != std::string::npos);
        }
    }

    SUBCASE("self-consistency at the returned T") {
        const SampleSizeResult r = required_sample_size(base);
        REQUIRE(r.applicable);
        const double t = static_cast<double>(r.t_required);
        CHECK(r.c1_condition ==
              (base.beta1 * base.delta_prime -
                   4.0 * std::pow(t - 1.0, base.alpha_exp - 1.0) >
               base.c1));
        CHECK(r.schedule_p > 0.0);
        CHECK(r.schedule_p <= 1.0);
    }
}
