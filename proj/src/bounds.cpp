#include "pim/bounds.hpp"

#include <cmath>
#include <string>

#include "pim/errors.hpp"
#include "pim/simulator.hpp"

namespace pim {

int64_t chi_bound(int m_bar) {
    if (m_bar < 0) throw Error(Fault::validation, "m_bar must be nonnegative");
    return static_cast<int64_t>(m_bar) * (m_bar + 1) / 2 + 2;
}

SupportSize support_size(int m_bar) {
    SupportSize out;
    out.symbols = enumerate_support(m_bar);
    out.size = static_cast<int>(out.symbols.size());
    return out;
}

int pmax_bound(double epsilon_prime, int m_bar) {
    if (!(epsilon_prime > 0.0)) {
        throw Error(Fault::validation, "epsilon_prime must be positive");
    }
    const double raw = 2.0 * std::log2(static_cast<double>(chi_bound(m_bar))) /
                           epsilon_prime + 1.0;
    return static_cast<int>(std::floor(raw));
}

XiSize xi_size(int m_bar, int pmax) {
    if (pmax < 0) throw Error(Fault::validation, "pmax must be nonnegative");
    const uint64_t chi = static_cast<uint64_t>(support_size(m_bar).size);
    XiSize out;
    out.value = 1;
    for (int i = 0; i < 2 + pmax; ++i) {
        if (out.value > (uint64_t{1} << 62) / chi) {
            out.overflow = true;
            out.value = 0;
            return out;
        }
        out.value *= chi;
    }
    return out;
}

int64_t t_min(int64_t steps, int reset_depth) {
    if (steps < 1) throw Error(Fault::validation, "T must be positive");
    if (reset_depth < 1) throw Error(Fault::validation, "d must be >= 1");
    const int64_t d = reset_depth;
    return (steps + d * d - 1) / (d + 1);  // floor; counts are integral
}

MixingCondition mixing_condition(double mu_bar, double lipschitz, double rho) {
    if (mu_bar < 0.0 || lipschitz < 0.0 || rho < 0.0) {
        throw Error(Fault::validation, "mixing inputs must be nonnegative");
    }
    MixingCondition out;
    out.value = 2.0 * (mu_bar + lipschitz) * rho;
    out.satisfied = out.value < 1.0;
    return out;
}

SampleSizeResult required_sample_size(const BoundInputs &in) {
    if (!(in.gamma > 0.0 && in.gamma < 1.0)) {
        throw Error(Fault::validation, "gamma must be in (0,1)");
    }
    if (in.node_count < 2) throw Error(Fault::validation, "|V| must be at least 2");
    if (!(in.c > 0.0) || !(in.c1 > 0.0)) {
        throw Error(Fault::validation, "slack constants c and c1 must be positive");
    }
    if (!(in.delta > 0.0) || !(in.delta_prime > 0.0)) {
        throw Error(Fault::validation, "delta and delta_prime must be positive");
    }
    if (in.reset_depth < 1) throw Error(Fault::validation, "d must be >= 1");

    SampleSizeResult out;
    out.support = support_size(in.m_bar).size;
    out.pmax = pmax_bound(in.epsilon_prime, in.m_bar);
    out.xi = xi_size(in.m_bar, out.pmax);
    if (out.xi.overflow) {
        throw Error(Fault::validation, "joint support size |xi| overflows; bound unusable");
    }
    const double xi = static_cast<double>(out.xi.value);

    // feasibility of the L1 -> entropy pairing, checked not assumed
    const double lhs_delta = in.delta * std::log2(xi / in.delta);
    if (!(lhs_delta <= in.epsilon / 4.0)) {
        throw Error(Fault::validation,
                    "infeasible pairing: delta*log2(|xi|/delta) = " +
                        std::to_string(lhs_delta) + " > epsilon/4 = " +
                        std::to_string(in.epsilon / 4.0));
    }
    const double lhs_delta_prime = in.delta_prime * std::log2(xi / in.delta_prime);
    if (!(lhs_delta_prime <= in.epsilon_prime / 4.0)) {
        throw Error(Fault::validation,
                    "infeasible pairing: delta'*log2(|xi|/delta') = " +
                        std::to_string(lhs_delta_prime) + " > epsilon'/4 = " +
                        std::to_string(in.epsilon_prime / 4.0));
    }
    out.delta_feasible = true;
    out.delta_prime_feasible = true;

    out.mixing = mixing_condition(in.mu_bar, in.lipschitz, in.rho);

    // shared log factor, base 2 like every other log in this module
    const double log_arg =
        (in.c + 2.0 * std::pow(static_cast<double>(in.node_count), out.pmax + 1) * xi) /
        in.gamma;
    const double lg = std::log2(log_arg);

    out.term_reset = lg * 12.0 * in.delta_prime * in.beta1 / (in.c1 * in.c1);

    // the (d+1)^(-1) factor belongs inside the denominator, so the whole
    // fraction picks up a factor of (d+1)
    const double d = static_cast<double>(in.reset_depth);
    const double mix = out.mixing.value;
    out.term_concentration =
        (d * d - d + 2.0) +
        ((1.0 - mix) * in.delta * in.delta) / (2.0 * (1.0 + mix) * xi * xi / (d + 1.0)) * lg;

    if (!out.mixing.satisfied) {
        out.applicable = false;
        out.t_required = -1;
        return out;
    }
    out.applicable = true;
    out.t_required =
        static_cast<int64_t>(std::ceil(std::max(out.term_reset, out.term_concentration)));

    // self-consistency closure at the returned T
    const double t = static_cast<double>(out.t_required);
    out.c1_condition =
        in.beta1 * in.delta_prime - 4.0 * std::pow(t - 1.0, in.alpha_exp - 1.0) > in.c1;
    try {
        out.schedule_p = resolve_reset_probability(
            ResetSchedule{in.alpha_exp, in.beta1}, static_cast<int>(out.t_required),
            in.reset_depth);
        out.schedule_feasible = true;
    } catch (const Error &) {
        out.schedule_feasible = false;
        out.schedule_p = 0.0;
    }
    return out;
}

}  // namespace pim
