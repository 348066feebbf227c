#pragma once

#include <cstdint>
#include <vector>

#include "pim/symbolic.hpp"

namespace pim {

// Inputs of the sample-size guarantee. All entropy quantities are in bits
// and every logarithm in this module is base 2, matching the entropy module.
struct BoundInputs {
    int m_bar = 1;
    int node_count = 10;          // |V|
    double gamma = 0.1;           // failure probability, in (0,1)
    double epsilon = 0.2;         // entropy-accuracy target
    double epsilon_prime = 0.2;   // pairing-distortion entropy target
    double delta = 0.0;           // L1 target vs the genie distribution
    double delta_prime = 0.0;     // L1 target naive-vs-genie
    double c = 1.0;               // slack constants, free inputs
    double c1 = 0.01;
    double alpha_exp = 0.5;       // schedule exponent, < 1
    double beta1 = 0.75;          // schedule coefficient, in (0,1)
    int reset_depth = 5;          // d
    double mu_bar = 0.4;          // max sup mu_v over [0,1]
    double lipschitz = 0.4;       // L
    double rho = 0.8;             // spectral radius of the influence matrix
};

// Closed-form alphabet bound m_bar(m_bar+1)/2 + 2. The enumerated support
// (see enumerate_support) satisfies it with equality only for m_bar <= 2;
// from m_bar = 3 on, duplicates such as 2/4 = 1/2 make the enumeration
// strictly smaller.
int64_t chi_bound(int m_bar);

struct SupportSize {
    int size = 0;
    std::vector<Symbol> symbols;
};

// Distinct observable values for a given cap; count <= chi_bound always.
SupportSize support_size(int m_bar);

// floor(2*log2(chi_bound)/epsilon_prime + 1): largest conditioning-set
// cardinality the greedy can reach.
int pmax_bound(double epsilon_prime, int m_bar);

struct XiSize {
    uint64_t value = 0;
    bool overflow = false;  // true when |chi|^(2+pmax) exceeds 2^62
};

// Maximum joint-support size |chi|^(2+pmax), |chi| the enumerated support.
XiSize xi_size(int m_bar, int pmax);

// Effective chain length after worst-case collation: floor((T+d^2-1)/(d+1)).
int64_t t_min(int64_t steps, int reset_depth);

struct MixingCondition {
    double value = 0.0;  // 2*(mu_bar + L)*rho
    bool satisfied = false;
};

MixingCondition mixing_condition(double mu_bar, double lipschitz, double rho);

struct SampleSizeResult {
    bool applicable = false;      // false when the mixing condition fails
    int64_t t_required = -1;      // ceil(max of both terms); -1 if inapplicable
    double term_reset = 0.0;      // tail-count concentration branch
    double term_concentration = 0.0;  // Markov-chain concentration branch
    MixingCondition mixing;
    int pmax = 0;
    XiSize xi;
    int support = 0;              // enumerated |chi|
    // side conditions re-checked at t_required
    bool schedule_feasible = false;       // resolved p in (0,1]
    double schedule_p = 0.0;
    bool c1_condition = false;            // beta1*delta' - 4*(T-1)^(alpha-1) > c1
    bool delta_feasible = false;          // delta*log2(|xi|/delta) <= epsilon/4
    bool delta_prime_feasible = false;    // delta'*log2(|xi|/delta') <= epsilon'/4
};

// Evaluates both branches of the sample-size guarantee, T large enough that
//
//   term_reset = log2((c + 2|V|^(pmax+1)|xi|)/gamma) * 12*delta'*beta1/c1^2
//   term_conc  = (d^2 - d + 2)
//              + (1 - 2(mu+L)rho)*delta^2
//                / (2*(1 + 2(mu+L)rho)*|xi|^2*(d+1)^(-1))
//                * log2((c + 2|V|^(pmax+1)|xi|)/gamma)
//
// are both covered. The delta/epsilon feasibility inequalities are checked
// up front; failure throws Fault::validation naming the failed inequality.
// A violated mixing condition yields a result with applicable=false and
// both terms still reported.
SampleSizeResult required_sample_size(const BoundInputs &inputs);

}  // namespace pim
