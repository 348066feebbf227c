#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "pim/graph.hpp"
#include "pim/rng.hpp"

namespace pim {

// Reset-probability schedule (1-p) = (T-1)^alpha_exp / (beta1 * (T-d-1)).
struct ResetSchedule {
    double alpha_exp = 0.5;  // must be < 1
    double beta1 = 0.75;     // in (0,1)
};

// Either an explicit head probability in (0,1] or the schedule above.
using ResetSpec = std::variant<double, ResetSchedule>;

enum class FluctuationLaw {
    uniform,     // Z ~ U[0,1]
    degenerate,  // Z == zbar, for deterministic tests
};

struct PimParams {
    int reset_depth = 5;  // d, how far back a reset reaches
    ResetSpec reset = ResetSchedule{};
    double beta = 0.75;   // intrinsic mixing weight, in (0,1)
    int m_bar = 1;        // cap on the Poisson part of the sample count
    int steps = 3000;     // T, observed window length
    int burn_in = 200;    // discarded prefix
    uint64_t seed = 1;
    FluctuationLaw z_law = FluctuationLaw::uniform;
};

// Observed counts plus hidden diagnostics over the kept window. Observations
// are stored as the integer pair (N, M), never as floats, so downstream
// symbol tables are exact. Immutable once produced; safe to share read-only.
struct Trajectory {
    int node_count = 0;
    int steps = 0;           // T
    int m_bar = 0;
    int reset_depth = 0;     // d; 0 when unknown (e.g. loaded without metadata)
    double reset_probability = 1.0;  // resolved p; 1 when unknown
    bool has_hidden = false;

    std::vector<uint16_t> sample_counts;   // M_v(t), steps x node_count row-major
    std::vector<uint16_t> success_counts;  // N_v(t)

    // hidden diagnostics (populated when has_hidden)
    std::vector<uint8_t> coin;             // C(t), 1 = head, 0 = reset
    std::vector<int32_t> effective_index;  // e(t), genie time index
    std::vector<double> latent;            // X_v(t), steps x node_count

    int sample_count(int t, int v) const {
        return sample_counts[static_cast<size_t>(t) * node_count + v];
    }
    int success_count(int t, int v) const {
        return success_counts[static_cast<size_t>(t) * node_count + v];
    }
    double latent_at(int t, int v) const {
        return latent[static_cast<size_t>(t) * node_count + v];
    }
    // max observed sample count minus 1; lower bound on the generating m_bar
    int observed_m_bar() const;
};

// Resolves the reset specification to a concrete head probability. Throws
// Fault::infeasible_schedule (naming the offending value) when the schedule
// yields p outside (0,1].
double resolve_reset_probability(const ResetSpec &spec, int steps, int reset_depth);

// min(Poisson(mu_slope * x), m_bar) + 1, in [1, m_bar + 1].
int sample_m(double x, double mu_slope, int m_bar, Rng &rng);

// Generates a trajectory of the past-influence dynamic. One global coin per
// step; resets are disabled until a full d-deep past exists inside the kept
// window, so C(t) = 1 for all t < d+1 after burn-in removal. Deterministic
// given (graph, params, seed): the coin, fluctuation, Poisson, binomial and
// init draws come from independent substreams of the master seed, so e.g.
// changing m_bar does not perturb the coin sequence.
Trajectory simulate(const InfluenceGraph &g, const PimParams &params);

// Time-average of Y_v over the kept window; burn-in diagnostic.
double stationary_mean_estimate(const Trajectory &traj, int v);

}  // namespace pim
