#include "pim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pim/errors.hpp"

namespace pim {

namespace {

// substream tags
constexpr uint64_t kCoinStream = 0x636f696eULL;
constexpr uint64_t kFluctStream = 0x666c7563ULL;
constexpr uint64_t kPoissonStream = 0x706f6973ULL;
constexpr uint64_t kBinomialStream = 0x62696e6fULL;
constexpr uint64_t kInitStream = 0x696e6974ULL;

}  // namespace

int Trajectory::observed_m_bar() const {
    uint16_t max_m = 1;
    for (uint16_t m : sample_counts) max_m = std::max(max_m, m);
    return max_m - 1;
}

double resolve_reset_probability(const ResetSpec &spec, int steps, int reset_depth) {
    if (std::holds_alternative<double>(spec)) {
        const double p = std::get<double>(spec);
        if (!(p > 0.0 && p <= 1.0)) {
            throw Error(Fault::infeasible_schedule,
                        "explicit reset probability " + std::to_string(p) + " outside (0,1]");
        }
        return p;
    }
    const ResetSchedule &s = std::get<ResetSchedule>(spec);
    if (!(s.alpha_exp < 1.0)) {
        throw Error(Fault::infeasible_schedule,
                    "schedule exponent must be < 1, got " + std::to_string(s.alpha_exp));
    }
    if (!(s.beta1 > 0.0 && s.beta1 < 1.0)) {
        throw Error(Fault::infeasible_schedule,
                    "schedule beta1 must be in (0,1), got " + std::to_string(s.beta1));
    }
    if (steps <= reset_depth + 1) {
        throw Error(Fault::infeasible_schedule,
                    "schedule needs T > d+1, got T=" + std::to_string(steps) +
                        ", d=" + std::to_string(reset_depth));
    }
    const double tail = std::pow(steps - 1.0, s.alpha_exp) /
                        (s.beta1 * (steps - reset_depth - 1.0));
    const double p = 1.0 - tail;
    if (!(p > 0.0 && p <= 1.0)) {
        throw Error(Fault::infeasible_schedule,
                    "schedule yields reset probability " + std::to_string(p) +
                        " outside (0,1] (tail mass " + std::to_string(tail) + ")");
    }
    return p;
}

int sample_m(double x, double mu_slope, int m_bar, Rng &rng) {
    const int draw = rng.poisson(mu_slope * x);
    return std::min(draw, m_bar) + 1;
}

Trajectory simulate(const InfluenceGraph &g, const PimParams &params) {
    {
        auto violations = g.validate();
        if (!violations.empty()) {
            throw Error(Fault::validation, "invalid graph: " + violations.front());
        }
    }
    if (params.reset_depth < 1) {
        throw Error(Fault::validation, "reset depth must be >= 1");
    }
    if (params.m_bar < 0) {
        throw Error(Fault::validation, "m_bar must be nonnegative");
    }
    if (!(params.beta > 0.0 && params.beta < 1.0)) {
        throw Error(Fault::validation, "beta must be in (0,1)");
    }
    if (params.burn_in < 0) {
        throw Error(Fault::validation, "burn-in must be nonnegative");
    }
    const int n = g.node_count();
    const int T = params.steps;
    const int d = params.reset_depth;
    const double p = resolve_reset_probability(params.reset, T, d);
    if (p < 1.0 && T < d + 2) {
        throw Error(Fault::validation,
                    "T must be >= d+2 when resets are enabled, got T=" + std::to_string(T));
    }
    if (T < 1) throw Error(Fault::validation, "T must be positive");

    Rng coin_rng(mix_seed({params.seed, kCoinStream}));
    Rng fluct_rng(mix_seed({params.seed, kFluctStream}));
    Rng poisson_rng(mix_seed({params.seed, kPoissonStream}));
    Rng binomial_rng(mix_seed({params.seed, kBinomialStream}));
    Rng init_rng(mix_seed({params.seed, kInitStream}));

    const int total = params.burn_in + T;
    // resets begin once a full d-deep past exists inside the kept window
    const int first_reset_step = params.burn_in + d + 1;

    Trajectory traj;
    traj.node_count = n;
    traj.steps = T;
    traj.m_bar = params.m_bar;
    traj.reset_depth = d;
    traj.reset_probability = p;
    traj.has_hidden = true;
    traj.sample_counts.resize(static_cast<size_t>(total) * n);
    traj.success_counts.resize(static_cast<size_t>(total) * n);
    traj.coin.assign(total, 1);
    traj.latent.resize(static_cast<size_t>(total) * n);

    std::vector<double> x(n), x_next(n);
    for (int v = 0; v < n; ++v) x[v] = init_rng.uniform01();

    for (int t = 0; t < total; ++t) {
        for (int v = 0; v < n; ++v) {
            const size_t idx = static_cast<size_t>(t) * n + v;
            traj.latent[idx] = x[v];
            const int m = sample_m(x[v], g.params(v).mu_slope, params.m_bar, poisson_rng);
            const int nn = binomial_rng.binomial(m, x[v]);
            traj.sample_counts[idx] = static_cast<uint16_t>(m);
            traj.success_counts[idx] = static_cast<uint16_t>(nn);
        }
        const bool head = t < first_reset_step || p >= 1.0 || coin_rng.bernoulli(p);
        traj.coin[t] = head ? 1 : 0;

        const int src = head ? t : t - d;
        auto observable = [&](int u) {
            const size_t idx = static_cast<size_t>(src) * n + u;
            return static_cast<double>(traj.success_counts[idx]) / traj.sample_counts[idx];
        };
        for (int v = 0; v < n; ++v) {
            const NodeParams &np = g.params(v);
            const double z = params.z_law == FluctuationLaw::uniform ? fluct_rng.uniform01()
                                                                     : np.zbar;
            double social = g.self_weight(v) > 0.0 ? g.self_weight(v) * observable(v) : 0.0;
            for (const auto &e : g.in_edges(v)) social += e.weight * observable(e.from);
            double next = (1.0 - np.alpha) * ((1.0 - params.beta) * z + params.beta * np.bias) +
                          np.alpha * social;
            // convex combination of [0,1] values; clamp float dust only
            next = std::clamp(next, 0.0, 1.0);
            x_next[v] = next;
        }
        x.swap(x_next);
    }

    // drop the burn-in prefix and reindex
    if (params.burn_in > 0) {
        const size_t off = static_cast<size_t>(params.burn_in) * n;
        traj.sample_counts.erase(traj.sample_counts.begin(), traj.sample_counts.begin() + off);
        traj.success_counts.erase(traj.success_counts.begin(),
                                  traj.success_counts.begin() + off);
        traj.latent.erase(traj.latent.begin(), traj.latent.begin() + off);
        traj.coin.erase(traj.coin.begin(), traj.coin.begin() + params.burn_in);
    }

    // effective (genie) time index over the kept window
    traj.effective_index.assign(T, 0);
    for (int t = 0; t + 1 < T; ++t) {
        traj.effective_index[t + 1] = traj.coin[t] == 1
                                          ? traj.effective_index[t] + 1
                                          : traj.effective_index[t - d] + 1;
    }
    return traj;
}

double stationary_mean_estimate(const Trajectory &traj, int v) {
    if (traj.steps < 1) throw Error(Fault::validation, "empty trajectory");
    if (v < 0 || v >= traj.node_count) {
        throw Error(Fault::validation, "node index out of range");
    }
    double acc = 0.0;
    for (int t = 0; t < traj.steps; ++t) {
        acc += static_cast<double>(traj.success_count(t, v)) / traj.sample_count(t, v);
    }
    return acc / traj.steps;
}

}  // namespace pim
