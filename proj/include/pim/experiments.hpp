#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pim/graph.hpp"
#include "pim/recgreedy.hpp"
#include "pim/simulator.hpp"

namespace pim {

struct GraphSpec {
    enum class Kind { ring, line, random };
    Kind kind = Kind::ring;
    int n = 10;
    int in_degree = 1;       // random graphs only
    uint64_t graph_seed = 0; // random graphs only
    NodeParams params;

    InfluenceGraph build() const;
};

struct ExperimentConfig {
    GraphSpec graph;
    PimParams pim;                  // steps and seed are filled per grid cell
    std::vector<int> t_grid;
    std::vector<double> kappa_grid;
    int trials = 50;
    uint64_t seed_base = 1;
    enum class Mode { recovery_vs_t, crossval };
    Mode mode = Mode::recovery_vs_t;
    int max_set = -1;  // -1: derive from m_bar and kappa per cell
    int jobs = 0;      // 0: hardware concurrency
};

struct EdgeMetricsResult {
    double precision = 0.0;
    double recall = 0.0;
    int hamming = 0;
    bool exact = false;
};

// Compares edge sets with self-loops excluded on both sides: the greedy
// always conditions on v and never tests it as a candidate, so (v,v) is
// unrecoverable by construction. Empty estimate against nonempty truth
// scores precision 0 by convention so averages stay well-defined.
EdgeMetricsResult edge_metrics(const InfluenceGraph &truth, const RecoveredGraph &est);

struct TrialRow {
    int steps = 0;
    double kappa = 0.0;
    int trial = 0;
    int exact = 0;
    double precision = 0.0;
    double recall = 0.0;
    int hamming = 0;
    double runtime_ms = 0.0;
    std::string status = "ok";  // "skipped" when the schedule is infeasible
};

// Runs every (T, kappa, trial) cell with seed = mix(seed_base, T, kappa
// index, trial); rows come back in deterministic grid order regardless of
// the worker pool schedule. Apart from runtime_ms the table is a pure
// function of the config.
std::vector<TrialRow> run_experiment(const ExperimentConfig &cfg);

struct CrossvalResult {
    double best_kappa = 0.0;
    std::vector<std::pair<double, double>> curve;  // (kappa, mean exact recovery)
};

// Trials per kappa at the fixed T = t_grid.front(); argmax of mean exact
// recovery, ties toward the smallest kappa.
CrossvalResult crossval_kappa(const ExperimentConfig &cfg);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double> &x, const std::vector<double> &y);

// One-sided p-value for positive trend, normal approximation z = rho*sqrt(n-1).
double spearman_positive_trend_pvalue(const std::vector<double> &x,
                                      const std::vector<double> &y);

std::string rows_to_csv(const std::vector<TrialRow> &rows);
// Mean/stderr of exact recovery aggregated per (T, kappa).
std::string summary_to_csv(const std::vector<TrialRow> &rows);

// Emits fig1.csv..fig4.csv into `dir` for the four reference
// configurations: recovery-vs-T curves for (d=5, M_bar=1) and (d=10,
// M_bar=2) at the cross-validated kappa, and the two kappa curves behind
// that choice. Returns the written paths.
std::vector<std::string> write_figure_data(const std::string &dir, int trials,
                                           uint64_t seed_base, int jobs);

}  // namespace pim
