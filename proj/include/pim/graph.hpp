#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pim {

// Per-node behavioral parameters of the opinion dynamic.
struct NodeParams {
    double alpha = 0.8;      // openness to social input, in (0,1)
    double bias = 0.167;     // intrinsic bias l_v, in [0,1]
    double mu_slope = 0.4;   // slope c of the linear sample-rate function mu(x) = c*x
    double zbar = 0.5;       // mean of the fluctuation Z_v(t), in (0,1)
};

struct InEdge {
    int from = 0;
    double weight = 0.0;  // in (0,1]
};

// Directed influence graph. Incoming weights of every node, together with its
// explicit self-weight, must sum to 1. Immutable by convention once built and
// validated; nothing here is thread-safe during construction.
class InfluenceGraph {
public:
    InfluenceGraph(int node_count, NodeParams params);

    int node_count() const { return static_cast<int>(params_.size()); }

    const NodeParams &params(int v) const { return params_.at(v); }
    NodeParams &params(int v) { return params_.at(v); }

    double self_weight(int v) const { return self_weight_.at(v); }
    void set_self_weight(int v, double w);

    // Throws on out-of-range indices, u == v, or duplicate edge.
    void add_edge(int from, int to, double weight);

    const std::vector<InEdge> &in_edges(int v) const { return in_edges_.at(v); }
    bool has_edge(int from, int to) const;
    int edge_count() const;

    // All (from, to) pairs sorted by (to, from); self-weights excluded.
    std::vector<std::pair<int, int>> edges() const;

    // Empty iff all invariants hold; each entry names the node/edge and the
    // violated constraint. Violations are data, not errors.
    std::vector<std::string> validate() const;

    double max_mu_slope() const;

private:
    std::vector<NodeParams> params_;
    std::vector<double> self_weight_;
    std::vector<std::vector<InEdge>> in_edges_;  // sorted by `from`
};

// Generators. Ring and line replicate the simulation-section graphs: each
// in-neighbor set shares edge mass equally and the self-weight is 0, except
// nodes with no in-neighbors, which get self-weight 1 so normalization holds.
InfluenceGraph make_ring(int n, NodeParams params);
InfluenceGraph make_line(int n, NodeParams params);
InfluenceGraph make_random(int n, int in_degree, uint64_t seed, NodeParams params);

struct InfluenceMatrix {
    int n = 0;
    std::vector<double> entries;  // row-major, entry(i,j) = influence of i on j

    double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
    double &at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }
};

// Entry (u,v) = alpha_v * a_uv for edges and self-loops, 0 elsewhere.
// Throws Fault::validation when the graph does not validate.
InfluenceMatrix influence_matrix(const InfluenceGraph &g);

// Perron root of the nonnegative matrix via shifted power iteration,
// relative tolerance 1e-10, at most 10000 iterations. Throws
// Fault::non_convergence (message carries the last iterate) past the cap.
double spectral_radius(const InfluenceMatrix &m);

}  // namespace pim
