#include "pim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pim/errors.hpp"
#include "pim/rng.hpp"

namespace pim {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

void check_node(const InfluenceGraph &g, int v) {
    if (v < 0 || v >= g.node_count()) {
        throw Error(Fault::validation, "node index " + std::to_string(v) + " out of range");
    }
}

}  // namespace

InfluenceGraph::InfluenceGraph(int node_count, NodeParams params) {
    if (node_count < 1) {
        throw Error(Fault::validation, "node count must be positive, got " +
                                           std::to_string(node_count));
    }
    params_.assign(node_count, params);
    self_weight_.assign(node_count, 0.0);
    in_edges_.assign(node_count, {});
}

void InfluenceGraph::set_self_weight(int v, double w) {
    check_node(*this, v);
    self_weight_[v] = w;
}

void InfluenceGraph::add_edge(int from, int to, double weight) {
    check_node(*this, from);
    check_node(*this, to);
    if (from == to) {
        throw Error(Fault::validation,
                    "self edge " + std::to_string(from) + " must use the self-weight field");
    }
    if (has_edge(from, to)) {
        throw Error(Fault::validation, "duplicate edge " + std::to_string(from) + "->" +
                                           std::to_string(to));
    }
    auto &edges = in_edges_[to];
    InEdge e{from, weight};
    edges.insert(std::upper_bound(edges.begin(), edges.end(), e,
                                  [](const InEdge &a, const InEdge &b) {
                                      return a.from < b.from;
                                  }),
                 e);
}

bool InfluenceGraph::has_edge(int from, int to) const {
    if (to < 0 || to >= node_count()) return false;
    const auto &edges = in_edges_[to];
    return std::any_of(edges.begin(), edges.end(),
                       [from](const InEdge &e) { return e.from == from; });
}

int InfluenceGraph::edge_count() const {
    int total = 0;
    for (const auto &edges : in_edges_) total += static_cast<int>(edges.size());
    return total;
}

std::vector<std::pair<int, int>> InfluenceGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count());
    for (int v = 0; v < node_count(); ++v) {
        for (const auto &e : in_edges_[v]) out.emplace_back(e.from, v);
    }
    return out;
}

std::vector<std::string> InfluenceGraph::validate() const {
    std::vector<std::string> violations;
    auto flag = [&violations](const std::string &msg) { violations.push_back(msg); };

    for (int v = 0; v < node_count(); ++v) {
        const NodeParams &p = params_[v];
        const std::string node = "node " + std::to_string(v);
        if (!(p.alpha > 0.0 && p.alpha < 1.0)) {
            flag(node + ": alpha must be in (0,1), got " + std::to_string(p.alpha));
        }
        if (!(p.bias >= 0.0 && p.bias <= 1.0)) {
            flag(node + ": bias must be in [0,1], got " + std::to_string(p.bias));
        }
        if (!(p.mu_slope >= 0.0)) {
            flag(node + ": mu_slope must be nonnegative, got " + std::to_string(p.mu_slope));
        }
        if (!(p.zbar > 0.0 && p.zbar < 1.0)) {
            flag(node + ": zbar must be in (0,1), got " + std::to_string(p.zbar));
        }
        if (!(self_weight_[v] >= 0.0)) {
            flag(node + ": self-weight must be nonnegative, got " +
                 std::to_string(self_weight_[v]));
        }

        double sum = self_weight_[v];
        for (const auto &e : in_edges_[v]) {
            if (!(e.weight > 0.0 && e.weight <= 1.0)) {
                flag("edge " + std::to_string(e.from) + "->" + std::to_string(v) +
                     ": weight must be in (0,1], got " + std::to_string(e.weight));
            }
            sum += e.weight;
        }
        if (std::abs(sum - 1.0) > kWeightSumTolerance) {
            flag(node + ": incoming weights plus self-weight sum to " + std::to_string(sum) +
                 ", expected 1");
        }
    }
    return violations;
}

double InfluenceGraph::max_mu_slope() const {
    double m = 0.0;
    for (const auto &p : params_) m = std::max(m, p.mu_slope);
    return m;
}

InfluenceGraph make_ring(int n, NodeParams params) {
    if (n < 2) {
        throw Error(Fault::validation, "ring needs at least 2 nodes, got " + std::to_string(n));
    }
    InfluenceGraph g(n, params);
    for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n, 1.0);
    return g;
}

InfluenceGraph make_line(int n, NodeParams params) {
    if (n < 2) {
        throw Error(Fault::validation, "line needs at least 2 nodes, got " + std::to_string(n));
    }
    InfluenceGraph g(n, params);
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1, 1.0);
    g.set_self_weight(0, 1.0);  // no in-neighbor; keeps the weight sum at 1
    return g;
}

InfluenceGraph make_random(int n, int in_degree, uint64_t seed, NodeParams params) {
    if (n < 2) {
        throw Error(Fault::validation, "random graph needs at least 2 nodes");
    }
    if (in_degree < 1 || in_degree > n - 1) {
        throw Error(Fault::validation, "in-degree " + std::to_string(in_degree) +
                                           " outside [1, " + std::to_string(n - 1) + "]");
    }
    InfluenceGraph g(n, params);
    Rng rng(mix_seed({seed, 0x6772617068ULL}));
    const double w = 1.0 / in_degree;
    std::vector<int> candidates(n - 1);
    for (int v = 0; v < n; ++v) {
        int k = 0;
        for (int u = 0; u < n; ++u) {
            if (u != v) candidates[k++] = u;
        }
        // partial Fisher-Yates: first in_degree entries are the sample
        for (int i = 0; i < in_degree; ++i) {
            int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(n - 1 - i)));
            std::swap(candidates[i], candidates[j]);
        }
        std::sort(candidates.begin(), candidates.begin() + in_degree);
        for (int i = 0; i < in_degree; ++i) g.add_edge(candidates[i], v, w);
    }
    return g;
}

InfluenceMatrix influence_matrix(const InfluenceGraph &g) {
    auto violations = g.validate();
    if (!violations.empty()) {
        throw Error(Fault::validation, "invalid graph: " + violations.front());
    }
    const int n = g.node_count();
    InfluenceMatrix m;
    m.n = n;
    m.entries.assign(static_cast<size_t>(n) * n, 0.0);
    for (int v = 0; v < n; ++v) {
        const double alpha = g.params(v).alpha;
        for (const auto &e : g.in_edges(v)) m.at(e.from, v) = alpha * e.weight;
        if (g.self_weight(v) > 0.0) m.at(v, v) = alpha * g.self_weight(v);
    }
    return m;
}

double spectral_radius(const InfluenceMatrix &m) {
    const int n = m.n;
    if (n == 0) return 0.0;
    for (double e : m.entries) {
        if (e < 0.0) throw Error(Fault::validation, "influence matrix has a negative entry");
    }

    // Power iteration on M + I. The unit shift makes the iteration converge
    // for periodic nonnegative matrices (e.g. pure cycles) whose unshifted
    // norm ratios oscillate; the Perron root shifts by exactly 1.
    constexpr double kShift = 1.0;
    constexpr double kRelTol = 1e-10;
    constexpr int kMaxIter = 10000;

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double estimate = 0.0;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        for (int j = 0; j < n; ++j) {
            double acc = kShift * x[j];
            for (int i = 0; i < n; ++i) acc += m.at(i, j) * x[i];
            y[j] = acc;
        }
        double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        if (norm == 0.0) return 0.0;  // unreachable with the positive shift
        const double next = norm;
        for (int j = 0; j < n; ++j) x[j] = y[j] / norm;
        if (iter > 0 && std::abs(next - estimate) <= kRelTol * std::max(1.0, next)) {
            return next - kShift;
        }
        estimate = next;
    }
    throw Error(Fault::non_convergence,
                "spectral radius power iteration did not converge in " +
                    std::to_string(kMaxIter) + " iterations; last iterate " +
                    std::to_string(estimate - kShift));
}

}  // namespace pim
