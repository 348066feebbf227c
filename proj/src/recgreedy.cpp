#include "pim/recgreedy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pim/bounds.hpp"
#include "pim/errors.hpp"

namespace pim {

namespace {

// Conditional-entropy evaluations keyed by the conditioning-set bitmask;
// the inner loops revisit overlapping sets constantly.
class EntropyMemo {
public:
    EntropyMemo(const SymbolView &view, const PairSet &pairs, int v)
        : view_(view), pairs_(pairs), v_(v) {}

    double operator()(uint64_t mask) {
        const auto it = cache_.find(mask);
        if (it != cache_.end()) return it->second;
        std::vector<int> q;
        for (int u = 0; u < view_.node_count(); ++u) {
            if (mask & (uint64_t{1} << u)) q.push_back(u);
        }
        const double h = cond_entropy(view_, pairs_, v_, q);
        cache_.emplace(mask, h);
        return h;
    }

private:
    const SymbolView &view_;
    const PairSet &pairs_;
    int v_;
    std::unordered_map<uint64_t, double> cache_;
};

}  // namespace

std::vector<std::pair<int, int>> RecoveredGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < node_count; ++v) {
        for (int u : neighborhoods[v]) out.emplace_back(u, v);
    }
    return out;
}

int default_max_set(int node_count, int m_bar, double kappa) {
    if (kappa <= 0.0) throw Error(Fault::validation, "kappa must be positive");
    const double by_bound =
        2.0 * std::log2(static_cast<double>(chi_bound(m_bar))) / kappa + 1.0;
    const double capped = std::min(static_cast<double>(node_count - 1), std::floor(by_bound));
    return std::max(1, static_cast<int>(capped));
}

NeighborhoodResult recover_neighborhood(const SymbolView &view, const PairSet &pairs,
                                        int v, double kappa, int max_set) {
    const int n = view.node_count();
    if (v < 0 || v >= n) throw Error(Fault::validation, "node index out of range");
    if (!(kappa > 0.0)) {
        throw Error(Fault::validation, "kappa must be positive, got " + std::to_string(kappa));
    }
    if (max_set < 1 || max_set > n - 1) {
        throw Error(Fault::validation, "max_set must lie in [1, |V|-1]");
    }
    if (n > 63) throw Error(Fault::validation, "recovery supports at most 63 nodes");

    EntropyMemo memo(view, pairs, v);
    const double threshold = kappa / 2.0;

    NeighborhoodResult result;
    uint64_t estimate = 0;  // T(v) as bitmask
    int estimate_size = 0;

    while (true) {
        uint64_t working = estimate;  // U(v)
        int working_size = estimate_size;
        int last_node = -1;
        const uint64_t estimate_before = estimate;

        while (true) {
            const double base = memo(working);
            int best = -1;
            double best_score = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == v || (working & (uint64_t{1} << k))) continue;
                const double score = base - memo(working | (uint64_t{1} << k));
                if (best == -1 || score > best_score) {
                    best = k;  // strict > keeps ties on the smallest index
                    best_score = score;
                }
            }
            if (best == -1) {
                // candidate pool exhausted; promote whatever was accepted last
                if (last_node >= 0 && !(estimate & (uint64_t{1} << last_node))) {
                    estimate |= uint64_t{1} << last_node;
                    ++estimate_size;
                    result.trace.push_back(
                        {TraceEvent::Kind::promote, last_node, best_score, true});
                }
                break;
            }
            result.trace.push_back(
                {TraceEvent::Kind::candidate, best, best_score, best_score > threshold});
            if (best_score > threshold) {
                if (working_size >= max_set) {
                    // wanted to grow past the cap: flag and stop this pass
                    result.converged = false;
                    result.trace.push_back({TraceEvent::Kind::size_cap, best, best_score, false});
                    if (last_node >= 0 && !(estimate & (uint64_t{1} << last_node))) {
                        estimate |= uint64_t{1} << last_node;
                        ++estimate_size;
                        result.trace.push_back(
                            {TraceEvent::Kind::promote, last_node, 0.0, true});
                    }
                    break;
                }
                working |= uint64_t{1} << best;
                ++working_size;
                last_node = best;
            } else {
                if (last_node >= 0 && !(estimate & (uint64_t{1} << last_node))) {
                    estimate |= uint64_t{1} << last_node;
                    ++estimate_size;
                    result.trace.push_back(
                        {TraceEvent::Kind::promote, last_node, best_score, true});
                }
                break;
            }
        }
        if (estimate == estimate_before) break;  // no new node joined T(v)
    }

    for (int u = 0; u < n; ++u) {
        if (estimate & (uint64_t{1} << u)) result.neighborhood.push_back(u);
    }
    return result;
}

RecoveredGraph recover_graph(const Trajectory &traj, double kappa, int max_set) {
    if (traj.steps < 2) {
        throw Error(Fault::validation, "recovery needs at least 2 observed steps");
    }
    const SymbolView view(traj);
    const PairSet pairs = build_pairs(traj, PairMode::naive);

    RecoveredGraph out;
    out.node_count = traj.node_count;
    out.kappa = kappa;
    out.neighborhoods.resize(traj.node_count);
    out.traces.resize(traj.node_count);
    for (int v = 0; v < traj.node_count; ++v) {
        NeighborhoodResult r = recover_neighborhood(view, pairs, v, kappa, max_set);
        out.neighborhoods[v] = std::move(r.neighborhood);
        out.traces[v] = std::move(r.trace);
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace pim
