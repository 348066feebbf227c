#pragma once

#include <vector>

#include "pim/symbolic.hpp"

namespace pim {

struct TraceEvent {
    enum class Kind { candidate, promote, size_cap };
    Kind kind = Kind::candidate;
    int node = -1;
    double score = 0.0;   // entropy reduction of the argmax candidate
    bool accepted = false;
};

struct NeighborhoodResult {
    std::vector<int> neighborhood;  // estimated in-neighbors of v, ascending
    std::vector<TraceEvent> trace;
    bool converged = true;  // false when the working set hit the size cap
};

struct RecoveredGraph {
    int node_count = 0;
    double kappa = 0.0;
    std::vector<std::vector<int>> neighborhoods;
    std::vector<std::vector<TraceEvent>> traces;
    bool converged = true;

    std::vector<std::pair<int, int>> edges() const;  // (u,v) for u in T(v)
};

// Working-set size cap derived from the bounded-conditioning-set guarantee:
// min(|V|-1, floor(2*log2(m_bar*(m_bar+1)/2 + 2)/kappa + 1)).
int default_max_set(int node_count, int m_bar, double kappa);

// One node's neighborhood estimate. The outer loop re-seeds the working set
// from the current estimate; the inner loop repeatedly adds the candidate
// with the largest conditional-entropy reduction while the reduction is
// strictly above kappa/2, then promotes only the last-added node. Ties in
// the argmax break toward the smallest node index, which makes the whole
// procedure deterministic. If the working set would grow past max_set the
// result is returned flagged non-converged rather than thrown.
NeighborhoodResult recover_neighborhood(const SymbolView &view, const PairSet &pairs,
                                        int v, double kappa, int max_set);

// Runs recover_neighborhood for every node over the naive pairing.
RecoveredGraph recover_graph(const Trajectory &traj, double kappa, int max_set);

}  // namespace pim
