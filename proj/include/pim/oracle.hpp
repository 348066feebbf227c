#pragma once

#include <vector>

#include "pim/symbolic.hpp"

namespace pim {

// Brute-force reference for the greedy: among all subsets S of V\{v} with
// |S| <= max_size, returns the smallest-cardinality S (ties lexicographic)
// such that no remaining node drops the conditional entropy by more than
// kappa/2. Same strictly-greater threshold as the greedy, so any
// disagreement isolates the search strategy. Guarded to |V| <= 12.
std::vector<int> exhaustive_neighborhood(const SymbolView &view, const PairSet &pairs,
                                         int v, double kappa, int max_size);

struct GenieGap {
    double gap_naive = 0.0;
    double gap_genie = 0.0;
};

// Conditional-entropy drop from adding u to the conditioning set of v, under
// naive and genie pairing. Requires hidden coin data.
GenieGap genie_gap(const Trajectory &traj, int v, int u, std::span<const int> q);

}  // namespace pim
