#include "pim/oracle.hpp"

#include <algorithm>
#include <unordered_map>

#include "pim/errors.hpp"

namespace pim {

namespace {

// enumerates k-subsets of `pool` in lexicographic order
bool next_combination(std::vector<int> &idx, int pool_size) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < pool_size - (k - i)) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<int> exhaustive_neighborhood(const SymbolView &view, const PairSet &pairs,
                                         int v, double kappa, int max_size) {
    const int n = view.node_count();
    if (n > 12) {
        throw Error(Fault::validation,
                    "exhaustive search is guarded to 12 nodes, got " + std::to_string(n));
    }
    if (v < 0 || v >= n) throw Error(Fault::validation, "node index out of range");
    if (!(kappa > 0.0)) throw Error(Fault::validation, "kappa must be positive");
    max_size = std::min(max_size, n - 1);
    if (max_size < 0) throw Error(Fault::validation, "max_size must be nonnegative");

    std::vector<int> pool;
    for (int u = 0; u < n; ++u) {
        if (u != v) pool.push_back(u);
    }
    std::unordered_map<uint64_t, double> memo;
    auto entropy_of = [&](uint64_t mask) {
        const auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        std::vector<int> q;
        for (int u = 0; u < n; ++u) {
            if (mask & (uint64_t{1} << u)) q.push_back(u);
        }
        const double h = cond_entropy(view, pairs, v, q);
        memo.emplace(mask, h);
        return h;
    };
    const double threshold = kappa / 2.0;

    // smallest cardinality first, lexicographic within a cardinality
    for (int size = 0; size <= max_size; ++size) {
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        bool more = true;
        while (more) {
            uint64_t mask = 0;
            for (int i : idx) mask |= uint64_t{1} << pool[i];
            const double base = entropy_of(mask);
            bool closed = true;
            for (int u : pool) {
                if (mask & (uint64_t{1} << u)) continue;
                if (base - entropy_of(mask | (uint64_t{1} << u)) > threshold) {
                    closed = false;
                    break;
                }
            }
            if (closed) {
                std::vector<int> out;
                for (int i : idx) out.push_back(pool[i]);
                return out;
            }
            more = size > 0 && next_combination(idx, static_cast<int>(pool.size()));
        }
    }
    // no subset within the cap is closed; report the full candidate pool cap
    std::vector<int> out(pool.begin(), pool.begin() + max_size);
    return out;
}

GenieGap genie_gap(const Trajectory &traj, int v, int u, std::span<const int> q) {
    if (!traj.has_hidden) {
        throw Error(Fault::validation, "genie gap requires the hidden coin record");
    }
    if (u == v) throw Error(Fault::validation, "candidate u must differ from v");
    for (int w : q) {
        if (w == u || w == v) {
            throw Error(Fault::validation, "u and v must lie outside the conditioning set");
        }
    }
    const SymbolView view(traj);
    const PairSet naive = build_pairs(traj, PairMode::naive);
    const PairSet genie = build_pairs(traj, PairMode::genie);

    std::vector<int> with_u(q.begin(), q.end());
    with_u.push_back(u);
    std::sort(with_u.begin(), with_u.end());

    GenieGap out;
    out.gap_naive = cond_entropy(view, naive, v, q) - cond_entropy(view, naive, v, with_u);
    out.gap_genie = cond_entropy(view, genie, v, q) - cond_entropy(view, genie, v, with_u);
    return out;
}

}  // namespace pim
