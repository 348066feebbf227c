#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pim/simulator.hpp"

namespace pim {

// Observation symbol Y = N/M as an exact reduced fraction. Reduction makes
// componentwise comparison a value comparison (1/2 == 2/4).
struct Symbol {
    uint32_t num = 0;
    uint32_t den = 1;

    static Symbol of(uint32_t n, uint32_t m);  // reduces; throws on m == 0 or n > m

    bool operator==(const Symbol &o) const { return num == o.num && den == o.den; }
    bool operator!=(const Symbol &o) const { return !(*this == o); }
    bool operator<(const Symbol &o) const {
        return static_cast<uint64_t>(num) * o.den < static_cast<uint64_t>(o.num) * den;
    }

    std::string str() const;  // "num/den", integers unqualified ("0", "1")
};

// All distinct values k/m with m in [1, m_bar+1], sorted ascending.
std::vector<Symbol> enumerate_support(int m_bar);

enum class PairMode { naive, genie };

// Time-adjacent sample pairs (prev, next) into a trajectory. Naive pairing
// matches consecutive steps; genie pairing uses the hidden coin to match
// every next-sample with its true generating parent (prev = t - d at resets).
struct PairSet {
    std::vector<std::pair<int32_t, int32_t>> pairs;
    PairMode mode = PairMode::naive;

    size_t size() const { return pairs.size(); }
};

// Throws Fault::validation in genie mode when hidden data is absent.
PairSet build_pairs(const Trajectory &traj, PairMode mode);

// Per-trajectory symbol-index matrix; built once, then shared read-only by
// all entropy queries.
class SymbolView {
public:
    explicit SymbolView(const Trajectory &traj);

    const std::vector<Symbol> &alphabet() const { return alphabet_; }
    int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
    int node_count() const { return node_count_; }
    int steps() const { return steps_; }

    uint8_t index(int t, int v) const {
        return indices_[static_cast<size_t>(t) * node_count_ + v];
    }
    Symbol symbol(int t, int v) const { return alphabet_[index(t, v)]; }

private:
    std::vector<Symbol> alphabet_;
    std::vector<uint8_t> indices_;
    int node_count_ = 0;
    int steps_ = 0;
};

// Exact count table over symbol tuples of fixed arity. Keys are packed
// base-|alphabet| integers; small key spaces use a dense array, larger ones a
// hash map. Completed tables are immutable and shareable.
class JointCounts {
public:
    JointCounts(std::vector<Symbol> alphabet, int arity);

    void add_key(uint64_t key, uint64_t count = 1);
    void add(std::span<const Symbol> symbols, uint64_t count = 1);

    int arity() const { return arity_; }
    uint64_t total() const { return total_; }
    const std::vector<Symbol> &alphabet() const { return alphabet_; }
    size_t distinct_keys() const;

    // -sum (c/total) log2(c/total); throws on an empty table.
    double entropy_bits() const;

    // Sums out the first (most significant) variable.
    JointCounts marginal_without_first() const;

    // (tuple, count) pairs in canonical order (lexicographic by symbol value).
    std::vector<std::pair<std::vector<Symbol>, uint64_t>> items() const;

    template <typename Fn>  // Fn(uint64_t key, uint64_t count)
    void for_each(Fn &&fn) const {
        if (dense_) {
            for (uint64_t k = 0; k < dense_counts_.size(); ++k) {
                if (dense_counts_[k] != 0) fn(k, dense_counts_[k]);
            }
        } else {
            for (const auto &[k, c] : sparse_counts_) fn(k, c);
        }
    }

    uint64_t count_for_key(uint64_t key) const;
    std::vector<Symbol> unpack(uint64_t key) const;

private:
    std::vector<Symbol> alphabet_;
    int arity_ = 0;
    uint64_t capacity_ = 0;  // |alphabet|^arity
    bool dense_ = false;
    std::vector<uint64_t> dense_counts_;
    std::unordered_map<uint64_t, uint64_t> sparse_counts_;
    uint64_t total_ = 0;
};

// Counts tuples (Y_v(next), Y_v(prev), {Y_q(prev)}_{q in Q ascending}).
// Throws Fault::validation when v is in Q or an index is out of range.
JointCounts empirical_joint(const SymbolView &view, const PairSet &pairs, int v,
                            std::span<const int> q);
JointCounts empirical_joint(const Trajectory &traj, const PairSet &pairs, int v,
                            std::span<const int> q);

double entropy(const JointCounts &counts);

// Plug-in directed conditional entropy H(v+ | v, Q) in bits. The marginal is
// taken from the prev-side of the same pair multiset, so the chain rule and
// hence conditioning monotonicity hold exactly.
double cond_entropy(const SymbolView &view, const PairSet &pairs, int v,
                    std::span<const int> q);
double cond_entropy(const Trajectory &traj, const PairSet &pairs, int v,
                    std::span<const int> q);

// L1 distance between the normalized tables, over the union of keys.
// Throws Fault::validation on arity or alphabet mismatch.
double l1_distance(const JointCounts &a, const JointCounts &b);

// Deterministic CSV dump: columns sym_1..sym_k ("num/den" strings), count.
std::string counts_to_csv(const JointCounts &counts);

}  // namespace pim
