#include "pim/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "pim/errors.hpp"

namespace pim {

namespace {

constexpr uint64_t kDenseLimit = 1 << 16;

// |alphabet|^arity, or 0 on overflow past 2^62
uint64_t packed_capacity(size_t alphabet, int arity) {
    uint64_t cap = 1;
    for (int i = 0; i < arity; ++i) {
        if (cap > (uint64_t{1} << 62) / alphabet) return 0;
        cap *= alphabet;
    }
    return cap;
}

}  // namespace

Symbol Symbol::of(uint32_t n, uint32_t m) {
    if (m == 0) throw Error(Fault::validation, "symbol denominator must be positive");
    if (n > m) {
        throw Error(Fault::validation, "symbol numerator " + std::to_string(n) +
                                           " exceeds denominator " + std::to_string(m));
    }
    const uint32_t g = std::gcd(n, m);
    return Symbol{n / g, m / g};
}

std::string Symbol::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::vector<Symbol> enumerate_support(int m_bar) {
    if (m_bar < 0) throw Error(Fault::validation, "m_bar must be nonnegative");
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (uint32_t m = 1; m <= static_cast<uint32_t>(m_bar) + 1; ++m) {
        for (uint32_t k = 0; k <= m; ++k) {
            const Symbol s = Symbol::of(k, m);
            seen.emplace(s.num, s.den);
        }
    }
    std::vector<Symbol> out;
    out.reserve(seen.size());
    for (const auto &[n, d] : seen) out.push_back(Symbol{n, d});
    std::sort(out.begin(), out.end());
    return out;
}

PairSet build_pairs(const Trajectory &traj, PairMode mode) {
    PairSet ps;
    ps.mode = mode;
    if (traj.steps < 2) return ps;
    ps.pairs.reserve(traj.steps - 1);
    if (mode == PairMode::naive) {
        for (int32_t t = 0; t + 1 < traj.steps; ++t) ps.pairs.emplace_back(t, t + 1);
        return ps;
    }
    if (!traj.has_hidden || traj.coin.empty()) {
        throw Error(Fault::validation,
                    "genie pairing requires the hidden coin record (sidecar missing)");
    }
    if (traj.reset_depth < 1) {
        throw Error(Fault::validation, "genie pairing requires a known reset depth");
    }
    const int d = traj.reset_depth;
    for (int32_t t = 0; t + 1 < traj.steps; ++t) {
        const int32_t prev = traj.coin[t] == 1 ? t : t - d;
        if (prev < 0) {
            throw Error(Fault::validation,
                        "reset at step " + std::to_string(t) + " reaches before the window");
        }
        ps.pairs.emplace_back(prev, t + 1);
    }
    return ps;
}

SymbolView::SymbolView(const Trajectory &traj)
    : node_count_(traj.node_count), steps_(traj.steps) {
    const int m_bar = std::max(traj.m_bar, traj.observed_m_bar());
    alphabet_ = enumerate_support(m_bar);
    // dense lookup by (den-1, num)
    const int stride = m_bar + 2;
    std::vector<uint8_t> lookup(static_cast<size_t>(m_bar + 1) * stride, 0);
    for (size_t i = 0; i < alphabet_.size(); ++i) {
        // mark every unreduced spelling of alphabet_[i]
        for (uint32_t mult = 1; alphabet_[i].den * mult <= static_cast<uint32_t>(m_bar) + 1;
             ++mult) {
            const uint32_t den = alphabet_[i].den * mult;
            const uint32_t num = alphabet_[i].num * mult;
            lookup[static_cast<size_t>(den - 1) * stride + num] = static_cast<uint8_t>(i);
        }
    }
    indices_.resize(static_cast<size_t>(steps_) * node_count_);
    for (int t = 0; t < steps_; ++t) {
        for (int v = 0; v < node_count_; ++v) {
            const int m = traj.sample_count(t, v);
            const int n = traj.success_count(t, v);
            indices_[static_cast<size_t>(t) * node_count_ + v] =
                lookup[static_cast<size_t>(m - 1) * stride + n];
        }
    }
}

JointCounts::JointCounts(std::vector<Symbol> alphabet, int arity)
    : alphabet_(std::move(alphabet)), arity_(arity) {
    if (arity_ < 1) throw Error(Fault::validation, "table arity must be positive");
    if (alphabet_.empty()) throw Error(Fault::validation, "table alphabet must be nonempty");
    capacity_ = packed_capacity(alphabet_.size(), arity_);
    if (capacity_ == 0) {
        throw Error(Fault::validation,
                    "joint support overflows the packed key space (arity " +
                        std::to_string(arity_) + ", alphabet " +
                        std::to_string(alphabet_.size()) + ")");
    }
    dense_ = capacity_ <= kDenseLimit;
    if (dense_) dense_counts_.assign(capacity_, 0);
}

void JointCounts::add_key(uint64_t key, uint64_t count) {
    if (key >= capacity_) throw Error(Fault::validation, "packed key out of range");
    if (dense_) {
        dense_counts_[key] += count;
    } else {
        sparse_counts_[key] += count;
    }
    total_ += count;
}

void JointCounts::add(std::span<const Symbol> symbols, uint64_t count) {
    if (static_cast<int>(symbols.size()) != arity_) {
        throw Error(Fault::validation, "tuple arity mismatch");
    }
    uint64_t key = 0;
    for (const Symbol &s : symbols) {
        const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), s);
        if (it == alphabet_.end() || !(*it == s)) {
            throw Error(Fault::validation, "symbol " + s.str() + " not in the table alphabet");
        }
        key = key * alphabet_.size() + static_cast<uint64_t>(it - alphabet_.begin());
    }
    add_key(key, count);
}

size_t JointCounts::distinct_keys() const {
    if (!dense_) return sparse_counts_.size();
    return static_cast<size_t>(
        std::count_if(dense_counts_.begin(), dense_counts_.end(),
                      [](uint64_t c) { return c != 0; }));
}

double JointCounts::entropy_bits() const {
    if (total_ == 0) {
        throw Error(Fault::validation, "entropy of an empty distribution is undefined");
    }
    // H = log2(total) - sum(c*log2(c))/total keeps counts exact
    long double acc = 0.0L;
    for_each([&acc](uint64_t, uint64_t c) {
        if (c > 1) acc += static_cast<long double>(c) * std::log2(static_cast<long double>(c));
    });
    const long double h =
        std::log2(static_cast<long double>(total_)) - acc / static_cast<long double>(total_);
    return std::max(0.0, static_cast<double>(h));
}

JointCounts JointCounts::marginal_without_first() const {
    if (arity_ < 2) {
        throw Error(Fault::validation, "cannot marginalize a unary table");
    }
    JointCounts out(alphabet_, arity_ - 1);
    const uint64_t tail = capacity_ / alphabet_.size();  // |alphabet|^(arity-1)
    for_each([&out, tail](uint64_t key, uint64_t count) { out.add_key(key % tail, count); });
    return out;
}

uint64_t JointCounts::count_for_key(uint64_t key) const {
    if (dense_) return key < capacity_ ? dense_counts_[key] : 0;
    const auto it = sparse_counts_.find(key);
    return it == sparse_counts_.end() ? 0 : it->second;
}

std::vector<Symbol> JointCounts::unpack(uint64_t key) const {
    std::vector<Symbol> out(arity_);
    for (int i = arity_ - 1; i >= 0; --i) {
        out[i] = alphabet_[key % alphabet_.size()];
        key /= alphabet_.size();
    }
    return out;
}

std::vector<std::pair<std::vector<Symbol>, uint64_t>> JointCounts::items() const {
    std::vector<std::pair<uint64_t, uint64_t>> raw;
    raw.reserve(distinct_keys());
    for_each([&raw](uint64_t k, uint64_t c) { raw.emplace_back(k, c); });
    std::sort(raw.begin(), raw.end());
    std::vector<std::pair<std::vector<Symbol>, uint64_t>> out;
    out.reserve(raw.size());
    for (const auto &[k, c] : raw) out.emplace_back(unpack(k), c);
    return out;
}

namespace {

JointCounts build_joint(const SymbolView &view, const PairSet &pairs, int v,
                        std::span<const int> q) {
    const int n = view.node_count();
    if (v < 0 || v >= n) throw Error(Fault::validation, "node index out of range");
    std::vector<int> qs(q.begin(), q.end());
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
        throw Error(Fault::validation, "conditioning set has duplicate nodes");
    }
    for (int u : qs) {
        if (u < 0 || u >= n) throw Error(Fault::validation, "conditioning node out of range");
        if (u == v) {
            throw Error(Fault::validation,
                        "node " + std::to_string(v) + " cannot condition on itself");
        }
    }
    const uint64_t base = static_cast<uint64_t>(view.alphabet_size());
    JointCounts joint(view.alphabet(), 2 + static_cast<int>(qs.size()));
    for (const auto &[prev, next] : pairs.pairs) {
        if (prev < 0 || next < 0 || prev >= view.steps() || next >= view.steps()) {
            throw Error(Fault::validation, "pair index outside the trajectory");
        }
        uint64_t key = view.index(next, v);
        key = key * base + view.index(prev, v);
        for (int u : qs) key = key * base + view.index(prev, u);
        joint.add_key(key);
    }
    return joint;
}

}  // namespace

JointCounts empirical_joint(const SymbolView &view, const PairSet &pairs, int v,
                            std::span<const int> q) {
    return build_joint(view, pairs, v, q);
}

JointCounts empirical_joint(const Trajectory &traj, const PairSet &pairs, int v,
                            std::span<const int> q) {
    return build_joint(SymbolView(traj), pairs, v, q);
}

double entropy(const JointCounts &counts) { return counts.entropy_bits(); }

double cond_entropy(const SymbolView &view, const PairSet &pairs, int v,
                    std::span<const int> q) {
    const JointCounts joint = build_joint(view, pairs, v, q);
    return joint.entropy_bits() - joint.marginal_without_first().entropy_bits();
}

double cond_entropy(const Trajectory &traj, const PairSet &pairs, int v,
                    std::span<const int> q) {
    return cond_entropy(SymbolView(traj), pairs, v, q);
}

double l1_distance(const JointCounts &a, const JointCounts &b) {
    if (a.arity() != b.arity()) {
        throw Error(Fault::validation, "incompatible distributions: arity " +
                                           std::to_string(a.arity()) + " vs " +
                                           std::to_string(b.arity()));
    }
    if (!(a.alphabet() == b.alphabet())) {
        throw Error(Fault::validation, "incompatible distributions: different alphabets");
    }
    if (a.total() == 0 || b.total() == 0) {
        throw Error(Fault::validation, "l1 distance of an empty distribution is undefined");
    }
    const double ta = static_cast<double>(a.total());
    const double tb = static_cast<double>(b.total());
    double acc = 0.0;
    a.for_each([&](uint64_t key, uint64_t ca) {
        acc += std::abs(ca / ta - b.count_for_key(key) / tb);
    });
    b.for_each([&](uint64_t key, uint64_t cb) {
        if (a.count_for_key(key) == 0) acc += cb / tb;
    });
    return acc;
}

std::string counts_to_csv(const JointCounts &counts) {
    std::ostringstream out;
    for (int i = 1; i <= counts.arity(); ++i) out << "sym_" << i << ",";
    out << "count\n";
    for (const auto &[symbols, count] : counts.items()) {
        for (const auto &s : symbols) out << s.str() << ",";
        out << count << "\n";
    }
    return out.str();
}

}  // namespace pim
