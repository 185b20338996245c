#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace maskcheck {

/// Exact value -> count table over an enumerated domain.
/// Invariant: the counts sum to domain_size.
struct Histogram {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t domain_size = 0;

    void add(std::uint64_t value, std::uint64_t weight = 1) {
        counts[value] += weight;
        domain_size += weight;
    }
    std::uint64_t count(std::uint64_t value) const {
        const auto it = counts.find(value);
        return it == counts.end() ? 0 : it->second;
    }
    /// Accumulates another histogram into this one.
    void merge(const Histogram& other);

    /// Equal as distributions: same support with the same counts.
    friend bool operator==(const Histogram& x, const Histogram& y);
};

/// Joint counts n(x, v): one histogram per secret class x.
struct JointCounts {
    std::vector<Histogram> rows;
};

struct MutualInfo {
    /// I(X; W) in bits. Exactly 0.0 whenever the rows are independent of x.
    double bits = 0.0;
    /// True when the inputs were exact enumeration counts.
    bool exact = true;
    /// Decided by integer cross-multiplication, never by comparing a float.
    bool is_zero = true;
};

/// I(X; W) = sum p(x,v) log2(p(x,v) / (p(x) p(v))), with 0 log 0 = 0.
///
/// The zero test checks n(x,v) * N == n(x) * n(v) for every cell in 128-bit
/// integers, so independence is decided exactly; the non-zero value is
/// summed in long double. Throws std::invalid_argument when every weight is 0.
MutualInfo mutual_information(const JointCounts& joint, bool exact_counts = true);

/// Half the L1 distance between the normalised histograms, in [0, 1].
double total_variation(const Histogram& x, const Histogram& y);

}  // namespace maskcheck
