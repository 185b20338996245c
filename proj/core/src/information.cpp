#include "maskcheck/information.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "maskcheck/zq.hpp"

namespace maskcheck {

void Histogram::merge(const Histogram& other) {
    for (const auto& [v, c] : other.counts) counts[v] += c;
    domain_size += other.domain_size;
}

bool operator==(const Histogram& x, const Histogram& y) {
    if (x.domain_size != y.domain_size) return false;
    auto nonzero = [](const Histogram& h) {
        std::map<std::uint64_t, std::uint64_t> out;
        for (const auto& [v, c] : h.counts) {
            if (c != 0) out.emplace(v, c);
        }
        return out;
    };
    return nonzero(x) == nonzero(y);
}

MutualInfo mutual_information(const JointCounts& joint, bool exact_counts) {
    using detail::u128;

    std::uint64_t total = 0;
    std::map<std::uint64_t, std::uint64_t> column;
    for (const auto& row : joint.rows) {
        for (const auto& [v, c] : row.counts) {
            column[v] += c;
            total += c;
        }
    }
    if (total == 0) throw std::invalid_argument("mutual information of an all-zero distribution");

    MutualInfo out;
    out.exact = exact_counts;

    std::vector<std::uint64_t> row_totals;
    row_totals.reserve(joint.rows.size());
    for (const auto& row : joint.rows) {
        std::uint64_t s = 0;
        for (const auto& [v, c] : row.counts) s += c;
        row_totals.push_back(s);
    }

    for (std::size_t x = 0; x < joint.rows.size() && out.is_zero; ++x) {
        for (const auto& [v, col] : column) {
            const u128 lhs = static_cast<u128>(joint.rows[x].count(v)) * total;
            const u128 rhs = static_cast<u128>(row_totals[x]) * col;
            if (lhs != rhs) {
                out.is_zero = false;
                break;
            }
        }
    }
    if (out.is_zero) return out;

    const long double n = static_cast<long double>(total);
    long double bits = 0.0L;
    for (std::size_t x = 0; x < joint.rows.size(); ++x) {
        for (const auto& [v, c] : joint.rows[x].counts) {
            if (c == 0) continue;
            const long double pxv = static_cast<long double>(c) / n;
            const long double ratio = static_cast<long double>(c) * n /
                                      (static_cast<long double>(row_totals[x]) *
                                       static_cast<long double>(column[v]));
            bits += pxv * std::log2(ratio);
        }
    }
    out.bits = static_cast<double>(bits < 0 ? 0.0L : bits);
    return out;
}

double total_variation(const Histogram& x, const Histogram& y) {
    if (x.domain_size == 0 || y.domain_size == 0) {
        return x.domain_size == y.domain_size ? 0.0 : 1.0;
    }
    std::set<std::uint64_t> support;
    for (const auto& [v, c] : x.counts) support.insert(v);
    for (const auto& [v, c] : y.counts) support.insert(v);
    const long double nx = static_cast<long double>(x.domain_size);
    const long double ny = static_cast<long double>(y.domain_size);
    long double sum = 0.0L;
    for (std::uint64_t v : support) {
        sum += std::fabs(static_cast<long double>(x.count(v)) / nx -
                         static_cast<long double>(y.count(v)) / ny);
    }
    return static_cast<double>(sum / 2.0L);
}

}  // namespace maskcheck
