#pragma once

// Reference computations for the tests, written against plain integers
// only. Nothing here includes the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

__extension__ using i128 = __int128;

inline std::uint64_t mod(i128 x, std::uint64_t q) {
    const i128 r = x % static_cast<i128>(q);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<i128>(q) : r);
}

inline std::uint64_t add(std::uint64_t x, std::uint64_t y, std::uint64_t q) { return mod(i128(x) + y, q); }
inline std::uint64_t sub(std::uint64_t x, std::uint64_t y, std::uint64_t q) { return mod(i128(x) - y, q); }
inline std::uint64_t mul(std::uint64_t x, std::uint64_t y, std::uint64_t q) { return mod(i128(x) * y, q); }

inline std::uint64_t pow(std::uint64_t x, std::uint64_t e, std::uint64_t q) {
    std::uint64_t r = 1 % q;
    for (std::uint64_t i = 0; i < e; ++i) r = mul(r, x, q);
    return r;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

/// Masked butterfly wires straight from the defining formula.
inline std::array<std::uint64_t, 4> butterfly(std::uint64_t q, std::uint64_t tw, std::uint64_t a0,
                                              std::uint64_t a1, std::uint64_t b0, std::uint64_t b1,
                                              std::uint64_t m) {
    const i128 a = i128(a0) + a1;
    const i128 b = i128(b0) + b1;
    const i128 t = i128(tw) * mod(b, q);
    return {mod(a + t - m, q), mod(m, q), mod(a - t - m, q), mod(m, q)};
}

struct Stage {
    std::uint64_t m, ra, rb;
};

/// Wires of every stage of the masked lane: stage 0 consumes the input
/// sharing, each later stage the re-masked wires of the one before.
inline std::vector<std::array<std::uint64_t, 4>> lane(std::uint64_t q, const std::vector<std::uint64_t>& tws,
                                                      const std::vector<Stage>& rs, std::uint64_t a,
                                                      std::uint64_t b, std::uint64_t a1, std::uint64_t b1) {
    std::vector<std::array<std::uint64_t, 4>> out;
    std::array<std::uint64_t, 4> shares{sub(a, a1, q), a1 % q, sub(b, b1, q), b1 % q};
    for (std::size_t i = 0; i < tws.size(); ++i) {
        if (i > 0) {
            const Stage& prev = rs[i - 1];
            shares = {sub(shares[0], prev.ra, q), add(shares[1], prev.ra, q), sub(shares[2], prev.rb, q),
                      add(shares[3], prev.rb, q)};
        }
        const auto w = butterfly(q, tws[i], shares[0], shares[1], shares[2], shares[3], rs[i].m);
        out.push_back(w);
        shares = w;
    }
    return out;
}

/// The same lane with no masking at all: (a, b) -> (a + tw b, a - tw b).
inline std::vector<std::array<std::uint64_t, 2>> plain_lane(std::uint64_t q, const std::vector<std::uint64_t>& tws,
                                                            std::uint64_t a, std::uint64_t b) {
    std::vector<std::array<std::uint64_t, 2>> out;
    for (std::uint64_t tw : tws) {
        const std::uint64_t t = mul(tw, b, q);
        const std::uint64_t na = add(a, t, q);
        const std::uint64_t nb = sub(a, t, q);
        a = na;
        b = nb;
        out.push_back({a, b});
    }
    return out;
}

/// X[k] = sum_j x[j] omega^(jk), evaluated power by power.
inline std::vector<std::uint64_t> dft(const std::vector<std::uint64_t>& x, std::uint64_t omega, std::uint64_t q) {
    const std::size_t n = x.size();
    std::vector<std::uint64_t> out(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            out[k] = add(out[k], mul(x[j], pow(omega, (j * k) % n, q), q), q);
        }
    }
    return out;
}

/// I(X; W) in bits from a joint count table, in plain doubles.
inline double mutual_information(const std::vector<std::map<std::uint64_t, std::uint64_t>>& rows) {
    double total = 0;
    std::map<std::uint64_t, double> col;
    std::vector<double> row_sum(rows.size(), 0);
    for (std::size_t x = 0; x < rows.size(); ++x) {
        for (const auto& [v, c] : rows[x]) {
            total += c;
            col[v] += c;
            row_sum[x] += c;
        }
    }
    double mi = 0;
    for (std::size_t x = 0; x < rows.size(); ++x) {
        for (const auto& [v, c] : rows[x]) {
            if (c == 0) continue;
            const double p = c / total;
            mi += p * std::log2(p / ((row_sum[x] / total) * (col[v] / total)));
        }
    }
    return mi;
}

}  // namespace oracle
