#include "maskcheck/zq.hpp"

#include <array>
#include <bit>
#include <vector>

namespace maskcheck {

ModulusMismatch::ModulusMismatch(std::uint64_t lhs, std::uint64_t rhs)
    : std::invalid_argument("modulus mismatch: " + std::to_string(lhs) + " vs " +
                            std::to_string(rhs)) {}

Modulus::Modulus(std::uint64_t q) : q_(q) {
    if (q == 0) throw std::invalid_argument("modulus must be positive");
    if (q >= kMax) throw std::invalid_argument("modulus must be below 2^62");
}

Zq Zq::from_signed(std::int64_t value, Modulus q) {
    const auto m = static_cast<std::int64_t>(q.value());
    std::int64_t r = value % m;
    if (r < 0) r += m;
    return Zq(static_cast<std::uint64_t>(r), q);
}

Zq Zq::pow(std::uint64_t exponent) const {
    std::uint64_t base = v_;
    std::uint64_t acc = q_.reduce(1);
    while (exponent != 0) {
        if (exponent & 1u) acc = q_.mul(acc, base);
        base = q_.mul(base, base);
        exponent >>= 1;
    }
    return Zq(acc, q_, Canonical{});
}

Zq Zq::inverse() const {
    // Extended Euclid on signed 128-bit to stay clear of overflow.
    detail::i128 r0 = static_cast<detail::i128>(q_.value());
    detail::i128 r1 = static_cast<detail::i128>(v_);
    detail::i128 t0 = 0;
    detail::i128 t1 = 1;
    while (r1 != 0) {
        const detail::i128 quot = r0 / r1;
        const detail::i128 r2 = r0 - quot * r1;
        r0 = r1;
        r1 = r2;
        const detail::i128 t2 = t0 - quot * t1;
        t0 = t1;
        t1 = t2;
    }
    if (r0 != 1) {
        throw std::domain_error(to_string() + " is not invertible");
    }
    const detail::i128 m = static_cast<detail::i128>(q_.value());
    detail::i128 inv = t0 % m;
    if (inv < 0) inv += m;
    return Zq(static_cast<std::uint64_t>(inv), q_, Canonical{});
}

std::string Zq::to_string() const {
    return std::to_string(v_) + " (mod " + std::to_string(q_.value()) + ")";
}

void require_same_modulus(const Zq& x, const Zq& y) {
    if (!(x.modulus() == y.modulus())) {
        throw ModulusMismatch(x.modulus().value(), y.modulus().value());
    }
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<detail::u128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (e != 0) {
        if (e & 1u) acc = mulmod(acc, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return acc;
}

std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    constexpr std::array<std::uint64_t, 12> kBases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : kBases) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kBases) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Zq multiplicative_generator(Modulus q) {
    if (!is_prime(q.value())) {
        throw std::invalid_argument("modulus " + std::to_string(q.value()) + " is not prime");
    }
    if (q.value() == 2) return Zq::one(q);
    const std::uint64_t order = q.value() - 1;
    const auto factors = distinct_prime_factors(order);
    for (std::uint64_t g = 2; g < q.value(); ++g) {
        bool generator = true;
        for (std::uint64_t p : factors) {
            if (powmod(g, order / p, q.value()) == 1) {
                generator = false;
                break;
            }
        }
        if (generator) return Zq(g, q);
    }
    throw std::logic_error("no generator found");  // unreachable for prime q
}

bool has_exact_order(const Zq& x, std::uint64_t n) {
    if (n == 0 || !std::has_single_bit(n)) return false;
    if (!(x.pow(n) == Zq::one(x.modulus()))) return false;
    return n == 1 || !(x.pow(n / 2) == Zq::one(x.modulus()));
}

Zq primitive_root_of_unity(Modulus q, std::uint64_t n) {
    if (!is_prime(q.value())) {
        throw std::invalid_argument("modulus " + std::to_string(q.value()) + " is not prime");
    }
    if (n == 0 || !std::has_single_bit(n)) {
        throw std::invalid_argument("transform size " + std::to_string(n) +
                                    " is not a power of two");
    }
    if ((q.value() - 1) % n != 0) {
        throw std::invalid_argument(std::to_string(n) + " does not divide q - 1 = " +
                                    std::to_string(q.value() - 1));
    }
    return multiplicative_generator(q).pow((q.value() - 1) / n);
}

}  // namespace maskcheck
