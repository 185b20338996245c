#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace maskcheck {

namespace detail {
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;
}  // namespace detail

/// Raised when two residues with different moduli meet in one operation.
class ModulusMismatch : public std::invalid_argument {
public:
    ModulusMismatch(std::uint64_t lhs, std::uint64_t rhs);
};

/// Runtime modulus q >= 1. Any positive q is accepted, prime or not.
///
/// Residues are kept below 2^62 so that a sum of two canonical values
/// never wraps a 64-bit word; products go through a 128-bit intermediate
/// when q does not fit in 32 bits.
class Modulus {
public:
    static constexpr std::uint64_t kMax = std::uint64_t{1} << 62;

    explicit Modulus(std::uint64_t q);

    std::uint64_t value() const noexcept { return q_; }

    std::uint64_t reduce(std::uint64_t x) const noexcept { return x % q_; }

    std::uint64_t add(std::uint64_t x, std::uint64_t y) const noexcept {
        const std::uint64_t s = x + y;
        return s >= q_ ? s - q_ : s;
    }

    std::uint64_t sub(std::uint64_t x, std::uint64_t y) const noexcept {
        return x >= y ? x - y : x + q_ - y;
    }

    std::uint64_t neg(std::uint64_t x) const noexcept { return x == 0 ? 0 : q_ - x; }

    std::uint64_t mul(std::uint64_t x, std::uint64_t y) const noexcept {
        if (q_ <= 0xFFFFFFFFu) {
            return (x * y) % q_;
        }
        return static_cast<std::uint64_t>((static_cast<detail::u128>(x) * y) % q_);
    }

    friend bool operator==(const Modulus&, const Modulus&) = default;

private:
    std::uint64_t q_;
};

/// Canonical residue in [0, q) carrying its modulus.
class Zq {
public:
    Zq(std::uint64_t value, Modulus q) : v_(q.reduce(value)), q_(q) {}

    static Zq zero(Modulus q) { return Zq(0, q); }
    static Zq one(Modulus q) { return Zq(1, q); }
    /// Reduces a signed integer into [0, q).
    static Zq from_signed(std::int64_t value, Modulus q);

    std::uint64_t value() const noexcept { return v_; }
    Modulus modulus() const noexcept { return q_; }

    Zq& operator+=(const Zq& o) {
        check(o);
        v_ = q_.add(v_, o.v_);
        return *this;
    }
    Zq& operator-=(const Zq& o) {
        check(o);
        v_ = q_.sub(v_, o.v_);
        return *this;
    }
    Zq& operator*=(const Zq& o) {
        check(o);
        v_ = q_.mul(v_, o.v_);
        return *this;
    }

    friend Zq operator+(Zq x, const Zq& y) { return x += y; }
    friend Zq operator-(Zq x, const Zq& y) { return x -= y; }
    friend Zq operator*(Zq x, const Zq& y) { return x *= y; }
    Zq operator-() const { return Zq(q_.neg(v_), q_, Canonical{}); }

    Zq pow(std::uint64_t exponent) const;
    /// Multiplicative inverse; throws std::domain_error when gcd(value, q) != 1.
    Zq inverse() const;

    friend bool operator==(const Zq& x, const Zq& y) noexcept {
        return x.v_ == y.v_ && x.q_ == y.q_;
    }
    /// Orders by residue; only meaningful within one modulus.
    friend std::strong_ordering operator<=>(const Zq& x, const Zq& y) noexcept {
        return x.v_ <=> y.v_;
    }

    std::string to_string() const;

private:
    struct Canonical {};
    Zq(std::uint64_t value, Modulus q, Canonical) : v_(value), q_(q) {}

    void check(const Zq& o) const {
        if (!(q_ == o.q_)) throw ModulusMismatch(q_.value(), o.q_.value());
    }

    std::uint64_t v_;
    Modulus q_;
};

/// Throws ModulusMismatch unless both operands share a modulus.
void require_same_modulus(const Zq& x, const Zq& y);

inline Zq add(const Zq& x, const Zq& y) { return x + y; }
inline Zq sub(const Zq& x, const Zq& y) { return x - y; }
inline Zq mul(const Zq& x, const Zq& y) { return x * y; }

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Smallest generator of the multiplicative group of a prime field.
Zq multiplicative_generator(Modulus q);

/// Element of exact multiplicative order n, where n is a power of two
/// dividing q - 1 and q is prime. The choice is g^((q-1)/n) for the
/// smallest generator g, so q=17, n=8 yields 9.
Zq primitive_root_of_unity(Modulus q, std::uint64_t n);

/// True when x^n == 1 and no smaller power of two reaches 1 (n a power of two).
bool has_exact_order(const Zq& x, std::uint64_t n);

}  // namespace maskcheck
