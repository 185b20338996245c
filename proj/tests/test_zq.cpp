#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "maskcheck/rng.hpp"
#include "maskcheck/zq.hpp"
#include "oracle.hpp"

using namespace maskcheck;

namespace {

const std::vector<std::uint64_t> kModuli{1, 2, 5, 7, 64, 3329, 8380417, 4294967291ull, 4294967311ull,
                                         (std::uint64_t{1} << 61) - 1, Modulus::kMax - 57};

}  // namespace

TEST(Modulus, RejectsZeroAndTooLarge) {
    EXPECT_THROW(Modulus(0), std::invalid_argument);
    EXPECT_THROW(Modulus(Modulus::kMax), std::invalid_argument);
    EXPECT_NO_THROW(Modulus(Modulus::kMax - 1));
    EXPECT_NO_THROW(Modulus(1));
}

TEST(Zq, ConstructionReduces) {
    const Modulus q(7);
    EXPECT_EQ(Zq(7, q).value(), 0u);
    EXPECT_EQ(Zq(15, q).value(), 1u);
    EXPECT_EQ(Zq::from_signed(-1, q).value(), 6u);
    EXPECT_EQ(Zq::from_signed(-15, q).value(), 6u);
    EXPECT_EQ(Zq::from_signed(INT64_MIN, q).value(), oracle::mod(oracle::i128(INT64_MIN), 7));
}

TEST(Zq, OperationsMatchIntegerOracle) {
    for (std::uint64_t qv : kModuli) {
        const Modulus q(qv);
        CounterRng rng(1, qv);
        for (int i = 0; i < 2000; ++i) {
            const std::uint64_t x = rng.uniform(qv);
            const std::uint64_t y = rng.uniform(qv);
            const Zq a(x, q);
            const Zq b(y, q);
            ASSERT_EQ((a + b).value(), oracle::add(x, y, qv)) << qv;
            ASSERT_EQ((a - b).value(), oracle::sub(x, y, qv)) << qv;
            ASSERT_EQ((a * b).value(), oracle::mul(x, y, qv)) << qv;
            ASSERT_EQ((-a).value(), oracle::sub(0, x, qv)) << qv;
        }
    }
}

TEST(Zq, FreeFunctionsAgreeWithOperators) {
    const Modulus q(3329);
    const Zq a(1234, q);
    const Zq b(3000, q);
    EXPECT_EQ(add(a, b), a + b);
    EXPECT_EQ(sub(a, b), a - b);
    EXPECT_EQ(mul(a, b), a * b);
}

TEST(Zq, MixedModuliThrow) {
    const Zq a(1, Modulus(5));
    const Zq b(1, Modulus(7));
    EXPECT_THROW(a + b, ModulusMismatch);
    EXPECT_THROW(a - b, ModulusMismatch);
    EXPECT_THROW(a * b, ModulusMismatch);
    EXPECT_THROW(require_same_modulus(a, b), ModulusMismatch);
    EXPECT_FALSE(a == b);
}

TEST(Zq, PowMatchesRepeatedMultiplication) {
    for (std::uint64_t qv : {1ull, 2ull, 6ull, 17ull, 3329ull}) {
        const Modulus q(qv);
        for (std::uint64_t x = 0; x < std::min<std::uint64_t>(qv, 20); ++x) {
            for (std::uint64_t e = 0; e < 40; ++e) {
                ASSERT_EQ(Zq(x, q).pow(e).value(), oracle::pow(x, e, qv)) << qv << " " << x << "^" << e;
            }
        }
    }
}

TEST(Zq, InverseOfUnits) {
    for (std::uint64_t qv : {2ull, 9ull, 17ull, 3329ull}) {
        const Modulus q(qv);
        for (std::uint64_t x = 1; x < std::min<std::uint64_t>(qv, 500); ++x) {
            const Zq a(x, q);
            if (std::gcd(x, qv) == 1) {
                ASSERT_EQ((a * a.inverse()).value(), 1u);
            } else {
                EXPECT_THROW(a.inverse(), std::domain_error);
            }
        }
        EXPECT_THROW(Zq::zero(q).inverse(), std::domain_error);
    }
    const Modulus big(8380417);
    EXPECT_EQ((Zq(1753, big) * Zq(1753, big).inverse()).value(), 1u);
}

TEST(Zq, DegenerateRing) {
    const Modulus q(1);
    EXPECT_EQ(Zq::one(q), Zq::zero(q));
    EXPECT_EQ((Zq(5, q) * Zq(9, q)).value(), 0u);
}

TEST(Zq, ToString) { EXPECT_EQ(Zq(3, Modulus(5)).to_string(), "3 (mod 5)"); }

TEST(Primes, MillerRabinAgreesWithTrialDivision) {
    for (std::uint64_t n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
    EXPECT_TRUE(is_prime(8380417));
    EXPECT_TRUE(is_prime((std::uint64_t{1} << 61) - 1));
    EXPECT_FALSE(is_prime(3215031751ull));  // strong pseudoprime to bases 2, 3, 5, 7
    EXPECT_TRUE(is_prime(18446744073709551557ull));
}

TEST(RootsOfUnity, KnownValues) {
    EXPECT_EQ(primitive_root_of_unity(Modulus(17), 8).value(), 9u);
    EXPECT_EQ(multiplicative_generator(Modulus(17)).value(), 3u);
    EXPECT_EQ(multiplicative_generator(Modulus(3329)).value(), 3u);
    const Zq w = primitive_root_of_unity(Modulus(3329), 256);
    EXPECT_TRUE(has_exact_order(w, 256));
    EXPECT_FALSE(has_exact_order(w * w, 256));
    EXPECT_TRUE(has_exact_order(w * w, 128));
    EXPECT_THROW(primitive_root_of_unity(Modulus(3329), 512), std::invalid_argument);
    EXPECT_THROW(primitive_root_of_unity(Modulus(15), 2), std::invalid_argument);
}

// c - m = v has exactly one solution m in Z_q, namely c - v.
TEST(Zq, SubtractionEquationHasUniqueSolution) {
    for (std::uint64_t qv = 1; qv <= 64; ++qv) {
        const Modulus q(qv);
        for (std::uint64_t c = 0; c < qv; ++c) {
            for (std::uint64_t v = 0; v < qv; ++v) {
                int solutions = 0;
                std::uint64_t found = 0;
                for (std::uint64_t m = 0; m < qv; ++m) {
                    if ((Zq(c, q) - Zq(m, q)).value() == v) {
                        ++solutions;
                        found = m;
                    }
                }
                ASSERT_EQ(solutions, 1);
                ASSERT_EQ(found, oracle::sub(c, v, qv));
            }
        }
    }
}
