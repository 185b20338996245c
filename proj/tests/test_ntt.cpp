#include <gtest/gtest.h>

#include "maskcheck/ntt.hpp"
#include "maskcheck/rng.hpp"
#include "oracle.hpp"

using namespace maskcheck;

namespace {

std::vector<Zq> random_poly(CounterRng& rng, Modulus q, std::size_t n) {
    std::vector<Zq> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(rng.element(q));
    return x;
}

std::vector<std::uint64_t> raw(const std::vector<Zq>& x) {
    std::vector<std::uint64_t> out;
    for (const auto& v : x) out.push_back(v.value());
    return out;
}

}  // namespace

TEST(Ntt, ParamsValidate) {
    EXPECT_THROW(NttParams(Modulus(15), 2), std::invalid_argument);
    EXPECT_THROW(NttParams(Modulus(17), 6), std::invalid_argument);
    EXPECT_THROW(NttParams(Modulus(17), 32), std::invalid_argument);
    EXPECT_THROW(NttParams(Modulus(17), 8, Zq(4, Modulus(17))), std::invalid_argument);  // order 4
    EXPECT_EQ(NttParams(Modulus(17), 8, Zq(2, Modulus(17))).omega().value(), 2u);
    const NttParams p(Modulus(17), 8);
    EXPECT_EQ(p.omega().value(), 9u);
    EXPECT_EQ(p.log2_size(), 3u);
    EXPECT_EQ((p.omega() * p.omega_inv()).value(), 1u);
    EXPECT_EQ((p.n_inv() * Zq(8, Modulus(17))).value(), 1u);
}

TEST(Ntt, AgreesWithNaiveDft) {
    for (auto [qv, n] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{17, 8}, {17, 16}, {97, 32}, {3329, 256},
                                                                             {8380417, 64}, {5, 4}, {3, 2}}) {
        const Modulus q(qv);
        const NttParams params(q, n);
        CounterRng rng(qv, n);
        for (int t = 0; t < 5; ++t) {
            const auto x = random_poly(rng, q, n);
            ASSERT_EQ(raw(forward_ntt(params, x)), oracle::dft(raw(x), params.omega().value(), qv)) << qv << " " << n;
        }
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<Zq> delta(n, Zq::zero(q));
            delta[d] = Zq::one(q);
            const auto out = forward_ntt(params, delta);
            for (std::size_t k = 0; k < n; ++k) ASSERT_EQ(out[k], params.omega().pow(d * k));
        }
    }
}

TEST(Ntt, RoundTrip) {
    const Modulus q(3329);
    const NttParams params(q, 256);
    CounterRng rng(1, 2);
    for (int t = 0; t < 200; ++t) {
        const auto x = random_poly(rng, q, 256);
        ASSERT_EQ(inverse_ntt(params, forward_ntt(params, x)), x);
        ASSERT_EQ(forward_ntt(params, inverse_ntt(params, x)), x);
    }
}

TEST(Ntt, Linearity) {
    const Modulus q(17);
    const NttParams params(q, 8);
    CounterRng rng(3, 3);
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_poly(rng, q, 8);
        const auto y = random_poly(rng, q, 8);
        std::vector<Zq> sum;
        for (std::size_t i = 0; i < 8; ++i) sum.push_back(x[i] + y[i]);
        const auto fx = forward_ntt(params, x);
        const auto fy = forward_ntt(params, y);
        const auto fs = forward_ntt(params, sum);
        for (std::size_t i = 0; i < 8; ++i) ASSERT_EQ(fs[i], fx[i] + fy[i]);
    }
}

TEST(Ntt, WrongLengthThrows) {
    const NttParams params(Modulus(17), 8);
    EXPECT_THROW(forward_ntt(params, std::vector<Zq>(4, Zq::zero(Modulus(17)))), std::invalid_argument);
}

// Every butterfly inside the transform, rerun through the masked gadget at
// zero randomness, reproduces the plain outputs.
TEST(Ntt, ButterfliesAreMaskCorrectAtZeroRandomness) {
    const Modulus q(3329);
    const NttParams params(q, 256);
    CounterRng rng(4, 4);
    const auto x = random_poly(rng, q, 256);
    std::size_t seen = 0;
    forward_ntt(params, x, [&](std::size_t, const ButterflyStage& tw, const Zq& a, const Zq& b, const Zq& a_out,
                               const Zq& b_out) {
        ++seen;
        const ShareQuad shares{a, Zq::zero(q), b, Zq::zero(q)};
        const ButterflyWires w = butterfly_output(tw, shares, Zq::zero(q));
        ASSERT_EQ(w.wire0, a_out);
        ASSERT_EQ(w.wire2, b_out);
        ASSERT_EQ(w.wire1, Zq::zero(q));
    });
    EXPECT_EQ(seen, 8u * 128u);
}

TEST(Ntt, ScheduleAndLane) {
    const NttParams params(Modulus(17), 8);
    const auto schedule = twiddle_schedule(params);
    ASSERT_EQ(schedule.size(), 3u);
    for (std::size_t s = 0; s < 3; ++s) {
        ASSERT_EQ(schedule[s].size(), std::size_t{1} << s);
        for (std::size_t j = 0; j < schedule[s].size(); ++j) {
            EXPECT_EQ(schedule[s][j].tw, params.omega().pow(j * (8 >> (s + 1))));
        }
    }
    const NttPipeline lane = lane_pipeline(params);
    ASSERT_EQ(lane.size(), 3u);
    for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(lane.stage(s), schedule[s][(3) % (std::size_t{1} << s)]);
    const NttPipeline lane0 = lane_pipeline(params, 0);
    for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(lane0.stage(s).tw.value(), 1u);
}

TEST(Ntt, BitReverse) {
    EXPECT_EQ(bit_reverse(1, 3), 4u);
    EXPECT_EQ(bit_reverse(6, 3), 3u);
    for (std::uint64_t x = 0; x < 256; ++x) EXPECT_EQ(bit_reverse(bit_reverse(x, 8), 8), x);
}
