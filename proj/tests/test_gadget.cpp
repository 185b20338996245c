#include <gtest/gtest.h>

#include <set>

#include "maskcheck/gadget.hpp"
#include "maskcheck/rng.hpp"
#include "oracle.hpp"

using namespace maskcheck;

namespace {

ShareQuad quad(Modulus q, std::uint64_t a0, std::uint64_t a1, std::uint64_t b0, std::uint64_t b1) {
    return ShareQuad{Zq(a0, q), Zq(a1, q), Zq(b0, q), Zq(b1, q)};
}

std::array<std::uint64_t, 4> values(const ButterflyWires& w) {
    return {w.wire0.value(), w.wire1.value(), w.wire2.value(), w.wire3.value()};
}

}  // namespace

TEST(Gadget, ShareAndReconstruct) {
    const Modulus q(7);
    for (std::uint64_t s = 0; s < 7; ++s) {
        for (std::uint64_t m = 0; m < 7; ++m) {
            const auto [s0, s1] = share(Zq(s, q), Zq(m, q));
            EXPECT_EQ(s1.value(), m);
            EXPECT_EQ(reconstruct(s0, s1).value(), s);
        }
    }
}

TEST(Gadget, ButterflyMatchesFormulaExhaustively) {
    for (std::uint64_t qv = 1; qv <= 6; ++qv) {
        const Modulus q(qv);
        for (std::uint64_t tw = 0; tw < qv; ++tw) {
            for (std::uint64_t i = 0; i < qv * qv * qv * qv * qv; ++i) {
                std::uint64_t r = i;
                const std::uint64_t a0 = r % qv, a1 = (r /= qv) % qv, b0 = (r /= qv) % qv, b1 = (r /= qv) % qv,
                                    m = (r /= qv) % qv;
                const auto w = butterfly_output(ButterflyStage{Zq(tw, q)}, quad(q, a0, a1, b0, b1), Zq(m, q));
                ASSERT_EQ(values(w), oracle::butterfly(qv, tw, a0, a1, b0, b1, m));
            }
        }
    }
}

// wire0 + wire1 = a + tw*b and wire2 + wire3 = a - tw*b.
TEST(Gadget, MaskCorrectnessSmallModuli) {
    for (std::uint64_t qv = 1; qv <= 16; ++qv) {
        const Modulus q(qv);
        for (std::uint64_t tw = 0; tw < qv; ++tw) {
            for (std::uint64_t a = 0; a < qv; ++a) {
                for (std::uint64_t b = 0; b < qv; ++b) {
                    for (std::uint64_t m = 0; m < qv; ++m) {
                        // Mask-correctness only sees a and b, so fix a1 = b1 = 1.
                        const auto shares = quad(q, oracle::sub(a, 1, qv), 1 % qv, oracle::sub(b, 1, qv), 1 % qv);
                        const auto w = butterfly_output(ButterflyStage{Zq(tw, q)}, shares, Zq(m, q));
                        const std::uint64_t t = oracle::mul(tw, b, qv);
                        ASSERT_EQ(reconstruct(w.wire0, w.wire1).value(), oracle::add(a, t, qv));
                        ASSERT_EQ(reconstruct(w.wire2, w.wire3).value(), oracle::sub(a, t, qv));
                    }
                }
            }
        }
    }
}

TEST(Gadget, MaskCorrectnessProductionModuli) {
    for (std::uint64_t qv : {3329ull, 8380417ull}) {
        const Modulus q(qv);
        CounterRng rng(7, qv);
        for (int i = 0; i < 10000; ++i) {
            const ButterflyStage stage{rng.element(q)};
            const ShareQuad s{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
            const Zq m = rng.element(q);
            const auto w = butterfly_output(stage, s, m);
            const auto [a_out, b_out] = plain_butterfly(stage, reconstruct_a(s), reconstruct_b(s));
            ASSERT_EQ(reconstruct(w.wire0, w.wire1), a_out);
            ASSERT_EQ(reconstruct(w.wire2, w.wire3), b_out);
            ASSERT_EQ(values(w), oracle::butterfly(qv, stage.tw.value(), s.a0.value(), s.a1.value(),
                                                   s.b0.value(), s.b1.value(), m.value()));
        }
    }
}

// m -> wire0 and m -> wire2 are bijections, m -> wire1 is the identity.
TEST(Gadget, WiresAreAffineInTheMask) {
    for (std::uint64_t qv = 1; qv <= 64; qv += (qv < 16 ? 1 : 7)) {
        const Modulus q(qv);
        CounterRng rng(3, qv);
        for (int trial = 0; trial < 20; ++trial) {
            const ButterflyStage stage{rng.element(q)};
            const ShareQuad s{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
            std::set<std::uint64_t> w0, w2;
            for (std::uint64_t m = 0; m < qv; ++m) {
                const auto w = butterfly_output(stage, s, Zq(m, q));
                w0.insert(w.wire0.value());
                w2.insert(w.wire2.value());
                ASSERT_EQ(w.wire1.value(), m);
                ASSERT_EQ(w.wire3.value(), m);
            }
            ASSERT_EQ(w0.size(), qv);
            ASSERT_EQ(w2.size(), qv);
        }
    }
}

TEST(Gadget, RemaskCommutesWithReconstruction) {
    for (std::uint64_t qv = 1; qv <= 5; ++qv) {
        const Modulus q(qv);
        for (std::uint64_t i = 0; i < qv * qv * qv * qv * qv * qv; ++i) {
            std::uint64_t r = i;
            const std::uint64_t a0 = r % qv, a1 = (r /= qv) % qv, b0 = (r /= qv) % qv, b1 = (r /= qv) % qv,
                                ra = (r /= qv) % qv, rb = (r /= qv) % qv;
            const ShareQuad s = quad(q, a0, a1, b0, b1);
            const ShareQuad t = remask(s, Zq(ra, q), Zq(rb, q));
            ASSERT_EQ(reconstruct_a(t), reconstruct_a(s));
            ASSERT_EQ(reconstruct_b(t), reconstruct_b(s));
            ASSERT_EQ(t.a0.value(), oracle::sub(a0, ra, qv));
            ASSERT_EQ(t.b1.value(), oracle::add(b1, rb, qv));
        }
    }
}

TEST(Gadget, WireIndexRange) {
    EXPECT_THROW(WireIndex(-1), std::out_of_range);
    EXPECT_THROW(WireIndex(4), std::out_of_range);
    const ButterflyWires w{Zq(0, Modulus(5)), Zq(1, Modulus(5)), Zq(2, Modulus(5)), Zq(3, Modulus(5))};
    for (WireIndex i : WireIndex::all()) EXPECT_EQ(select_wire(i, w).value(), static_cast<std::uint64_t>(i.value()));
}

TEST(Gadget, ReferenceAndMutant) {
    const Modulus q(5);
    const ButterflyStage stage{Zq(2, q)};
    const ShareQuad s = quad(q, 1, 2, 3, 4);
    const auto ref = reference_gadget();
    const auto mutant = mask_dropping_gadget();
    for (std::uint64_t m = 0; m < 5; ++m) {
        EXPECT_EQ(ref(stage, s, Zq(m, q)), butterfly_output(stage, s, Zq(m, q)));
        const auto w = mutant(stage, s, Zq(m, q));
        const auto [a_out, b_out] = plain_butterfly(stage, reconstruct_a(s), reconstruct_b(s));
        EXPECT_EQ(w.wire0, a_out);
        EXPECT_EQ(w.wire2, b_out);
    }
}

TEST(Gadget, MismatchedModuliThrow) {
    const ButterflyStage stage{Zq(1, Modulus(7))};
    EXPECT_THROW(butterfly_output(stage, quad(Modulus(5), 1, 1, 1, 1), Zq(0, Modulus(5))), ModulusMismatch);
}
