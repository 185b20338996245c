#include <gtest/gtest.h>

#include "maskcheck/properties.hpp"
#include "maskcheck/rng.hpp"
#include "oracle.hpp"

using namespace maskcheck;

namespace {

ShareQuad quad(Modulus q, std::uint64_t a0, std::uint64_t a1, std::uint64_t b0, std::uint64_t b1) {
    return ShareQuad{Zq(a0, q), Zq(a1, q), Zq(b0, q), Zq(b1, q)};
}

std::uint64_t brute_count(std::uint64_t q, std::uint64_t tw, const std::array<std::uint64_t, 4>& s, int wire,
                          std::uint64_t v) {
    std::uint64_t c = 0;
    for (std::uint64_t m = 0; m < q; ++m) c += oracle::butterfly(q, tw, s[0], s[1], s[2], s[3], m)[wire] == v;
    return c;
}

}  // namespace

TEST(Pointwise, FirstWitnessAtQ5) {
    const Modulus q(5);
    const CheckReport r = check_pointwise_vi(q, ButterflyStage{Zq::one(q)});
    EXPECT_EQ(r.property_name, "pointwise_value_independence");
    EXPECT_EQ(r.verdict, Verdict::Fail);
    ASSERT_TRUE(r.witness);
    const Witness& w = *r.witness;
    EXPECT_EQ(w.at("wire"), 0u);
    EXPECT_EQ(w.at("a1"), 0u);
    EXPECT_EQ(w.at("b1"), 0u);
    EXPECT_EQ(w.at("m"), 0u);
    EXPECT_EQ(w.at("a"), 0u);
    EXPECT_EQ(w.at("a_prime"), 1u);
    EXPECT_EQ(w.at("b"), 0u);
    EXPECT_EQ(w.at("b_prime"), 0u);
    EXPECT_EQ(w.at("value"), 0u);
    EXPECT_EQ(w.at("value_prime"), 1u);
}

TEST(Pointwise, WitnessIsARealCounterexample) {
    for (std::uint64_t qv : {2ull, 3ull, 6ull, 7ull}) {
        for (std::uint64_t tw = 0; tw < qv; ++tw) {
            const Modulus q(qv);
            const CheckReport r = check_pointwise_vi(q, ButterflyStage{Zq(tw, q)});
            ASSERT_EQ(r.verdict, Verdict::Fail);
            const Witness& w = *r.witness;
            const auto wires = [&](std::uint64_t a, std::uint64_t b) {
                return oracle::butterfly(qv, tw, oracle::sub(a, w.at("a1"), qv), w.at("a1"),
                                         oracle::sub(b, w.at("b1"), qv), w.at("b1"), w.at("m"));
            };
            const int wire = static_cast<int>(w.at("wire"));
            EXPECT_EQ(wires(w.at("a"), w.at("b"))[wire], w.at("value"));
            EXPECT_EQ(wires(w.at("a_prime"), w.at("b_prime"))[wire], w.at("value_prime"));
            EXPECT_NE(w.at("value"), w.at("value_prime"));
        }
    }
}

TEST(Pointwise, DegenerateAndBounded) {
    const Modulus one(1);
    const CheckReport r = check_pointwise_vi(one, ButterflyStage{Zq::zero(one)});
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_FALSE(r.witness);
    const Modulus q(5);
    const CheckReport bounded = check_pointwise_vi(q, ButterflyStage{Zq::one(q)}, 1);
    EXPECT_EQ(bounded.verdict, Verdict::Inconclusive);
}

TEST(WireCount, MatchesBruteForce) {
    for (std::uint64_t qv = 1; qv <= 6; ++qv) {
        const Modulus q(qv);
        CounterRng rng(11, qv);
        for (int t = 0; t < 50; ++t) {
            const std::array<std::uint64_t, 4> s{rng.uniform(qv), rng.uniform(qv), rng.uniform(qv), rng.uniform(qv)};
            const std::uint64_t tw = rng.uniform(qv);
            const ButterflyStage stage{Zq(tw, q)};
            const ShareQuad shares = quad(q, s[0], s[1], s[2], s[3]);
            for (std::uint64_t v = 0; v < qv; ++v) {
                const std::array<Zq, 4> targets{Zq(v, q), Zq(v, q), Zq(v, q), Zq(v, q)};
                const auto all = wire_preimage_counts(stage, shares, targets);
                for (int wire = 0; wire < 4; ++wire) {
                    const std::uint64_t expected = brute_count(qv, tw, s, wire, v);
                    ASSERT_EQ(expected, 1u);
                    ASSERT_EQ(wire_preimage_count(stage, WireIndex(wire), shares, Zq(v, q)), expected);
                    ASSERT_EQ(wire_preimage_count(reference_gadget(), stage, WireIndex(wire), shares, Zq(v, q)),
                              expected);
                    ASSERT_EQ(all[wire], expected);
                }
            }
        }
    }
}

TEST(WireCount, LargeModulusSampled) {
    const Modulus q(8380417);
    CounterRng rng(5, 0);
    for (int t = 0; t < 3; ++t) {
        const ButterflyStage stage{rng.element(q)};
        const ShareQuad s{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        const std::array<Zq, 4> targets{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        const auto counts = wire_preimage_counts(stage, s, targets);
        for (auto c : counts) EXPECT_EQ(c, 1u);
    }
}

TEST(WireCount, CheckerPassesAndMutantFails) {
    const Modulus q(6);
    for (std::uint64_t tw = 0; tw < 6; ++tw) {
        const CheckReport r = check_butterfly_wire_count(ButterflyStage{Zq(tw, q)}, quad(q, 1, 2, 3, 4));
        EXPECT_EQ(r.verdict, Verdict::Pass);
        EXPECT_EQ(r.mode, Mode::Exhaustive);
    }
    const Modulus five(5);
    const ShareQuad s = quad(five, 2, 1, 3, 1);  // a = 3, b = 4
    const CheckReport bad = check_butterfly_wire_count(ButterflyStage{Zq(2, five)}, s, {}, mask_dropping_gadget());
    ASSERT_EQ(bad.verdict, Verdict::Fail);
    // wire0 is the constant c = a + tw*b = 3 + 8 = 1: q preimages at v = c.
    EXPECT_EQ(bad.witness->at("wire"), 0u);
    EXPECT_EQ(bad.witness->at("v"), 1u);
    EXPECT_EQ(bad.witness->at("count"), 5u);
}

TEST(WireCount, SampledModeAboveDenseLimit) {
    const Modulus q((std::uint64_t{1} << 25) + 35);  // just above the dense limit
    CheckOptions opts;
    opts.samples = 2;
    const CheckReport r = check_butterfly_wire_count(ButterflyStage{Zq(3, q)}, quad(q, 1, 2, 3, 4), opts);
    EXPECT_EQ(r.mode, Mode::Sampled);
    EXPECT_EQ(r.verdict, Verdict::SampledPass);
    EXPECT_EQ(r.seed, 0u);
}

TEST(MarginalVI, SeparatesFromPointwise) {
    for (std::uint64_t qv : {2ull, 3ull, 5ull, 6ull, 7ull, 17ull, 3329ull}) {
        const Modulus q(qv);
        const ButterflyStage stage{Zq::one(q)};
        CheckReport pointwise = check_pointwise_vi(q, stage, std::uint64_t{1} << 20);
        EXPECT_EQ(pointwise.verdict, Verdict::Fail) << qv;
        const CheckReport marginal = check_marginal_vi(stage, Zq::zero(q), Zq::zero(q), Secrets{Zq(0, q), Zq(0, q)},
                                                       Secrets{Zq(1, q), Zq(0, q)});
        EXPECT_EQ(marginal.verdict, Verdict::Pass) << qv;
    }
}

TEST(MarginalVI, MutantFails) {
    const Modulus q(5);
    const CheckReport r = check_marginal_vi(ButterflyStage{Zq::one(q)}, Zq::zero(q), Zq::zero(q),
                                            Secrets{Zq(0, q), Zq(0, q)}, Secrets{Zq(1, q), Zq(0, q)}, {},
                                            mask_dropping_gadget());
    EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(SecondOrder, DifferenceIsTwiceTwTimesB) {
    for (std::uint64_t qv = 1; qv <= 9; ++qv) {
        const Modulus q(qv);
        CounterRng rng(2, qv);
        for (int t = 0; t < 30; ++t) {
            const std::uint64_t tw = rng.uniform(qv);
            const std::array<std::uint64_t, 4> s{rng.uniform(qv), rng.uniform(qv), rng.uniform(qv), rng.uniform(qv)};
            const CheckReport r = second_order_leak_demo(ButterflyStage{Zq(tw, q)}, quad(q, s[0], s[1], s[2], s[3]));
            ASSERT_EQ(r.verdict, Verdict::SecondOrderLeak);
            const std::uint64_t b = oracle::add(s[2], s[3], qv);
            ASSERT_EQ(r.witness->at("difference"), oracle::mul(2 * tw % qv, b, qv));
            for (std::uint64_t m = 0; m < qv; ++m) {
                const auto w = oracle::butterfly(qv, tw, s[0], s[1], s[2], s[3], m);
                ASSERT_EQ(oracle::sub(w[0], w[2], qv), r.witness->at("difference"));
            }
            ASSERT_FALSE(r.notes.empty());
        }
    }
}

TEST(WireFunctions, BuiltinsClassify) {
    const Modulus q(5);
    const auto vi = [](const WireFunctionR& w) { return check_value_independent_r(w).verdict; };
    const auto cm = [](const WireFunctionR& w) { return check_constant_marginal(w).verdict; };
    EXPECT_EQ(vi(WireFunctionR::mask_share(q)), Verdict::Pass);
    EXPECT_EQ(cm(WireFunctionR::mask_share(q)), Verdict::Pass);
    EXPECT_EQ(vi(WireFunctionR::masked_share(q)), Verdict::Fail);
    EXPECT_EQ(cm(WireFunctionR::masked_share(q)), Verdict::Pass);
    EXPECT_EQ(vi(WireFunctionR::reconstruction(q)), Verdict::Fail);
    EXPECT_EQ(cm(WireFunctionR::reconstruction(q)), Verdict::Fail);
    const auto wire0 = WireFunctionR::butterfly_wire(ButterflyStage{Zq::one(q)}, WireIndex(0), Zq(0, q), Zq(0, q));
    EXPECT_EQ(vi(wire0), Verdict::Fail);
    EXPECT_EQ(cm(wire0), Verdict::Pass);
}

TEST(WireFunctions, HistogramMatchesDefinition) {
    const Modulus q(4);
    std::vector<std::uint64_t> table(4 * 4 * 3);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = (i * 7 + 3) % 5;
    const auto w = WireFunctionR::from_table(q, 3, table);
    for (std::uint64_t x = 0; x < 4; ++x) {
        const Histogram h = marginal_histogram_r(w, Zq(x, q));
        std::map<std::uint64_t, std::uint64_t> expected;
        for (std::uint64_t s1 = 0; s1 < 4; ++s1) {
            for (std::uint64_t r = 0; r < 3; ++r) ++expected[table[(oracle::sub(x, s1, 4) * 4 + s1) * 3 + r]];
        }
        EXPECT_EQ(h.counts, expected);
        EXPECT_EQ(h.domain_size, 12u);
    }
    EXPECT_THROW(WireFunctionR::from_table(q, 3, std::vector<std::uint64_t>(5)), std::invalid_argument);
}

TEST(WireFunctions, EmptyRandomnessIsVacuous) {
    const auto w = WireFunctionR::from_table(Modulus(3), 0, {});
    EXPECT_EQ(check_value_independent_r(w).verdict, Verdict::Pass);
    EXPECT_EQ(check_constant_marginal(w).verdict, Verdict::Pass);
}

TEST(FullMarginal, FortyNinePerValue) {
    const Modulus q(7);
    for (std::uint64_t tw = 0; tw < 7; ++tw) {
        for (std::uint64_t a : {0ull, 1ull, 6ull}) {
            const auto h = full_joint_marginal(ButterflyStage{Zq(tw, q)}, Secrets{Zq(a, q), Zq(3, q)});
            for (const auto& wire : h) {
                ASSERT_EQ(wire.domain_size, 343u);
                for (std::uint64_t v = 0; v < 7; ++v) ASSERT_EQ(wire.count(v), 49u);
            }
        }
    }
}

TEST(FullMarginal, SingleStageCheck) {
    const Modulus q(7);
    const CheckReport r = check_single_stage_full_marginal(q, ButterflyStage{Zq(3, q)}, Zq(2, q), Zq(5, q),
                                                           Secrets{Zq(0, q), Zq(0, q)}, Secrets{Zq(4, q), Zq(6, q)});
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_EQ(r.contexts_checked, 4u * 2 * 7);
}
