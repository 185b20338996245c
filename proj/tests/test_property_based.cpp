// Randomised invariants. Each generator is seeded, so a failure reproduces
// from the printed case index.
#include <gtest/gtest.h>

#include "maskcheck/information.hpp"
#include "maskcheck/properties.hpp"
#include "maskcheck/rng.hpp"
#include "maskcheck/scenario.hpp"
#include "oracle.hpp"

using namespace maskcheck;

namespace {

const std::uint64_t kModuli[] = {1, 2, 5, 7, 3329, 8380417};

enum class TableKind { Random, IgnoresMaskedShare, ConstantMarginal };

// Three families: arbitrary tables, tables that read only (s1, r), and
// tables of the form g(s0 + s1 + r) with rho = q, which are uniform in every
// row but generally not value-independent.
WireFunctionR random_table(CounterRng& rng, std::uint64_t q, std::uint64_t rho, TableKind kind) {
    std::vector<std::uint64_t> table(q * q * rho);
    std::vector<std::uint64_t> by_mask(q * rho), by_sum(q);
    for (auto& v : by_mask) v = rng.uniform(4);
    for (auto& v : by_sum) v = rng.uniform(q);
    for (std::uint64_t s0 = 0; s0 < q; ++s0) {
        for (std::uint64_t s1 = 0; s1 < q; ++s1) {
            for (std::uint64_t r = 0; r < rho; ++r) {
                std::uint64_t& out = table[(s0 * q + s1) * rho + r];
                switch (kind) {
                    case TableKind::Random: out = rng.uniform(3); break;
                    case TableKind::IgnoresMaskedShare: out = by_mask[s1 * rho + r]; break;
                    case TableKind::ConstantMarginal: out = by_sum[(s0 + s1 + r) % q]; break;
                }
            }
        }
    }
    return WireFunctionR::from_table(Modulus(q), rho, std::move(table));
}

}  // namespace

TEST(RingAxioms, HoldOnRandomTriples) {
    for (std::uint64_t qv : kModuli) {
        const Modulus q(qv);
        CounterRng rng(qv, 1);
        const Zq zero = Zq::zero(q), one = Zq::one(q);
        for (int t = 0; t < 10000; ++t) {
            const Zq a = rng.element(q), b = rng.element(q), c = rng.element(q);
            ASSERT_EQ(a + b, b + a);
            ASSERT_EQ(a * b, b * a);
            ASSERT_EQ((a + b) + c, a + (b + c));
            ASSERT_EQ((a * b) * c, a * (b * c));
            ASSERT_EQ(a * (b + c), a * b + a * c);
            ASSERT_EQ(a + zero, a);
            ASSERT_EQ(a * one, a);
            ASSERT_EQ(a + (-a), zero);
            ASSERT_EQ(a - b, a + (-b));
            ASSERT_LT((a * b).value(), qv);
            ASSERT_LT((a - b).value(), qv);
            ASSERT_EQ((a * b).value(), oracle::mul(a.value(), b.value(), qv));
        }
    }
}

TEST(RingAxioms, ConstructionIsCanonical) {
    for (std::uint64_t qv : kModuli) {
        const Modulus q(qv);
        CounterRng rng(qv, 2);
        for (int t = 0; t < 10000; ++t) {
            const std::uint64_t x = rng.next();
            ASSERT_EQ(Zq(x, q).value(), x % qv);
            ASSERT_EQ(Zq(x, q), Zq(x % qv, q));
            const auto s = static_cast<std::int64_t>(x);
            ASSERT_EQ(Zq::from_signed(s, q).value(), oracle::mod(s, qv));
        }
    }
}

// Value independence implies constant marginals, and constant marginals are
// exactly zero mutual information between secret and wire.
TEST(Bridge, RandomTables) {
    CounterRng rng(99, 0);
    int vi_seen = 0, cm_only_seen = 0;
    for (int t = 0; t < 600; ++t) {
        const std::uint64_t q = 1 + rng.uniform(5);
        const auto kind = static_cast<TableKind>(t % 3);
        const std::uint64_t rho = kind == TableKind::ConstantMarginal ? q : 1 + rng.uniform(3);
        const WireFunctionR w = random_table(rng, q, rho, kind);
        const CheckReport vi = check_value_independent_r(w);
        const CheckReport cm = check_constant_marginal(w);
        const MutualInfo mi = mutual_information(joint_counts(w));
        if (vi.verdict == Verdict::Pass) {
            ++vi_seen;
            ASSERT_EQ(cm.verdict, Verdict::Pass) << "case " << t;
        }
        if (cm.verdict == Verdict::Pass && vi.verdict != Verdict::Pass) ++cm_only_seen;
        ASSERT_EQ(cm.verdict == Verdict::Pass, mi.is_zero) << "case " << t;
        ASSERT_EQ(mi.is_zero, mi.bits == 0.0);
        if (kind == TableKind::IgnoresMaskedShare) ASSERT_EQ(vi.verdict, Verdict::Pass) << "case " << t;
        if (kind == TableKind::ConstantMarginal) ASSERT_EQ(cm.verdict, Verdict::Pass) << "case " << t;
    }
    EXPECT_GT(vi_seen, 0);
    EXPECT_GT(cm_only_seen, 0);
}

TEST(Bridge, WitnessesAreThreadIndependent) {
    CounterRng rng(5, 5);
    for (int t = 0; t < 100; ++t) {
        const std::uint64_t q = 2 + rng.uniform(4);
        const WireFunctionR w = random_table(rng, q, 1 + rng.uniform(3), TableKind::Random);
        CheckOptions one, many;
        many.threads = 4;
        const CheckReport a = check_value_independent_r(w, one);
        const CheckReport b = check_value_independent_r(w, many);
        ASSERT_EQ(a.verdict, b.verdict);
        ASSERT_EQ(a.witness, b.witness) << "case " << t;
        const CheckReport c = check_constant_marginal(w, one);
        const CheckReport d = check_constant_marginal(w, many);
        ASSERT_EQ(c.verdict, d.verdict);
        ASSERT_EQ(c.witness, d.witness) << "case " << t;
    }
}

TEST(Butterfly, MutantWitnessIsThreadIndependent) {
    CounterRng rng(6, 6);
    for (int t = 0; t < 50; ++t) {
        const std::uint64_t qv = 2 + rng.uniform(40);
        const Modulus q(qv);
        const ButterflyStage stage{rng.element(q)};
        const ShareQuad shares{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        CheckOptions one, many;
        many.threads = 3;
        const auto a = check_butterfly_wire_count(stage, shares, one, mask_dropping_gadget());
        const auto b = check_butterfly_wire_count(stage, shares, many, mask_dropping_gadget());
        ASSERT_EQ(a.verdict, Verdict::Fail);
        ASSERT_EQ(a.witness, b.witness);
        ASSERT_EQ(a.witness->at("count"), qv);
    }
}

// Wire-count uniformity on random stages and sharings, checked against a
// direct count with the oracle butterfly.
TEST(Butterfly, EveryWireIsUniformOverTheMask) {
    CounterRng rng(7, 7);
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t qv = 1 + rng.uniform(30);
        const Modulus q(qv);
        const ButterflyStage stage{rng.element(q)};
        const ShareQuad s{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        ASSERT_EQ(check_butterfly_wire_count(stage, s).verdict, Verdict::Pass);
        std::vector<std::array<int, 4>> counts(qv);
        for (std::uint64_t m = 0; m < qv; ++m) {
            const auto w = oracle::butterfly(qv, stage.tw.value(), s.a0.value(), s.a1.value(), s.b0.value(),
                                             s.b1.value(), m);
            for (int i = 0; i < 4; ++i) ++counts[w[i]][i];
        }
        for (const auto& c : counts) ASSERT_EQ(c, (std::array<int, 4>{1, 1, 1, 1}));
    }
}

// With every stage fresh, no probe separates two random secrets; with
// nothing fresh, a probe separates them exactly when its plain value does.
TEST(Policies, FreshHidesAndUnmaskedExposes) {
    CounterRng rng(8, 8);
    for (int t = 0; t < 40; ++t) {
        const std::uint64_t qv = 2 + rng.uniform(6);
        const std::size_t k = 1 + rng.uniform(3);
        const Modulus q(qv);
        std::vector<std::uint64_t> tws;
        for (std::size_t i = 0; i < k; ++i) tws.push_back(rng.uniform(qv));
        const NttPipeline p = NttPipeline::from_twiddles(q, tws);
        const SecretPair pair{PipelineInput::from_values(q, rng.uniform(qv), rng.uniform(qv), rng.uniform(qv),
                                                         rng.uniform(qv)),
                              PipelineInput::from_values(q, rng.uniform(qv), rng.uniform(qv), rng.uniform(qv),
                                                         rng.uniform(qv))};
        const std::span<const SecretPair> pairs(&pair, 1);
        ASSERT_TRUE(assess_leakage(p, MaskingPolicy::fresh(k), pairs, {}, true).all_uniform()) << "case " << t;

        const auto bare = assess_leakage(p, MaskingPolicy::unmasked(k), pairs);
        const auto plain0 = oracle::plain_lane(qv, tws, pair.first.a.value(), pair.first.b.value());
        const auto plain1 = oracle::plain_lane(qv, tws, pair.second.a.value(), pair.second.b.value());
        for (const auto& w : bare.wires) {
            if (w.probe.index % 2 == 1) {
                ASSERT_EQ(w.verdict, LeakageVerdict::Uniform);
                continue;
            }
            const int out = w.probe.index / 2;
            const bool differs = plain0[w.probe.stage][out] != plain1[w.probe.stage][out];
            ASSERT_EQ(w.verdict == LeakageVerdict::SecretDependent, differs) << "case " << t << " " << w.probe.label();
        }
    }
}

TEST(Information, NonNegativeAndBoundedByLogOfRows) {
    CounterRng rng(9, 9);
    for (int t = 0; t < 500; ++t) {
        JointCounts j;
        const auto rows = 1 + rng.uniform(6);
        for (std::uint64_t r = 0; r < rows; ++r) {
            Histogram h;
            h.add(rng.uniform(5), 1 + rng.uniform(9));
            h.add(rng.uniform(5), rng.uniform(9));
            j.rows.push_back(h);
        }
        const MutualInfo mi = mutual_information(j);
        ASSERT_GE(mi.bits, 0.0);
        ASSERT_LE(mi.bits, std::log2(double(rows)) + 1e-9);
    }
}
