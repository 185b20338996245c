#include "maskcheck/properties.hpp"

#include <stdexcept>
#include <string>

#include "maskcheck/parallel.hpp"
#include "maskcheck/rng.hpp"

namespace maskcheck {

// ---------------------------------------------------------------------------
// WireFunctionR
// ---------------------------------------------------------------------------

WireFunctionR::WireFunctionR(Modulus q, std::uint64_t rho, Fn fn, std::string name)
    : q_(q), rho_(rho), fn_(std::move(fn)), name_(std::move(name)) {
    if (!fn_) throw std::invalid_argument("wire function must be callable");
}

WireFunctionR WireFunctionR::from_table(Modulus q, std::uint64_t rho,
                                        std::vector<std::uint64_t> table, std::string name) {
    const std::uint64_t qv = q.value();
    if (table.size() != qv * qv * rho) {
        throw std::invalid_argument("wire table has " + std::to_string(table.size()) +
                                    " entries, expected q*q*rho = " + std::to_string(qv * qv * rho));
    }
    auto fn = [qv, rho, t = std::move(table)](const Zq& s0, const Zq& s1, std::uint64_t r) {
        return t[(s0.value() * qv + s1.value()) * rho + r];
    };
    return WireFunctionR(q, rho, std::move(fn), std::move(name));
}

WireFunctionR WireFunctionR::mask_share(Modulus q) {
    return WireFunctionR(
        q, 1, [](const Zq&, const Zq& s1, std::uint64_t) { return s1.value(); }, "mask_share");
}

WireFunctionR WireFunctionR::masked_share(Modulus q) {
    return WireFunctionR(
        q, 1, [](const Zq& s0, const Zq&, std::uint64_t) { return s0.value(); }, "masked_share");
}

WireFunctionR WireFunctionR::reconstruction(Modulus q) {
    return WireFunctionR(
        q, 1, [](const Zq& s0, const Zq& s1, std::uint64_t) { return (s0 + s1).value(); },
        "reconstruction");
}

WireFunctionR WireFunctionR::butterfly_wire(const ButterflyStage& stage, WireIndex wire,
                                            const Zq& b0, const Zq& b1) {
    const Modulus q = stage.tw.modulus();
    require_same_modulus(stage.tw, b0);
    require_same_modulus(stage.tw, b1);
    auto fn = [stage, wire, b0, b1, q](const Zq& s0, const Zq& s1, std::uint64_t r) {
        return select_wire(wire, butterfly_output(stage, ShareQuad{s0, s1, b0, b1}, Zq(r, q))).value();
    };
    return WireFunctionR(q, q.value(), std::move(fn), "butterfly_wire" + std::to_string(wire.value()));
}

Histogram marginal_histogram_r(const WireFunctionR& w, const Zq& x) {
    const Modulus q = w.modulus();
    if (!(x.modulus() == q)) throw ModulusMismatch(q.value(), x.modulus().value());
    Histogram h;
    for (std::uint64_t s1v = 0; s1v < q.value(); ++s1v) {
        const Zq s1(s1v, q);
        const Zq s0 = x - s1;
        for (std::uint64_t r = 0; r < w.rho(); ++r) h.add(w(s0, s1, r));
    }
    return h;
}

JointCounts joint_counts(const WireFunctionR& w) {
    JointCounts joint;
    joint.rows.reserve(w.modulus().value());
    for (std::uint64_t x = 0; x < w.modulus().value(); ++x) {
        joint.rows.push_back(marginal_histogram_r(w, Zq(x, w.modulus())));
    }
    return joint;
}

CheckReport check_value_independent_r(const WireFunctionR& w, const CheckOptions& opts) {
    CheckReport report;
    report.property_name = "value_independent_r";
    ScopedTimer timer(report);

    const Modulus q = w.modulus();
    const std::uint64_t qv = q.value();
    if (w.rho() == 0) {
        report.verdict = Verdict::Pass;
        report.notes.push_back("rho = 0: no randomness values, property holds vacuously");
        return report;
    }

    auto differs = [&](std::uint64_t s1v, std::uint64_t r, std::uint64_t x, std::uint64_t xp,
                       std::uint64_t& wx, std::uint64_t& wxp) {
        const Zq s1(s1v, q);
        wx = w(Zq(x, q) - s1, s1, r);
        wxp = w(Zq(xp, q) - s1, s1, r);
        return wx != wxp;
    };
    auto fail_with = [&](std::uint64_t s1, std::uint64_t r, std::uint64_t x, std::uint64_t xp,
                         std::uint64_t wx, std::uint64_t wxp) {
        report.verdict = Verdict::Fail;
        Witness wit;
        wit.set("s1", s1).set("r", r).set("x", x).set("x_prime", xp).set("value", wx).set(
            "value_prime", wxp);
        report.witness = wit;
    };

    const std::uint64_t domain = saturating_mul(saturating_pow(qv, 3), w.rho());
    if (domain <= opts.max_exhaustive) {
        report.mode = Mode::Exhaustive;
        std::uint64_t checked = 0;
        for (std::uint64_t s1 = 0; s1 < qv; ++s1) {
            for (std::uint64_t r = 0; r < w.rho(); ++r) {
                for (std::uint64_t x = 0; x < qv; ++x) {
                    for (std::uint64_t xp = 0; xp < qv; ++xp) {
                        ++checked;
                        std::uint64_t wx = 0;
                        std::uint64_t wxp = 0;
                        if (differs(s1, r, x, xp, wx, wxp)) {
                            report.contexts_checked = checked;
                            fail_with(s1, r, x, xp, wx, wxp);
                            return report;
                        }
                    }
                }
            }
        }
        report.contexts_checked = checked;
        report.verdict = Verdict::Pass;
        return report;
    }

    report.mode = Mode::Sampled;
    report.seed = opts.seed;
    CounterRng rng(opts.seed, 0x71);
    for (std::uint64_t s = 0; s < opts.samples; ++s) {
        const std::uint64_t s1 = rng.uniform(qv);
        const std::uint64_t r = rng.uniform(w.rho());
        const std::uint64_t x = rng.uniform(qv);
        const std::uint64_t xp = rng.uniform(qv);
        std::uint64_t wx = 0;
        std::uint64_t wxp = 0;
        report.contexts_checked = s + 1;
        if (differs(s1, r, x, xp, wx, wxp)) {
            fail_with(s1, r, x, xp, wx, wxp);
            return report;
        }
    }
    report.verdict = Verdict::SampledPass;
    return report;
}

CheckReport check_constant_marginal(const WireFunctionR& w, const CheckOptions& opts) {
    CheckReport report;
    report.property_name = "constant_marginal_r";
    ScopedTimer timer(report);

    const Modulus q = w.modulus();
    const std::uint64_t qv = q.value();
    const std::uint64_t per_histogram = qv * w.rho();

    std::vector<std::uint64_t> secrets;
    if (saturating_mul(per_histogram, qv) <= opts.max_exhaustive) {
        report.mode = Mode::Exhaustive;
        for (std::uint64_t x = 1; x < qv; ++x) secrets.push_back(x);
    } else if (per_histogram <= opts.max_exhaustive) {
        report.mode = Mode::Sampled;
        report.seed = opts.seed;
        CounterRng rng(opts.seed, 0xc0);
        for (std::uint64_t s = 0; s < opts.samples && qv > 1; ++s) secrets.push_back(1 + rng.uniform(qv - 1));
    } else {
        report.mode = Mode::Sampled;
        report.verdict = Verdict::Inconclusive;
        report.notes.push_back("a single marginal histogram exceeds the enumeration budget");
        return report;
    }

    const Histogram base = marginal_histogram_r(w, Zq::zero(q));
    report.contexts_checked = base.domain_size;
    for (std::uint64_t x : secrets) {
        const Histogram h = marginal_histogram_r(w, Zq(x, q));
        report.contexts_checked += h.domain_size;
        if (h == base) continue;
        // First value, in increasing order, whose counts differ.
        std::uint64_t value = 0;
        auto it0 = base.counts.begin();
        auto it1 = h.counts.begin();
        for (;;) {
            const bool end0 = it0 == base.counts.end();
            const bool end1 = it1 == h.counts.end();
            const std::uint64_t v0 = end0 ? ~0ull : it0->first;
            const std::uint64_t v1 = end1 ? ~0ull : it1->first;
            value = std::min(v0, v1);
            if (base.count(value) != h.count(value)) break;
            if (v0 == value) ++it0;
            if (v1 == value) ++it1;
        }
        report.verdict = Verdict::Fail;
        Witness wit;
        wit.set("x", 0).set("x_prime", x).set("value", value).set("count", base.count(value)).set(
            "count_prime", h.count(value));
        report.witness = wit;
        return report;
    }
    report.verdict = report.mode == Mode::Exhaustive ? Verdict::Pass : Verdict::SampledPass;
    return report;
}

// ---------------------------------------------------------------------------
// Single butterfly.
// ---------------------------------------------------------------------------

CheckReport check_pointwise_vi(Modulus q, const ButterflyStage& stage,
                               std::optional<std::uint64_t> search_bound) {
    if (!(stage.tw.modulus() == q)) throw ModulusMismatch(q.value(), stage.tw.modulus().value());

    CheckReport report;
    report.property_name = "pointwise_value_independence";
    report.mode = Mode::Exhaustive;
    ScopedTimer timer(report);

    const std::uint64_t qv = q.value();
    std::uint64_t tried = 0;
    for (WireIndex wire : WireIndex::all()) {
        for (int vary_b = 0; vary_b < 2; ++vary_b) {
            for (std::uint64_t a1 = 0; a1 < qv; ++a1) {
                for (std::uint64_t b1 = 0; b1 < qv; ++b1) {
                    for (std::uint64_t m = 0; m < qv; ++m) {
                        for (std::uint64_t a = 0; a < qv; ++a) {
                            for (std::uint64_t b = 0; b < qv; ++b) {
                                const auto in = PipelineInput::from_values(q, a, b, a1, b1);
                                const Zq mask(m, q);
                                const Zq value =
                                    select_wire(wire, butterfly_output(stage, initial_shares(in), mask));
                                for (std::uint64_t primed = 0; primed < qv; ++primed) {
                                    if (search_bound && tried >= *search_bound) {
                                        report.verdict = Verdict::Inconclusive;
                                        report.contexts_checked = tried;
                                        report.notes.push_back("search bound exhausted");
                                        return report;
                                    }
                                    ++tried;
                                    const std::uint64_t ap = vary_b ? a : primed;
                                    const std::uint64_t bp = vary_b ? primed : b;
                                    const auto in_p = PipelineInput::from_values(q, ap, bp, a1, b1);
                                    const Zq value_p = select_wire(
                                        wire, butterfly_output(stage, initial_shares(in_p), mask));
                                    if (value_p == value) continue;
                                    report.verdict = Verdict::Fail;
                                    report.contexts_checked = tried;
                                    Witness w;
                                    w.set("wire", static_cast<std::uint64_t>(wire.value()))
                                        .set("a1", a1)
                                        .set("b1", b1)
                                        .set("m", m)
                                        .set("a", a)
                                        .set("b", b)
                                        .set("a_prime", ap)
                                        .set("b_prime", bp)
                                        .set("value", value.value())
                                        .set("value_prime", value_p.value());
                                    report.witness = w;
                                    return report;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report.verdict = Verdict::Pass;
    report.contexts_checked = tried;
    if (qv == 1) report.notes.push_back("degenerate ring Z_1: every wire is constant");
    return report;
}

namespace {

void require_stage_shares(const ButterflyStage& stage, const ShareQuad& shares) {
    require_same_modulus(stage.tw, shares.a0);
    require_same_modulus(stage.tw, shares.a1);
    require_same_modulus(stage.tw, shares.b0);
    require_same_modulus(stage.tw, shares.b1);
}

}  // namespace

std::uint64_t wire_preimage_count(const ButterflyStage& stage, WireIndex wire,
                                  const ShareQuad& shares, const Zq& v) {
    require_stage_shares(stage, shares);
    require_same_modulus(stage.tw, v);
    const Modulus q = stage.tw.modulus();
    const Zq one = Zq::one(q);
    std::uint64_t count = 0;
    Zq m = Zq::zero(q);
    for (std::uint64_t i = 0; i < q.value(); ++i, m += one) {
        if (select_wire(wire, butterfly_output(stage, shares, m)) == v) ++count;
    }
    return count;
}

std::uint64_t wire_preimage_count(const ButterflyGadget& gadget, const ButterflyStage& stage,
                                  WireIndex wire, const ShareQuad& shares, const Zq& v) {
    require_stage_shares(stage, shares);
    require_same_modulus(stage.tw, v);
    const Modulus q = stage.tw.modulus();
    const Zq one = Zq::one(q);
    std::uint64_t count = 0;
    Zq m = Zq::zero(q);
    for (std::uint64_t i = 0; i < q.value(); ++i, m += one) {
        if (select_wire(wire, gadget(stage, shares, m)) == v) ++count;
    }
    return count;
}

std::array<std::uint64_t, 4> wire_preimage_counts(const ButterflyStage& stage,
                                                  const ShareQuad& shares,
                                                  const std::array<Zq, 4>& targets) {
    require_stage_shares(stage, shares);
    for (const Zq& t : targets) require_same_modulus(stage.tw, t);
    const std::uint64_t qv = stage.tw.modulus().value();
    // The mask-free part of each output is fixed; only the mask moves.
    const auto [a_out, b_out] = plain_butterfly(stage, reconstruct_a(shares), reconstruct_b(shares));
    const std::uint64_t top = a_out.value();
    const std::uint64_t bottom = b_out.value();
    const std::uint64_t t0 = targets[0].value();
    const std::uint64_t t1 = targets[1].value();
    const std::uint64_t t2 = targets[2].value();
    const std::uint64_t t3 = targets[3].value();
    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t m = 0; m < qv; ++m) {
        const std::uint64_t w0 = top >= m ? top - m : top + qv - m;
        const std::uint64_t w2 = bottom >= m ? bottom - m : bottom + qv - m;
        counts[0] += w0 == t0;
        counts[1] += m == t1;
        counts[2] += w2 == t2;
        counts[3] += m == t3;
    }
    return counts;
}

std::array<std::vector<std::uint32_t>, 4> wire_mask_histograms(const ButterflyGadget& gadget,
                                                               const ButterflyStage& stage,
                                                               const ShareQuad& shares) {
    require_stage_shares(stage, shares);
    const Modulus q = stage.tw.modulus();
    if (q.value() > kDenseHistogramLimit) {
        throw std::invalid_argument("modulus too large for a dense mask histogram");
    }
    std::array<std::vector<std::uint32_t>, 4> hist;
    for (auto& h : hist) h.assign(q.value(), 0);
    const Zq one = Zq::one(q);
    Zq m = Zq::zero(q);
    auto tally = [&](const ButterflyWires& w) {
        ++hist[0][w.wire0.value()];
        ++hist[1][w.wire1.value()];
        ++hist[2][w.wire2.value()];
        ++hist[3][w.wire3.value()];
    };
    if (gadget) {
        for (std::uint64_t i = 0; i < q.value(); ++i, m += one) tally(gadget(stage, shares, m));
    } else {
        for (std::uint64_t i = 0; i < q.value(); ++i, m += one) tally(butterfly_output(stage, shares, m));
    }
    return hist;
}

CheckReport check_butterfly_wire_count(const ButterflyStage& stage, const ShareQuad& shares,
                                       const CheckOptions& opts, const ButterflyGadget& gadget) {
    CheckReport report;
    report.property_name = "butterfly_wire_count";
    ScopedTimer timer(report);
    const Modulus q = stage.tw.modulus();

    if (q.value() <= kDenseHistogramLimit) {
        report.mode = Mode::Exhaustive;
        const auto hist = wire_mask_histograms(gadget, stage, shares);
        report.contexts_checked = 4 * q.value();
        // Counts sum to q, so a wire with any count other than 1 has a value
        // hit more than once; that value is the more telling witness.
        for (int i = 0; i < 4; ++i) {
            for (std::uint64_t v = 0; v < q.value(); ++v) {
                if (hist[i][v] <= 1) continue;
                report.verdict = Verdict::Fail;
                Witness w;
                w.set("wire", static_cast<std::uint64_t>(i)).set("v", v).set("count", hist[i][v]);
                report.witness = w;
                return report;
            }
        }
        report.verdict = Verdict::Pass;
        return report;
    }

    report.mode = Mode::Sampled;
    report.seed = opts.seed;
    CounterRng rng(opts.seed, 0xb7);
    for (std::uint64_t s = 0; s < opts.samples; ++s) {
        for (WireIndex wire : WireIndex::all()) {
            const Zq v = rng.element(q);
            const std::uint64_t c = gadget ? wire_preimage_count(gadget, stage, wire, shares, v)
                                           : wire_preimage_count(stage, wire, shares, v);
            ++report.contexts_checked;
            if (c == 1) continue;
            report.verdict = Verdict::Fail;
            Witness w;
            w.set("wire", static_cast<std::uint64_t>(wire.value())).set("v", v.value()).set("count", c);
            report.witness = w;
            return report;
        }
    }
    report.verdict = Verdict::SampledPass;
    return report;
}

CheckReport check_marginal_vi(const ButterflyStage& stage, const Zq& a1, const Zq& b1,
                              const Secrets& secrets, const Secrets& secrets_prime,
                              const CheckOptions& opts, const ButterflyGadget& gadget) {
    CheckReport report;
    report.property_name = "butterfly_marginal_vi";
    ScopedTimer timer(report);
    const Modulus q = stage.tw.modulus();

    const auto shares_of = [&](const Secrets& s) {
        return initial_shares(PipelineInput{s.a, s.b, a1, b1});
    };
    const ShareQuad shares = shares_of(secrets);
    const ShareQuad shares_p = shares_of(secrets_prime);

    auto fail_with = [&](int wire, std::uint64_t v, std::uint64_t c, std::uint64_t cp) {
        report.verdict = Verdict::Fail;
        Witness w;
        w.set("wire", static_cast<std::uint64_t>(wire)).set("v", v).set("count", c).set("count_prime", cp);
        report.witness = w;
    };

    if (q.value() <= kDenseHistogramLimit) {
        report.mode = Mode::Exhaustive;
        const auto hist = wire_mask_histograms(gadget, stage, shares);
        const auto hist_p = wire_mask_histograms(gadget, stage, shares_p);
        report.contexts_checked = 4 * q.value();
        for (int i = 0; i < 4; ++i) {
            for (std::uint64_t v = 0; v < q.value(); ++v) {
                if (hist[i][v] == hist_p[i][v] && hist[i][v] == 1) continue;
                fail_with(i, v, hist[i][v], hist_p[i][v]);
                return report;
            }
        }
        report.verdict = Verdict::Pass;
        return report;
    }

    report.mode = Mode::Sampled;
    report.seed = opts.seed;
    CounterRng rng(opts.seed, 0x3a);
    const ButterflyGadget g = gadget ? gadget : reference_gadget();
    for (std::uint64_t s = 0; s < opts.samples; ++s) {
        const Zq v = rng.element(q);
        for (WireIndex wire : WireIndex::all()) {
            const std::uint64_t c = wire_preimage_count(g, stage, wire, shares, v);
            const std::uint64_t cp = wire_preimage_count(g, stage, wire, shares_p, v);
            ++report.contexts_checked;
            if (c == cp && c == 1) continue;
            fail_with(wire.value(), v.value(), c, cp);
            return report;
        }
    }
    report.verdict = Verdict::SampledPass;
    return report;
}

CheckReport second_order_leak_demo(const ButterflyStage& stage, const ShareQuad& shares) {
    require_stage_shares(stage, shares);
    CheckReport report;
    report.property_name = "second_order_shared_mask";
    report.mode = Mode::Exhaustive;
    ScopedTimer timer(report);

    const Modulus q = stage.tw.modulus();
    const Zq b = reconstruct_b(shares);
    const Zq expected = Zq(2, q) * stage.tw * b;
    const Zq one = Zq::one(q);
    Zq m = Zq::zero(q);
    for (std::uint64_t i = 0; i < q.value(); ++i, m += one) {
        const ButterflyWires w = butterfly_output(stage, shares, m);
        const Zq diff = w.wire0 - w.wire2;
        ++report.contexts_checked;
        if (diff == expected) continue;
        report.verdict = Verdict::Fail;
        Witness wit;
        wit.set("m", m.value()).set("difference", diff.value()).set("expected", expected.value());
        report.witness = wit;
        report.notes.push_back("wire0 - wire2 is not the predicted 2*tw*b: the gadget model is broken");
        return report;
    }
    report.verdict = Verdict::SecondOrderLeak;
    Witness wit;
    wit.set("tw", stage.tw.value())
        .set("a", reconstruct_a(shares).value())
        .set("b", b.value())
        .set("difference", expected.value());
    report.witness = wit;
    report.notes.push_back(
        "documented higher-order limitation, not a first-order failure: probing wire0 and wire2 "
        "together cancels the shared mask and reveals a' - b' = 2*tw*b");
    return report;
}

// ---------------------------------------------------------------------------
// Pipelines.
// ---------------------------------------------------------------------------

Histogram pipeline_mask_histogram(const NttPipeline& p, const PipelineInput& input,
                                  const PipelineRandomness& context, std::size_t stage,
                                  WireIndex wire) {
    const Modulus q = p.modulus();
    Histogram h;
    for (std::uint64_t mv = 0; mv < q.value(); ++mv) {
        const auto rands = update_randomness(context, stage, RandomnessField::BfMask, Zq(mv, q));
        h.add(select_wire(wire, pipeline_state_at(p, rands, stage, input)).value());
    }
    return h;
}

CheckReport check_pipeline_uniform(const NttPipeline& p, const PipelineInput& input,
                                   const PipelineRandomness& context, std::size_t stage,
                                   WireIndex wire, const Zq& v) {
    CheckReport report;
    report.property_name = "pipeline_uniform";
    report.mode = Mode::Exhaustive;
    ScopedTimer timer(report);
    if (stage >= p.size()) throw std::out_of_range("stage index out of range");
    require_same_modulus(input.a, v);

    const Modulus q = p.modulus();
    std::uint64_t count = 0;
    for (std::uint64_t mv = 0; mv < q.value(); ++mv) {
        const auto rands = update_randomness(context, stage, RandomnessField::BfMask, Zq(mv, q));
        if (select_wire(wire, pipeline_state_at(p, rands, stage, input)) == v) ++count;
    }
    report.contexts_checked = q.value();
    if (count == 1) {
        report.verdict = Verdict::Pass;
    } else {
        report.verdict = Verdict::Fail;
        Witness w;
        w.set("stage", stage).set("wire", static_cast<std::uint64_t>(wire.value())).set("v", v.value()).set(
            "count", count);
        report.witness = w;
    }
    return report;
}

CheckReport check_pipeline_uniform_sweep(const NttPipeline& p, const PipelineInput& input,
                                         const CheckOptions& opts) {
    CheckReport report;
    report.property_name = "pipeline_uniform";
    ScopedTimer timer(report);

    const Modulus q = p.modulus();
    const std::size_t k = p.size();
    if (k == 0) {
        report.mode = Mode::Exhaustive;
        report.verdict = Verdict::Pass;
        report.notes.push_back("k = 0: no stage to observe, property holds vacuously");
        return report;
    }
    if (q.value() > kDenseHistogramLimit) {
        throw std::invalid_argument("modulus too large for the pipeline uniformity sweep");
    }

    const std::uint64_t domain = saturating_pow(q.value(), 3 * k);
    const bool exhaustive = domain <= opts.max_exhaustive;
    const std::uint64_t contexts = exhaustive ? domain : opts.samples;
    report.mode = exhaustive ? Mode::Exhaustive : Mode::Sampled;
    if (!exhaustive) report.seed = opts.seed;

    const auto context_at = [&](std::uint64_t c) {
        if (exhaustive) return PipelineRandomness::from_index(q, k, c);
        CounterRng rng(opts.seed, c);
        std::vector<std::uint64_t> values(3 * k);
        for (auto& v : values) v = rng.uniform(q.value());
        return PipelineRandomness::from_values(q, values);
    };

    // First (stage, wire, v) with a count other than 1 in context c.
    const auto first_bad = [&](std::uint64_t c) -> std::optional<Witness> {
        const PipelineRandomness context = context_at(c);
        std::array<std::vector<std::uint32_t>, 4> hist;
        for (std::size_t s = 0; s < k; ++s) {
            for (auto& h : hist) h.assign(q.value(), 0);
            for (std::uint64_t mv = 0; mv < q.value(); ++mv) {
                const auto rands = update_randomness(context, s, RandomnessField::BfMask, Zq(mv, q));
                const ButterflyWires w = pipeline_state_at(p, rands, s, input);
                ++hist[0][w.wire0.value()];
                ++hist[1][w.wire1.value()];
                ++hist[2][w.wire2.value()];
                ++hist[3][w.wire3.value()];
            }
            for (int i = 0; i < 4; ++i) {
                for (std::uint64_t v = 0; v < q.value(); ++v) {
                    if (hist[i][v] == 1) continue;
                    Witness w;
                    w.set("context", c).set("stage", s).set("wire", static_cast<std::uint64_t>(i)).set(
                        "v", v).set("count", hist[i][v]);
                    append_context(w, context, input);
                    return w;
                }
            }
        }
        return std::nullopt;
    };

    const auto first = find_first_failure(contexts, opts.threads,
                                          [&](std::uint64_t c) { return first_bad(c).has_value(); }, 16);
    const std::uint64_t cells = k * 4 * q.value();
    if (first) {
        report.verdict = Verdict::Fail;
        report.witness = first_bad(*first);
        report.contexts_checked = (*first + 1) * cells;
    } else {
        report.verdict = exhaustive ? Verdict::Pass : Verdict::SampledPass;
        report.contexts_checked = contexts * cells;
    }
    report.notes.push_back("contexts: " + std::to_string(contexts) + ", each (stage, wire) cell checks all " +
                           std::to_string(q.value()) + " output values");
    return report;
}

CheckReport check_single_stage_full_marginal(Modulus q, const ButterflyStage& stage, const Zq& a1,
                                             const Zq& b1, const Secrets& secrets,
                                             const Secrets& secrets_prime) {
    CheckReport report;
    report.property_name = "single_stage_full_marginal";
    report.mode = Mode::Exhaustive;
    ScopedTimer timer(report);

    const NttPipeline p(q, {stage});
    const PipelineRandomness context = PipelineRandomness::zero(q, 1);
    const PipelineInput in{secrets.a, secrets.b, a1, b1};
    const PipelineInput in_p{secrets_prime.a, secrets_prime.b, a1, b1};

    for (WireIndex wire : WireIndex::all()) {
        const Histogram h = pipeline_mask_histogram(p, in, context, 0, wire);
        const Histogram hp = pipeline_mask_histogram(p, in_p, context, 0, wire);
        report.contexts_checked += h.domain_size + hp.domain_size;
        for (std::uint64_t v = 0; v < q.value(); ++v) {
            if (h.count(v) == 1 && hp.count(v) == 1) continue;
            report.verdict = Verdict::Fail;
            Witness w;
            w.set("wire", static_cast<std::uint64_t>(wire.value())).set("v", v).set("count", h.count(v)).set(
                "count_prime", hp.count(v));
            report.witness = w;
            return report;
        }
    }
    report.verdict = Verdict::Pass;
    return report;
}

std::array<Histogram, 4> full_joint_marginal(const ButterflyStage& stage, const Secrets& secrets) {
    const Modulus q = stage.tw.modulus();
    const NttPipeline p(q, {stage});
    std::array<Histogram, 4> out;
    for (std::uint64_t a1 = 0; a1 < q.value(); ++a1) {
        for (std::uint64_t b1 = 0; b1 < q.value(); ++b1) {
            const PipelineInput in{secrets.a, secrets.b, Zq(a1, q), Zq(b1, q)};
            for (std::uint64_t m = 0; m < q.value(); ++m) {
                const auto rands = PipelineRandomness::from_values(q, std::vector<std::uint64_t>{m, 0, 0});
                const ButterflyWires w = pipeline_state_at(p, rands, 0, in);
                out[0].add(w.wire0.value());
                out[1].add(w.wire1.value());
                out[2].add(w.wire2.value());
                out[3].add(w.wire3.value());
            }
        }
    }
    return out;
}

}  // namespace maskcheck
