#include "maskcheck/pipeline.hpp"

#include <stdexcept>
#include <string>

#include "maskcheck/parallel.hpp"
#include "maskcheck/rng.hpp"

namespace maskcheck {

namespace {

void require_index(std::size_t i, std::size_t k, const char* what) {
    if (i >= k) {
        throw std::out_of_range(std::string(what) + " " + std::to_string(i) +
                                " out of range for " + std::to_string(k) + " stages");
    }
}

void require_modulus(Modulus expected, const Zq& x) {
    if (!(x.modulus() == expected)) throw ModulusMismatch(expected.value(), x.modulus().value());
}

}  // namespace

NttPipeline::NttPipeline(Modulus q, std::vector<ButterflyStage> stages)
    : q_(q), stages_(std::move(stages)) {
    for (const auto& s : stages_) require_modulus(q_, s.tw);
}

NttPipeline NttPipeline::from_twiddles(Modulus q, std::span<const std::uint64_t> twiddles) {
    std::vector<ButterflyStage> stages;
    stages.reserve(twiddles.size());
    for (std::uint64_t tw : twiddles) stages.push_back(ButterflyStage{Zq(tw, q)});
    return NttPipeline(q, std::move(stages));
}

std::vector<std::uint64_t> NttPipeline::twiddles() const {
    std::vector<std::uint64_t> out;
    out.reserve(stages_.size());
    for (const auto& s : stages_) out.push_back(s.tw.value());
    return out;
}

std::string_view to_string(RandomnessField f) {
    switch (f) {
        case RandomnessField::BfMask: return "bfMask";
        case RandomnessField::RemaskA: return "remaskA";
        case RandomnessField::RemaskB: return "remaskB";
    }
    return "bfMask";
}

Zq& field_ref(StageRandomness& s, RandomnessField f) {
    switch (f) {
        case RandomnessField::BfMask: return s.bf_mask;
        case RandomnessField::RemaskA: return s.remask_a;
        case RandomnessField::RemaskB: return s.remask_b;
    }
    return s.bf_mask;
}

const Zq& field_ref(const StageRandomness& s, RandomnessField f) {
    return field_ref(const_cast<StageRandomness&>(s), f);
}

PipelineRandomness::PipelineRandomness(Modulus q, std::vector<StageRandomness> per_stage)
    : q_(q), per_stage_(std::move(per_stage)) {
    for (const auto& s : per_stage_) {
        require_modulus(q_, s.bf_mask);
        require_modulus(q_, s.remask_a);
        require_modulus(q_, s.remask_b);
    }
}

PipelineRandomness PipelineRandomness::zero(Modulus q, std::size_t k) {
    const Zq z = Zq::zero(q);
    return PipelineRandomness(q, std::vector<StageRandomness>(k, StageRandomness{z, z, z}));
}

PipelineRandomness PipelineRandomness::from_values(Modulus q, std::span<const std::uint64_t> values) {
    if (values.size() % 3 != 0) {
        throw std::invalid_argument("randomness vector length must be a multiple of 3");
    }
    std::vector<StageRandomness> stages;
    stages.reserve(values.size() / 3);
    for (std::size_t s = 0; s < values.size(); s += 3) {
        stages.push_back(
            StageRandomness{Zq(values[s], q), Zq(values[s + 1], q), Zq(values[s + 2], q)});
    }
    return PipelineRandomness(q, std::move(stages));
}

PipelineRandomness PipelineRandomness::from_index(Modulus q, std::size_t k, std::uint64_t index) {
    std::vector<std::uint64_t> values(3 * k);
    for (std::size_t pos = values.size(); pos-- > 0;) {
        values[pos] = index % q.value();
        index /= q.value();
    }
    return from_values(q, values);
}

std::vector<std::uint64_t> PipelineRandomness::values() const {
    std::vector<std::uint64_t> out;
    out.reserve(3 * per_stage_.size());
    for (const auto& s : per_stage_) {
        out.push_back(s.bf_mask.value());
        out.push_back(s.remask_a.value());
        out.push_back(s.remask_b.value());
    }
    return out;
}

PipelineInput PipelineInput::from_values(Modulus q, std::uint64_t a, std::uint64_t b,
                                         std::uint64_t a1, std::uint64_t b1) {
    return PipelineInput{Zq(a, q), Zq(b, q), Zq(a1, q), Zq(b1, q)};
}

ShareQuad initial_shares(const PipelineInput& input) {
    const auto [a0, a1] = share(input.a, input.a1);
    const auto [b0, b1] = share(input.b, input.b1);
    return ShareQuad{a0, a1, b0, b1};
}

ButterflyWires pipeline_state_at(const NttPipeline& p, const PipelineRandomness& rands,
                                 std::size_t i, const PipelineInput& input) {
    require_index(i, p.size(), "stage");
    if (rands.size() != p.size()) {
        throw std::invalid_argument("randomness covers " + std::to_string(rands.size()) +
                                    " stages, pipeline has " + std::to_string(p.size()));
    }
    require_modulus(p.modulus(), input.a);
    require_modulus(p.modulus(), rands[0].bf_mask);

    ButterflyWires w = butterfly_output(p.stage(0), initial_shares(input), rands[0].bf_mask);
    for (std::size_t n = 0; n < i; ++n) {
        const ShareQuad next = remask(repack(w), rands[n].remask_a, rands[n].remask_b);
        w = butterfly_output(p.stage(n + 1), next, rands[n + 1].bf_mask);
    }
    return w;
}

std::vector<StageTrace> pipeline_trace(const NttPipeline& p, const PipelineRandomness& rands,
                                       const PipelineInput& input) {
    std::vector<StageTrace> out;
    if (p.size() == 0) return out;
    if (rands.size() != p.size()) {
        throw std::invalid_argument("randomness length does not match pipeline");
    }
    out.reserve(p.size());
    ShareQuad shares = initial_shares(input);
    for (std::size_t n = 0; n < p.size(); ++n) {
        const ButterflyWires w = butterfly_output(p.stage(n), shares, rands[n].bf_mask);
        shares = remask(repack(w), rands[n].remask_a, rands[n].remask_b);
        out.push_back(StageTrace{w, shares});
    }
    return out;
}

PipelineRandomness update_randomness(const PipelineRandomness& rands, std::size_t j,
                                     RandomnessField field, const Zq& value) {
    require_index(j, rands.size(), "stage");
    require_modulus(rands.modulus(), value);
    PipelineRandomness out = rands;
    field_ref(out.per_stage_[j], field) = value;
    return out;
}

void append_context(Witness& w, const PipelineRandomness& rands, const PipelineInput& input) {
    w.set("a", input.a.value()).set("b", input.b.value()).set("a1", input.a1.value()).set("b1", input.b1.value());
    for (std::size_t s = 0; s < rands.size(); ++s) {
        for (RandomnessField f : kAllFields) {
            w.set(std::string(to_string(f)) + "." + std::to_string(s), field_ref(rands[s], f).value());
        }
    }
}

std::pair<PipelineRandomness, PipelineInput> context_from_witness(const Witness& w, Modulus q,
                                                                  std::size_t k) {
    const auto need = [&](const std::string& name) {
        const auto v = w.get(name);
        if (!v) throw std::invalid_argument("witness lacks field " + name);
        return *v;
    };
    std::vector<std::uint64_t> values;
    for (std::size_t s = 0; s < k; ++s) {
        for (RandomnessField f : kAllFields) values.push_back(need(std::string(to_string(f)) + "." + std::to_string(s)));
    }
    return {PipelineRandomness::from_values(q, values),
            PipelineInput::from_values(q, need("a"), need("b"), need("a1"), need("b1"))};
}

namespace {

struct InvarianceWitness {
    RandomnessField field;
    std::uint64_t new_value;
    int wire;
    std::uint64_t before;
    std::uint64_t after;
};

// Values tried for one field: all of Z_q, or a seeded sample.
std::vector<std::uint64_t> replacement_values(Modulus q, const CheckOptions& opts, bool& exhaustive) {
    std::vector<std::uint64_t> out;
    exhaustive = q.value() <= opts.max_exhaustive;
    if (exhaustive) {
        out.resize(q.value());
        for (std::uint64_t v = 0; v < q.value(); ++v) out[v] = v;
    } else {
        CounterRng rng(opts.seed, 0x1e7a);
        out.reserve(opts.samples);
        for (std::uint64_t s = 0; s < opts.samples; ++s) out.push_back(rng.uniform(q.value()));
    }
    return out;
}

std::optional<InvarianceWitness> find_state_change(const NttPipeline& p,
                                                   const PipelineRandomness& rands, std::size_t i,
                                                   std::size_t j, const PipelineInput& input,
                                                   std::span<const std::uint64_t> values,
                                                   const PipelineStateFunction& state) {
    const ButterflyWires base = state(p, rands, i, input);
    for (RandomnessField field : kAllFields) {
        for (std::uint64_t v : values) {
            const auto updated = update_randomness(rands, j, field, Zq(v, p.modulus()));
            const ButterflyWires now = state(p, updated, i, input);
            if (now == base) continue;
            for (WireIndex w : WireIndex::all()) {
                if (select_wire(w, now) != select_wire(w, base)) {
                    return InvarianceWitness{field, v, w.value(), select_wire(w, base).value(),
                                             select_wire(w, now).value()};
                }
            }
        }
    }
    return std::nullopt;
}

Witness to_witness(const InvarianceWitness& w, std::size_t i, std::size_t j) {
    Witness out;
    out.set("stage_i", i)
        .set("stage_j", j)
        .set("field", static_cast<std::uint64_t>(w.field))
        .set("new_value", w.new_value)
        .set("wire", static_cast<std::uint64_t>(w.wire))
        .set("before", w.before)
        .set("after", w.after);
    return out;
}

}  // namespace

CheckReport check_update_future_invariance(const NttPipeline& p, const PipelineRandomness& rands,
                                           std::size_t i, std::size_t j,
                                           const PipelineInput& input, const CheckOptions& opts,
                                           const PipelineStateFunction& state) {
    require_index(j, p.size(), "stage j");
    if (i >= j) throw std::invalid_argument("stage i must precede stage j");

    CheckReport report;
    report.property_name = "pipeline_update_future_invariance";
    ScopedTimer timer(report);

    const PipelineStateFunction& fn = state ? state : PipelineStateFunction(pipeline_state_at);
    bool exhaustive = true;
    const auto values = replacement_values(p.modulus(), opts, exhaustive);
    report.mode = exhaustive ? Mode::Exhaustive : Mode::Sampled;
    if (!exhaustive) report.seed = opts.seed;
    report.contexts_checked = 3 * values.size();

    if (auto w = find_state_change(p, rands, i, j, input, values, fn)) {
        report.verdict = Verdict::Fail;
        report.witness = to_witness(*w, i, j);
    } else {
        report.verdict = exhaustive ? Verdict::Pass : Verdict::SampledPass;
    }
    return report;
}

CheckReport check_update_future_invariance_sweep(const NttPipeline& p, const CheckOptions& opts) {
    CheckReport report;
    report.property_name = "pipeline_update_future_invariance";
    ScopedTimer timer(report);

    const Modulus q = p.modulus();
    const std::size_t k = p.size();
    if (k < 2) {
        report.verdict = Verdict::Pass;
        report.notes.push_back("fewer than two stages: no (i, j > i) pair exists");
        return report;
    }

    bool values_exhaustive = true;
    const auto values = replacement_values(q, opts, values_exhaustive);
    const std::uint64_t domain = saturating_pow(q.value(), 3 * k + 4);
    const bool contexts_exhaustive = domain <= opts.max_exhaustive;
    const std::uint64_t contexts = contexts_exhaustive ? domain : opts.samples;
    const bool exhaustive = contexts_exhaustive && values_exhaustive;
    report.mode = exhaustive ? Mode::Exhaustive : Mode::Sampled;
    if (!exhaustive) report.seed = opts.seed;

    const auto context_at = [&](std::uint64_t c) {
        if (contexts_exhaustive) {
            // Input digits are the four least significant, randomness above them.
            const std::uint64_t qv = q.value();
            std::uint64_t rest = c;
            std::uint64_t digits[4];
            for (int d = 3; d >= 0; --d) {
                digits[d] = rest % qv;
                rest /= qv;
            }
            return std::pair{PipelineRandomness::from_index(q, k, rest),
                             PipelineInput::from_values(q, digits[0], digits[1], digits[2], digits[3])};
        }
        CounterRng rng(opts.seed, c);
        std::vector<std::uint64_t> rv(3 * k);
        for (auto& v : rv) v = rng.uniform(q.value());
        const auto input = PipelineInput{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        return std::pair{PipelineRandomness::from_values(q, rv), input};
    };

    const PipelineStateFunction state(pipeline_state_at);
    const auto check_context = [&](std::uint64_t c) -> std::optional<Witness> {
        const auto [rands, input] = context_at(c);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (auto w = find_state_change(p, rands, i, j, input, values, state)) {
                    Witness out = to_witness(*w, i, j);
                    out.set("context", c);
                    append_context(out, rands, input);
                    return out;
                }
            }
        }
        return std::nullopt;
    };

    const auto first = find_first_failure(contexts, opts.threads,
                                          [&](std::uint64_t c) { return check_context(c).has_value(); });
    const std::uint64_t pairs = k * (k - 1) / 2;
    if (first) {
        report.verdict = Verdict::Fail;
        report.witness = check_context(*first);
        report.contexts_checked = (*first + 1) * pairs * 3 * values.size();
    } else {
        report.verdict = exhaustive ? Verdict::Pass : Verdict::SampledPass;
        report.contexts_checked = contexts * pairs * 3 * values.size();
    }
    return report;
}

}  // namespace maskcheck
