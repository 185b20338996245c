#include "maskcheck/scenario.hpp"

#include <sstream>
#include <stdexcept>

#include "maskcheck/rng.hpp"

namespace maskcheck {

MaskingPolicy::MaskingPolicy(std::vector<StagePolicy> stages, std::string name)
    : stages_(std::move(stages)), name_(std::move(name)) {}

MaskingPolicy MaskingPolicy::fresh(std::size_t k) {
    return MaskingPolicy(std::vector<StagePolicy>(k, StagePolicy{true, true}), "fresh");
}

MaskingPolicy MaskingPolicy::adams_bridge(std::size_t k) {
    std::vector<StagePolicy> stages(k, StagePolicy{false, false});
    if (k > 0) stages[0].fresh_bf_mask = true;
    return MaskingPolicy(std::move(stages), "adams-bridge");
}

MaskingPolicy MaskingPolicy::unmasked(std::size_t k) {
    return MaskingPolicy(std::vector<StagePolicy>(k, StagePolicy{false, false}), "unmasked");
}

MaskingPolicy MaskingPolicy::parse(const std::string& spec, std::size_t k) {
    if (spec == "fresh") return fresh(k);
    if (spec == "adams-bridge" || spec == "partial") return adams_bridge(k);
    if (spec == "unmasked") return unmasked(k);

    std::vector<StagePolicy> stages;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        StagePolicy s{false, false};
        for (char c : item) {
            if (c == 'b') {
                s.fresh_bf_mask = true;
            } else if (c == 'r') {
                s.fresh_remask = true;
            } else if (c != '-') {
                throw std::invalid_argument("bad policy flag '" + std::string(1, c) + "' in " + spec);
            }
        }
        stages.push_back(s);
    }
    if (stages.size() != k) {
        throw std::invalid_argument("policy lists " + std::to_string(stages.size()) +
                                    " stages, pipeline has " + std::to_string(k));
    }
    return MaskingPolicy(std::move(stages), spec);
}

std::string MaskingPolicy::describe() const {
    std::string out;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        if (i) out += ',';
        std::string flags;
        if (stages_[i].fresh_bf_mask) flags += 'b';
        if (stages_[i].fresh_remask) flags += 'r';
        out += flags.empty() ? "-" : flags;
    }
    return out;
}

RandomnessDomain RandomnessDomain::full(Modulus q, std::size_t k) {
    std::vector<FreeVariable> free;
    for (std::size_t s = 0; s < k; ++s) {
        for (RandomnessField f : kAllFields) free.push_back(FreeVariable{s, f});
    }
    return RandomnessDomain(q, k, std::move(free));
}

RandomnessDomain::RandomnessDomain(Modulus q, std::size_t k, std::vector<FreeVariable> free)
    : q_(q), k_(k), free_(std::move(free)) {
    for (const auto& v : free_) {
        if (v.stage >= k_) throw std::out_of_range("free variable outside the pipeline");
    }
}

bool RandomnessDomain::is_free(std::size_t stage, RandomnessField field) const {
    for (const auto& v : free_) {
        if (v.stage == stage && v.field == field) return true;
    }
    return false;
}

std::uint64_t RandomnessDomain::size() const { return saturating_pow(q_.value(), free_.size()); }

PipelineRandomness RandomnessDomain::point(std::span<const std::uint64_t> free_values) const {
    if (free_values.size() != free_.size()) {
        throw std::invalid_argument("one value per free variable expected");
    }
    std::vector<std::uint64_t> values(3 * k_, 0);
    for (std::size_t i = 0; i < free_.size(); ++i) {
        values[3 * free_[i].stage + static_cast<std::size_t>(free_[i].field)] = free_values[i];
    }
    return PipelineRandomness::from_values(q_, values);
}

PipelineRandomness RandomnessDomain::point(std::uint64_t index) const {
    std::vector<std::uint64_t> digits(free_.size());
    for (std::size_t i = digits.size(); i-- > 0;) {
        digits[i] = index % q_.value();
        index /= q_.value();
    }
    return point(std::span<const std::uint64_t>(digits));
}

RandomnessDomain apply_policy(const RandomnessDomain& domain, const MaskingPolicy& policy) {
    if (policy.size() != domain.stages()) {
        throw std::invalid_argument("policy covers " + std::to_string(policy.size()) +
                                    " stages, domain has " + std::to_string(domain.stages()));
    }
    std::vector<FreeVariable> kept;
    for (const auto& v : domain.free_variables()) {
        const StagePolicy& s = policy[v.stage];
        const bool fresh = v.field == RandomnessField::BfMask ? s.fresh_bf_mask : s.fresh_remask;
        if (fresh) kept.push_back(v);
    }
    return RandomnessDomain(domain.modulus(), domain.stages(), std::move(kept));
}

SecretPair default_secret_pair(Modulus q) {
    return SecretPair{PipelineInput::from_values(q, 0, 0, 0, 0), PipelineInput::from_values(q, 1, 0, 0, 0)};
}

std::string Probe::label() const {
    static constexpr const char* kShareNames[] = {"a0", "a1", "b0", "b1"};
    std::string out = "stage" + std::to_string(stage) + ".";
    if (kind == ProbeKind::Output) return out + "wire" + std::to_string(index);
    return out + "remask." + kShareNames[index];
}

std::string_view to_string(LeakageVerdict v) {
    return v == LeakageVerdict::Uniform ? "UNIFORM" : "SECRET-DEPENDENT";
}

bool LeakageAssessment::all_uniform() const {
    for (const auto& w : wires) {
        if (w.verdict != LeakageVerdict::Uniform) return false;
    }
    return true;
}

namespace {

Zq probe_value(const Probe& probe, const ButterflyWires& wires, const ShareQuad& remasked) {
    if (probe.kind == ProbeKind::Output) return select_wire(WireIndex(probe.index), wires);
    switch (probe.index) {
        case 0: return remasked.a0;
        case 1: return remasked.a1;
        case 2: return remasked.b0;
        default: return remasked.b1;
    }
}

void finalize(WireAssessment& w, bool exact) {
    w.tvd = total_variation(w.first, w.second);
    if (w.first.domain_size + w.second.domain_size > 0) {
        w.mi = mutual_information(JointCounts{{w.first, w.second}}, exact);
    }
    if (w.first == w.second) {
        w.verdict = LeakageVerdict::Uniform;
        return;
    }
    w.verdict = LeakageVerdict::SecretDependent;
    auto it0 = w.first.counts.begin();
    auto it1 = w.second.counts.begin();
    for (;;) {
        const std::uint64_t v0 = it0 == w.first.counts.end() ? ~0ull : it0->first;
        const std::uint64_t v1 = it1 == w.second.counts.end() ? ~0ull : it1->first;
        const std::uint64_t v = std::min(v0, v1);
        if (w.first.count(v) != w.second.count(v)) {
            Witness wit;
            wit.set("stage", w.probe.stage)
                .set(w.probe.kind == ProbeKind::Output ? "wire" : "remask_share",
                     static_cast<std::uint64_t>(w.probe.index))
                .set("value", v)
                .set("count_secret0", w.first.count(v))
                .set("count_secret1", w.second.count(v));
            w.witness = wit;
            return;
        }
        if (v0 == v) ++it0;
        if (v1 == v) ++it1;
    }
}

}  // namespace

LeakageAssessment assess_leakage(const NttPipeline& p, const MaskingPolicy& policy,
                                 std::span<const SecretPair> pairs, const CheckOptions& opts,
                                 bool include_remask_wires) {
    const auto start = std::chrono::steady_clock::now();
    const Modulus q = p.modulus();
    const std::size_t k = p.size();
    const RandomnessDomain domain = apply_policy(RandomnessDomain::full(q, k), policy);

    LeakageAssessment out;
    out.policy = policy.name();
    out.domain_size = domain.size();

    std::vector<Probe> probes;
    for (std::size_t s = 0; s < k; ++s) {
        for (int i = 0; i < 4; ++i) probes.push_back(Probe{s, ProbeKind::Output, i});
        if (include_remask_wires && s + 1 < k) {
            for (int i = 0; i < 4; ++i) probes.push_back(Probe{s, ProbeKind::Remask, i});
        }
    }
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        for (const Probe& probe : probes) out.wires.push_back(WireAssessment{pi, probe, {}, {}, 0.0, {}, {}, {}});
    }
    auto slot = [&](std::size_t pair, std::size_t probe) -> WireAssessment& {
        return out.wires[pair * probes.size() + probe];
    };
    auto histogram = [&](std::size_t pair, std::size_t probe, int cls) -> Histogram& {
        return cls == 0 ? slot(pair, probe).first : slot(pair, probe).second;
    };

    const bool exhaustive = out.domain_size <= opts.max_exhaustive;
    out.mode = exhaustive ? Mode::Exhaustive : Mode::Sampled;

    if (exhaustive) {
        out.contexts = out.domain_size;
        for (std::uint64_t idx = 0; idx < out.domain_size; ++idx) {
            const PipelineRandomness rands = domain.point(idx);
            for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
                for (int cls = 0; cls < 2; ++cls) {
                    const PipelineInput& in = cls == 0 ? pairs[pi].first : pairs[pi].second;
                    const auto trace = pipeline_trace(p, rands, in);
                    for (std::size_t j = 0; j < probes.size(); ++j) {
                        const StageTrace& t = trace[probes[j].stage];
                        histogram(pi, j, cls).add(probe_value(probes[j], t.wires, t.remasked).value());
                    }
                }
            }
        }
    } else {
        out.contexts = opts.samples;
        out.seed = opts.seed;
        for (std::uint64_t c = 0; c < opts.samples; ++c) {
            CounterRng rng(opts.seed, c);
            std::vector<std::uint64_t> values(domain.free_variables().size());
            for (auto& v : values) v = rng.uniform(q.value());
            const PipelineRandomness base = domain.point(std::span<const std::uint64_t>(values));

            for (std::size_t s = 0; s < k; ++s) {
                const bool enumerate = domain.is_free(s, RandomnessField::BfMask);
                const std::uint64_t masks = enumerate ? q.value() : 1;
                for (std::uint64_t m = 0; m < masks; ++m) {
                    const PipelineRandomness rands =
                        enumerate ? update_randomness(base, s, RandomnessField::BfMask, Zq(m, q)) : base;
                    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
                        for (int cls = 0; cls < 2; ++cls) {
                            const PipelineInput& in = cls == 0 ? pairs[pi].first : pairs[pi].second;
                            const ButterflyWires w = pipeline_state_at(p, rands, s, in);
                            const ShareQuad remasked = remask(repack(w), rands[s].remask_a, rands[s].remask_b);
                            for (std::size_t j = 0; j < probes.size(); ++j) {
                                if (probes[j].stage != s) continue;
                                histogram(pi, j, cls).add(probe_value(probes[j], w, remasked).value());
                            }
                        }
                    }
                }
            }
        }
    }

    for (auto& w : out.wires) finalize(w, exhaustive);
    out.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
    return out;
}

DesignPrincipleReport design_principle_report(const NttPipeline& p, const CheckOptions& opts,
                                              std::optional<SecretPair> secrets,
                                              std::optional<MaskingPolicy> partial,
                                              bool include_remask_wires) {
    const SecretPair secrets_used = secrets.value_or(default_secret_pair(p.modulus()));
    const SecretPair pairs[] = {secrets_used};
    const MaskingPolicy partial_policy = partial.value_or(MaskingPolicy::adams_bridge(p.size()));
    DesignPrincipleReport report{
        p.twiddles(), secrets_used,
        assess_leakage(p, MaskingPolicy::fresh(p.size()), pairs, opts, include_remask_wires),
        assess_leakage(p, partial_policy, pairs, opts, include_remask_wires), {}};
    if (p.size() == 0) report.notes.push_back("k = 0: no stage to probe, both policies hold vacuously");
    report.notes.push_back(
        "models the inter-stage failure only: the partial policy withholds fresh randomness from "
        "later stages");
    report.notes.push_back(
        "the intra-stage bare share recombination of the same accelerator is a separate failure "
        "and is not modelled here");
    return report;
}

}  // namespace maskcheck
