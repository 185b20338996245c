#include <chrono>
#include <functional>
#include <map>

#include "commands.hpp"
#include "maskcheck/information.hpp"
#include "maskcheck/ntt.hpp"
#include "maskcheck/properties.hpp"
#include "maskcheck/scenario.hpp"
#include "support.hpp"

namespace maskcheck::cli {

namespace {

using Clock = std::chrono::steady_clock;

/// Outcome of re-running one witness.
struct Recheck {
    bool confirmed = false;
    std::string note;
};

std::uint64_t u(const Json& ctx, const char* key) {
    if (!ctx.contains(key) || ctx.at(key).is_null()) {
        throw std::invalid_argument(std::string("context lacks '") + key + "'");
    }
    return ctx.at(key).get<std::uint64_t>();
}

std::uint64_t u_or(const Json& ctx, const char* key, std::uint64_t fallback) {
    return ctx.contains(key) && !ctx.at(key).is_null() ? ctx.at(key).get<std::uint64_t>() : fallback;
}

ButterflyGadget gadget_of(const Json& ctx) {
    return gadget_by_name(ctx.contains("gadget") ? ctx.at("gadget").get<std::string>() : "reference");
}

Recheck confirm(bool ok, std::string detail) { return Recheck{ok, std::move(detail)}; }

std::string counts_note(std::uint64_t expected, std::uint64_t actual) {
    return "recomputed " + std::to_string(actual) + ", witness says " + std::to_string(expected);
}

Recheck pointwise(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const ButterflyStage stage{Zq(u(ctx, "tw"), q)};
    const WireIndex wire(static_cast<int>(w.at("wire")));
    const Zq m(w.at("m"), q);
    const auto value_of = [&](std::uint64_t a, std::uint64_t b) {
        const auto in = PipelineInput::from_values(q, a, b, w.at("a1"), w.at("b1"));
        return select_wire(wire, butterfly_output(stage, initial_shares(in), m)).value();
    };
    const std::uint64_t v = value_of(w.at("a"), w.at("b"));
    const std::uint64_t vp = value_of(w.at("a_prime"), w.at("b_prime"));
    return confirm(v == w.at("value") && vp == w.at("value_prime") && v != vp,
                   "wire values " + std::to_string(v) + " and " + std::to_string(vp));
}

ShareQuad shares_of(const Json& ctx, Modulus q) {
    return ShareQuad{Zq(u(ctx, "a0"), q), Zq(u(ctx, "a1"), q), Zq(u(ctx, "b0"), q), Zq(u(ctx, "b1"), q)};
}

Recheck wire_count(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const ButterflyStage stage{Zq(u(ctx, "tw"), q)};
    const ButterflyGadget gadget = gadget_of(ctx);
    const WireIndex wire(static_cast<int>(w.at("wire")));
    const Zq v(w.at("v"), q);
    const ShareQuad shares = shares_of(ctx, q);
    const std::uint64_t c = gadget ? wire_preimage_count(gadget, stage, wire, shares, v)
                                   : wire_preimage_count(stage, wire, shares, v);
    return confirm(c == w.at("count") && c != 1, counts_note(w.at("count"), c));
}

Recheck marginal(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const ButterflyStage stage{Zq(u(ctx, "tw"), q)};
    const ButterflyGadget gadget = gadget_of(ctx);
    const ButterflyGadget g = gadget ? gadget : reference_gadget();
    const WireIndex wire(static_cast<int>(w.at("wire")));
    const Zq v(w.at("v"), q);
    const auto count_for = [&](const char* a, const char* b) {
        const PipelineInput in = PipelineInput::from_values(q, u(ctx, a), u(ctx, b), u(ctx, "a1"), u(ctx, "b1"));
        return wire_preimage_count(g, stage, wire, initial_shares(in), v);
    };
    const std::uint64_t c = count_for("a", "b");
    const std::uint64_t cp = count_for("a_prime", "b_prime");
    return confirm(c == w.at("count") && cp == w.at("count_prime") && !(c == 1 && cp == 1),
                   "counts " + std::to_string(c) + " and " + std::to_string(cp));
}

NttPipeline pipeline_of(const Json& ctx) {
    const Modulus q(u(ctx, "q"));
    if (!ctx.contains("twiddles") || !ctx.at("twiddles").is_array()) {
        throw std::invalid_argument("context lacks 'twiddles'");
    }
    return NttPipeline::from_twiddles(q, ctx.at("twiddles").get<std::vector<std::uint64_t>>());
}

Recheck future_invariance(const Json& ctx, const Witness& w) {
    const NttPipeline p = pipeline_of(ctx);
    const auto [rands, input] = context_from_witness(w, p.modulus(), p.size());
    const std::size_t i = w.at("stage_i");
    const std::size_t j = w.at("stage_j");
    const auto field = static_cast<RandomnessField>(w.at("field"));
    const WireIndex wire(static_cast<int>(w.at("wire")));
    const auto updated = update_randomness(rands, j, field, Zq(w.at("new_value"), p.modulus()));
    const std::uint64_t before = select_wire(wire, pipeline_state_at(p, rands, i, input)).value();
    const std::uint64_t after = select_wire(wire, pipeline_state_at(p, updated, i, input)).value();
    return confirm(i < j && before == w.at("before") && after == w.at("after") && before != after,
                   "stage " + std::to_string(i) + " wire moved " + std::to_string(before) + " -> " +
                       std::to_string(after));
}

Recheck pipeline_uniform(const Json& ctx, const Witness& w) {
    const NttPipeline p = pipeline_of(ctx);
    const Modulus q = p.modulus();
    const auto [rands, input] = context_from_witness(w, q, p.size());
    const std::size_t stage = w.at("stage");
    const WireIndex wire(static_cast<int>(w.at("wire")));
    const Zq v(w.at("v"), q);
    std::uint64_t c = 0;
    for (std::uint64_t m = 0; m < q.value(); ++m) {
        const auto r = update_randomness(rands, stage, RandomnessField::BfMask, Zq(m, q));
        c += select_wire(wire, pipeline_state_at(p, r, stage, input)) == v;
    }
    return confirm(c == w.at("count") && c != 1, counts_note(w.at("count"), c));
}

Recheck full_marginal(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const ButterflyStage stage{Zq(u(ctx, "tw"), q)};
    const int wire = static_cast<int>(w.at("wire"));
    if (ctx.contains("a1")) {
        // Single (a1, b1) with a secret pair: each value should appear once.
        const auto hist_for = [&](const char* a, const char* b) {
            const PipelineInput in = PipelineInput::from_values(q, u(ctx, a), u(ctx, b), u(ctx, "a1"), u(ctx, "b1"));
            return pipeline_mask_histogram(NttPipeline(q, {stage}), in, PipelineRandomness::zero(q, 1), 0,
                                           WireIndex(wire))
                .count(w.at("v"));
        };
        const std::uint64_t c = hist_for("a", "b");
        const std::uint64_t cp = hist_for("a_prime", "b_prime");
        return confirm(c == w.at("count") && cp == w.at("count_prime") && !(c == 1 && cp == 1),
                       "counts " + std::to_string(c) + " and " + std::to_string(cp));
    }
    const auto hists = full_joint_marginal(stage, Secrets{Zq(u(ctx, "a"), q), Zq(u(ctx, "b"), q)});
    const std::uint64_t c = hists.at(wire).count(w.at("v"));
    return confirm(c == w.at("count") && c != q.value() * q.value(), counts_note(w.at("count"), c));
}

Recheck value_independent(const Json& ctx, const Witness& w) {
    const WireFunctionR f = wire_function_from_context(ctx, std::nullopt);
    const Modulus q = f.modulus();
    const Zq s1(w.at("s1"), q);
    const std::uint64_t r = w.at("r");
    if (r >= f.rho()) return confirm(false, "r is outside the randomness domain");
    const std::uint64_t v = f(Zq(w.at("x"), q) - s1, s1, r);
    const std::uint64_t vp = f(Zq(w.at("x_prime"), q) - s1, s1, r);
    return confirm(v == w.at("value") && vp == w.at("value_prime") && v != vp,
                   "outputs " + std::to_string(v) + " and " + std::to_string(vp));
}

Recheck constant_marginal(const Json& ctx, const Witness& w) {
    const WireFunctionR f = wire_function_from_context(ctx, std::nullopt);
    const Modulus q = f.modulus();
    const std::uint64_t c = marginal_histogram_r(f, Zq(w.at("x"), q)).count(w.at("value"));
    const std::uint64_t cp = marginal_histogram_r(f, Zq(w.at("x_prime"), q)).count(w.at("value"));
    return confirm(c == w.at("count") && cp == w.at("count_prime") && c != cp,
                   "counts " + std::to_string(c) + " and " + std::to_string(cp));
}

Recheck mutual_information_nonzero(const Json& ctx, const Witness& w) {
    const JointCounts joint = ctx.contains("source")
                                  ? joint_from_json(read_json_file(ctx.at("source").get<std::string>()))
                                  : joint_counts(wire_function_from_context(ctx, std::nullopt));
    const MutualInfo mi = mutual_information(joint, true);
    const Histogram& r0 = joint.rows.at(w.at("x"));
    const Histogram& r1 = joint.rows.at(w.at("x_prime"));
    const std::uint64_t c0 = r0.count(w.at("value")), c1 = r1.count(w.at("value"));
    const bool differs = detail::u128(c0) * r1.domain_size != detail::u128(c1) * r0.domain_size;
    return confirm(!mi.is_zero && differs && c0 == w.at("count") && c1 == w.at("count_prime"),
                   "counts " + std::to_string(c0) + " of " + std::to_string(r0.domain_size) + " and " +
                       std::to_string(c1) + " of " + std::to_string(r1.domain_size) + ", " +
                       std::to_string(mi.bits) + " bits");
}

Recheck leakage(const Json& ctx, const Witness& w) {
    const NttPipeline p = pipeline_of(ctx);
    const Modulus q = p.modulus();
    const Json& pc = ctx.at("policy");
    const MaskingPolicy policy = MaskingPolicy::parse(pc.at("flags").get<std::string>(), p.size());
    const Json& sc = ctx.at("secrets");
    const SecretPair pair{input_from_json(q, sc.at("first")), input_from_json(q, sc.at("second"))};
    CheckOptions opts;
    opts.samples = u_or(ctx, "samples", opts.samples);
    opts.max_exhaustive = u_or(ctx, "max_exhaustive", opts.max_exhaustive);
    opts.seed = u_or(ctx, "seed", 0);
    const bool remask = ctx.contains("remask_probes") && ctx.at("remask_probes").get<bool>();

    const LeakageAssessment a = assess_leakage(p, policy, std::span<const SecretPair>(&pair, 1), opts, remask);
    const bool output = w.get("wire").has_value();
    const std::uint64_t index = output ? w.at("wire") : w.at("remask_share");
    for (const auto& wa : a.wires) {
        if (wa.probe.stage != w.at("stage") || (wa.probe.kind == ProbeKind::Output) != output ||
            static_cast<std::uint64_t>(wa.probe.index) != index) {
            continue;
        }
        const std::uint64_t c0 = wa.first.count(w.at("value"));
        const std::uint64_t c1 = wa.second.count(w.at("value"));
        return confirm(c0 == w.at("count_secret0") && c1 == w.at("count_secret1") && c0 != c1,
                       "probe " + wa.probe.label() + ": counts " + std::to_string(c0) + " and " +
                           std::to_string(c1));
    }
    return confirm(false, "no such probe in the re-run assessment");
}

Recheck second_order(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const ButterflyStage stage{Zq(u(ctx, "tw"), q)};
    const ShareQuad shares = shares_of(ctx, q);
    if (w.get("m")) {
        // A broken-model witness: one mask where the difference is off.
        const ButterflyWires out = butterfly_output(stage, shares, Zq(w.at("m"), q));
        const std::uint64_t diff = (out.wire0 - out.wire2).value();
        return confirm(diff == w.at("difference") && diff != w.at("expected"), counts_note(w.at("difference"), diff));
    }
    const Zq expected = Zq(2, q) * stage.tw * reconstruct_b(shares);
    for (std::uint64_t m = 0; m < q.value(); ++m) {
        const ButterflyWires out = butterfly_output(stage, shares, Zq(m, q));
        if (out.wire0 - out.wire2 != expected) {
            return confirm(false, "wire0 - wire2 varies with the mask at m = " + std::to_string(m));
        }
    }
    return confirm(expected.value() == w.at("difference") && reconstruct_b(shares).value() == w.at("b"),
                   "wire0 - wire2 = " + std::to_string(expected.value()) + " for every mask");
}

std::vector<Zq> ntt_vector(const Json& ctx, Modulus q, std::uint64_t t) {
    const std::size_t n = u(ctx, "n");
    const std::uint64_t trials = u(ctx, "trials");
    if (t < trials) return random_vector(q, n, u_or(ctx, "seed", 0), t);
    if (t - trials >= n) throw std::invalid_argument("vector index out of range");
    std::vector<Zq> x(n, Zq::zero(q));
    x[t - trials] = Zq::one(q);
    return x;
}

Recheck ntt_round_trip(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const NttParams params(q, u(ctx, "n"));
    const auto x = random_vector(q, params.size(), u_or(ctx, "seed", 0), w.at("vector"));
    const std::size_t i = w.at("index");
    const Zq back = inverse_ntt(params, forward_ntt(params, x)).at(i);
    const Zq forth = forward_ntt(params, inverse_ntt(params, x)).at(i);
    return confirm(x[i].value() == w.at("expected") && (back != x[i] || forth != x[i]),
                   "entry " + std::to_string(i) + " does not survive the round trip");
}

Recheck ntt_naive(const Json& ctx, const Witness& w) {
    const Modulus q(u(ctx, "q"));
    const NttParams params(q, u(ctx, "n"));
    const auto x = ntt_vector(ctx, q, w.at("vector"));
    const std::size_t i = w.at("index");
    const Zq fast = forward_ntt(params, x).at(i);
    const Zq slow = naive_dft(x, params.omega()).at(i);
    return confirm(fast != slow && slow.value() == w.at("expected") && fast.value() == w.at("actual"),
                   "fast " + std::to_string(fast.value()) + ", naive " + std::to_string(slow.value()));
}

using Checker = std::function<Recheck(const Json&, const Witness&)>;

const std::map<std::string, Checker>& checkers() {
    static const std::map<std::string, Checker> table{
        {"pointwise_value_independence", pointwise},
        {"butterfly_wire_count", wire_count},
        {"wire_preimage_count", wire_count},
        {"butterfly_marginal_vi", marginal},
        {"pipeline_update_future_invariance", future_invariance},
        {"pipeline_uniform", pipeline_uniform},
        {"single_stage_full_marginal", full_marginal},
        {"value_independent_r", value_independent},
        {"constant_marginal_r", constant_marginal},
        {"mutual_information_zero", mutual_information_nonzero},
        {"leakage_assessment", leakage},
        {"second_order_shared_mask", second_order},
        {"ntt_round_trip", ntt_round_trip},
        {"ntt_naive_dft", ntt_naive},
    };
    return table;
}

class Walker {
public:
    std::vector<Json> results;
    std::uint64_t confirmed = 0;
    std::uint64_t refuted = 0;

    void visit(const Json& node, Json inherited, const std::string& path) {
        if (node.is_array()) {
            for (std::size_t i = 0; i < node.size(); ++i) {
                visit(node[i], inherited, path + "/" + std::to_string(i));
            }
            return;
        }
        if (!node.is_object()) return;

        for (const char* key : {"q", "k", "twiddles", "seed"}) {
            if (node.contains(key) && !node.at(key).is_null()) inherited[key] = node.at(key);
        }
        if (node.contains("context") && node.at("context").is_object()) {
            for (const auto& [key, value] : node.at("context").items()) inherited[key] = value;
        }
        check(node, inherited, path);
        if (node.contains("details")) visit(node.at("details"), inherited, path + "/details");
    }

private:
    void check(const Json& node, const Json& ctx, const std::string& path) {
        if (!node.contains("witness") || !node.at("witness").is_object() || !node.contains("property")) return;
        const std::string verdict = node.value("verdict", "");
        if (verdict != "FAIL" && verdict != "FAIL-SECOND-ORDER") return;
        const std::string property = node.at("property").get<std::string>();
        const auto it = checkers().find(property);
        if (it == checkers().end()) return;  // envelopes and aggregates repeat a child's witness

        Json entry;
        entry["property"] = "witness_check";
        entry["checked_property"] = property;
        entry["path"] = path.empty() ? "/" : path;
        entry["witness"] = node.at("witness");
        Recheck r;
        try {
            r = it->second(ctx, witness_from_json(node.at("witness")));
        } catch (const std::exception& e) {
            r = Recheck{false, std::string("could not re-run: ") + e.what()};
        }
        (r.confirmed ? confirmed : refuted) += 1;
        entry["verdict"] = r.confirmed ? "PASS" : "FAIL";
        entry["notes"] = Json::array({r.note});
        results.push_back(std::move(entry));
    }
};

}  // namespace

Outcome verify_witness(const Json& report, const RunConfig&) {
    const auto start = Clock::now();
    if (!report.is_object() && !report.is_array()) throw UsageError("a report is a JSON object");

    Walker walker;
    walker.visit(report, Json::object(), "");

    Envelope env;
    env.property = "verify-witness";
    env.verdict = walker.refuted == 0 ? Verdict::Pass : Verdict::Fail;
    env.contexts_checked = walker.confirmed + walker.refuted;
    env.details = std::move(walker.results);
    env.notes.push_back(std::to_string(walker.confirmed) + " witnesses confirmed, " +
                        std::to_string(walker.refuted) + " not reproduced");
    if (env.contexts_checked == 0) env.notes.push_back("the report carries no failing witness");
    env.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return Outcome{env.to_json(), walker.refuted == 0 ? kExitExpected : kExitViolation};
}

}  // namespace maskcheck::cli
