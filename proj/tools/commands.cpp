#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "maskcheck/information.hpp"
#include "maskcheck/ntt.hpp"
#include "maskcheck/properties.hpp"
#include "maskcheck/scenario.hpp"
#include "support.hpp"

namespace maskcheck::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::nanoseconds since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
}

// Calls fn on every tuple of Z_q^n in odometer order (last digit fastest).
template <class Fn>
void for_each_tuple(std::uint64_t q, std::size_t n, Fn&& fn) {
    std::vector<std::uint64_t> t(n, 0);
    for (;;) {
        fn(t);
        std::size_t i = n;
        while (i > 0) {
            if (++t[i - 1] < q) break;
            t[i - 1] = 0;
            --i;
        }
        if (i == 0) return;
    }
}

std::vector<std::uint64_t> random_tuple(CounterRng& rng, std::uint64_t q, std::size_t n) {
    std::vector<std::uint64_t> t(n);
    for (auto& v : t) v = rng.uniform(q);
    return t;
}

Outcome finish(Envelope env, Clock::time_point start, int exit_code) {
    env.elapsed = since(start);
    return Outcome{env.to_json(), exit_code};
}

}  // namespace

Outcome check_pointwise(const RunConfig& cfg, const PointwiseArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(5));
    const ButterflyStage stage{Zq(args.tw, q)};
    const CheckReport r = check_pointwise_vi(q, stage, args.search_bound);

    Envelope env;
    env.property = "check-pointwise";
    env.verdict = r.verdict;
    env.mode = r.mode;
    env.q = q.value();
    env.k = 1;
    env.twiddles = std::vector<std::uint64_t>{stage.tw.value()};
    env.contexts_checked = r.contexts_checked;
    env.witness = r.witness;
    env.details.push_back(check_json(r, Json{{"q", q.value()}, {"tw", stage.tw.value()}}));

    const Verdict expected = q.value() == 1 ? Verdict::Pass : Verdict::Fail;
    if (q.value() > 1) {
        env.notes.push_back(
            "FAIL is the expected outcome: with every mask held fixed, changing one secret moves a "
            "butterfly output wire");
    }
    return finish(std::move(env), start, r.verdict == expected ? kExitExpected : kExitViolation);
}

Outcome check_butterfly(const RunConfig& cfg, const ButterflyArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(5));
    const std::uint64_t qv = q.value();
    const ButterflyGadget gadget = gadget_by_name(args.gadget);
    const CheckOptions opts = cfg.options();

    std::vector<std::uint64_t> tws;
    bool sampled = false;
    if (args.tw) {
        tws.push_back(*args.tw % qv);
    } else if (!args.sweep_tw && saturating_pow(qv, 7) <= cfg.max_exhaustive) {
        for (std::uint64_t t = 0; t < qv; ++t) tws.push_back(t);
    } else {
        CounterRng rng(cfg.seed, 0xb0);
        for (std::uint64_t i = 0; i < args.sweep_tw.value_or(10); ++i) tws.push_back(rng.uniform(qv));
        sampled = true;
    }
    const bool counts_all =
        !args.sweep_inputs && saturating_mul(tws.size(), saturating_pow(qv, 4)) <= cfg.max_exhaustive;
    const bool marginal_all =
        !args.sweep_inputs && saturating_mul(tws.size(), saturating_pow(qv, 6)) <= cfg.max_exhaustive;
    const std::uint64_t per_tw = args.sweep_inputs.value_or(10);

    Tally counts("butterfly_wire_count");
    Tally marginal("butterfly_marginal_vi");
    if (sampled || !counts_all) counts.mark_sampled(cfg.seed);
    if (sampled || !marginal_all) marginal.mark_sampled(cfg.seed);

    CounterRng rng(cfg.seed, 0xb1);
    for (std::uint64_t tw : tws) {
        const ButterflyStage stage{Zq(tw, q)};
        const auto run_counts = [&](const std::vector<std::uint64_t>& s) {
            const ShareQuad shares{Zq(s[0], q), Zq(s[1], q), Zq(s[2], q), Zq(s[3], q)};
            const CheckReport r = check_butterfly_wire_count(stage, shares, opts, gadget);
            if (r.verdict != Verdict::Fail) return counts.add(r);
            counts.add(r, Json{{"gadget", args.gadget}, {"tw", tw}, {"a0", s[0]}, {"a1", s[1]},
                               {"b0", s[2]}, {"b1", s[3]}});
        };
        const auto run_marginal = [&](const std::vector<std::uint64_t>& s) {
            const CheckReport r =
                check_marginal_vi(stage, Zq(s[0], q), Zq(s[1], q), Secrets{Zq(s[2], q), Zq(s[3], q)},
                                  Secrets{Zq(s[4], q), Zq(s[5], q)}, opts, gadget);
            if (r.verdict != Verdict::Fail) return marginal.add(r);
            marginal.add(r, Json{{"gadget", args.gadget}, {"tw", tw}, {"a1", s[0]}, {"b1", s[1]}, {"a", s[2]},
                                 {"b", s[3]}, {"a_prime", s[4]}, {"b_prime", s[5]}});
        };
        if (counts_all) {
            for_each_tuple(qv, 4, run_counts);
        } else {
            for (std::uint64_t i = 0; i < per_tw; ++i) run_counts(random_tuple(rng, qv, 4));
        }
        if (marginal_all) {
            for_each_tuple(qv, 6, run_marginal);
        } else {
            for (std::uint64_t i = 0; i < per_tw; ++i) run_marginal(random_tuple(rng, qv, 6));
        }
    }

    Envelope env;
    env.property = "check-butterfly";
    env.verdict = worse(counts.verdict(), marginal.verdict());
    env.mode = counts.mode() == Mode::Sampled || marginal.mode() == Mode::Sampled ? Mode::Sampled
                                                                                   : Mode::Exhaustive;
    env.q = qv;
    env.k = 1;
    env.twiddles = tws;
    if (env.mode == Mode::Sampled) env.seed = cfg.seed;
    env.contexts_checked = counts.contexts() + marginal.contexts();
    env.witness = counts.witness() ? counts.witness() : marginal.witness();
    env.details = {counts.to_json(), marginal.to_json()};
    if (args.gadget != "reference") {
        env.notes.push_back("mutant gadget " + args.gadget + ": wires 0 and 2 carry no output mask");
    }
    return finish(std::move(env), start, holds(env.verdict) ? kExitExpected : kExitViolation);
}

Outcome check_pipeline(const RunConfig& cfg, const PipelineArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(5));
    Envelope env;
    const NttPipeline p = make_pipeline(q, cfg.stages, cfg.twiddles, env.notes);
    CheckOptions opts = cfg.options();
    if (args.contexts) opts.samples = *args.contexts;

    PipelineInput input = PipelineInput::from_values(q, 0, 0, 0, 0);
    if (args.input.empty()) {
        CounterRng rng(cfg.seed, 0x1a);
        input = PipelineInput{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
    } else {
        input = parse_input(q, args.input);
    }

    const CheckReport invariance = check_update_future_invariance_sweep(p, opts);
    const CheckReport uniform = check_pipeline_uniform_sweep(p, input, opts);

    env.property = "check-pipeline";
    env.verdict = worse(invariance.verdict, uniform.verdict);
    env.mode = invariance.mode == Mode::Sampled || uniform.mode == Mode::Sampled ? Mode::Sampled : Mode::Exhaustive;
    env.q = q.value();
    env.k = p.size();
    env.twiddles = p.twiddles();
    if (env.mode == Mode::Sampled) env.seed = cfg.seed;
    env.contexts_checked = invariance.contexts_checked + uniform.contexts_checked;
    env.witness = invariance.witness ? invariance.witness : uniform.witness;
    env.details = {check_json(invariance), check_json(uniform, Json{{"input", input_json(input)}})};
    return finish(std::move(env), start, holds(env.verdict) ? kExitExpected : kExitViolation);
}

namespace {

struct BridgeCounts {
    std::uint64_t instances = 0;
    std::uint64_t value_independent = 0;
    std::uint64_t constant_marginal = 0;
    std::uint64_t exceptions = 0;
    std::uint64_t separations = 0;
    std::uint64_t mi_mismatches = 0;
};

Json bridge_instance(const WireFunctionR& w, Json context, const CheckOptions& opts, BridgeCounts& tally,
                     Verdict& verdict, std::optional<Witness>& witness) {
    const CheckReport vi = check_value_independent_r(w, opts);
    const CheckReport cm = check_constant_marginal(w, opts);
    const bool vi_holds = holds(vi.verdict);
    const bool cm_holds = holds(cm.verdict);

    Json mi = nullptr;
    bool mi_consistent = true;
    if (w.rho() > 0) {
        const MutualInfo m = mutual_information(joint_counts(w), cm.mode == Mode::Exhaustive);
        mi = Json{{"bits", m.bits}, {"exact", m.exact}, {"is_zero", m.is_zero}};
        mi_consistent = m.is_zero == cm_holds;
    }

    ++tally.instances;
    tally.value_independent += vi_holds;
    tally.constant_marginal += cm_holds;
    const bool implication = !vi_holds || cm_holds;
    tally.exceptions += !implication;
    tally.separations += !vi_holds && cm_holds && vi.verdict == Verdict::Fail;
    tally.mi_mismatches += !mi_consistent;

    Verdict v = Verdict::Pass;
    if (!implication || !mi_consistent) {
        v = Verdict::Fail;
    } else if (vi.mode == Mode::Sampled || cm.mode == Mode::Sampled) {
        v = Verdict::SampledPass;
    }
    verdict = worse(verdict, v);

    Json j;
    j["property"] = "bridge_instance";
    j["verdict"] = to_string(v);
    j["mode"] = to_string(vi.mode == Mode::Sampled || cm.mode == Mode::Sampled ? Mode::Sampled
                                                                                : Mode::Exhaustive);
    j["context"] = std::move(context);
    j["seed"] = vi.seed ? Json(*vi.seed) : Json(nullptr);
    j["contexts_checked"] = vi.contexts_checked + cm.contexts_checked;
    if (v == Verdict::Fail && cm.witness) {
        j["witness"] = witness_json(*cm.witness);
        if (!witness) witness = cm.witness;
    }
    j["value_independent"] = to_string(vi.verdict);
    j["constant_marginal"] = to_string(cm.verdict);
    j["mutual_information"] = std::move(mi);
    j["details"] = {check_json(vi), check_json(cm)};
    Json notes = Json::array();
    if (!implication) notes.push_back("value independence holds but the marginal is not constant");
    if (!mi_consistent) notes.push_back("mutual information zero test disagrees with the constant-marginal check");
    if (!vi_holds && cm_holds) notes.push_back("constant marginal without value independence");
    j["notes"] = std::move(notes);
    j["elapsed_ms"] = to_ms(vi.elapsed + cm.elapsed);
    return j;
}

}  // namespace

Outcome check_bridge(const RunConfig& cfg, const BridgeArgs& args) {
    const auto start = Clock::now();
    const CheckOptions opts = cfg.options();
    Envelope env;
    env.property = "check-bridge";
    env.q = cfg.q;
    BridgeCounts tally;
    Verdict verdict = Verdict::Pass;
    bool sampled = false;

    if (args.builtins) {
        const Modulus q(cfg.q.value_or(5));
        for (const char* name : {"mask-share", "masked-share", "reconstruction", "butterfly-wire"}) {
            NamedWire w = builtin_wire(name, q);
            env.details.push_back(bridge_instance(w.fn, std::move(w.context), opts, tally, verdict, env.witness));
        }
    }
    if (!args.table_file.empty()) {
        const WireFunctionR w = table_from_json(read_json_file(args.table_file));
        Json ctx = table_json(w);
        ctx["source"] = args.table_file;
        env.details.push_back(bridge_instance(w, std::move(ctx), opts, tally, verdict, env.witness));
    }
    if (args.tables > 0) {
        sampled = true;
        CounterRng rng(cfg.seed, 0xb7d);
        for (std::uint64_t i = 0; i < args.tables; ++i) {
            NamedWire w = random_table(rng, cfg.q, args.rho);
            env.details.push_back(bridge_instance(w.fn, std::move(w.context), opts, tally, verdict, env.witness));
        }
    }

    if (verdict == Verdict::Pass && sampled) verdict = Verdict::SampledPass;
    env.verdict = verdict;
    env.mode = sampled ? Mode::Sampled : Mode::Exhaustive;
    if (sampled) env.seed = cfg.seed;
    for (const auto& d : env.details) env.contexts_checked += d.at("contexts_checked").get<std::uint64_t>();
    env.notes.push_back("instances: " + std::to_string(tally.instances) + ", value-independent: " +
                        std::to_string(tally.value_independent) + ", constant marginal: " +
                        std::to_string(tally.constant_marginal));
    env.notes.push_back("implication exceptions: " + std::to_string(tally.exceptions) +
                        ", mutual-information mismatches: " + std::to_string(tally.mi_mismatches));
    env.notes.push_back("strict separations (constant marginal, value independence fails): " +
                        std::to_string(tally.separations));
    return finish(std::move(env), start, holds(env.verdict) ? kExitExpected : kExitViolation);
}

Outcome mutual_info(const RunConfig& cfg, const MiArgs& args) {
    const auto start = Clock::now();
    Envelope env;
    env.property = "mi";

    JointCounts joint;
    bool exact = true;
    Json ctx;
    std::optional<std::uint64_t> q;
    if (!args.distribution_file.empty()) {
        const Json j = read_json_file(args.distribution_file);
        joint = joint_from_json(j);
        exact = j.value("exact", true);
        ctx["source"] = args.distribution_file;
        q = j.contains("q") ? std::optional(j.at("q").get<std::uint64_t>()) : std::nullopt;
    } else {
        const Modulus m(cfg.q.value_or(5));
        NamedWire w = builtin_wire(args.wire, m, args.tw, args.wire_index);
        joint = joint_counts(w.fn);
        ctx = std::move(w.context);
        q = m.value();
    }

    const auto t0 = Clock::now();
    const MutualInfo mi = mutual_information(joint, exact);
    std::uint64_t total = 0;
    for (const auto& row : joint.rows) total += row.domain_size;

    Json d;
    d["property"] = "mutual_information_zero";
    d["verdict"] = to_string(mi.is_zero ? Verdict::Pass : Verdict::Fail);
    d["mode"] = to_string(exact ? Mode::Exhaustive : Mode::Sampled);
    d["context"] = ctx;
    d["seed"] = nullptr;
    d["contexts_checked"] = total;
    if (!mi.is_zero) {
        if (const auto w = dependence_witness(joint)) d["witness"] = witness_json(*w);
    }
    d["bits"] = mi.bits;
    d["exact"] = mi.exact;
    d["is_zero"] = mi.is_zero;
    d["log2_q"] = q ? Json(std::log2(static_cast<double>(*q))) : Json(nullptr);
    d["notes"] = Json::array({"PASS means I(secret; wire) = 0, decided by exact integer comparison"});
    d["elapsed_ms"] = to_ms(since(t0));

    env.verdict = mi.is_zero ? Verdict::Pass : Verdict::Fail;
    env.mode = exact ? Mode::Exhaustive : Mode::Sampled;
    env.q = q;
    env.contexts_checked = total;
    env.details.push_back(std::move(d));
    env.notes.push_back("a measurement: the exit code is 0 whatever the value");
    return finish(std::move(env), start, kExitExpected);
}

Outcome ntt_selftest(const RunConfig& cfg, const NttArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(3329));
    const NttParams params(q, args.n);
    const std::size_t n = args.n;

    CheckReport rt;
    rt.property_name = "ntt_round_trip";
    rt.mode = Mode::Sampled;
    rt.seed = cfg.seed;
    {
        ScopedTimer timer(rt);
        rt.verdict = Verdict::SampledPass;
        for (std::uint64_t t = 0; t < args.trials && rt.verdict != Verdict::Fail; ++t) {
            const auto x = random_vector(q, n, cfg.seed, t);
            const auto back = inverse_ntt(params, forward_ntt(params, x));
            const auto forth = forward_ntt(params, inverse_ntt(params, x));
            ++rt.contexts_checked;
            for (std::size_t i = 0; i < n; ++i) {
                if (back[i] == x[i] && forth[i] == x[i]) continue;
                rt.verdict = Verdict::Fail;
                Witness w;
                w.set("vector", t).set("index", i).set("expected", x[i].value()).set(
                    "actual", (back[i] == x[i] ? forth[i] : back[i]).value());
                rt.witness = w;
                break;
            }
        }
    }

    CheckReport dft;
    dft.property_name = "ntt_naive_dft";
    dft.mode = Mode::Sampled;
    dft.seed = cfg.seed;
    {
        ScopedTimer timer(dft);
        dft.verdict = Verdict::SampledPass;
        // Vectors 0..trials-1 are random; vector trials + i is the delta at i.
        for (std::uint64_t t = 0; t < args.trials + n && dft.verdict != Verdict::Fail; ++t) {
            std::vector<Zq> x;
            if (t < args.trials) {
                x = random_vector(q, n, cfg.seed, t);
            } else {
                x.assign(n, Zq::zero(q));
                x[t - args.trials] = Zq::one(q);
            }
            const auto fast = forward_ntt(params, x);
            const auto slow = naive_dft(x, params.omega());
            ++dft.contexts_checked;
            for (std::size_t i = 0; i < n; ++i) {
                if (fast[i] == slow[i]) continue;
                dft.verdict = Verdict::Fail;
                Witness w;
                w.set("vector", t).set("index", i).set("expected", slow[i].value()).set("actual", fast[i].value());
                dft.witness = w;
                break;
            }
        }
        dft.notes.push_back("vectors " + std::to_string(args.trials) + ".." +
                            std::to_string(args.trials + n - 1) + " are the delta vectors");
    }

    const Json ctx{{"n", n}, {"omega", params.omega().value()}, {"trials", args.trials}};
    Envelope env;
    env.property = "ntt-selftest";
    env.verdict = worse(rt.verdict, dft.verdict);
    env.mode = Mode::Sampled;
    env.q = q.value();
    env.k = params.log2_size();
    env.seed = cfg.seed;
    env.contexts_checked = rt.contexts_checked + dft.contexts_checked;
    env.witness = rt.witness ? rt.witness : dft.witness;
    env.details = {check_json(rt, ctx), check_json(dft, ctx)};
    env.notes.push_back("decimation in time, bit-reversed input order, natural output order");
    return finish(std::move(env), start, holds(env.verdict) ? kExitExpected : kExitViolation);
}

namespace {

SecretPair parse_secrets(Modulus q, const std::string& text) {
    if (text.empty()) return default_secret_pair(q);
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--secrets takes a,b,a1,b1:a,b,a1,b1");
    return SecretPair{parse_input(q, text.substr(0, colon)), parse_input(q, text.substr(colon + 1))};
}

}  // namespace

Outcome demo_adams_bridge(const RunConfig& cfg, const DemoArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(5));
    Envelope env;
    const NttPipeline p = make_pipeline(q, cfg.stages, cfg.twiddles, env.notes);
    const SecretPair secrets = parse_secrets(q, args.secrets);
    MaskingPolicy partial = MaskingPolicy::adams_bridge(p.size());
    try {
        partial = MaskingPolicy::parse(cfg.policy, p.size());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const CheckOptions opts = cfg.options();
    const DesignPrincipleReport rep = design_principle_report(p, opts, secrets, partial, args.remask_probes);

    Json fresh = assessment_json(rep.fresh, MaskingPolicy::fresh(p.size()), secrets, opts, args.remask_probes);
    Json part = assessment_json(rep.partial, partial, secrets, opts, args.remask_probes);

    env.property = "demo-adams-bridge";
    env.verdict = verdict_from_string(fresh.at("verdict").get<std::string>());
    env.mode = rep.fresh.mode == Mode::Sampled || rep.partial.mode == Mode::Sampled ? Mode::Sampled
                                                                                     : Mode::Exhaustive;
    env.q = q.value();
    env.k = p.size();
    env.twiddles = p.twiddles();
    if (env.mode == Mode::Sampled) env.seed = cfg.seed;
    env.contexts_checked = rep.fresh.contexts + rep.partial.contexts;
    if (!rep.fresh_uniform() && rep.fresh.wires.size() > 0) {
        for (const auto& w : rep.fresh.wires) {
            if (w.witness) {
                env.witness = w.witness;
                break;
            }
        }
    }
    env.notes.push_back(std::string("fresh: ") + fresh.at("summary").get<std::string>() +
                        ", partial (" + partial.describe() + "): " + part.at("summary").get<std::string>());
    for (const auto& n : rep.notes) env.notes.push_back(n);
    env.details = {std::move(fresh), std::move(part)};
    return finish(std::move(env), start, rep.fresh_uniform() ? kExitExpected : kExitViolation);
}

Outcome second_order(const RunConfig& cfg, const SecondOrderArgs& args) {
    const auto start = Clock::now();
    const Modulus q(cfg.q.value_or(5));
    const std::uint64_t qv = q.value();

    CheckReport agg;
    agg.property_name = "second_order_shared_mask";
    agg.verdict = Verdict::SecondOrderLeak;
    Json ctx;
    bool telling = false;  // the witness shows a non-zero recovered difference
    std::uint64_t runs = 0;
    std::optional<std::uint64_t> first_tw;

    // c = (tw, a0, a1, b0, b1); returns false to stop.
    const auto run = [&](const std::vector<std::uint64_t>& c) {
        const ButterflyStage stage{Zq(c[0], q)};
        const ShareQuad shares{Zq(c[1], q), Zq(c[2], q), Zq(c[3], q), Zq(c[4], q)};
        const CheckReport r = second_order_leak_demo(stage, shares);
        ++runs;
        if (!first_tw) first_tw = c[0] % qv;
        agg.contexts_checked += r.contexts_checked;
        agg.elapsed += r.elapsed;
        const Json here{{"tw", c[0] % qv}, {"a0", c[1] % qv}, {"a1", c[2] % qv}, {"b0", c[3] % qv}, {"b1", c[4] % qv}};
        if (r.verdict == Verdict::Fail) {
            agg.verdict = Verdict::Fail;
            agg.witness = r.witness;
            agg.notes = r.notes;
            ctx = here;
            return false;
        }
        const bool nonzero = r.witness && r.witness->at("difference") != 0;
        if (!agg.witness || (!telling && nonzero)) {
            agg.witness = r.witness;
            agg.notes = r.notes;
            ctx = here;
            telling = nonzero;
        }
        return true;
    };

    bool sampled = false;
    if (!args.shares.empty()) {
        auto s = parse_list(args.shares);
        if (s.size() != 4) throw UsageError("--shares takes a0,a1,b0,b1");
        s.insert(s.begin(), args.tw.value_or(1));
        run(s);
    } else {
        const std::size_t free = args.tw ? 4 : 5;
        std::vector<std::uint64_t> c(5);
        const auto with_tw = [&](const std::vector<std::uint64_t>& t) -> const std::vector<std::uint64_t>& {
            if (!args.tw) return t;
            c[0] = *args.tw;
            std::copy(t.begin(), t.end(), c.begin() + 1);
            return c;
        };
        if (saturating_pow(qv, free) <= cfg.max_exhaustive) {
            bool go = true;
            for_each_tuple(qv, free, [&](const std::vector<std::uint64_t>& t) {
                if (go) go = run(with_tw(t));
            });
        } else {
            sampled = true;
            CounterRng rng(cfg.seed, 0x50);
            for (std::uint64_t i = 0; i < cfg.samples; ++i) {
                if (!run(with_tw(random_tuple(rng, qv, free)))) break;
            }
        }
    }
    agg.mode = sampled ? Mode::Sampled : Mode::Exhaustive;
    if (sampled) agg.seed = cfg.seed;
    if (!telling && agg.verdict != Verdict::Fail) {
        agg.notes.push_back("2*tw*b is 0 for every configuration checked");
    }

    Envelope env;
    env.property = "second-order";
    env.verdict = agg.verdict;
    env.mode = agg.mode;
    env.q = qv;
    env.k = 1;
    if (runs == 1 || args.tw) env.twiddles = std::vector<std::uint64_t>{first_tw.value_or(0)};
    env.seed = agg.seed;
    env.contexts_checked = agg.contexts_checked;
    env.witness = agg.witness;
    env.details.push_back(check_json(agg, ctx));
    env.notes.push_back(std::to_string(runs) + " (tw, shares) configurations, every mask enumerated");
    return finish(std::move(env), start, agg.verdict == Verdict::Fail ? kExitViolation : kExitExpected);
}

}  // namespace maskcheck::cli
