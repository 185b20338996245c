#include <chrono>
#include <cmath>

#include "commands.hpp"
#include "maskcheck/information.hpp"
#include "maskcheck/ntt.hpp"
#include "maskcheck/properties.hpp"
#include "support.hpp"

namespace maskcheck::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int number;
    Envelope env;
    bool ok = true;
    Clock::time_point start = Clock::now();

    Criterion(int n, std::string property) : number(n) { env.property = std::move(property); }

    void require(bool condition, const std::string& failure) {
        if (condition) return;
        ok = false;
        env.notes.push_back("unmet: " + failure);
    }

    Json finish() {
        if (!ok) {
            env.verdict = Verdict::Fail;
        } else {
            env.verdict = env.mode == Mode::Sampled ? Verdict::SampledPass : Verdict::Pass;
        }
        env.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
        Json j;
        j["criterion"] = number;
        const Json body = env.to_json();
        for (const auto& [key, value] : body.items()) j[key] = value;
        return j;
    }
};

RunConfig with_q(RunConfig cfg, std::uint64_t q) {
    cfg.q = q;
    cfg.stages.reset();
    cfg.twiddles.clear();
    return cfg;
}

std::vector<std::uint64_t> seeded_twiddles(std::uint64_t seed, std::uint64_t stream, std::uint64_t q,
                                           std::size_t k) {
    CounterRng rng(seed, stream);
    std::vector<std::uint64_t> out(k);
    for (auto& t : out) t = rng.uniform(q);
    return out;
}

Json pointwise_falsification(const RunConfig& cfg) {
    Criterion c(1, "pointwise_falsification");
    const Outcome o = check_pointwise(with_q(cfg, 5), PointwiseArgs{1, std::nullopt});
    c.env.q = 5;
    c.env.k = 1;
    c.env.twiddles = std::vector<std::uint64_t>{1};
    c.env.contexts_checked = o.report.at("contexts_checked").get<std::uint64_t>();
    c.require(o.report.at("verdict") == "FAIL", "pointwise value independence was not falsified");
    const Json expected = {{"wire", 0}, {"a1", 0},      {"b1", 0},      {"m", 0},     {"a", 0},
                           {"b", 0},    {"a_prime", 1}, {"b_prime", 0}, {"value", 0}, {"value_prime", 1}};
    c.require(o.report.contains("witness") && o.report.at("witness") == expected,
              "first witness differs from wire 0, a1 = b1 = m = 0, a: 0 -> 1, value 0 -> 1");
    if (o.report.contains("witness")) c.env.witness = witness_from_json(o.report.at("witness"));
    c.env.notes.push_back("the witness is compared field by field; the runtime bound is checked by the test suite");
    c.env.details.push_back(o.report);
    return c.finish();
}

Json wire_counts(const RunConfig& cfg) {
    Criterion c(2, "butterfly_wire_count_universal");
    const CheckOptions opts = cfg.options();

    // Every (tw, shares) for small q; each check covers all four wires and all v.
    Tally small("butterfly_wire_count");
    for (std::uint64_t qv = 2; qv <= 7; ++qv) {
        const Modulus q(qv);
        const std::uint64_t n = qv * qv * qv * qv * qv;
        for (std::uint64_t idx = 0; idx < n; ++idx) {
            std::uint64_t d[5];
            std::uint64_t rest = idx;
            for (int i = 4; i >= 0; --i) {
                d[i] = rest % qv;
                rest /= qv;
            }
            const ButterflyStage stage{Zq(d[0], q)};
            const ShareQuad shares{Zq(d[1], q), Zq(d[2], q), Zq(d[3], q), Zq(d[4], q)};
            const CheckReport r = check_butterfly_wire_count(stage, shares, opts);
            small.add(r, Json{{"q", qv}, {"tw", d[0]}, {"a0", d[1]}, {"a1", d[2]}, {"b0", d[3]}, {"b1", d[4]}});
        }
    }
    small.note("q = 2..7, every twiddle and share quad, every wire and value");
    c.require(small.verdict() == Verdict::Pass, "a count other than 1 for some q <= 7");
    c.env.details.push_back(small.to_json());
    c.env.contexts_checked += small.contexts();

    // Production moduli: 10^3 random (tw, shares, v) per wire.
    for (std::uint64_t qv : {std::uint64_t{3329}, std::uint64_t{8380417}}) {
        const Modulus q(qv);
        CheckReport r;
        r.property_name = "wire_preimage_count";
        r.mode = Mode::Sampled;
        r.seed = cfg.seed;
        r.verdict = Verdict::SampledPass;
        Json ctx{{"q", qv}};
        {
            ScopedTimer timer(r);
            CounterRng rng(cfg.seed, 0xc2 + qv);
            for (std::uint64_t t = 0; t < 1000 && r.verdict != Verdict::Fail; ++t) {
                const ButterflyStage stage{rng.element(q)};
                const ShareQuad shares{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
                const std::array<Zq, 4> targets{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
                const auto counts = wire_preimage_counts(stage, shares, targets);
                r.contexts_checked += 4;
                for (int w = 0; w < 4; ++w) {
                    if (counts[w] == 1) continue;
                    r.verdict = Verdict::Fail;
                    Witness wit;
                    wit.set("wire", static_cast<std::uint64_t>(w)).set("v", targets[w].value()).set("count", counts[w]);
                    r.witness = wit;
                    ctx = Json{{"q", qv},
                               {"tw", stage.tw.value()},
                               {"a0", shares.a0.value()},
                               {"a1", shares.a1.value()},
                               {"b0", shares.b0.value()},
                               {"b1", shares.b1.value()}};
                    break;
                }
            }
        }
        c.require(r.verdict != Verdict::Fail, "a count other than 1 at q = " + std::to_string(qv));
        c.env.contexts_checked += r.contexts_checked;
        c.env.details.push_back(check_json(r, ctx));
    }
    c.env.mode = Mode::Sampled;
    c.env.seed = cfg.seed;
    return c.finish();
}

Json separation(const RunConfig& cfg) {
    Criterion c(3, "pointwise_marginal_separation");
    const Modulus q(5);
    const ButterflyStage stage{Zq::one(q)};
    const CheckReport pointwise = check_pointwise_vi(q, stage);
    const CheckReport marginal = check_marginal_vi(stage, Zq::zero(q), Zq::zero(q), Secrets{Zq(0, q), Zq(0, q)},
                                                   Secrets{Zq(1, q), Zq(0, q)}, cfg.options());
    c.env.q = 5;
    c.env.k = 1;
    c.env.twiddles = std::vector<std::uint64_t>{1};
    c.env.contexts_checked = pointwise.contexts_checked + marginal.contexts_checked;
    c.require(pointwise.verdict == Verdict::Fail, "pointwise value independence did not fail");
    c.require(marginal.verdict == Verdict::Pass, "marginal value independence did not pass");
    const Json ctx{{"q", 5}, {"tw", 1}, {"a1", 0}, {"b1", 0}, {"a", 0}, {"b", 0}, {"a_prime", 1}, {"b_prime", 0}};
    c.env.details = {check_json(pointwise, Json{{"q", 5}, {"tw", 1}}), check_json(marginal, ctx)};
    c.env.notes.push_back("same q, twiddle, input masks and secrets for both checks");
    return c.finish();
}

Json bridge(const RunConfig& cfg) {
    Criterion c(4, "value_independence_implies_constant_marginal");
    RunConfig tables_cfg = cfg;
    tables_cfg.q.reset();
    const Outcome tables = check_bridge(tables_cfg, BridgeArgs{100, std::nullopt, "", false});
    c.require(tables.exit_code == kExitExpected, "an instance broke the implication");

    std::uint64_t vi_pass = 0;
    for (const auto& d : tables.report.at("details")) vi_pass += d.at("value_independent") == "PASS";
    c.require(vi_pass > 0, "no random instance was value independent");

    // The converse fails on butterfly wire 0.
    const NamedWire w = builtin_wire("butterfly-wire", Modulus(5), 1, 0);
    const CheckReport vi = check_value_independent_r(w.fn, cfg.options());
    const CheckReport cm = check_constant_marginal(w.fn, cfg.options());
    c.require(vi.verdict == Verdict::Fail && cm.verdict == Verdict::Pass,
              "butterfly wire 0 did not separate the two properties");

    c.env.mode = Mode::Sampled;
    c.env.seed = cfg.seed;
    c.env.contexts_checked = tables.report.at("contexts_checked").get<std::uint64_t>() + vi.contexts_checked +
                             cm.contexts_checked;
    c.env.notes.push_back(std::to_string(vi_pass) + " of 100 random instances are value independent");
    c.env.details = {tables.report, check_json(vi, w.context), check_json(cm, w.context)};
    return c.finish();
}

Json future_invariance(const RunConfig& cfg) {
    Criterion c(5, "pipeline_update_future_invariance");
    const CheckOptions opts = cfg.options();
    bool sampled = false;
    for (std::uint64_t qv = 1; qv <= 7; ++qv) {
        for (std::size_t k = 0; k <= 4; ++k) {
            const auto tws = seeded_twiddles(cfg.seed, 0xc5 + 8 * qv + k, qv, k);
            const NttPipeline p = NttPipeline::from_twiddles(Modulus(qv), tws);
            const CheckReport r = check_update_future_invariance_sweep(p, opts);
            sampled = sampled || r.mode == Mode::Sampled;
            c.require(r.verdict != Verdict::Fail, "a later update moved an earlier stage at q = " +
                                                      std::to_string(qv) + ", k = " + std::to_string(k));
            Json entry = check_json(r, Json{{"q", qv}, {"k", k}, {"twiddles", tws}});
            c.env.contexts_checked += r.contexts_checked;
            c.env.details.push_back(std::move(entry));
        }
    }
    c.env.mode = sampled ? Mode::Sampled : Mode::Exhaustive;
    if (sampled) c.env.seed = cfg.seed;
    c.env.notes.push_back(
        "every (i, j > i, field, new value) is tried; contexts are enumerated when q^(3k+4) fits the "
        "exhaustive budget and drawn from the seed otherwise");
    return c.finish();
}

Json pipeline_uniform(const RunConfig& cfg) {
    Criterion c(6, "pipeline_uniform");
    const CheckOptions opts = cfg.options();

    {
        const Modulus q(3);
        const auto tws = seeded_twiddles(cfg.seed, 0xc6, 3, 3);
        const NttPipeline p = NttPipeline::from_twiddles(q, tws);
        CounterRng rng(cfg.seed, 0xc7);
        const PipelineInput input{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        CheckOptions exact = opts;
        exact.max_exhaustive = std::max<std::uint64_t>(opts.max_exhaustive, 19683);
        const CheckReport r = check_pipeline_uniform_sweep(p, input, exact);
        c.require(r.verdict == Verdict::Pass, "q = 3, k = 3 exhaustive sweep did not pass");
        c.env.contexts_checked += r.contexts_checked;
        c.env.details.push_back(
            check_json(r, Json{{"q", 3}, {"k", 3}, {"twiddles", tws}, {"input", input_json(input)}}));
    }
    {
        const Modulus q(3329);
        const NttPipeline p = lane_pipeline(NttParams(q, 256));
        CounterRng rng(cfg.seed, 0xc8);
        const PipelineInput input{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
        CheckOptions sampled = opts;
        sampled.samples = 100;
        sampled.max_exhaustive = 0;
        const CheckReport r = check_pipeline_uniform_sweep(p, input, sampled);
        c.require(r.verdict == Verdict::SampledPass, "q = 3329, k = 8 sampled sweep did not pass");
        c.env.contexts_checked += r.contexts_checked;
        c.env.details.push_back(check_json(
            r, Json{{"q", 3329}, {"k", 8}, {"twiddles", p.twiddles()}, {"input", input_json(input)}}));
    }
    c.env.mode = Mode::Sampled;
    c.env.seed = cfg.seed;
    return c.finish();
}

Json full_marginal(const RunConfig&) {
    Criterion c(7, "single_stage_full_marginal");
    const Modulus q(7);
    c.env.q = 7;
    c.env.k = 1;
    CheckReport r;
    r.property_name = "single_stage_full_marginal";
    r.mode = Mode::Exhaustive;
    r.verdict = Verdict::Pass;
    Json ctx = Json::object();
    {
        ScopedTimer timer(r);
        for (std::uint64_t tw = 0; tw < 7 && r.verdict == Verdict::Pass; ++tw) {
            for (std::uint64_t a = 0; a < 7 && r.verdict == Verdict::Pass; ++a) {
                for (std::uint64_t b = 0; b < 7 && r.verdict == Verdict::Pass; ++b) {
                    const auto hists = full_joint_marginal(ButterflyStage{Zq(tw, q)}, Secrets{Zq(a, q), Zq(b, q)});
                    for (int w = 0; w < 4 && r.verdict == Verdict::Pass; ++w) {
                        r.contexts_checked += hists[w].domain_size;
                        for (std::uint64_t v = 0; v < 7; ++v) {
                            if (hists[w].count(v) == 49) continue;
                            r.verdict = Verdict::Fail;
                            Witness wit;
                            wit.set("wire", static_cast<std::uint64_t>(w)).set("v", v).set("count", hists[w].count(v));
                            r.witness = wit;
                            ctx = Json{{"q", 7}, {"tw", tw}, {"a", a}, {"b", b}};
                            break;
                        }
                    }
                }
            }
        }
    }
    r.notes.push_back("every twiddle and secret pair; each wire histogram over (a1, b1, bfMask) is 49 per value");
    c.require(r.verdict == Verdict::Pass, "a summed histogram is not 49 per value");
    c.env.contexts_checked = r.contexts_checked;
    c.env.details.push_back(check_json(r, ctx));
    return c.finish();
}

Json mutual_information_exact(const RunConfig& cfg) {
    Criterion c(8, "mutual_information");
    CheckReport zero;
    zero.property_name = "mutual_information_zero";
    zero.mode = Mode::Exhaustive;
    zero.verdict = Verdict::Pass;
    Json ctx = Json::object();
    {
        ScopedTimer timer(zero);
        for (std::uint64_t qv : {2, 3, 5, 6, 7}) {
            const Modulus q(qv);
            const auto check = [&](const WireFunctionR& w, Json where) {
                const MutualInfo mi = mutual_information(joint_counts(w), true);
                ++zero.contexts_checked;
                if (zero.verdict == Verdict::Pass && !(mi.is_zero && mi.bits == 0.0 && mi.exact)) {
                    zero.verdict = Verdict::Fail;
                    ctx = std::move(where);
                }
            };
            check(WireFunctionR::mask_share(q), Json{{"function", "mask-share"}, {"q", qv}});
            for (std::uint64_t tw = 0; tw < qv; ++tw) {
                for (int wire = 0; wire < 4; ++wire) {
                    for (std::uint64_t b0 = 0; b0 < qv; ++b0) {
                        for (std::uint64_t b1 = 0; b1 < qv; ++b1) {
                            check(WireFunctionR::butterfly_wire(ButterflyStage{Zq(tw, q)}, WireIndex(wire), Zq(b0, q),
                                                                Zq(b1, q)),
                                  Json{{"function", "butterfly-wire"}, {"q", qv}, {"tw", tw}, {"wire", wire},
                                       {"b0", b0}, {"b1", b1}});
                        }
                    }
                }
            }
        }
    }
    zero.notes.push_back("mask share and every butterfly wire over its output mask, q in {2, 3, 5, 6, 7}");
    c.require(zero.verdict == Verdict::Pass, "a fresh-masked wire has non-zero mutual information");

    RunConfig five = with_q(cfg, 5);
    const Outcome identity = mutual_info(five, MiArgs{"identity", 1, 0, ""});
    const double bits = identity.report.at("details").at(0).at("bits").get<double>();
    c.require(std::abs(bits - std::log2(5.0)) <= 1e-9, "identity wire at q = 5 is not log2(5) bits");

    c.env.contexts_checked = zero.contexts_checked + identity.report.at("contexts_checked").get<std::uint64_t>();
    c.env.details = {check_json(zero, ctx), identity.report};
    c.env.notes.push_back("identity wire tolerance: |I - log2(5)| <= 1e-9");
    return c.finish();
}

Json adams_bridge(const RunConfig& cfg) {
    Criterion c(9, "partial_masking_leak");
    RunConfig demo = with_q(cfg, 5);
    demo.stages = 2;
    demo.policy = "adams-bridge";
    const Outcome o = demo_adams_bridge(demo, DemoArgs{});
    const Json& fresh = o.report.at("details").at(0);
    const Json& partial = o.report.at("details").at(1);

    bool fresh_clean = fresh.at("mode") == "exhaustive";
    for (const auto& w : fresh.at("wires")) {
        fresh_clean = fresh_clean && w.at("verdict") == "UNIFORM" && w.at("mi_zero").get<bool>();
    }
    bool stage1_leak = false;
    for (const auto& w : partial.at("wires")) {
        stage1_leak = stage1_leak || (w.at("stage") == 1 && w.at("verdict") == "SECRET-DEPENDENT" &&
                                      w.at("mi_bits").get<double>() > 0.0);
    }
    c.require(fresh_clean, "the fresh policy is not uniform with zero information everywhere");
    c.require(partial.at("mode") == "exhaustive" && partial.at("context").at("domain_size") == 5,
              "the partial policy domain was not the five stage-0 masks");
    c.require(stage1_leak, "no stage-1 wire leaks under the partial policy");
    c.env.q = 5;
    c.env.k = 2;
    c.env.twiddles = o.report.at("twiddles").get<std::vector<std::uint64_t>>();
    c.env.contexts_checked = o.report.at("contexts_checked").get<std::uint64_t>();
    c.env.details.push_back(o.report);
    return c.finish();
}

Json second_order_limit(const RunConfig& cfg) {
    Criterion c(10, "second_order_shared_mask");
    for (std::uint64_t qv = 1; qv <= 17; ++qv) {
        RunConfig run = with_q(cfg, qv);
        run.max_exhaustive = std::max<std::uint64_t>(cfg.max_exhaustive, qv * qv * qv * qv * qv);
        const Outcome o = second_order(run, SecondOrderArgs{});
        c.require(o.report.at("verdict") == "FAIL-SECOND-ORDER" && o.report.at("mode") == "exhaustive",
                  "q = " + std::to_string(qv) + " did not show a constant wire0 - wire2 = 2*tw*b");
        c.env.contexts_checked += o.report.at("contexts_checked").get<std::uint64_t>();
        c.env.details.push_back(o.report);
    }
    c.env.notes.push_back(
        "documented higher-order limitation, not a first-order failure; every (tw, shares, m) for q = 1..17");
    return c.finish();
}

Json ntt_grounding(const RunConfig& cfg) {
    Criterion c(11, "ntt_reference");
    const Outcome big = ntt_selftest(with_q(cfg, 3329), NttArgs{256, 1000});
    const Outcome small = ntt_selftest(with_q(cfg, 17), NttArgs{8, 1000});
    c.require(big.exit_code == kExitExpected, "round trip or naive agreement failed at q = 3329, n = 256");
    c.require(small.exit_code == kExitExpected, "round trip or naive agreement failed at q = 17, n = 8");
    c.env.mode = Mode::Sampled;
    c.env.seed = cfg.seed;
    c.env.contexts_checked = big.report.at("contexts_checked").get<std::uint64_t>() +
                             small.report.at("contexts_checked").get<std::uint64_t>();
    c.env.details = {big.report, small.report};
    return c.finish();
}

}  // namespace

Outcome reproduce_all(const RunConfig& cfg) {
    const auto start = Clock::now();
    Envelope env;
    env.property = "reproduce-all";
    env.seed = cfg.seed;
    env.details = {pointwise_falsification(cfg), wire_counts(cfg),    separation(cfg),
                   bridge(cfg),                  future_invariance(cfg), pipeline_uniform(cfg),
                   full_marginal(cfg),           mutual_information_exact(cfg), adams_bridge(cfg),
                   second_order_limit(cfg),      ntt_grounding(cfg)};
    bool ok = true;
    for (const auto& d : env.details) {
        env.contexts_checked += d.at("contexts_checked").get<std::uint64_t>();
        const Verdict v = verdict_from_string(d.at("verdict").get<std::string>());
        ok = ok && holds(v);
        if (v == Verdict::SampledPass) env.mode = Mode::Sampled;
    }
    env.verdict = ok ? (env.mode == Mode::Sampled ? Verdict::SampledPass : Verdict::Pass) : Verdict::Fail;
    env.notes.push_back(
        "criterion 12, byte-identical output for a fixed seed, is checked by running this command twice "
        "with --deterministic and comparing");
    env.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return Outcome{env.to_json(), ok ? kExitExpected : kExitViolation};
}

}  // namespace maskcheck::cli
