#include "support.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "maskcheck/ntt.hpp"

namespace maskcheck::cli {

std::vector<std::uint64_t> parse_list(const std::string& text, char sep) {
    std::vector<std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        std::uint64_t v = 0;
        const auto* first = item.data();
        const auto* last = item.data() + item.size();
        while (first != last && *first == ' ') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || first == last) {
            throw UsageError("not a non-negative integer: '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

namespace {

bool ntt_schedule_exists(Modulus q, std::size_t k) {
    if (k >= 63 || !is_prime(q.value())) return false;
    return (q.value() - 1) % (std::uint64_t{1} << k) == 0;
}

}  // namespace

NttPipeline make_pipeline(Modulus q, std::optional<std::size_t> k, const std::string& twiddles,
                          std::vector<std::string>& notes) {
    if (twiddles.empty() || twiddles == "ntt-schedule") {
        const std::size_t stages = k.value_or(2);
        if (stages == 0) return NttPipeline(q, {});
        if (ntt_schedule_exists(q, stages)) {
            return lane_pipeline(NttParams(q, std::uint64_t{1} << stages));
        }
        if (twiddles == "ntt-schedule") {
            throw UsageError("no NTT twiddle schedule: q = " + std::to_string(q.value()) +
                             " must be prime with 2^" + std::to_string(stages) + " dividing q - 1");
        }
        notes.push_back("no NTT schedule for this (q, k): every twiddle is 1");
        return NttPipeline(q, std::vector<ButterflyStage>(stages, ButterflyStage{Zq::one(q)}));
    }
    const auto tws = parse_list(twiddles);
    if (k && *k != tws.size()) {
        throw UsageError("--twiddles lists " + std::to_string(tws.size()) + " values but --stages is " +
                         std::to_string(*k));
    }
    return NttPipeline::from_twiddles(q, tws);
}

ButterflyGadget gadget_by_name(const std::string& name) {
    if (name == "reference") return {};
    if (name == "drop-mask") return mask_dropping_gadget();
    throw UsageError("unknown gadget '" + name + "' (expected reference or drop-mask)");
}

PipelineInput parse_input(Modulus q, const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != 4) throw UsageError("an input is four values a,b,a1,b1");
    return PipelineInput::from_values(q, v[0], v[1], v[2], v[3]);
}

Json input_json(const PipelineInput& in) {
    Json j;
    j["a"] = in.a.value();
    j["b"] = in.b.value();
    j["a1"] = in.a1.value();
    j["b1"] = in.b1.value();
    return j;
}

PipelineInput input_from_json(Modulus q, const Json& j) {
    return PipelineInput::from_values(q, j.at("a").get<std::uint64_t>(), j.at("b").get<std::uint64_t>(),
                                      j.at("a1").get<std::uint64_t>(), j.at("b1").get<std::uint64_t>());
}

WireFunctionR table_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("q") || !j.contains("rho") || !j.contains("w")) {
        throw UsageError("a table needs q, rho and w[s0][s1][r]");
    }
    const std::uint64_t qv = j.at("q").get<std::uint64_t>();
    const std::uint64_t rho = j.at("rho").get<std::uint64_t>();
    if (qv == 0 || qv > 4096 || rho > 4096) throw UsageError("table dimensions out of range");
    const Json& w = j.at("w");
    std::vector<std::uint64_t> flat;
    flat.reserve(qv * qv * rho);
    if (!w.is_array() || w.size() != qv) throw UsageError("w must have q rows");
    for (const auto& row : w) {
        if (!row.is_array() || row.size() != qv) throw UsageError("w[s0] must have q entries");
        for (const auto& cell : row) {
            if (!cell.is_array() || cell.size() != rho) throw UsageError("w[s0][s1] must have rho entries");
            for (const auto& v : cell) {
                if (!v.is_number_unsigned()) throw UsageError("table outputs must be non-negative integers");
                flat.push_back(v.get<std::uint64_t>());
            }
        }
    }
    return WireFunctionR::from_table(Modulus(qv), rho, std::move(flat));
}

Json table_json(const WireFunctionR& w) {
    const Modulus q = w.modulus();
    Json rows = Json::array();
    for (std::uint64_t s0 = 0; s0 < q.value(); ++s0) {
        Json row = Json::array();
        for (std::uint64_t s1 = 0; s1 < q.value(); ++s1) {
            Json cell = Json::array();
            for (std::uint64_t r = 0; r < w.rho(); ++r) cell.push_back(w(Zq(s0, q), Zq(s1, q), r));
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    Json j;
    j["function"] = "table";
    j["q"] = q.value();
    j["rho"] = w.rho();
    j["w"] = std::move(rows);
    return j;
}

NamedWire builtin_wire(const std::string& name, Modulus q, std::uint64_t tw, int wire) {
    Json ctx;
    ctx["function"] = name;
    ctx["q"] = q.value();
    if (name == "identity" || name == "reconstruction") return {WireFunctionR::reconstruction(q), ctx};
    if (name == "mask-share") return {WireFunctionR::mask_share(q), ctx};
    if (name == "masked-share") return {WireFunctionR::masked_share(q), ctx};
    if (name == "butterfly-wire") {
        ctx["tw"] = tw % q.value();
        ctx["wire"] = wire;
        ctx["b0"] = 0;
        ctx["b1"] = 0;
        return {WireFunctionR::butterfly_wire(ButterflyStage{Zq(tw, q)}, WireIndex(wire), Zq::zero(q),
                                              Zq::zero(q)),
                ctx};
    }
    throw UsageError("unknown wire function '" + name +
                     "' (identity, reconstruction, mask-share, masked-share, butterfly-wire)");
}

WireFunctionR wire_function_from_context(const Json& ctx, std::optional<std::uint64_t> q) {
    const std::string name = ctx.at("function").get<std::string>();
    if (name == "table") return table_from_json(ctx);
    const std::uint64_t qv = ctx.contains("q") ? ctx.at("q").get<std::uint64_t>() : q.value_or(0);
    if (qv == 0) throw UsageError("wire function context lacks q");
    const Modulus m(qv);
    if (name == "butterfly-wire") {
        return WireFunctionR::butterfly_wire(ButterflyStage{Zq(ctx.at("tw").get<std::uint64_t>(), m)},
                                             WireIndex(ctx.at("wire").get<int>()),
                                             Zq(ctx.at("b0").get<std::uint64_t>(), m),
                                             Zq(ctx.at("b1").get<std::uint64_t>(), m));
    }
    return builtin_wire(name, m).fn;
}

NamedWire random_table(CounterRng& rng, std::optional<std::uint64_t> q, std::optional<std::uint64_t> rho) {
    const Modulus m(q.value_or(1 + rng.uniform(7)));
    const std::uint64_t qv = m.value();
    const std::uint64_t rh = rho.value_or(rng.uniform(6));
    const std::uint64_t kind = rng.uniform(4);
    const std::uint64_t outputs = 1 + rng.uniform(qv + 1);

    // Lookup tables the kinds below draw from.
    std::vector<std::uint64_t> by_mask(qv * std::max<std::uint64_t>(rh, 1));
    std::vector<std::uint64_t> by_r(std::max<std::uint64_t>(rh, 1));
    std::vector<std::uint64_t> any(qv * qv * std::max<std::uint64_t>(rh, 1));
    for (auto& v : by_mask) v = rng.uniform(outputs);
    for (auto& v : by_r) v = rng.uniform(qv);
    for (auto& v : any) v = rng.uniform(outputs);

    std::vector<std::uint64_t> flat(qv * qv * rh);
    for (std::uint64_t s0 = 0; s0 < qv; ++s0) {
        for (std::uint64_t s1 = 0; s1 < qv; ++s1) {
            for (std::uint64_t r = 0; r < rh; ++r) {
                std::uint64_t out = 0;
                switch (kind) {
                    case 0: out = by_mask[s1 * rh + r]; break;          // reads only (s1, r)
                    case 1: out = (s1 + by_r[r]) % qv; break;           // re-masked mask share
                    case 2: out = (s0 + s1 + by_r[r]) % qv; break;      // shifted secret
                    default: out = any[(s0 * qv + s1) * rh + r]; break;  // unstructured
                }
                flat[(s0 * qv + s1) * rh + r] = out;
            }
        }
    }
    WireFunctionR fn = WireFunctionR::from_table(m, rh, std::move(flat));
    Json ctx = table_json(fn);
    return {std::move(fn), std::move(ctx)};
}

JointCounts joint_from_json(const Json& j) {
    if (!j.contains("joint") || !j.at("joint").is_array()) throw UsageError("distribution needs a joint array");
    JointCounts joint;
    for (const auto& row : j.at("joint")) {
        if (!row.is_array()) throw UsageError("each joint row must be an array of counts");
        Histogram h;
        std::uint64_t v = 0;
        for (const auto& c : row) {
            if (!c.is_number_unsigned()) throw UsageError("joint counts must be non-negative integers");
            if (c.get<std::uint64_t>() > 0) h.add(v, c.get<std::uint64_t>());
            ++v;
        }
        joint.rows.push_back(std::move(h));
    }
    return joint;
}

std::optional<Witness> dependence_witness(const JointCounts& joint) {
    if (joint.rows.empty()) return std::nullopt;
    const Histogram& base = joint.rows.front();
    for (std::size_t x = 1; x < joint.rows.size(); ++x) {
        const Histogram& row = joint.rows[x];
        std::set<std::uint64_t> values;
        for (const auto& [v, c] : base.counts) values.insert(v);
        for (const auto& [v, c] : row.counts) values.insert(v);
        for (const std::uint64_t v : values) {
            const std::uint64_t c0 = base.count(v), c1 = row.count(v);
            if (detail::u128(c0) * row.domain_size == detail::u128(c1) * base.domain_size) continue;
            Witness w;
            w.set("x", 0).set("x_prime", x).set("value", v).set("count", c0).set("count_prime", c1);
            return w;
        }
    }
    return std::nullopt;
}

std::vector<Zq> random_vector(Modulus q, std::size_t n, std::uint64_t seed, std::uint64_t trial) {
    CounterRng rng(seed, 0x4e77'0000 + trial);
    std::vector<Zq> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rng.element(q));
    return out;
}

std::vector<Zq> naive_dft(const std::vector<Zq>& x, const Zq& omega) {
    const Modulus q = omega.modulus();
    std::vector<Zq> out(x.size(), Zq::zero(q));
    Zq row = Zq::one(q);
    for (std::size_t k = 0; k < x.size(); ++k, row *= omega) {
        Zq power = Zq::one(q);
        Zq acc = Zq::zero(q);
        for (std::size_t j = 0; j < x.size(); ++j, power *= row) acc += x[j] * power;
        out[k] = acc;
    }
    return out;
}

Json policy_json(const MaskingPolicy& policy) {
    Json j;
    j["name"] = policy.name();
    j["flags"] = policy.describe();
    return j;
}

Json assessment_json(const LeakageAssessment& a, const MaskingPolicy& policy, const SecretPair& secrets,
                     const CheckOptions& opts, bool include_remask_wires) {
    const bool uniform = a.all_uniform();
    Verdict verdict = Verdict::Fail;
    if (uniform) verdict = a.mode == Mode::Exhaustive ? Verdict::Pass : Verdict::SampledPass;

    Json ctx;
    ctx["policy"] = policy_json(policy);
    ctx["secrets"] = {{"first", input_json(secrets.first)}, {"second", input_json(secrets.second)}};
    ctx["domain_size"] = a.domain_size;
    ctx["remask_probes"] = include_remask_wires;
    ctx["samples"] = opts.samples;
    ctx["max_exhaustive"] = opts.max_exhaustive;

    Json j;
    j["property"] = "leakage_assessment";
    j["verdict"] = to_string(verdict);
    j["mode"] = to_string(a.mode);
    j["context"] = std::move(ctx);
    j["seed"] = a.seed ? Json(*a.seed) : Json(nullptr);
    j["contexts_checked"] = a.contexts;

    Json wires = Json::array();
    Json dependent_stages = Json::array();
    std::optional<Witness> first;
    for (const auto& w : a.wires) {
        Json e;
        e["probe"] = w.probe.label();
        e["stage"] = w.probe.stage;
        e["verdict"] = to_string(w.verdict);
        e["tvd"] = w.tvd;
        e["mi_bits"] = w.mi.bits;
        e["mi_exact"] = w.mi.exact;
        e["mi_zero"] = w.mi.is_zero;
        wires.push_back(std::move(e));
        if (w.verdict == LeakageVerdict::SecretDependent) {
            if (!first) first = w.witness;
            if (dependent_stages.empty() || dependent_stages.back() != w.probe.stage) {
                dependent_stages.push_back(w.probe.stage);
            }
        }
    }
    if (first) j["witness"] = witness_json(*first);
    j["summary"] = uniform ? "UNIFORM" : "SECRET-DEPENDENT";
    j["dependent_stages"] = std::move(dependent_stages);
    j["wires"] = std::move(wires);
    j["notes"] = Json::array();
    j["elapsed_ms"] = to_ms(a.elapsed);
    return j;
}

}  // namespace maskcheck::cli
