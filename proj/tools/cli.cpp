#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"
#include "support.hpp"

namespace maskcheck::cli {

namespace {

constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 62) - 1;

/// Fills fields no flag set from a JSON object keyed like the long flags
/// (with '_' or '-'), then from MASKCHECK_SEED.
class ConfigLayer {
public:
    explicit ConfigLayer(Json j) : j_(std::move(j)) {
        if (!j_.is_object()) throw UsageError("--config must hold a JSON object");
    }

    /// True when the flag or the file supplied the value.
    template <class T>
    bool apply(const CLI::Option* flag, const std::string& key, T& field) const {
        if (flag->count() > 0) return true;
        const Json* v = find(key);
        if (v == nullptr) return false;
        try {
            field = v->get<T>();
        } catch (const Json::exception&) {
            throw UsageError("--config: bad value for '" + key + "'");
        }
        return true;
    }

private:
    const Json* find(const std::string& key) const {
        std::string dashed = key;
        for (char& c : dashed) c = c == '_' ? '-' : c;
        for (const auto& k : {key, dashed}) {
            if (j_.contains(k) && !j_.at(k).is_null()) return &j_.at(k);
        }
        return nullptr;
    }

    Json j_;
};

std::uint64_t env_seed() {
    const char* text = std::getenv("MASKCHECK_SEED");
    if (text == nullptr || *text == '\0') return 0;
    const auto v = parse_list(text);
    if (v.size() != 1) throw UsageError("MASKCHECK_SEED must be one integer");
    return v[0];
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exhaustive and sampled checks of masked NTT butterfly gadgets", "maskcheck"};
    app.require_subcommand(0, 1);

    RunConfig cfg;
    std::uint64_t q = 0;
    std::size_t stages = 0;
    std::string format = "json";
    std::string config_file;
    std::string verify_file;
    auto* q_opt = app.add_option("--q", q, "Modulus")->check(CLI::Range(std::uint64_t{1}, kMaxModulus));
    auto* k_opt = app.add_option("--stages,-k", stages, "Pipeline length k");
    auto* tw_list = app.add_option("--twiddles", cfg.twiddles, "Comma list, or ntt-schedule");
    auto* seed_opt = app.add_option("--seed", cfg.seed, "Seed for every sampled mode");
    auto* samples_opt = app.add_option("--samples", cfg.samples, "Draws per sampled check");
    auto* max_opt = app.add_option("--max-exhaustive", cfg.max_exhaustive, "Largest domain enumerated in full");
    auto* format_opt = app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    auto* policy_opt = app.add_option("--policy", cfg.policy, "fresh, adams-bridge, unmasked, or per-stage b/r/- flags");
    auto* det_opt = app.add_flag("--deterministic", cfg.deterministic, "Zero every elapsed_ms");
    auto* threads_opt = app.add_option("--threads", cfg.threads, "Checker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--config", config_file, "JSON file of defaults keyed by flag name");
    app.add_option("--verify-witness", verify_file, "Re-check every failing witness in a report file");
    for (auto* o : {q_opt, k_opt, tw_list, seed_opt, samples_opt, max_opt, format_opt, policy_opt, det_opt,
                    threads_opt}) {
        o->group("Common");
    }
    app.fallthrough();

    std::function<Outcome()> action;

    PointwiseArgs pw;
    auto* pointwise = app.add_subcommand("check-pointwise", "Pointwise value independence (expected to FAIL)");
    pointwise->add_option("--tw", pw.tw, "Twiddle");
    pointwise->add_option("--search-bound", pw.search_bound, "Give up after this many comparisons");
    pointwise->callback([&] { action = [&] { return check_pointwise(cfg, pw); }; });

    ButterflyArgs bf;
    auto* butterfly = app.add_subcommand("check-butterfly", "Wire preimage counts and marginal value independence");
    butterfly->add_option("--tw", bf.tw, "Check only this twiddle");
    butterfly->add_option("--sweep-tw", bf.sweep_tw, "Random twiddles to try");
    butterfly->add_option("--sweep-inputs", bf.sweep_inputs, "Random share tuples per twiddle");
    butterfly->add_option("--gadget", bf.gadget, "reference or drop-mask")
        ->check(CLI::IsMember({"reference", "drop-mask"}));
    butterfly->callback([&] { action = [&] { return check_butterfly(cfg, bf); }; });

    PipelineArgs pl;
    auto* pipeline = app.add_subcommand("check-pipeline", "Future-update invariance and per-stage uniformity");
    pipeline->add_option("--contexts", pl.contexts, "Random contexts when not exhaustive");
    pipeline->add_option("--input", pl.input, "a,b,a1,b1");
    pipeline->callback([&] { action = [&] { return check_pipeline(cfg, pl); }; });

    BridgeArgs br;
    bool no_builtins = false;
    auto* bridge = app.add_subcommand("check-bridge", "Value independence against constant marginal");
    bridge->add_option("--tables", br.tables, "Random table instances");
    bridge->add_option("--rho", br.rho, "Randomness domain size of random tables");
    bridge->add_option("--table-file", br.table_file, "JSON table {q, rho, w[s0][s1][r]}");
    bridge->add_flag("--no-builtins", no_builtins, "Skip the built-in wire functions");
    bridge->callback([&] {
        br.builtins = !no_builtins;
        action = [&] { return check_bridge(cfg, br); };
    });

    MiArgs mi;
    auto* mi_cmd = app.add_subcommand("mi", "Mutual information between secret and wire");
    mi_cmd->add_option("--wire", mi.wire, "identity, reconstruction, mask-share, masked-share, butterfly-wire");
    mi_cmd->add_option("--tw", mi.tw, "Twiddle for butterfly-wire");
    mi_cmd->add_option("--wire-index", mi.wire_index, "Wire 0..3 for butterfly-wire")->check(CLI::Range(0, 3));
    mi_cmd->add_option("--distribution", mi.distribution_file, "JSON {joint: [[...]], exact}");
    mi_cmd->callback([&] { action = [&] { return mutual_info(cfg, mi); }; });

    NttArgs nt;
    auto* ntt = app.add_subcommand("ntt-selftest", "Round trip and naive DFT agreement");
    ntt->add_option("--n", nt.n, "Transform size");
    ntt->add_option("--trials", nt.trials, "Random vectors");
    ntt->callback([&] { action = [&] { return ntt_selftest(cfg, nt); }; });

    DemoArgs demo;
    auto* demo_cmd = app.add_subcommand("demo-adams-bridge", "Fresh masking against a partial policy");
    demo_cmd->add_option("--secrets", demo.secrets, "a,b,a1,b1:a,b,a1,b1");
    demo_cmd->add_flag("--remask-probes", demo.remask_probes, "Also probe the re-masked shares");
    demo_cmd->callback([&] { action = [&] { return demo_adams_bridge(cfg, demo); }; });

    SecondOrderArgs so;
    auto* second = app.add_subcommand("second-order", "Difference of the two shared-mask wires");
    second->add_option("--tw", so.tw, "Twiddle");
    second->add_option("--shares", so.shares, "a0,a1,b0,b1");
    second->callback([&] { action = [&] { return second_order(cfg, so); }; });

    auto* reproduce = app.add_subcommand("reproduce-all", "Every acceptance check in order");
    reproduce->callback([&] { action = [&] { return reproduce_all(cfg); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitExpected;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitExpected;
    } catch (const CLI::ParseError& e) {
        err << "maskcheck: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        bool seed_given = seed_opt->count() > 0;
        if (!config_file.empty()) {
            const ConfigLayer layer(read_json_file(config_file));
            layer.apply(q_opt, "q", q);
            layer.apply(k_opt, "stages", stages);
            layer.apply(tw_list, "twiddles", cfg.twiddles);
            seed_given = layer.apply(seed_opt, "seed", cfg.seed);
            layer.apply(samples_opt, "samples", cfg.samples);
            layer.apply(max_opt, "max_exhaustive", cfg.max_exhaustive);
            layer.apply(format_opt, "format", format);
            layer.apply(policy_opt, "policy", cfg.policy);
            layer.apply(det_opt, "deterministic", cfg.deterministic);
            layer.apply(threads_opt, "threads", cfg.threads);
        }
        if (!seed_given) cfg.seed = env_seed();
        if (q != 0 || q_opt->count() > 0) {
            if (q == 0 || q > kMaxModulus) throw UsageError("q must lie in [1, 2^62)");
            cfg.q = q;
        }
        if (k_opt->count() > 0 || stages != 0) cfg.stages = stages;
        if (format != "json" && format != "text") throw UsageError("--format is json or text");
        cfg.format = format == "text" ? Format::Text : Format::Json;
        if (cfg.threads == 0) cfg.threads = std::max(1u, std::thread::hardware_concurrency());

        Outcome outcome;
        if (!verify_file.empty()) {
            if (action) throw UsageError("--verify-witness takes no subcommand");
            outcome = verify_witness(read_json_file(verify_file), cfg);
        } else if (action) {
            outcome = action();
        } else {
            out << app.help();
            return kExitUsage;
        }

        if (cfg.deterministic) zero_elapsed(outcome.report);
        if (cfg.format == Format::Text) {
            out << render_text(outcome.report);
        } else {
            out << outcome.report.dump(2) << '\n';
        }
        return outcome.exit_code;
    } catch (const UsageError& e) {
        err << "maskcheck: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        err << "maskcheck: invalid argument: " << e.what() << '\n';
    } catch (const std::out_of_range& e) {
        err << "maskcheck: out of range: " << e.what() << '\n';
    } catch (const std::domain_error& e) {
        err << "maskcheck: " << e.what() << '\n';
    }
    return kExitUsage;
}

}  // namespace maskcheck::cli
