#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "maskcheck/report.hpp"
#include "report_json.hpp"

namespace maskcheck::cli {

enum class Format { Json, Text };

/// Settings shared by every subcommand. Unset fields take the subcommand's
/// own default.
struct RunConfig {
    std::optional<std::uint64_t> q;
    std::optional<std::size_t> stages;
    /// "" (automatic), "ntt-schedule", or a comma list.
    std::string twiddles;
    std::uint64_t seed = 0;
    std::uint64_t samples = 1000;
    std::uint64_t max_exhaustive = std::uint64_t{1} << 20;
    Format format = Format::Json;
    std::string policy = "adams-bridge";
    bool deterministic = false;
    unsigned threads = 1;

    CheckOptions options() const { return CheckOptions{max_exhaustive, samples, seed, threads}; }
};

struct Outcome {
    Json report;
    int exit_code = 0;
};

struct PointwiseArgs {
    std::uint64_t tw = 1;
    std::optional<std::uint64_t> search_bound;
};

struct ButterflyArgs {
    std::optional<std::uint64_t> tw;
    std::optional<std::uint64_t> sweep_tw;
    std::optional<std::uint64_t> sweep_inputs;
    std::string gadget = "reference";
};

struct PipelineArgs {
    std::optional<std::uint64_t> contexts;
    std::string input;
};

struct BridgeArgs {
    std::uint64_t tables = 100;
    std::optional<std::uint64_t> rho;
    std::string table_file;
    bool builtins = true;
};

struct MiArgs {
    std::string wire = "identity";
    std::uint64_t tw = 1;
    int wire_index = 0;
    std::string distribution_file;
};

struct NttArgs {
    std::uint64_t n = 256;
    std::uint64_t trials = 1000;
};

struct DemoArgs {
    /// "a,b,a1,b1:a,b,a1,b1"; empty for the default pair.
    std::string secrets;
    bool remask_probes = false;
};

struct SecondOrderArgs {
    std::optional<std::uint64_t> tw;
    /// "a0,a1,b0,b1"; empty to sweep.
    std::string shares;
};

Outcome check_pointwise(const RunConfig& cfg, const PointwiseArgs& args);
Outcome check_butterfly(const RunConfig& cfg, const ButterflyArgs& args);
Outcome check_pipeline(const RunConfig& cfg, const PipelineArgs& args);
Outcome check_bridge(const RunConfig& cfg, const BridgeArgs& args);
Outcome mutual_info(const RunConfig& cfg, const MiArgs& args);
Outcome ntt_selftest(const RunConfig& cfg, const NttArgs& args);
Outcome demo_adams_bridge(const RunConfig& cfg, const DemoArgs& args);
Outcome second_order(const RunConfig& cfg, const SecondOrderArgs& args);
/// Every acceptance criterion in order, one details[] entry each.
Outcome reproduce_all(const RunConfig& cfg);
/// Re-checks every FAIL (and FAIL-SECOND-ORDER) witness in a report.
Outcome verify_witness(const Json& report, const RunConfig& cfg);

}  // namespace maskcheck::cli
