#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maskcheck/information.hpp"
#include "maskcheck/pipeline.hpp"
#include "maskcheck/report.hpp"

namespace maskcheck {

struct StagePolicy {
    bool fresh_bf_mask = true;
    bool fresh_remask = true;
    friend bool operator==(const StagePolicy&, const StagePolicy&) = default;
};

/// Which per-stage randomness is freshly drawn. A stage with both flags
/// false is an unmasked round.
class MaskingPolicy {
public:
    explicit MaskingPolicy(std::vector<StagePolicy> stages, std::string name = "custom");

    /// Every stage fresh.
    static MaskingPolicy fresh(std::size_t k);
    /// Fresh output mask at stage 0 only, no re-masking anywhere.
    static MaskingPolicy adams_bridge(std::size_t k);
    /// Nothing fresh: a deterministic circuit.
    static MaskingPolicy unmasked(std::size_t k);
    /// Parses "fresh", "adams-bridge", "unmasked", or a comma list of per-stage
    /// flags such as "br,b,-" (b = fresh bfMask, r = fresh remask, - = none).
    static MaskingPolicy parse(const std::string& spec, std::size_t k);

    std::size_t size() const noexcept { return stages_.size(); }
    const StagePolicy& operator[](std::size_t i) const { return stages_[i]; }
    const std::vector<StagePolicy>& stages() const noexcept { return stages_; }
    const std::string& name() const noexcept { return name_; }
    std::string describe() const;

private:
    std::vector<StagePolicy> stages_;
    std::string name_;
};

struct FreeVariable {
    std::size_t stage;
    RandomnessField field;
    friend bool operator==(const FreeVariable&, const FreeVariable&) = default;
};

/// A set of pipeline randomness assignments: the listed variables range over
/// Z_q, every other one is pinned to 0.
class RandomnessDomain {
public:
    /// All 3k variables free: q^{3k} points.
    static RandomnessDomain full(Modulus q, std::size_t k);

    RandomnessDomain(Modulus q, std::size_t k, std::vector<FreeVariable> free);

    Modulus modulus() const noexcept { return q_; }
    std::size_t stages() const noexcept { return k_; }
    const std::vector<FreeVariable>& free_variables() const noexcept { return free_; }
    bool is_free(std::size_t stage, RandomnessField field) const;
    /// q^(free variable count), saturating.
    std::uint64_t size() const;
    /// Point from one value per free variable, in free_variables() order.
    PipelineRandomness point(std::span<const std::uint64_t> free_values) const;
    /// index-th point in odometer order (last free variable fastest).
    PipelineRandomness point(std::uint64_t index) const;

private:
    Modulus q_;
    std::size_t k_;
    std::vector<FreeVariable> free_;
};

/// Pins every variable the policy does not refresh to 0.
RandomnessDomain apply_policy(const RandomnessDomain& domain, const MaskingPolicy& policy);

struct SecretPair {
    PipelineInput first;
    PipelineInput second;
};

/// The default secret classes: (a, b) = (0, 0) against (1, 0), input masks 0.
SecretPair default_secret_pair(Modulus q);

enum class ProbeKind { Output, Remask };

/// One observable wire: an output wire of a stage (index 0..3) or, when
/// enabled, a re-masked share handed to the next stage (a0, a1, b0, b1).
struct Probe {
    std::size_t stage;
    ProbeKind kind;
    int index;
    std::string label() const;
};

enum class LeakageVerdict { Uniform, SecretDependent };
std::string_view to_string(LeakageVerdict v);

struct WireAssessment {
    std::size_t pair;
    Probe probe;
    Histogram first;
    Histogram second;
    double tvd = 0.0;
    MutualInfo mi;
    LeakageVerdict verdict = LeakageVerdict::Uniform;
    /// For SecretDependent: stage, "wire" (or "remask_share" for a remask
    /// probe), the smallest value whose counts differ, and both counts.
    std::optional<Witness> witness;
};

struct LeakageAssessment {
    std::string policy;
    Mode mode = Mode::Exhaustive;
    std::uint64_t domain_size = 0;
    std::uint64_t contexts = 0;
    std::optional<std::uint64_t> seed;
    std::vector<WireAssessment> wires;
    std::chrono::nanoseconds elapsed{0};

    bool all_uniform() const;
};

/// Histograms every probe over the policy's randomness domain, once per
/// secret of each pair, and compares them.
///
/// The domain is enumerated when it fits `opts.max_exhaustive`. Otherwise
/// `opts.samples` seeded contexts are drawn; within each, a stage whose
/// bfMask is free has that mask enumerated in full, so each stage's
/// histogram is a sum of exact per-context histograms. Both secrets of a
/// pair see the same contexts.
LeakageAssessment assess_leakage(const NttPipeline& p, const MaskingPolicy& policy,
                                 std::span<const SecretPair> pairs, const CheckOptions& opts = {},
                                 bool include_remask_wires = false);

struct DesignPrincipleReport {
    std::vector<std::uint64_t> twiddles;
    SecretPair secrets;
    LeakageAssessment fresh;
    LeakageAssessment partial;
    std::vector<std::string> notes;

    bool fresh_uniform() const { return fresh.all_uniform(); }
    bool partial_uniform() const { return partial.all_uniform(); }
};

/// Fresh-everywhere against a partial policy (fresh at stage 0 only unless
/// given) on the same pipeline and secrets.
DesignPrincipleReport design_principle_report(const NttPipeline& p, const CheckOptions& opts = {},
                                              std::optional<SecretPair> secrets = std::nullopt,
                                              std::optional<MaskingPolicy> partial = std::nullopt,
                                              bool include_remask_wires = false);

}  // namespace maskcheck
