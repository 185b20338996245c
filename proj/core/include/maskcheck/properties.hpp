#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maskcheck/gadget.hpp"
#include "maskcheck/information.hpp"
#include "maskcheck/pipeline.hpp"
#include "maskcheck/report.hpp"
#include "maskcheck/zq.hpp"

namespace maskcheck {

/// A pair of secrets (a, b) fed to one butterfly.
struct Secrets {
    Zq a;
    Zq b;
    friend bool operator==(const Secrets&, const Secrets&) = default;
};

// ---------------------------------------------------------------------------
// Wire functions with fresh randomness r in [0, rho).
// ---------------------------------------------------------------------------

/// Evaluatable map (s0, s1, r) -> output, where s0 + s1 is the secret and r
/// ranges over [0, rho). Outputs are arbitrary integers, which covers any
/// finite output type through an encoding table.
class WireFunctionR {
public:
    using Fn = std::function<std::uint64_t(const Zq& s0, const Zq& s1, std::uint64_t r)>;

    WireFunctionR(Modulus q, std::uint64_t rho, Fn fn, std::string name = "custom");

    /// Table indexed as table[(s0 * q + s1) * rho + r].
    static WireFunctionR from_table(Modulus q, std::uint64_t rho, std::vector<std::uint64_t> table,
                                    std::string name = "table");
    static WireFunctionR mask_share(Modulus q);      ///< w = s1, rho = 1
    static WireFunctionR masked_share(Modulus q);    ///< w = s0, rho = 1
    static WireFunctionR reconstruction(Modulus q);  ///< w = s0 + s1, rho = 1
    /// Butterfly wire with (s0, s1) as the shares of a, b fixed to (b0, b1),
    /// and r in [0, q) as the output mask.
    static WireFunctionR butterfly_wire(const ButterflyStage& stage, WireIndex wire, const Zq& b0,
                                        const Zq& b1);

    std::uint64_t operator()(const Zq& s0, const Zq& s1, std::uint64_t r) const { return fn_(s0, s1, r); }
    Modulus modulus() const noexcept { return q_; }
    std::uint64_t rho() const noexcept { return rho_; }
    const std::string& name() const noexcept { return name_; }

private:
    Modulus q_;
    std::uint64_t rho_;
    Fn fn_;
    std::string name_;
};

/// Counts of w(x - s1, s1, r) over (s1, r) in Z_q x [0, rho).
Histogram marginal_histogram_r(const WireFunctionR& w, const Zq& x);

/// w(x - s1, s1, r) == w(x' - s1, s1, r) for all s1, r, x, x'.
CheckReport check_value_independent_r(const WireFunctionR& w, const CheckOptions& opts = {});

/// marginal_histogram_r(w, x) is the same for every x; the executable form of
/// "zero mutual information under uniform (s1, r)".
CheckReport check_constant_marginal(const WireFunctionR& w, const CheckOptions& opts = {});

/// Rows x in Z_q, each row the marginal histogram of w at x.
JointCounts joint_counts(const WireFunctionR& w);

// ---------------------------------------------------------------------------
// Single butterfly.
// ---------------------------------------------------------------------------

/// Searches for a change of secret, masks fixed, that changes a wire value.
/// Order: wire, then varied secret (a before b), then a1, b1, m, a, b and the
/// replacement value. FAIL is the expected outcome for q > 1. Returns
/// INCONCLUSIVE when `search_bound` tuples were tried without a verdict.
CheckReport check_pointwise_vi(Modulus q, const ButterflyStage& stage,
                               std::optional<std::uint64_t> search_bound = std::nullopt);

/// |{m in Z_q : select_wire(i, gadget(stage, shares, m)) = v}| by enumeration.
std::uint64_t wire_preimage_count(const ButterflyStage& stage, WireIndex wire,
                                  const ShareQuad& shares, const Zq& v);
std::uint64_t wire_preimage_count(const ButterflyGadget& gadget, const ButterflyStage& stage,
                                  WireIndex wire, const ShareQuad& shares, const Zq& v);

/// Four preimage counts in one pass over m: entry i counts masks with
/// wire i equal to targets[i].
std::array<std::uint64_t, 4> wire_preimage_counts(const ButterflyStage& stage,
                                                  const ShareQuad& shares,
                                                  const std::array<Zq, 4>& targets);

/// Largest q for which per-value histograms over the mask are held densely.
inline constexpr std::uint64_t kDenseHistogramLimit = std::uint64_t{1} << 25;

/// Dense per-wire counts over m: result[i][v] = preimage count of v on wire i.
/// Requires q <= kDenseHistogramLimit.
std::array<std::vector<std::uint32_t>, 4> wire_mask_histograms(const ButterflyGadget& gadget,
                                                               const ButterflyStage& stage,
                                                               const ShareQuad& shares);

/// Every wire and every v has exactly one preimage mask. An exhaustive FAIL
/// names the first (wire, v) whose count exceeds 1.
CheckReport check_butterfly_wire_count(const ButterflyStage& stage, const ShareQuad& shares,
                                       const CheckOptions& opts = {},
                                       const ButterflyGadget& gadget = {});

/// For each wire i and value v, the mask preimage counts under (a, b) and
/// (a', b'), both shared with input masks (a1, b1), agree and equal 1.
CheckReport check_marginal_vi(const ButterflyStage& stage, const Zq& a1, const Zq& b1,
                              const Secrets& secrets, const Secrets& secrets_prime,
                              const CheckOptions& opts = {}, const ButterflyGadget& gadget = {});

/// Shared-mask second-order demonstration: wire0 - wire2 is constant over m
/// and equals a' - b' = 2 tw b. The expected verdict is SecondOrderLeak.
CheckReport second_order_leak_demo(const ButterflyStage& stage, const ShareQuad& shares);

// ---------------------------------------------------------------------------
// Pipelines.
// ---------------------------------------------------------------------------

/// Enumerates the observed stage's bfMask with the rest of `context` frozen;
/// PASS iff exactly one mask yields v on `wire`.
CheckReport check_pipeline_uniform(const NttPipeline& p, const PipelineInput& input,
                                   const PipelineRandomness& context, std::size_t stage,
                                   WireIndex wire, const Zq& v);

/// Histogram of one wire over the observed stage's bfMask, `context` frozen.
Histogram pipeline_mask_histogram(const NttPipeline& p, const PipelineInput& input,
                                  const PipelineRandomness& context, std::size_t stage,
                                  WireIndex wire);

/// Batch form: every stage, every wire and every v, over all q^{3k}
/// contexts when they fit the budget, else `opts.samples` seeded contexts.
/// The mask histogram of each (context, stage, wire) is built once and every
/// v is read from it.
CheckReport check_pipeline_uniform_sweep(const NttPipeline& p, const PipelineInput& input,
                                         const CheckOptions& opts = {});

/// k = 1 pipeline: for fixed input masks (a1, b1) and both secrets, every
/// wire's histogram over bfMask is the constant 1, hence equal.
CheckReport check_single_stage_full_marginal(Modulus q, const ButterflyStage& stage, const Zq& a1,
                                             const Zq& b1, const Secrets& secrets,
                                             const Secrets& secrets_prime);

/// Per-wire histograms of a one-stage pipeline summed over every
/// (a1, b1, bfMask) in Z_q^3.
std::array<Histogram, 4> full_joint_marginal(const ButterflyStage& stage, const Secrets& secrets);

}  // namespace maskcheck
