#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "maskcheck/gadget.hpp"
#include "maskcheck/report.hpp"
#include "maskcheck/zq.hpp"

namespace maskcheck {

/// A k-stage butterfly lane. k = 0 is legal.
class NttPipeline {
public:
    NttPipeline(Modulus q, std::vector<ButterflyStage> stages);
    static NttPipeline from_twiddles(Modulus q, std::span<const std::uint64_t> twiddles);

    Modulus modulus() const noexcept { return q_; }
    std::size_t size() const noexcept { return stages_.size(); }
    const ButterflyStage& stage(std::size_t i) const { return stages_.at(i); }
    const std::vector<ButterflyStage>& stages() const noexcept { return stages_; }
    std::vector<std::uint64_t> twiddles() const;

private:
    Modulus q_;
    std::vector<ButterflyStage> stages_;
};

/// Fresh values consumed by one stage. bf_mask masks the butterfly output;
/// remask_a / remask_b refresh the shares handed to the next stage.
struct StageRandomness {
    Zq bf_mask;
    Zq remask_a;
    Zq remask_b;

    friend bool operator==(const StageRandomness&, const StageRandomness&) = default;
};

enum class RandomnessField { BfMask = 0, RemaskA = 1, RemaskB = 2 };

inline constexpr RandomnessField kAllFields[] = {RandomnessField::BfMask, RandomnessField::RemaskA,
                                                 RandomnessField::RemaskB};

std::string_view to_string(RandomnessField f);
Zq& field_ref(StageRandomness& s, RandomnessField f);
const Zq& field_ref(const StageRandomness& s, RandomnessField f);

class PipelineRandomness {
public:
    PipelineRandomness(Modulus q, std::vector<StageRandomness> per_stage);
    static PipelineRandomness zero(Modulus q, std::size_t k);
    /// Stage-major order: (bf_mask, remask_a, remask_b) per stage, 3k values.
    static PipelineRandomness from_values(Modulus q, std::span<const std::uint64_t> values);
    /// The index-th point of the q^{3k} domain in odometer order (stage-major,
    /// last field fastest).
    static PipelineRandomness from_index(Modulus q, std::size_t k, std::uint64_t index);

    Modulus modulus() const noexcept { return q_; }
    std::size_t size() const noexcept { return per_stage_.size(); }
    const StageRandomness& operator[](std::size_t i) const { return per_stage_[i]; }
    const StageRandomness& at(std::size_t i) const { return per_stage_.at(i); }
    std::vector<std::uint64_t> values() const;

    friend bool operator==(const PipelineRandomness&, const PipelineRandomness&) = default;

private:
    friend PipelineRandomness update_randomness(const PipelineRandomness&, std::size_t,
                                                RandomnessField, const Zq&);
    Modulus q_;
    std::vector<StageRandomness> per_stage_;
};

/// Secrets a, b and the initial input masks a1, b1.
struct PipelineInput {
    Zq a;
    Zq b;
    Zq a1;
    Zq b1;

    static PipelineInput from_values(Modulus q, std::uint64_t a, std::uint64_t b, std::uint64_t a1,
                                     std::uint64_t b1);
    friend bool operator==(const PipelineInput&, const PipelineInput&) = default;
};

/// (a - a1, a1, b - b1, b1).
ShareQuad initial_shares(const PipelineInput& input);

/// Stage n's four wires taken as the shares of stage n + 1:
/// ((a' - m, m), (b' - m, m)).
inline ShareQuad repack(const ButterflyWires& w) { return ShareQuad{w.wire0, w.wire1, w.wire2, w.wire3}; }

/// Output wires of stage i. Stage 0 runs the butterfly on the initial shares
/// with bf_mask[0]; stage n + 1 repacks stage n's wires, re-masks them with
/// (remask_a[n], remask_b[n]) and runs the butterfly with bf_mask[n + 1].
ButterflyWires pipeline_state_at(const NttPipeline& p, const PipelineRandomness& rands,
                                 std::size_t i, const PipelineInput& input);

/// Everything observable in one pass through the lane.
struct StageTrace {
    ButterflyWires wires;
    /// Re-masked shares handed to the next stage; meaningful for i < k - 1.
    ShareQuad remasked;
};

/// All k stages at once; trace[i].wires == pipeline_state_at(p, rands, i, input).
std::vector<StageTrace> pipeline_trace(const NttPipeline& p, const PipelineRandomness& rands,
                                       const PipelineInput& input);

PipelineRandomness update_randomness(const PipelineRandomness& rands, std::size_t j,
                                     RandomnessField field, const Zq& value);

/// Appends the input (a, b, a1, b1) and every stage's randomness
/// ("bfMask.s", "remaskA.s", "remaskB.s") to a witness, making it
/// self-contained.
void append_context(Witness& w, const PipelineRandomness& rands, const PipelineInput& input);

/// Reads back what append_context wrote. Throws std::invalid_argument when a
/// field is missing.
std::pair<PipelineRandomness, PipelineInput> context_from_witness(const Witness& w, Modulus q,
                                                                  std::size_t k);

using PipelineStateFunction = std::function<ButterflyWires(
    const NttPipeline&, const PipelineRandomness&, std::size_t, const PipelineInput&)>;

/// Verifies that stage i's wires do not move when any field of stage j > i
/// is rewritten. Every replacement value in Z_q is tried when q fits the
/// exhaustive budget; otherwise `opts.samples` seeded values per field.
/// `state` defaults to pipeline_state_at and exists so a broken recursion
/// can be checked.
CheckReport check_update_future_invariance(const NttPipeline& p, const PipelineRandomness& rands,
                                           std::size_t i, std::size_t j,
                                           const PipelineInput& input,
                                           const CheckOptions& opts = {},
                                           const PipelineStateFunction& state = {});

/// Runs check_update_future_invariance for every (i, j > i) pair over many
/// (randomness, input) contexts: all q^{3k+4} of them when that fits the
/// budget, otherwise `opts.samples` seeded contexts.
CheckReport check_update_future_invariance_sweep(const NttPipeline& p, const CheckOptions& opts = {});

}  // namespace maskcheck
