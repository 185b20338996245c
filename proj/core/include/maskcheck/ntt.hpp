#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "maskcheck/gadget.hpp"
#include "maskcheck/pipeline.hpp"
#include "maskcheck/zq.hpp"

namespace maskcheck {

/// Transform parameters: prime q, power-of-two n with n | q - 1, and omega
/// of exact order n.
class NttParams {
public:
    /// Picks omega with primitive_root_of_unity.
    NttParams(Modulus q, std::uint64_t n);
    /// Uses the given omega after checking its order.
    NttParams(Modulus q, std::uint64_t n, const Zq& omega);

    Modulus modulus() const noexcept { return q_; }
    std::uint64_t size() const noexcept { return n_; }
    unsigned log2_size() const noexcept { return log_n_; }
    const Zq& omega() const noexcept { return omega_; }
    const Zq& omega_inv() const noexcept { return omega_inv_; }
    const Zq& n_inv() const noexcept { return n_inv_; }

private:
    Modulus q_;
    std::uint64_t n_;
    unsigned log_n_;
    Zq omega_;
    Zq omega_inv_;
    Zq n_inv_;
};

/// Called once per butterfly executed by the transform, with the stage
/// index, the twiddle, the inputs and the outputs.
using ButterflyObserver = std::function<void(std::size_t stage, const ButterflyStage& tw,
                                             const Zq& a, const Zq& b, const Zq& a_out,
                                             const Zq& b_out)>;

/// Iterative radix-2 decimation-in-time transform. The input is permuted to
/// bit-reversed order internally and the output is in natural order:
/// out[k] = sum_j in[j] * omega^(j*k). Every butterfly is plain_butterfly.
std::vector<Zq> forward_ntt(const NttParams& params, std::span<const Zq> poly,
                            const ButterflyObserver& observer = {});

/// Inverse of forward_ntt: same network with omega^-1, then scaled by n^-1.
std::vector<Zq> inverse_ntt(const NttParams& params, std::span<const Zq> values);

/// Twiddles of each stage in the order forward_ntt uses them. Stage s
/// (butterfly span 2^(s+1)) holds omega^(j * n / 2^(s+1)) for j < 2^s.
std::vector<std::vector<ButterflyStage>> twiddle_schedule(const NttParams& params);

/// One coefficient lane through every stage: stage s uses
/// schedule[s][lane mod 2^s]. The default lane n/2 - 1 picks the last
/// twiddle of every stage.
NttPipeline lane_pipeline(const NttParams& params, std::optional<std::uint64_t> lane = std::nullopt);

std::uint64_t bit_reverse(std::uint64_t x, unsigned bits);

}  // namespace maskcheck
