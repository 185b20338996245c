#include "maskcheck/ntt.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace maskcheck {

NttParams::NttParams(Modulus q, std::uint64_t n) : NttParams(q, n, primitive_root_of_unity(q, n)) {}

NttParams::NttParams(Modulus q, std::uint64_t n, const Zq& omega)
    : q_(q),
      n_(n),
      log_n_(static_cast<unsigned>(std::countr_zero(n))),
      omega_(omega),
      omega_inv_(Zq::one(q)),
      n_inv_(Zq::one(q)) {
    if (!is_prime(q.value())) {
        throw std::invalid_argument("NTT modulus " + std::to_string(q.value()) + " is not prime");
    }
    if (n == 0 || !std::has_single_bit(n) || (q.value() - 1) % n != 0) {
        throw std::invalid_argument("transform size " + std::to_string(n) +
                                    " must be a power of two dividing q - 1");
    }
    require_same_modulus(omega_, Zq::one(q));
    if (!has_exact_order(omega_, n)) {
        throw std::invalid_argument("omega " + std::to_string(omega.value()) +
                                    " does not have exact order " + std::to_string(n));
    }
    omega_inv_ = omega_.inverse();
    n_inv_ = Zq(n, q).inverse();
}

std::uint64_t bit_reverse(std::uint64_t x, unsigned bits) {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1u);
        x >>= 1;
    }
    return r;
}

namespace {

std::vector<Zq> transform(const NttParams& params, std::span<const Zq> input, const Zq& root,
                          const ButterflyObserver& observer) {
    const std::uint64_t n = params.size();
    if (input.size() != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " coefficients, got " +
                                    std::to_string(input.size()));
    }
    for (const Zq& x : input) require_same_modulus(x, root);

    std::vector<Zq> a;
    a.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) a.push_back(input[bit_reverse(i, params.log2_size())]);

    std::size_t stage = 0;
    for (std::uint64_t len = 2; len <= n; len <<= 1, ++stage) {
        const Zq step = root.pow(n / len);
        const std::uint64_t half = len / 2;
        for (std::uint64_t start = 0; start < n; start += len) {
            Zq tw = Zq::one(params.modulus());
            for (std::uint64_t j = 0; j < half; ++j, tw *= step) {
                const ButterflyStage bf{tw};
                const Zq& x = a[start + j];
                const Zq& y = a[start + j + half];
                const auto [hi, lo] = plain_butterfly(bf, x, y);
                if (observer) observer(stage, bf, x, y, hi, lo);
                a[start + j] = hi;
                a[start + j + half] = lo;
            }
        }
    }
    return a;
}

}  // namespace

std::vector<Zq> forward_ntt(const NttParams& params, std::span<const Zq> poly,
                            const ButterflyObserver& observer) {
    return transform(params, poly, params.omega(), observer);
}

std::vector<Zq> inverse_ntt(const NttParams& params, std::span<const Zq> values) {
    std::vector<Zq> out = transform(params, values, params.omega_inv(), {});
    for (Zq& x : out) x *= params.n_inv();
    return out;
}

std::vector<std::vector<ButterflyStage>> twiddle_schedule(const NttParams& params) {
    std::vector<std::vector<ButterflyStage>> schedule;
    const std::uint64_t n = params.size();
    for (std::uint64_t len = 2; len <= n; len <<= 1) {
        const Zq step = params.omega().pow(n / len);
        std::vector<ButterflyStage> stage;
        Zq tw = Zq::one(params.modulus());
        for (std::uint64_t j = 0; j < len / 2; ++j, tw *= step) stage.push_back(ButterflyStage{tw});
        schedule.push_back(std::move(stage));
    }
    return schedule;
}

NttPipeline lane_pipeline(const NttParams& params, std::optional<std::uint64_t> lane) {
    const std::uint64_t l = lane.value_or(params.size() / 2 - (params.size() >= 2 ? 1 : 0));
    const auto schedule = twiddle_schedule(params);
    std::vector<ButterflyStage> stages;
    for (const auto& stage : schedule) stages.push_back(stage[l % stage.size()]);
    return NttPipeline(params.modulus(), std::move(stages));
}

}  // namespace maskcheck
