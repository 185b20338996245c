#include "maskcheck/gadget.hpp"

namespace maskcheck {

std::pair<Zq, Zq> share(const Zq& secret, const Zq& mask) {
    return {secret - mask, mask};
}

ButterflyGadget reference_gadget() {
    return [](const ButterflyStage& stage, const ShareQuad& shares, const Zq& m) {
        return butterfly_output(stage, shares, m);
    };
}

ButterflyGadget mask_dropping_gadget() {
    return [](const ButterflyStage& stage, const ShareQuad& shares, const Zq& m) {
        const auto [a_out, b_out] =
            plain_butterfly(stage, reconstruct_a(shares), reconstruct_b(shares));
        return ButterflyWires{a_out, m, b_out, m};
    };
}

}  // namespace maskcheck
