#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>

#include "maskcheck/zq.hpp"

namespace maskcheck {

/// Two 2-share arithmetic sharings: a = a0 + a1 and b = b0 + b1 (mod q).
struct ShareQuad {
    Zq a0;
    Zq a1;
    Zq b0;
    Zq b1;

    Modulus modulus() const { return a0.modulus(); }
    friend bool operator==(const ShareQuad&, const ShareQuad&) = default;
};

/// One butterfly stage; the twiddle is public.
struct ButterflyStage {
    Zq tw;

    friend bool operator==(const ButterflyStage&, const ButterflyStage&) = default;
};

/// The four output wires of a masked butterfly. wire1 and wire3 both carry
/// the output mask and are kept as separate fields on purpose: probing
/// either one is a distinct observation.
struct ButterflyWires {
    Zq wire0;
    Zq wire1;
    Zq wire2;
    Zq wire3;

    friend bool operator==(const ButterflyWires&, const ButterflyWires&) = default;
};

/// Output wire index in {0, 1, 2, 3}, range-checked on construction.
class WireIndex {
public:
    constexpr explicit WireIndex(int index) : index_(index) {
        if (index < 0 || index > 3) throw std::out_of_range("wire index must be in [0, 3]");
    }
    constexpr int value() const noexcept { return index_; }
    static constexpr std::array<WireIndex, 4> all() {
        return {WireIndex(0), WireIndex(1), WireIndex(2), WireIndex(3)};
    }
    friend constexpr bool operator==(WireIndex, WireIndex) = default;

private:
    int index_;
};

/// Returns (secret - mask, mask).
std::pair<Zq, Zq> share(const Zq& secret, const Zq& mask);

inline Zq reconstruct(const Zq& s0, const Zq& s1) { return s0 + s1; }

inline Zq reconstruct_a(const ShareQuad& s) { return reconstruct(s.a0, s.a1); }
inline Zq reconstruct_b(const ShareQuad& s) { return reconstruct(s.b0, s.b1); }

/// Unmasked Cooley-Tukey butterfly: (a + tw*b, a - tw*b).
inline std::pair<Zq, Zq> plain_butterfly(const ButterflyStage& stage, const Zq& a, const Zq& b) {
    const Zq t = stage.tw * b;
    return {a + t, a - t};
}

/// Masked butterfly with fresh output mask m. Reconstructs a and b from the
/// shares, then emits (a + tw*b - m, m, a - tw*b - m, m).
inline ButterflyWires butterfly_output(const ButterflyStage& stage, const ShareQuad& shares,
                                       const Zq& m) {
    const Zq a = reconstruct_a(shares);
    const Zq b = reconstruct_b(shares);
    const auto [a_out, b_out] = plain_butterfly(stage, a, b);
    return ButterflyWires{a_out - m, m, b_out - m, m};
}

inline Zq select_wire(WireIndex i, const ButterflyWires& wires) {
    switch (i.value()) {
        case 0: return wires.wire0;
        case 1: return wires.wire1;
        case 2: return wires.wire2;
        default: return wires.wire3;
    }
}

/// (a0 - rA, a1 + rA, b0 - rB, b1 + rB).
inline ShareQuad remask(const ShareQuad& state, const Zq& ra, const Zq& rb) {
    return ShareQuad{state.a0 - ra, state.a1 + ra, state.b0 - rb, state.b1 + rb};
}

/// Signature of a butterfly gadget. Checkers take one so that mutated
/// gadgets can be fed through the same enumeration.
using ButterflyGadget =
    std::function<ButterflyWires(const ButterflyStage&, const ShareQuad&, const Zq&)>;

/// The reference gadget, i.e. butterfly_output.
ButterflyGadget reference_gadget();

/// Mutant whose output wires drop the mask entirely (wire0 = a + tw*b,
/// wire2 = a - tw*b). Used to exercise the checkers' failure paths.
ButterflyGadget mask_dropping_gadget();

}  // namespace maskcheck
