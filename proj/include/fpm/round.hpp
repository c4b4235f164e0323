// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fpm/compress.hpp"
#include "fpm/dyadic.hpp"

namespace fpm {

// Input to a rounding unit: the 103-bit carry-save product plus the sticky
// and carry accumulated over the iterations. `wrap` is the tracked
// sign-correction wrap of the redundant pair; any wrap beyond it is the
// "additional carry" the rounder must never see (ContractViolation).
struct RoundInput {
    CarrySaveVector cs;
    bool sign = false;
    RoundingMode mode = RoundingMode::RN;
    Precision prec{};
    int op_width = 0;     // significand width of the operands (frame geometry)
    bool iter_sticky = false;
    bool iter_carry = false;
    bool wrap = false;
    long exp = 0;         // 1.f exponent of the non-overflow product
};

struct RoundOutput {
    u128 significand = 0;   // p bits, MSB set
    int exp_adjust = 0;     // 0, 1, or 2 above the non-overflow exponent
    bool prod_overflow = false; // unrounded product reached [2^(2w-1), 2^2w)
    u128 unrounded68 = 0;   // normalized unrounded result, top bit set
    bool unrounded_sticky = false;
    bool inexact = false;
    bool double_overflow = false;
    long exp = 0;           // result 1.f exponent (in.exp + exp_adjust)
};

// sum and sum+1 of the assimilated window
std::pair<u128, u128> compound_add(u128 v);

// The shared IEEE increment decision.
bool rounding_decision(bool lsb, bool guard, bool round_bit, bool sticky, bool sign,
                       RoundingMode mode);

// SSE single-precision rounder; two identical instances serve the lower
// ([47:0]) and upper ([102:55]) lanes. One half-adder level compresses the
// upper 25 bits ahead of the compound adder; carries beyond the lane window
// are neglected.
RoundOutput sp_round(const RoundInput& in, bool upper_lane = false);

// Combined rounder for SSE-DP, x87-SP/DP/EP, IP68 and INT76: right
// pre-alignment of the rounding point, carry/sticky trees absorbing the
// iteration residue, compound addition, left post-alignment, and double
// significand overflow detection.
RoundOutput dpep_round(const RoundInput& in);

} // namespace fpm
