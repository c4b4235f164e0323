// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/round.hpp"

#include "fpm/errors.hpp"

namespace fpm {

std::pair<u128, u128> compound_add(u128 v)
{
    return {v, v + 1};
}

bool rounding_decision(bool lsb, bool guard, bool round_bit, bool sticky, bool sign,
                       RoundingMode mode)
{
    bool below = guard | round_bit | sticky;
    switch (mode) {
    case RoundingMode::RN:
        return guard && (round_bit || sticky || lsb);
    case RoundingMode::RM:
        return sign && below;
    case RoundingMode::RP:
        return !sign && below;
    case RoundingMode::RZ:
        return false;
    }
    return false;
}

namespace {

int iterations_of_width(int w)
{
    return w <= 24 ? 1 : (w <= 53 ? 2 : 3);
}

} // namespace

RoundOutput sp_round(const RoundInput& in, bool upper_lane)
{
    if (in.prec.p != 24)
        throw ContractViolation("sp_round: precision must be 24");
    if (in.iter_sticky || in.iter_carry)
        throw ContractViolation("sp_round: single-iteration ops carry no residue");
    const int lane = upper_lane ? 55 : 0;
    u128 sv = (in.cs.sum >> lane) & mask_bits(48);
    u128 cv = (in.cs.carry >> lane) & mask_bits(48);
    // carry into the lane from the redundant split below it (zero for the
    // lower lane; the gap keeps the lower array's value out of the upper)
    u128 cin = 0;
    if (upper_lane)
        cin = ((in.cs.sum & mask_bits(55)) + (in.cs.carry & mask_bits(55))) >> 55;

    // assimilate below the 25-bit upper window [47:23]
    u128 below = (sv & mask_bits(23)) + (cv & mask_bits(23)) + cin;
    u128 win_cin = below >> 23;
    below &= mask_bits(23);

    // one half-adder level over the upper 25 bits ahead of the compound
    // adder; carries beyond the lane window are neglected
    u128 wa = sv >> 23, wb = cv >> 23;
    u128 win = ((wa ^ wb) + ((wa & wb) << 1) + win_cin) & mask_bits(25);

    int o = bit_of(win, 24); // product in [2^47, 2^48)
    u128 p48 = (win << 23) | below;
    bool lsb = bit_of(p48, 23 + o);
    bool guard = bit_of(p48, 22 + o);
    bool round_b = bit_of(p48, 21 + o);
    bool sticky = (p48 & mask_bits(21 + o)) != 0;

    bool inc = rounding_decision(lsb, guard, round_b, sticky, in.sign, in.mode);
    auto [s0, s1] = compound_add(p48 >> (23 + o));
    u128 sel = inc ? s1 : s0;

    RoundOutput out;
    out.prod_overflow = o != 0;
    out.inexact = guard | round_b | sticky;
    if (sel == (u128{1} << 24)) {
        if (o)
            throw ContractViolation("sp_round: impossible double overflow");
        out.significand = u128{1} << 23;
        out.exp_adjust = 1;
    } else {
        out.significand = sel;
        out.exp_adjust = o;
    }
    out.unrounded68 = p48 << (21 - o);
    out.unrounded_sticky = false;
    out.double_overflow = false;
    out.exp = in.exp + out.exp_adjust;
    return out;
}

RoundOutput dpep_round(const RoundInput& in)
{
    // interface property: no carry hides in the redundant pair beyond the
    // tracked wrap
    if (in.cs.wrap() != in.wrap)
        throw ContractViolation("dpep_round: untracked carry above bit 102");
    const int w = in.op_width;
    const int p = in.prec.p;
    const int frame_shift = 27 * (iterations_of_width(w) - 1);
    const int top = 2 * w - 1 - frame_shift;

    // carry tree: assimilate the pair and the iteration carry
    u128 v = in.cs.value() + (in.iter_carry ? 1 : 0);
    if ((v >> (top + 1)) != 0)
        throw ContractViolation("dpep_round: frame value out of range");

    int o = bit_of(v, top);
    // right pre-alignment: the rounding LSB sits at L for every precision
    const int L = top - p + o;
    u128 kept = v >> L;
    bool lsb = bit_of(v, L);
    bool guard = bit_of(v, L - 1);
    bool round_b = bit_of(v, L - 2);
    bool sticky = ((v & mask_bits(L - 2)) != 0) || in.iter_sticky;

    bool inc = rounding_decision(lsb, guard, round_b, sticky, in.sign, in.mode);
    auto [s0, s1] = compound_add(kept);
    u128 sel = inc ? s1 : s0;

    RoundOutput out;
    out.prod_overflow = o != 0;
    out.inexact = guard | round_b | sticky;
    bool crossed = sel == (u128{1} << p);
    if (crossed) {
        // left post-alignment collapses to the precision MSB
        out.significand = u128{1} << (p - 1);
        out.exp_adjust = o + 1;
    } else {
        out.significand = sel;
        out.exp_adjust = o;
    }
    out.double_overflow = crossed && o == 1;
    // unrounded normalized output, independent of the rounding decision
    int msb = top - 1 + o;
    if (msb >= 67) {
        out.unrounded68 = v >> (msb - 67);
        out.unrounded_sticky = ((v & mask_bits(msb - 67)) != 0) || in.iter_sticky;
    } else {
        out.unrounded68 = v << (67 - msb);
        out.unrounded_sticky = in.iter_sticky;
    }
    out.exp = in.exp + out.exp_adjust;
    return out;
}

} // namespace fpm
