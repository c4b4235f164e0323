// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "fpm/bits.hpp"

namespace fpm {

// One 27-bit multiplier slice pair as produced by the alignment muxes, plus
// the recode boundary bit carried per lane (top bit of the previous slice).
// In non-packed modes hi == lo.
struct MultiplierSlice {
    u32 hi = 0;
    u32 lo = 0;
    bool boundary_hi = false;
    bool boundary_lo = false;
};

struct BoothDigit {
    int value = 0; // in {-2,-1,0,+1,+2}
    bool neg = false;
    bool hot_one = false; // pending +1 completing the two's complement
};

using BoothDigits = std::array<BoothDigit, 14>;

// An 81-bit partial product pattern before frame placement. Negative
// multiples are held one's-complemented; the hot-one stays deferred.
struct PartialProductRow {
    u128 bits = 0;   // local pattern, bit 0 has weight 4^row_index
    int row_index = 0;
    int shift = 0;   // frame column of local bit 0 (= 2*row_index)
};

using PartialProducts = std::array<PartialProductRow, 14>;
using Frame14 = std::array<u128, 14>; // placed rows with corrections

// The sixteen 103-bit addend rows fed to the compressor tree.
struct RowSet16 {
    std::array<u128, 16> rows{};
};

// How the recoder treats the bit above the slice: sign-extended for
// non-final iterations (the top bit is borrowed against the next slice's
// boundary), zero-extended for final slices and the packed lanes.
enum class RecodeTop { SignExtend, ZeroExtend };

MultiplierSlice select_slice(u128 multiplier, int iteration, bool packed);

// Sum identity: sum(value_j * 4^j) = slice + boundary - 2^27 * slice[26]
// when sign-extending, and = slice + boundary when zero-extending.
BoothDigits booth_recode(u32 slice, bool boundary, RecodeTop top = RecodeTop::SignExtend);

// recoded integer value, for identity checks
long long booth_value(const BoothDigits& d);

PartialProducts generate_rows(u128 multiplicand, const BoothDigits& digits_hi,
                              const BoothDigits& digits_lo, bool packed);

// Places the rows into the frame and inserts hot-ones and the per-row sign
// bits (non-packed) or the lane prefix bits (packed). Returns the deferred
// top-row hot-one, which the caller feeds to the CSA addend input.
struct CorrectedFrame {
    Frame14 rows{};
    bool hot13_pending = false;
};
CorrectedFrame insert_corrections(const PartialProducts& rows, const BoothDigits& digits_hi,
                                  const BoothDigits& digits_lo, bool packed);

// Bitwise 3-2 compression of the two feedback terms with the addend:
// a + b + c == sum + carry, carry pre-shifted.
struct CsaOut {
    u128 sum = 0;
    u128 carry = 0;
};
CsaOut csa32(u128 feedback_sum, u128 feedback_carry, u128 addend);

// Final row placement: 14 partial products + the two CSA terms, with the
// sign-extension chunk for `sign_units` = fb_negative + tracked wrap carry
// (0..2) inserted into the free top cells of the CSA sum row.
RowSet16 assemble_rowset(const CorrectedFrame& frame, const CsaOut& csa, bool packed,
                         int sign_units);

// Static layout check: every correction cell is structurally free in its
// host row for all digit sign combinations. Throws ContractViolation.
void ppgen_layout_self_check();

} // namespace fpm
