// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fpm/dyadic.hpp"
#include "fpm/formats.hpp"

namespace fpm {

// Exact reference semantics for one multiply, computed with dyadic
// rationals. Ground truth for every end-to-end check in the harness.

// (-1)^sign * mant * 2^(exp - (2^17-1) - 67), exactly.
DyadicValue operand_value(const DecodedOperand& op);

DyadicValue exact_product(const DyadicValue& a, const DyadicValue& b);

// Round to p significant bits with unbounded exponent.
DyadicValue round_value(const DyadicValue& v, RoundingMode mode, const Precision& prec);

// Flags for an already-rounded value; `inexact` is whether rounding changed
// the value (tracked by the caller since round_value is pure).
ResultFlags check_range(const DyadicValue& rounded, const Precision& prec,
                        RoundingMode mode, bool inexact);

// Top 68 bits of the exact normalized product plus a sticky summary of the
// rest; what the unit's denormal-support output is compared against.
struct UnroundedNorm {
    u128 top68 = 0;
    bool sticky = false;
    long exp = 0; // 1.f exponent of the product
    bool valid = false;

    bool operator==(const UnroundedNorm&) const = default;
};

struct RefResult {
    u128 word = 0;
    ResultFlags flags;
    UnroundedNorm unrounded;
};

// Steps 1-7 for one scalar multiply, including the special-value
// short-circuit and the masked-response denormal result path.
RefResult reference_multiply(u128 a_bits, u128 b_bits, const FpFormat& fmt_in,
                             const FpFormat& fmt_out, RoundingMode mode);

} // namespace fpm
