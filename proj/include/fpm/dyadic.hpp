// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include "fpm/bits.hpp"

namespace fpm {

// The four x86 rounding modes.
enum class RoundingMode { RN, RM, RP, RZ };

const char* to_string(RoundingMode m);

// Target precision for rounding: p significand bits plus the exponent range
// of the destination format (exponents are those of a 1.f normalization).
struct Precision {
    int p;
    long emin;
    long emax;
};

/// Exact value (-1)^sign * mant * 2^exp2 with arbitrary-precision mant.
/// Canonical form: zero => mant == 0 and exp2 == 0; otherwise mant is odd.
struct DyadicValue {
    bool sign = false;
    mpz_class mant = 0;
    long exp2 = 0;

    bool is_zero() const { return mant == 0; }
    void canonicalize();

    // exponent of the value's MSB: value = +-1.f * 2^msb_exp()
    long msb_exp() const;

    static DyadicValue make(bool sign, const mpz_class& mant, long exp2);
    static DyadicValue from_bits(bool sign, u128 mant, long exp2);
};

bool operator==(const DyadicValue& a, const DyadicValue& b);

// |a| <=> |b|
int compare_magnitude(const DyadicValue& a, const DyadicValue& b);

mpz_class mpz_from_u128(u128 v);
u128 u128_from_mpz(const mpz_class& v);

} // namespace fpm
