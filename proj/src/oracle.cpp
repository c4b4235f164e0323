// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/oracle.hpp"

#include "fpm/errors.hpp"

namespace fpm {

const char* to_string(RoundingMode m)
{
    switch (m) {
    case RoundingMode::RN: return "rn";
    case RoundingMode::RM: return "rm";
    case RoundingMode::RP: return "rp";
    case RoundingMode::RZ: return "rz";
    }
    return "?";
}

mpz_class mpz_from_u128(u128 v)
{
    mpz_class hi = static_cast<unsigned long>(v >> 64);
    mpz_class lo = static_cast<unsigned long>(v & ~u64{0});
    return (hi << 64) | lo;
}

u128 u128_from_mpz(const mpz_class& v)
{
    mpz_class lo = v & mpz_class((~u64{0}));
    mpz_class hi = v >> 64;
    mpz_class him = hi & mpz_class((~u64{0}));
    return (u128{him.get_ui()} << 64) | lo.get_ui();
}

void DyadicValue::canonicalize()
{
    if (mant == 0) {
        exp2 = 0;
        return;
    }
    unsigned long tz = mpz_scan1(mant.get_mpz_t(), 0);
    if (tz > 0) {
        mant >>= tz;
        exp2 += static_cast<long>(tz);
    }
}

long DyadicValue::msb_exp() const
{
    return exp2 + static_cast<long>(mpz_sizeinbase(mant.get_mpz_t(), 2)) - 1;
}

DyadicValue DyadicValue::make(bool sign, const mpz_class& mant, long exp2)
{
    DyadicValue v;
    v.sign = sign;
    v.mant = mant;
    v.exp2 = exp2;
    v.canonicalize();
    return v;
}

DyadicValue DyadicValue::from_bits(bool sign, u128 mant, long exp2)
{
    return make(sign, mpz_from_u128(mant), exp2);
}

bool operator==(const DyadicValue& a, const DyadicValue& b)
{
    if (a.is_zero() && b.is_zero())
        return true;
    return a.sign == b.sign && a.mant == b.mant && a.exp2 == b.exp2;
}

int compare_magnitude(const DyadicValue& a, const DyadicValue& b)
{
    if (a.is_zero() || b.is_zero())
        return a.is_zero() ? (b.is_zero() ? 0 : -1) : 1;
    long ea = a.msb_exp(), eb = b.msb_exp();
    if (ea != eb)
        return ea < eb ? -1 : 1;
    // align and compare mantissas
    long da = ea - a.exp2, db = eb - b.exp2;
    mpz_class ma = a.mant, mb = b.mant;
    if (da < db)
        ma <<= (db - da);
    else if (db < da)
        mb <<= (da - db);
    return cmp(ma, mb) < 0 ? -1 : (ma == mb ? 0 : 1);
}

DyadicValue operand_value(const DecodedOperand& op)
{
    if (!op.finite())
        throw ContractViolation("operand_value: INF/NAN operand");
    if (op.cls == OperandClass::Zero)
        return DyadicValue::make(op.sign, 0, 0);
    return DyadicValue::from_bits(op.sign, op.mant,
                                  static_cast<long>(op.exp) - kInternalBias - 67);
}

DyadicValue exact_product(const DyadicValue& a, const DyadicValue& b)
{
    return DyadicValue::make(a.sign ^ b.sign, a.mant * b.mant, a.exp2 + b.exp2);
}

DyadicValue round_value(const DyadicValue& v, RoundingMode mode, const Precision& prec)
{
    if (v.is_zero())
        return v;
    long bits = static_cast<long>(mpz_sizeinbase(v.mant.get_mpz_t(), 2));
    long drop = bits - prec.p;
    if (drop <= 0)
        return v;
    mpz_class kept = v.mant >> drop;
    mpz_class tail = v.mant - (kept << drop);
    mpz_class half = mpz_class(1) << (drop - 1);
    bool increment = false;
    switch (mode) {
    case RoundingMode::RN:
        if (tail > half)
            increment = true;
        else if (tail == half)
            increment = mpz_odd_p(kept.get_mpz_t());
        break;
    case RoundingMode::RM:
        increment = v.sign && tail != 0;
        break;
    case RoundingMode::RP:
        increment = !v.sign && tail != 0;
        break;
    case RoundingMode::RZ:
        break;
    }
    if (increment)
        kept += 1;
    return DyadicValue::make(v.sign, kept, v.exp2 + drop);
}

ResultFlags check_range(const DyadicValue& rounded, const Precision& prec,
                        RoundingMode mode, bool inexact)
{
    (void)mode;
    ResultFlags f;
    f.inexact = inexact;
    if (rounded.is_zero())
        return f;
    long e = rounded.msb_exp();
    if (e > prec.emax) {
        f.overflow = true;
        f.inexact = true;
    } else if (e < prec.emin) {
        // tininess detected after rounding with unbounded exponent
        f.denormal_unrounded_path = true;
        f.underflow = inexact; // x86 masked response flags underflow only if inexact
    }
    return f;
}

namespace {

// Round the exact product at the denormal position of fmt and finish the
// flags. q = significant bits kept for a result with 1.f exponent e.
void denormal_result(const DyadicValue& exact, const FpFormat& fmt, RoundingMode mode,
                     RefResult& out)
{
    long e = exact.msb_exp();
    long q = fmt.sig_width - (fmt.emin - e);
    Precision dprec{1, fmt.emin, fmt.emax};
    DyadicValue r;
    if (q >= 1) {
        dprec.p = static_cast<int>(q);
        r = round_value(exact, mode, dprec);
    } else {
        // below the smallest denormal's half-ulp region: round between 0 and
        // the minimum denormal
        DyadicValue min_den = DyadicValue::make(exact.sign, 1,
                                                fmt.emin - (fmt.sig_width - 1));
        bool up;
        switch (mode) {
        case RoundingMode::RN: {
            // halfway point is min_den/2
            DyadicValue half = DyadicValue::make(false, 1, min_den.exp2 - 1);
            up = compare_magnitude(exact, half) > 0;
            break;
        }
        case RoundingMode::RM:
            up = exact.sign;
            break;
        case RoundingMode::RP:
            up = !exact.sign;
            break;
        default:
            up = false;
        }
        r = up ? min_den : DyadicValue::make(exact.sign, 0, 0);
    }
    bool inexact = !(r == exact);
    out.flags.inexact |= inexact;
    out.flags.denormal_unrounded_path = true;
    // masked x86 response: underflow flagged iff tiny (already established)
    // and the delivered result is inexact
    out.flags.underflow = inexact;
    out.word = encode_result(r, fmt, out.flags, mode);
}

} // namespace

RefResult reference_multiply(u128 a_bits, u128 b_bits, const FpFormat& fmt_in,
                             const FpFormat& fmt_out, RoundingMode mode)
{
    RefResult out;
    DecodedOperand a = decode_operand(a_bits, fmt_in);
    DecodedOperand b = decode_operand(b_bits, fmt_in);
    if (auto sp = classify_special(a, b, fmt_out)) {
        out.word = sp->word;
        out.flags = sp->flags;
        return out;
    }
    DyadicValue va = operand_value(a);
    DyadicValue vb = operand_value(b);
    DyadicValue exact = exact_product(va, vb);

    // unrounded normalized output: top 68 bits + sticky of the exact product
    {
        long bits = static_cast<long>(mpz_sizeinbase(exact.mant.get_mpz_t(), 2));
        out.unrounded.valid = true;
        out.unrounded.exp = exact.msb_exp();
        if (bits <= 68) {
            out.unrounded.top68 = u128_from_mpz(exact.mant) << (68 - bits);
            out.unrounded.sticky = false;
        } else {
            out.unrounded.top68 = u128_from_mpz(exact.mant >> (bits - 68));
            mpz_class rest = exact.mant & ((mpz_class(1) << (bits - 68)) - 1);
            out.unrounded.sticky = rest != 0;
        }
    }

    Precision prec = precision_of(format(fmt_out.kind));
    DyadicValue rounded = round_value(exact, mode, prec);
    bool inexact = !(rounded == exact);
    out.flags = check_range(rounded, prec, mode, inexact);

    if (out.flags.overflow) {
        out.word = encode_result(rounded, fmt_out, out.flags, mode);
        return out;
    }
    if (out.flags.denormal_unrounded_path) {
        denormal_result(exact, fmt_out, mode, out);
        return out;
    }
    out.word = encode_result(rounded, fmt_out, out.flags, mode);
    return out;
}

} // namespace fpm
