// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpm/errors.hpp"
#include "fpm/oracle.hpp"

using namespace fpm;

namespace {

// Independent rounding check: enumerate both p-bit neighbors of |v| and pick
// per mode/sign; ties in RN go to the even mantissa.
DyadicValue round_by_neighbors(const DyadicValue& v, RoundingMode mode, int p)
{
    if (v.is_zero())
        return v;
    long bits = static_cast<long>(mpz_sizeinbase(v.mant.get_mpz_t(), 2));
    if (bits <= p)
        return v;
    long k = bits - p;
    mpz_class lo = v.mant >> k;
    mpz_class hi = lo + 1;
    mpz_class lo_full = lo << k;
    mpz_class rem = v.mant - lo_full;
    bool pick_hi = false;
    switch (mode) {
    case RoundingMode::RZ:
        pick_hi = false;
        break;
    case RoundingMode::RM:
        pick_hi = v.sign;
        break;
    case RoundingMode::RP:
        pick_hi = !v.sign;
        break;
    case RoundingMode::RN: {
        mpz_class twice = rem << 1;
        mpz_class ulp = mpz_class(1) << k;
        if (twice > ulp)
            pick_hi = true;
        else if (twice == ulp)
            pick_hi = mpz_odd_p(lo.get_mpz_t());
        break;
    }
    }
    return DyadicValue::make(v.sign, pick_hi ? hi : lo, v.exp2 + k);
}

DyadicValue rnd_value(SplitMix64& rng, int maxbits)
{
    int nb = 1 + static_cast<int>(rng.next_below(maxbits));
    u128 m = rng.next_bits(nb) | (u128{1} << (nb - 1));
    long e = static_cast<long>(rng.next_below(4000)) - 2000;
    return DyadicValue::from_bits(rng.next() & 1, m, e);
}

const RoundingMode kModes[4] = {RoundingMode::RN, RoundingMode::RM, RoundingMode::RP,
                                RoundingMode::RZ};

} // namespace

TEST_CASE("operand_value basics")
{
    DecodedOperand op;
    op.sign = false;
    op.exp = static_cast<u32>(kInternalBias); // normalized 1.0: the -67 term
    op.mant = u128{1} << 67;                  // re-points the 68-bit integer
    op.cls = OperandClass::Normal;
    DyadicValue v = operand_value(op);
    CHECK(v.mant == 1);
    CHECK(v.exp2 == 0);

    op.cls = OperandClass::Zero;
    op.mant = 0;
    op.exp = 0;
    CHECK(operand_value(op).is_zero());

    op.cls = OperandClass::Inf;
    CHECK_THROWS_AS((void)operand_value(op), ContractViolation);
}

TEST_CASE("operand_value matches the direct formula on random operands")
{
    SplitMix64 rng(0xacc40001);
    for (int i = 0; i < 100000; ++i) {
        DecodedOperand op;
        op.sign = rng.next() & 1;
        op.exp = static_cast<u32>(1 + rng.next_below((1u << 18) - 2));
        op.mant = rng.next_bits(68) | (u128{1} << 67);
        op.cls = OperandClass::Normal;
        DyadicValue v = operand_value(op);
        // direct big-integer evaluation of the value formula
        mpz_class direct = mpz_from_u128(op.mant);
        long e = static_cast<long>(op.exp) - kInternalBias - 67;
        mpz_class lhs = v.mant << (v.exp2 - e >= 0 ? v.exp2 - e : 0);
        mpz_class rhs = direct << (v.exp2 - e >= 0 ? 0 : e - v.exp2);
        CHECK(lhs == rhs);
        CHECK(v.sign == op.sign);
    }
}

TEST_CASE("exact_product: identity, simple case, big-integer agreement")
{
    DyadicValue one = DyadicValue::from_bits(false, 1, 0);
    DyadicValue b = DyadicValue::from_bits(false, 0b11, -1); // 1.5
    CHECK(exact_product(one, b) == b);
    DyadicValue sq = exact_product(b, b); // 2.25
    CHECK(sq.mant == 9);
    CHECK(sq.exp2 == -2);

    SplitMix64 rng(0xacc40002);
    for (int i = 0; i < 50000; ++i) {
        DyadicValue x = rnd_value(rng, 76);
        DyadicValue y = rnd_value(rng, 76);
        DyadicValue p = exact_product(x, y);
        CHECK(p.mant * (mpz_class(1)) == x.mant * y.mant >>
              (x.exp2 + y.exp2 == p.exp2 ? 0 : p.exp2 - (x.exp2 + y.exp2)));
        CHECK(p.sign == (x.sign ^ y.sign));
    }
}

TEST_CASE("round_value: exact values unchanged in all modes")
{
    SplitMix64 rng(0xacc40003);
    for (int i = 0; i < 20000; ++i) {
        int p = 24;
        u128 m = rng.next_bits(p) | (u128{1} << (p - 1));
        DyadicValue v = DyadicValue::from_bits(rng.next() & 1, m, -12);
        for (RoundingMode mode : kModes)
            CHECK(round_value(v, mode, Precision{p, -126, 127}) == v);
    }
}

TEST_CASE("round_value equals the neighbor-enumeration oracle")
{
    SplitMix64 rng(0xacc40004);
    const int precs[4] = {24, 53, 64, 68};
    for (int i = 0; i < 100000; ++i) {
        DyadicValue v = rnd_value(rng, 100);
        int p = precs[rng.next_below(4)];
        for (RoundingMode mode : kModes) {
            DyadicValue got = round_value(v, mode, Precision{p, 0, 0});
            DyadicValue want = round_by_neighbors(v, mode, p);
            CHECK(got == want);
        }
    }
}

TEST_CASE("round_value: exact halfway ties go to the even neighbor")
{
    SplitMix64 rng(0xacc40005);
    for (int i = 0; i < 20000; ++i) {
        int p = 24;
        u128 kept = rng.next_bits(p) | (u128{1} << (p - 1));
        // v = kept.1000...0 exactly halfway
        DyadicValue v = DyadicValue::from_bits(false, (kept << 1) | 1, -1);
        DyadicValue r = round_value(v, RoundingMode::RN, Precision{p, 0, 0});
        u128 res = u128_from_mpz(r.mant) << (r.exp2 > 0 ? r.exp2 : 0);
        CHECK((res & 1) == 0); // even mantissa at the kept scale
        DyadicValue w = round_by_neighbors(v, RoundingMode::RN, p);
        CHECK(r == w);
    }
}

TEST_CASE("round_value monotone and mode-ordered")
{
    SplitMix64 rng(0xacc40006);
    Precision prec{24, -126, 127};
    for (int i = 0; i < 30000; ++i) {
        DyadicValue a = rnd_value(rng, 60);
        DyadicValue b = rnd_value(rng, 60);
        a.sign = false;
        b.sign = false;
        if (compare_magnitude(a, b) > 0)
            std::swap(a, b);
        for (RoundingMode mode : kModes) {
            DyadicValue ra = round_value(a, mode, prec);
            DyadicValue rb = round_value(b, mode, prec);
            CHECK(compare_magnitude(ra, rb) <= 0);
        }
        // positive v: Minf == Trunc <= Near <= Inf
        DyadicValue rm = round_value(a, RoundingMode::RM, prec);
        DyadicValue rz = round_value(a, RoundingMode::RZ, prec);
        DyadicValue rn = round_value(a, RoundingMode::RN, prec);
        DyadicValue rp = round_value(a, RoundingMode::RP, prec);
        CHECK(rm == rz);
        CHECK(compare_magnitude(rz, rn) <= 0);
        CHECK(compare_magnitude(rn, rp) <= 0);
    }
}

TEST_CASE("check_range thresholds")
{
    Precision prec{24, -126, 127};
    DyadicValue one = DyadicValue::from_bits(false, 1, 0);
    CHECK(check_range(one, prec, RoundingMode::RN, false) == ResultFlags{});

    DyadicValue big = DyadicValue::from_bits(false, 1, 128); // 2^(emax+1)
    auto f = check_range(big, prec, RoundingMode::RN, false);
    CHECK(f.overflow);
    CHECK(f.inexact);

    DyadicValue tiny = DyadicValue::from_bits(false, 1, -127); // 2^(emin-1)
    auto g = check_range(tiny, prec, RoundingMode::RN, true);
    CHECK(g.denormal_unrounded_path);
    CHECK(g.underflow);
    CHECK_FALSE(g.overflow);

    // max finite is not an overflow
    DyadicValue maxf = DyadicValue::from_bits(false, mask_bits(24), 127 - 23);
    CHECK_FALSE(check_range(maxf, prec, RoundingMode::RN, false).overflow);
}

TEST_CASE("reference_multiply: trivial and special paths")
{
    const FpFormat& sp = format(FormatKind::SseSp);
    for (RoundingMode mode : kModes) {
        auto r = reference_multiply(0x3F800000, 0x3F800000, sp, sp, mode);
        CHECK(r.word == 0x3F800000);
        CHECK(r.flags == ResultFlags{});
    }
    // QNaN propagation bypasses arithmetic
    auto rn = reference_multiply(0x7FC00123, 0x3F800000, sp, sp, RoundingMode::RN);
    CHECK(rn.word == 0x7FC00123);
    CHECK_FALSE(rn.flags.invalid);
    CHECK_FALSE(rn.unrounded.valid);

    // pinned regression vector, spot-checked by hand:
    // (2 - 2^-23)^2 = 2^48 - 2^25 + 1 at scale 2^-46; RN keeps 0xFFFFFE
    auto rr = reference_multiply(0x3FFFFFFF, 0x3FFFFFFF, sp, sp, RoundingMode::RN);
    CHECK(rr.word == 0x407FFFFE);
    CHECK(rr.flags.inexact);
}

TEST_CASE("reference_multiply: x87 result precision differs from operands")
{
    const FpFormat& ep = format(FormatKind::X87Ep);
    // (1 + 2^-40) * (1 + 2^-40) = 1 + 2^-39 + 2^-80: exact at EP+, needs
    // rounding at x87-SP precision 24
    u128 a = (u128{0x3FFF} << 64) | (u128{1} << 63) | (u128{1} << 23);
    auto r_ep = reference_multiply(a, a, ep, ep, RoundingMode::RN);
    CHECK(r_ep.flags.inexact); // 2^-80 term is below even EP precision
    auto r_sp = reference_multiply(a, a, ep, format(FormatKind::X87Sp), RoundingMode::RN);
    CHECK(r_sp.word == a - (u128{1} << 23) + 0); // rounds back to 1.0
    CHECK(r_sp.flags.inexact);
}
