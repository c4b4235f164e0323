// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/ppgen.hpp"

#include "fpm/errors.hpp"

namespace fpm {

namespace {

// Layout constants (documented in docs/array-layout.md).
constexpr int kWindow = 78;       // magnitude/complement window of a full row
constexpr int kLaneWindow = 25;   // per-lane window in packed mode
constexpr int kHiLaneBase = 52;   // multiplicand bit of the upper SP operand
constexpr u128 kWindowMask = mask_bits(kWindow);
constexpr u128 kLaneMask = mask_bits(kLaneWindow);

// (2^103 - sum_{j=0..12} 2^(78+2j)) >> 76: the sign-extension constant that
// balances the thirteen per-row sign bits.
constexpr u128 kSignExtBase = 0x2AAAAAC;

int bit(u128 v, int i)
{
    return static_cast<int>((v >> i) & 1);
}

} // namespace

MultiplierSlice select_slice(u128 multiplier, int iteration, bool packed)
{
    MultiplierSlice s;
    if (packed) {
        // lanes are packed {hi[47:24], lo[23:0]}; the upper lane is aligned
        // three positions up so its product lands at frame bit 55
        s.lo = static_cast<u32>(multiplier & mask_bits(24));
        s.hi = static_cast<u32>(((multiplier >> 24) & mask_bits(24)) << 3);
        return s;
    }
    s.lo = static_cast<u32>((multiplier >> (27 * iteration)) & kMask27);
    s.hi = s.lo;
    bool boundary = iteration > 0 && bit(multiplier, 27 * iteration - 1);
    s.boundary_hi = s.boundary_lo = boundary;
    return s;
}

BoothDigits booth_recode(u32 slice, bool boundary, RecodeTop top)
{
    BoothDigits out;
    auto b = [&](int k) -> int {
        if (k == -1)
            return boundary ? 1 : 0;
        if (k <= 26)
            return (slice >> k) & 1;
        if (k == 27 && top == RecodeTop::SignExtend)
            return (slice >> 26) & 1;
        return 0;
    };
    for (int j = 0; j < 14; ++j) {
        int v = b(2 * j - 1) + b(2 * j) - 2 * b(2 * j + 1);
        out[j].value = v;
        out[j].neg = v < 0;
        out[j].hot_one = v < 0;
    }
    return out;
}

long long booth_value(const BoothDigits& d)
{
    long long acc = 0;
    for (int j = 13; j >= 0; --j)
        acc = acc * 4 + d[j].value;
    return acc;
}

PartialProducts generate_rows(u128 multiplicand, const BoothDigits& digits_hi,
                              const BoothDigits& digits_lo, bool packed)
{
    PartialProducts out;
    if (!packed) {
        for (int j = 0; j < 14; ++j) {
            const BoothDigit& d = digits_hi[j];
            u128 mag = multiplicand * static_cast<unsigned>(d.neg ? -d.value : d.value);
            u128 local = d.neg ? (~mag & kWindowMask) : mag;
            out[j] = {local, j, 2 * j};
        }
        return out;
    }
    u128 mant_lo = multiplicand & mask_bits(24);
    u128 mant_hi = (multiplicand >> kHiLaneBase) & mask_bits(24);
    for (int j = 0; j < 14; ++j) {
        const BoothDigit& dl = digits_lo[j];
        const BoothDigit& dh = digits_hi[j];
        u128 lo_mag = mant_lo * static_cast<unsigned>(dl.neg ? -dl.value : dl.value);
        u128 hi_mag = mant_hi * static_cast<unsigned>(dh.neg ? -dh.value : dh.value);
        u128 lo = dl.neg ? (~lo_mag & kLaneMask) : lo_mag;
        u128 hi = dh.neg ? (~hi_mag & kLaneMask) : hi_mag;
        out[j] = {lo | (hi << kHiLaneBase), j, 2 * j};
    }
    return out;
}

namespace {

void place_hot(Frame14& rows, int host, int col, const char* what)
{
    if (bit(rows[host], col))
        throw ContractViolation(std::string("correction collision: ") + what);
    rows[host] |= u128{1} << col;
}

// textbook prefix for a packed lane row: {1, sbar} above the window, or
// {sbar, s, s} for the first row of the lane's sign chain
u128 lane_prefix(bool neg, bool first)
{
    u128 s = neg ? 1 : 0;
    if (first)
        return ((1 - s) << (kLaneWindow + 2)) | (s << (kLaneWindow + 1)) | (s << kLaneWindow);
    return (u128{1} << (kLaneWindow + 1)) | ((1 - s) << kLaneWindow);
}

} // namespace

CorrectedFrame insert_corrections(const PartialProducts& rows, const BoothDigits& digits_hi,
                                  const BoothDigits& digits_lo, bool packed)
{
    CorrectedFrame out;
    if (!packed) {
        for (int j = 0; j < 14; ++j) {
            u128 local = rows[j].bits;
            if (j <= 12)
                local |= u128{digits_hi[j].neg ? 0u : 1u} << kWindow; // sbar
            out.rows[j] = (local << (2 * j)) & kMask103;
        }
        for (int j = 0; j < 14; ++j) {
            if (!digits_hi[j].hot_one)
                continue;
            if (j <= 12)
                place_hot(out.rows, j + 1, 2 * j, "hot-one");
            else
                out.hot13_pending = true; // no free cell at column 26
        }
        return out;
    }

    // packed: rebuild with lane prefixes, then host the hot-ones
    // lo sign chain: rows 0..11 (row 12 is b23, never negative; row 13 is 0)
    // hi sign chain: rows 1..13 (row 0 is structurally zero)
    if (digits_lo[12].neg || digits_lo[13].value != 0 || digits_hi[0].value != 0)
        throw ContractViolation("packed digit structure violated");
    for (int j = 0; j < 14; ++j) {
        u128 lo = rows[j].bits & kLaneMask;
        u128 hi = (rows[j].bits >> kHiLaneBase) & kLaneMask;
        if (j <= 11)
            lo |= lane_prefix(digits_lo[j].neg, j == 0);
        if (j >= 1)
            hi |= lane_prefix(digits_hi[j].neg, j == 1);
        u128 local = lo | (hi << kHiLaneBase);
        out.rows[j] = (local << (2 * j)) & kMask103;
    }
    for (int j = 0; j <= 11; ++j)
        if (digits_lo[j].hot_one)
            place_hot(out.rows, j + 1, 2 * j, "lo hot-one");
    for (int j = 1; j <= 13; ++j)
        if (digits_hi[j].hot_one)
            place_hot(out.rows, j <= 12 ? j + 1 : 0, kHiLaneBase + 2 * j, "hi hot-one");
    return out;
}

CsaOut csa32(u128 feedback_sum, u128 feedback_carry, u128 addend)
{
    CsaOut o;
    o.sum = feedback_sum ^ feedback_carry ^ addend;
    u128 maj = (feedback_sum & feedback_carry) | (feedback_sum & addend) |
               (feedback_carry & addend);
    o.carry = (maj << 1) & kMask103;
    return o;
}

RowSet16 assemble_rowset(const CorrectedFrame& frame, const CsaOut& csa, bool packed,
                         int sign_units)
{
    RowSet16 set;
    for (int j = 0; j < 14; ++j)
        set.rows[j] = frame.rows[j];
    u128 sum_row = csa.sum;
    if (!packed) {
        if (sign_units < 0 || sign_units > 2)
            throw ContractViolation("sign_units out of range");
        u128 chunk = (kSignExtBase - static_cast<unsigned>(sign_units)) << 76;
        if ((sum_row >> 76) != 0)
            throw ContractViolation("CSA sum row top cells not free");
        sum_row |= chunk;
    }
    set.rows[14] = sum_row & kMask103;
    set.rows[15] = csa.carry & kMask103;
    return set;
}

void ppgen_layout_self_check()
{
    // hot-one hosts: row j+1 starts at column 2j+2, so its cells below that
    // are free; the packed upper lane's top hot-one uses row 0's upper half,
    // which carries digit 0 == 0 by construction.
    for (int j = 0; j <= 12; ++j) {
        int host_base = 2 * (j + 1);
        if (2 * j >= host_base)
            throw ContractViolation("non-packed hot-one host overlaps its window");
    }
    for (int j = 1; j <= 12; ++j) {
        int col = kHiLaneBase + 2 * j;
        int host_lo_top = 2 * (j + 1) + kLaneWindow + 2; // above the lo prefix
        int host_hi_base = kHiLaneBase + 2 * (j + 1);
        if (!(col > host_lo_top && col < host_hi_base))
            throw ContractViolation("packed hi hot-one host cell not free");
    }
    // sign-extension chunk cells [102:76] sit above the 76-bit CSA operands
    static_assert((kSignExtBase << 76) <= kMask103);
    static_assert(kWindow + 2 * 13 + 1 >= 103, "top row reaches the frame top");
    // the packed lo lane, prefixes included, never reaches the upper lane:
    // content tops out at column 2*11 + 25 + 2 = 49 < 55
    static_assert(2 * 11 + kLaneWindow + 2 < 55);
}

} // namespace fpm
