// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/formats.hpp"

#include <array>
#include <cstdio>

#include "fpm/errors.hpp"

namespace fpm {

std::string to_hex(u128 v, int hex_digits)
{
    char buf[40];
    int n = 0;
    do {
        int nib = static_cast<int>(v & 0xf);
        buf[n++] = "0123456789abcdef"[nib];
        v >>= 4;
    } while (v != 0);
    while (n < hex_digits)
        buf[n++] = '0';
    std::string out;
    for (int i = n - 1; i >= 0; --i)
        out.push_back(buf[i]);
    return out;
}

u128 from_hex(const std::string& s)
{
    u128 v = 0;
    for (char c : s) {
        int nib;
        if (c >= '0' && c <= '9')
            nib = c - '0';
        else if (c >= 'a' && c <= 'f')
            nib = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            nib = c - 'A' + 10;
        else if (c == '_' || c == 'x' || c == 'X')
            continue;
        else
            throw std::invalid_argument("bad hex digit in '" + s + "'");
        v = (v << 4) | static_cast<unsigned>(nib);
    }
    return v;
}

namespace {

// storage_width, sig_width(p), op_sig_width, exp_width, bias, explicit int, emin, emax
constexpr std::array<FpFormat, 7> kFormats = {{
    {FormatKind::SseSp, 32, 24, 24, 8, 127, false, -126, 127},
    {FormatKind::SseDp, 64, 53, 53, 11, 1023, false, -1022, 1023},
    {FormatKind::X87Sp, 80, 24, 64, 15, 16383, true, -16382, 16383},
    {FormatKind::X87Dp, 80, 53, 64, 15, 16383, true, -16382, 16383},
    {FormatKind::X87Ep, 80, 64, 64, 15, 16383, true, -16382, 16383},
    {FormatKind::Ip68, 87, 68, 68, 18, kInternalBias, true, -131070, 131071},
    {FormatKind::Int76, 95, 76, 76, 18, kInternalBias, true, -131070, 131071},
}};

constexpr u32 kExpAllOnes = (1u << 18) - 1;
constexpr u128 kIntBit68 = u128{1} << 67;
constexpr u128 kQuietBit68 = u128{1} << 66;

} // namespace

const FpFormat& format(FormatKind kind)
{
    return kFormats[static_cast<int>(kind)];
}

const char* to_string(FormatKind kind)
{
    switch (kind) {
    case FormatKind::SseSp: return "sse-sp";
    case FormatKind::SseDp: return "sse-dp";
    case FormatKind::X87Sp: return "x87-sp";
    case FormatKind::X87Dp: return "x87-dp";
    case FormatKind::X87Ep: return "x87-ep";
    case FormatKind::Ip68: return "ip68";
    case FormatKind::Int76: return "int76";
    }
    return "?";
}

std::optional<FormatKind> format_from_string(const std::string& name)
{
    for (const auto& f : kFormats)
        if (name == to_string(f.kind))
            return f.kind;
    return std::nullopt;
}

Precision precision_of(const FpFormat& fmt)
{
    return Precision{fmt.sig_width, fmt.emin, fmt.emax};
}

std::string to_string(const ResultFlags& f)
{
    std::string s;
    if (f.invalid)
        s += 'i';
    if (f.overflow)
        s += 'o';
    if (f.underflow)
        s += 'u';
    if (f.inexact)
        s += 'x';
    if (f.denormal_unrounded_path)
        s += 'd';
    return s.empty() ? "-" : s;
}

namespace {

DecodedOperand make_special(bool sign, OperandClass cls, u128 mant68)
{
    DecodedOperand op;
    op.sign = sign;
    op.cls = cls;
    op.exp = (cls == OperandClass::Zero) ? 0 : kExpAllOnes;
    op.mant = (cls == OperandClass::Zero) ? 0 : mant68;
    return op;
}

// Normalized finite operand from a w-bit significand and its 1.f exponent.
DecodedOperand make_finite(bool sign, long e_unbiased, u128 sig, int w, bool was_denormal)
{
    DecodedOperand op;
    op.sign = sign;
    int shift = (w - 1) - top_bit_index(sig);
    sig <<= shift;
    op.mant = sig << (68 - w);
    long e = e_unbiased - shift + kInternalBias;
    op.exp = static_cast<u32>(e);
    op.cls = was_denormal ? OperandClass::Denormal : OperandClass::Normal;
    return op;
}

// non-canonical pattern sentinel: an SNaN with empty payload
DecodedOperand non_canonical(bool sign)
{
    return make_special(sign, OperandClass::SNan, kIntBit68);
}

} // namespace

DecodedOperand decode_operand(u128 bits, const FpFormat& fmt)
{
    if (fmt.kind == FormatKind::Int76)
        throw ContractViolation("INT76 is datapath-internal and has no storage decode");
    const int w = fmt.op_sig_width;
    if (fmt.kind == FormatKind::SseSp || fmt.kind == FormatKind::SseDp) {
        const int fw = w - 1; // fraction field width
        bool sign = bit_of(bits, fmt.storage_width - 1);
        u32 e = static_cast<u32>((bits >> fw) & mask_bits(fmt.exp_width));
        u128 frac = bits & mask_bits(fw);
        u32 emax_field = (1u << fmt.exp_width) - 1;
        if (e == emax_field) {
            if (frac == 0)
                return make_special(sign, OperandClass::Inf, kIntBit68);
            u128 mant = (frac | (u128{1} << fw)) << (68 - w);
            bool quiet = bit_of(frac, fw - 1);
            return make_special(sign, quiet ? OperandClass::QNan : OperandClass::SNan, mant);
        }
        if (e == 0) {
            if (frac == 0)
                return make_special(sign, OperandClass::Zero, 0);
            return make_finite(sign, 1 - fmt.bias, frac, w, true);
        }
        u128 sig = frac | (u128{1} << fw);
        return make_finite(sign, static_cast<long>(e) - fmt.bias, sig, w, false);
    }

    // explicit-integer-bit formats (x87 register file, IP68, INT76)
    bool sign = bit_of(bits, fmt.storage_width - 1);
    u32 e = static_cast<u32>((bits >> w) & mask_bits(fmt.exp_width));
    u128 sig = bits & mask_bits(w);
    bool intb = bit_of(sig, w - 1);
    u32 emax_field = (1u << fmt.exp_width) - 1;
    if (e == emax_field) {
        if (!intb)
            return non_canonical(sign); // pseudo-inf / pseudo-NaN
        u128 frac = sig & mask_bits(w - 1);
        if (frac == 0)
            return make_special(sign, OperandClass::Inf, kIntBit68);
        u128 mant = sig << (68 - w);
        bool quiet = bit_of(sig, w - 2);
        return make_special(sign, quiet ? OperandClass::QNan : OperandClass::SNan, mant);
    }
    if (e == 0) {
        if (sig == 0)
            return make_special(sign, OperandClass::Zero, 0);
        if (intb)
            return non_canonical(sign); // pseudo-denormal
        if (fmt.kind == FormatKind::Ip68 || fmt.kind == FormatKind::Int76)
            return non_canonical(sign); // internal formats carry normal operands only
        return make_finite(sign, 1 - fmt.bias, sig, w, true);
    }
    if (!intb)
        return non_canonical(sign); // unnormal
    return make_finite(sign, static_cast<long>(e) - fmt.bias, sig, w, false);
}

u128 encode_parts(bool sign, long e, u128 sig, int sig_bits, const FpFormat& fmt)
{
    const int w = fmt.op_sig_width;
    u128 s = u128{sign ? 1u : 0u} << (fmt.storage_width - 1);
    if (fmt.kind == FormatKind::SseSp || fmt.kind == FormatKind::SseDp) {
        const int fw = w - 1;
        if (e >= fmt.emin && sig_bits == w) {
            u128 biased = static_cast<u128>(e + fmt.bias);
            return s | (biased << fw) | (sig & mask_bits(fw));
        }
        // denormal: stored exponent 0, value = frac * 2^(emin - fw)
        long pos = e - (sig_bits - 1) - (fmt.emin - fw);
        if (sig == 0)
            return s;
        return s | (sig << pos);
    }
    if (e >= fmt.emin && sig_bits == w) {
        u128 biased = static_cast<u128>(e + fmt.bias);
        return s | (biased << w) | sig;
    }
    if (sig == 0)
        return s;
    long pos = e - (sig_bits - 1) - (fmt.emin - (w - 1));
    return s | (sig << pos);
}

u128 encode_zero(bool sign, const FpFormat& fmt)
{
    return u128{sign ? 1u : 0u} << (fmt.storage_width - 1);
}

u128 encode_inf(bool sign, const FpFormat& fmt)
{
    u128 s = u128{sign ? 1u : 0u} << (fmt.storage_width - 1);
    const int w = fmt.op_sig_width;
    u128 eall = mask_bits(fmt.exp_width);
    if (fmt.kind == FormatKind::SseSp || fmt.kind == FormatKind::SseDp)
        return s | (eall << (w - 1));
    return s | (eall << w) | (u128{1} << (w - 1));
}

u128 encode_max_finite(bool sign, const FpFormat& fmt)
{
    u128 sig = mask_bits(fmt.sig_width) << (fmt.op_sig_width - fmt.sig_width);
    return encode_parts(sign, fmt.emax, sig, fmt.op_sig_width, fmt);
}

u128 encode_default_qnan(const FpFormat& fmt)
{
    // x86 "real indefinite": negative QNaN with empty payload
    const int w = fmt.op_sig_width;
    u128 s = u128{1} << (fmt.storage_width - 1);
    u128 eall = mask_bits(fmt.exp_width);
    if (fmt.kind == FormatKind::SseSp || fmt.kind == FormatKind::SseDp)
        return s | (eall << (w - 1)) | (u128{1} << (w - 2));
    return s | (eall << w) | (u128{1} << (w - 1)) | (u128{1} << (w - 2));
}

u128 encode_propagated_qnan(const DecodedOperand& op, const FpFormat& fmt)
{
    const int w = fmt.op_sig_width;
    u128 s = u128{op.sign ? 1u : 0u} << (fmt.storage_width - 1);
    u128 eall = mask_bits(fmt.exp_width);
    u128 mant = op.mant | kQuietBit68;
    u128 sig = mant >> (68 - w);
    if (fmt.kind == FormatKind::SseSp || fmt.kind == FormatKind::SseDp)
        return s | (eall << (w - 1)) | (sig & mask_bits(w - 1));
    return s | (eall << w) | sig;
}

u128 encode_result(const DyadicValue& v, const FpFormat& fmt, const ResultFlags& flags)
{
    return encode_result(v, fmt, flags, RoundingMode::RN);
}

u128 encode_result(const DyadicValue& v, const FpFormat& fmt, const ResultFlags& flags,
                   RoundingMode mode)
{
    if (fmt.kind == FormatKind::Int76)
        throw ContractViolation("INT76 is datapath-internal and has no storage encode");
    if (flags.overflow) {
        bool open_side = (mode == RoundingMode::RN) ||
                         (mode == RoundingMode::RP && !v.sign) ||
                         (mode == RoundingMode::RM && v.sign);
        return open_side ? encode_inf(v.sign, fmt) : encode_max_finite(v.sign, fmt);
    }
    if (v.is_zero())
        return encode_zero(v.sign, fmt);
    int bits = mpz_sizeinbase(v.mant.get_mpz_t(), 2);
    long e = v.msb_exp();
    if (bits > fmt.sig_width || e > fmt.emax || e < fmt.emin - (fmt.sig_width - 1)) {
        if (!flags.underflow && !flags.denormal_unrounded_path)
            throw ContractViolation("encode_result: value not representable and no flag set");
    }
    u128 sig = u128_from_mpz(v.mant);
    if (e >= fmt.emin) {
        sig <<= fmt.op_sig_width - bits; // left-align to full width
        return encode_parts(v.sign, e, sig, fmt.op_sig_width, fmt);
    }
    return encode_parts(v.sign, e, sig, bits, fmt);
}

std::optional<SpecialResult> classify_special(const DecodedOperand& a,
                                              const DecodedOperand& b,
                                              const FpFormat& fmt_out)
{
    SpecialResult r{};
    auto is_nan = [](const DecodedOperand& o) {
        return o.cls == OperandClass::QNan || o.cls == OperandClass::SNan;
    };
    if (is_nan(a) || is_nan(b)) {
        const DecodedOperand& n = is_nan(a) ? a : b; // first-operand precedence
        r.flags.invalid = (a.cls == OperandClass::SNan || b.cls == OperandClass::SNan);
        r.word = encode_propagated_qnan(n, fmt_out);
        return r;
    }
    bool a_inf = a.cls == OperandClass::Inf;
    bool b_inf = b.cls == OperandClass::Inf;
    bool a_zero = a.cls == OperandClass::Zero;
    bool b_zero = b.cls == OperandClass::Zero;
    bool sign = a.sign ^ b.sign;
    if ((a_inf && b_zero) || (a_zero && b_inf)) {
        r.flags.invalid = true;
        r.word = encode_default_qnan(fmt_out);
        return r;
    }
    if (a_inf || b_inf) {
        r.word = encode_inf(sign, fmt_out);
        return r;
    }
    if (a_zero || b_zero) {
        r.word = encode_zero(sign, fmt_out);
        return r;
    }
    return std::nullopt;
}

} // namespace fpm
