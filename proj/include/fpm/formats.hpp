// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "fpm/bits.hpp"
#include "fpm/dyadic.hpp"

namespace fpm {

// The seven operand/result formats: two SSE, three x87 (which share the
// 80-bit register encoding and differ only in result precision), and the
// two internal ones. INT76 never appears at a user-visible interface.
enum class FormatKind { SseSp, SseDp, X87Sp, X87Dp, X87Ep, Ip68, Int76 };

struct FpFormat {
    FormatKind kind;
    int storage_width;   // bits in the storage word
    int sig_width;       // result significand precision p
    int op_sig_width;    // significand bits carried by an operand of this format
    int exp_width;       // exponent field width in storage
    long bias;           // storage exponent bias
    bool explicit_int_bit;
    long emin, emax;     // 1.f-normalized exponent range of results
};

const FpFormat& format(FormatKind kind);
const char* to_string(FormatKind kind);
std::optional<FormatKind> format_from_string(const std::string& name);

Precision precision_of(const FpFormat& fmt);

enum class OperandClass { Zero, Denormal, Normal, Inf, QNan, SNan };

// Internal operand form: 18-bit biased exponent (bias 2^17-1), 68-bit
// significand with the binary point 67 places below the top bit, so
// value = (-1)^sign * mant * 2^(exp - (2^17-1) - 67).
struct DecodedOperand {
    bool sign = false;
    u32 exp = 0;    // 18-bit biased
    u128 mant = 0;  // 68-bit
    OperandClass cls = OperandClass::Zero;

    bool finite() const
    {
        return cls == OperandClass::Zero || cls == OperandClass::Denormal ||
               cls == OperandClass::Normal;
    }
};

constexpr long kInternalBias = (1L << 17) - 1;

struct ResultFlags {
    bool invalid = false;
    bool overflow = false;
    bool underflow = false;
    bool inexact = false;
    bool denormal_unrounded_path = false;

    bool operator==(const ResultFlags&) const = default;
};

std::string to_string(const ResultFlags& f);

// Every storage pattern decodes. Denormal inputs are normalized into the
// wide internal exponent; non-canonical x87/IP68 patterns (unnormals,
// pseudo-denormals) classify as SNan.
DecodedOperand decode_operand(u128 bits, const FpFormat& fmt);

// Assembles the storage word from already-rounded integer parts.
// sig is the p-bit significand including the leading bit (p = fmt.sig_width
// for normal results, fewer for denormals); e is the 1.f exponent.
u128 encode_parts(bool sign, long e, u128 sig, int sig_bits, const FpFormat& fmt);

u128 encode_zero(bool sign, const FpFormat& fmt);
u128 encode_inf(bool sign, const FpFormat& fmt);
u128 encode_max_finite(bool sign, const FpFormat& fmt);
u128 encode_default_qnan(const FpFormat& fmt);
// quiet an operand NaN for propagation into fmt
u128 encode_propagated_qnan(const DecodedOperand& op, const FpFormat& fmt);

// Storage encoding of a representable dyadic value (oracle-facing).
// Signals ContractViolation if v is finite nonzero, not representable, and
// no overflow/underflow flag explains the mismatch. The rounding mode only
// matters for the overflow saturation choice (max-finite vs infinity).
u128 encode_result(const DyadicValue& v, const FpFormat& fmt, const ResultFlags& flags);
u128 encode_result(const DyadicValue& v, const FpFormat& fmt, const ResultFlags& flags,
                   RoundingMode mode);

// Forced result for NaN/Inf/zero operand cases; nullopt when both operands
// are finite and nonzero (the arithmetic path applies).
struct SpecialResult {
    u128 word;
    ResultFlags flags;
};
std::optional<SpecialResult> classify_special(const DecodedOperand& a,
                                              const DecodedOperand& b,
                                              const FpFormat& fmt_out);

} // namespace fpm
