// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "fpm/compress.hpp"
#include "fpm/formats.hpp"
#include "fpm/oracle.hpp"
#include "fpm/ppgen.hpp"
#include "fpm/round.hpp"

namespace fpm {

enum class Opcode { FMUL2, FMUL4, FMUL5 };

const char* to_string(Opcode op);
int latency_of(Opcode op); // result bus cycles after issue: 2/4/5

struct MulOp {
    Opcode opcode = Opcode::FMUL5;
    FormatKind fmt_in = FormatKind::X87Ep;
    FormatKind fmt_out = FormatKind::X87Ep;
    RoundingMode mode = RoundingMode::RN;
    bool packed = false;
    long issue_cycle = 0;
};

// FMUL2 <=> SSE-SP (packed or scalar), FMUL4 <=> SSE-DP, FMUL5 <=> the rest.
Opcode opcode_for(FormatKind fmt_in, bool packed);
MulOp make_op(FormatKind fmt_in, FormatKind fmt_out, RoundingMode mode, bool packed);

// SP 1, DP 2, everything else 3.
int iterations_for(const MulOp& op);

// Accumulation-stage state for one operation. The operand registers are
// held for the whole operation; fb holds the upper 76 bits of the previous
// frame; sticky/carry fold the retired tails; pending_sign_carry tracks the
// wrap of the redundant frame (the combined effect of the sign corrections),
// compensated through the next iteration's sign-extension term.
struct IterationState {
    MulOp op;
    u128 multiplicand = 0;
    u128 multiplier = 0;
    u128 addend = 0;
    CarrySaveVector fb{0, 0, 76};
    bool fb_negative = false;
    bool pending_sign_carry = false;
    bool sticky = false;
    bool carry = false;
    int iter = 0;
    CarrySaveVector frame{0, 0, 103}; // product registers after the last step

    // test hook for the sign-carry mutation check
    bool force_pending_zero = false;
};

IterationState init_iteration(const MulOp& op, const DecodedOperand& a,
                              const DecodedOperand& b);
// packed: both 24-bit lane pairs mapped onto the array simultaneously
IterationState init_iteration_packed(const MulOp& op, const DecodedOperand& a_hi,
                                     const DecodedOperand& a_lo, const DecodedOperand& b_hi,
                                     const DecodedOperand& b_lo);
// raw significand registers (INT76 and datapath-level tests)
IterationState init_iteration_raw(const MulOp& op, u128 multiplicand, u128 multiplier);

IterationState step_iteration(IterationState st);

// Fold the retired 27-bit tail into the running (sticky, carry) pair:
// t = tail.sum + tail.carry + prior_carry; carry-out feeds the retained
// window, everything below it collapses into sticky.
std::pair<bool, bool> fold_tail(const CarrySaveVector& tail, bool prior_sticky,
                                bool prior_carry);

template <typename T>
struct GatedRegister {
    T current{};
    T reset_value{};
};

// gclk = gcond & clk translated to a conditional update on the common clock
template <typename T>
GatedRegister<T> gated_update(GatedRegister<T> reg, bool gcond, const T& next)
{
    if (gcond)
        reg.current = next;
    return reg;
}

struct LaneResult {
    u128 word = 0;
    ResultFlags flags;
    UnroundedNorm unrounded;

    bool operator==(const LaneResult&) const = default;
};

// Formatting/result-selection stage: combines a rounder output with the
// exponent channel, handling overflow saturation and the denormal path
// (re-rounded from the unrounded normalized output). Integer-only.
LaneResult format_lane(const RoundOutput& ro, bool sign, const FpFormat& fmt_out,
                       RoundingMode mode);

struct UnitOutput {
    long cycle = 0;
    bool valid = false;
    bool schedule_violation = false;
    bool packed = false;
    LaneResult lo;
    LaneResult hi; // packed only
    u128 word() const; // packed: {hi,lo} as one storage word
};

struct Stimulus {
    bool enable = false;
    MulOp op;
    u128 a_bits = 0;
    u128 b_bits = 0;
};

struct TraceRecord {
    long cycle = 0;
    int iter = -1; // array iteration index this cycle, -1 if array idle
    u128 fb_sum = 0, fb_carry = 0;
    bool sticky = false, carry = false, pending = false;
    bool out_valid = false;
};

// The cycle-accurate unit: accumulation stage plus the SP and DP/EP rounder
// pipelines behind a single result bus.
class MultiplierUnit {
public:
    MultiplierUnit() = default;

    // advance one clock; returns the bus observation for this cycle
    UnitOutput clock(const Stimulus& in);

    void set_force_pending_zero(bool f) { force_pending_zero_ = f; }

    // delayed input registers, enable(n-1) .. enable(n-4) after clocking
    const std::array<bool, 5>& enable_history() const { return enable_d_; }
    const std::array<Opcode, 5>& opcode_history() const { return opcode_d_; }

    const std::vector<TraceRecord>& trace() const { return trace_; }
    void enable_trace(bool on) { trace_on_ = on; }

private:
    struct InFlight {
        MulOp op;
        IterationState st;
        bool special[2] = {false, false};
        SpecialResult forced[2];
        bool sign[2] = {false, false};
        long exp_base[2] = {0, 0};
        long done_cycle = 0; // bus cycle
    };

    UnitOutput finish(const InFlight& f) const;

    long cycle_ = 0;
    std::optional<InFlight> array_;   // op iterating in the first stage
    std::vector<InFlight> rounding_;  // ops past the array, waiting on the bus
    std::array<bool, 5> enable_d_{};
    std::array<Opcode, 5> opcode_d_{};
    bool force_pending_zero_ = false;
    bool trace_on_ = false;
    std::vector<TraceRecord> trace_;
};

// Drive a stimulus sequence from reset; outputs[n] is the bus at cycle n.
// Stimuli that break the scheduler guards mark the affected outputs with
// schedule_violation instead of failing.
std::vector<UnitOutput> run_unit(const std::vector<Stimulus>& stimulus,
                                 bool force_pending_zero = false);

// One multiply end to end on an idle unit (the harness's fast path).
UnitOutput multiply_once(const MulOp& op, u128 a_bits, u128 b_bits,
                         bool force_pending_zero = false);

} // namespace fpm
