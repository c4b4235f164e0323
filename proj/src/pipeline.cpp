// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/pipeline.hpp"

#include "fpm/errors.hpp"

namespace fpm {

const char* to_string(Opcode op)
{
    switch (op) {
    case Opcode::FMUL2: return "FMUL2";
    case Opcode::FMUL4: return "FMUL4";
    case Opcode::FMUL5: return "FMUL5";
    }
    return "?";
}

int latency_of(Opcode op)
{
    switch (op) {
    case Opcode::FMUL2: return 2;
    case Opcode::FMUL4: return 4;
    case Opcode::FMUL5: return 5;
    }
    return 5;
}

Opcode opcode_for(FormatKind fmt_in, bool packed)
{
    (void)packed;
    if (fmt_in == FormatKind::SseSp)
        return Opcode::FMUL2;
    if (fmt_in == FormatKind::SseDp)
        return Opcode::FMUL4;
    return Opcode::FMUL5;
}

MulOp make_op(FormatKind fmt_in, FormatKind fmt_out, RoundingMode mode, bool packed)
{
    MulOp op;
    op.opcode = opcode_for(fmt_in, packed);
    op.fmt_in = fmt_in;
    op.fmt_out = fmt_out;
    op.mode = mode;
    op.packed = packed;
    return op;
}

int iterations_for(const MulOp& op)
{
    switch (op.opcode) {
    case Opcode::FMUL2: return 1;
    case Opcode::FMUL4: return 2;
    case Opcode::FMUL5: return 3;
    }
    return 3;
}

namespace {

u128 operand_register(const DecodedOperand& op, int w)
{
    return op.mant >> (68 - w);
}

} // namespace

IterationState init_iteration(const MulOp& op, const DecodedOperand& a,
                              const DecodedOperand& b)
{
    IterationState st;
    st.op = op;
    int w = format(op.fmt_in).op_sig_width;
    st.multiplicand = operand_register(a, w);
    st.multiplier = operand_register(b, w);
    return st;
}

IterationState init_iteration_packed(const MulOp& op, const DecodedOperand& a_hi,
                                     const DecodedOperand& a_lo, const DecodedOperand& b_hi,
                                     const DecodedOperand& b_lo)
{
    IterationState st;
    st.op = op;
    st.multiplicand = operand_register(a_lo, 24) | (operand_register(a_hi, 24) << 52);
    st.multiplier = operand_register(b_lo, 24) | (operand_register(b_hi, 24) << 24);
    return st;
}

IterationState init_iteration_raw(const MulOp& op, u128 multiplicand, u128 multiplier)
{
    IterationState st;
    st.op = op;
    st.multiplicand = multiplicand & kMask76;
    st.multiplier = multiplier & kMask76;
    return st;
}

std::pair<bool, bool> fold_tail(const CarrySaveVector& tail, bool prior_sticky,
                                bool prior_carry)
{
    u128 t = (tail.sum & kMask27) + (tail.carry & kMask27) + (prior_carry ? 1 : 0);
    bool carry_out = ((t >> 27) & 1) != 0;
    if ((t >> 28) != 0)
        throw ContractViolation("fold_tail: tail carry exceeds one bit");
    bool sticky = prior_sticky || (t & kMask27) != 0;
    return {sticky, carry_out};
}

IterationState step_iteration(IterationState st)
{
    const int iters = iterations_for(st.op);
    if (st.iter >= iters)
        throw ContractViolation("step_iteration: operation already complete");
    const bool packed = st.op.packed;
    const bool last = st.iter == iters - 1;

    MultiplierSlice slice = select_slice(st.multiplier, st.iter, packed);
    RecodeTop top = (packed || last) ? RecodeTop::ZeroExtend : RecodeTop::SignExtend;
    BoothDigits digits_hi = booth_recode(slice.hi, slice.boundary_hi, top);
    BoothDigits digits_lo =
        packed ? booth_recode(slice.lo, slice.boundary_lo, top) : digits_hi;

    PartialProducts pp = generate_rows(st.multiplicand, digits_hi, digits_lo, packed);
    CorrectedFrame cf = insert_corrections(pp, digits_hi, digits_lo, packed);

    u128 addend = st.addend;
    if (cf.hot13_pending)
        addend |= u128{1} << 26; // top-row hot-one folded into the CSA addend

    CsaOut csa = csa32(st.fb.sum, st.fb.carry, addend);
    bool pending = st.pending_sign_carry && !st.force_pending_zero;
    int sign_units = packed ? 0 : ((st.fb_negative ? 1 : 0) + (pending ? 1 : 0));
    RowSet16 rows = assemble_rowset(cf, csa, packed, sign_units);
    CarrySaveVector frame = reduce_tree(rows);

    if (!last) {
        CarrySaveVector tail{frame.sum & kMask27, frame.carry & kMask27, 27};
        auto [sticky, carry] = fold_tail(tail, st.sticky, st.carry);
        st.sticky = sticky;
        st.carry = carry;
        st.fb = CarrySaveVector{frame.sum >> 27, frame.carry >> 27, 76};
        st.fb_negative = bit_of(slice.hi, 26) != 0; // top bit of this slice
    }
    st.pending_sign_carry = frame.wrap();
    st.frame = frame;
    st.iter += 1;
    return st;
}

namespace {

// denormal-path re-round from the unrounded normalized output (e_unr is
// the 1.f exponent of the exact product)
LaneResult denormal_lane(const RoundOutput& ro, long e_unr, bool sign, const FpFormat& fmt,
                         RoundingMode mode)
{
    LaneResult r;
    long e = e_unr;
    long q = fmt.sig_width - (fmt.emin - e);
    r.flags.denormal_unrounded_path = true;
    u128 top = ro.unrounded68;
    bool below68 = ro.unrounded_sticky;
    bool inexact, up;
    u128 sel;
    long sel_exp; // 1.f exponent of sel's MSB when sel != 0
    if (q >= 1) {
        u128 kept = top >> (68 - q);
        bool lsb = bit_of(top, 68 - q);
        bool guard = q < 68 ? bit_of(top, 67 - q) : false;
        bool round_b = q < 67 ? bit_of(top, 66 - q) : false;
        bool sticky = ((top & mask_bits(std::max<long>(66 - q, 0))) != 0) || below68;
        inexact = guard || round_b || sticky;
        up = rounding_decision(lsb, guard, round_b, sticky, sign, mode);
        sel = up ? kept + 1 : kept;
        sel_exp = e; // unchanged unless the increment crossed a power of two
        if (sel == (u128{1} << q))
            sel_exp = e + 1;
    } else {
        // at or below half the minimum denormal
        bool frac_nonzero = (top & mask_bits(67)) != 0 || below68;
        inexact = true;
        switch (mode) {
        case RoundingMode::RN:
            up = (q == 0) && frac_nonzero; // exact halfway ties to even (zero)
            break;
        case RoundingMode::RM:
            up = sign;
            break;
        case RoundingMode::RP:
            up = !sign;
            break;
        default:
            up = false;
        }
        sel = up ? 1 : 0;
        sel_exp = fmt.emin - (fmt.sig_width - 1);
    }
    r.flags.inexact = inexact;
    r.flags.underflow = inexact;
    if (sel == 0) {
        r.word = encode_zero(sign, fmt);
        return r;
    }
    // normalize sel to its own msb and encode (may have climbed to 2^emin)
    int bits = top_bit_index(sel) + 1;
    if (sel_exp >= fmt.emin) {
        u128 sig = sel << (fmt.op_sig_width - bits);
        r.word = encode_parts(sign, sel_exp, sig, fmt.op_sig_width, fmt);
    } else {
        r.word = encode_parts(sign, sel_exp, sel, bits, fmt);
    }
    return r;
}

} // namespace

LaneResult format_lane(const RoundOutput& ro, bool sign, const FpFormat& fmt_out,
                       RoundingMode mode)
{
    LaneResult r;
    r.unrounded.valid = true;
    r.unrounded.top68 = ro.unrounded68;
    r.unrounded.sticky = ro.unrounded_sticky;
    // the unrounded MSB exponent carries the product overflow bit but not
    // the rounding crossing
    long e_unr = ro.exp - ro.exp_adjust + (ro.prod_overflow ? 1 : 0);
    r.unrounded.exp = e_unr;

    long e = ro.exp;
    if (e > fmt_out.emax) {
        r.flags.overflow = true;
        r.flags.inexact = true;
        bool open_side = (mode == RoundingMode::RN) || (mode == RoundingMode::RP && !sign) ||
                         (mode == RoundingMode::RM && sign);
        r.word = open_side ? encode_inf(sign, fmt_out) : encode_max_finite(sign, fmt_out);
        return r;
    }
    if (e < fmt_out.emin) {
        UnroundedNorm keep = r.unrounded;
        r = denormal_lane(ro, e_unr, sign, fmt_out, mode);
        r.unrounded = keep;
        return r;
    }
    r.flags.inexact = ro.inexact;
    u128 sig = ro.significand << (fmt_out.op_sig_width - fmt_out.sig_width);
    r.word = encode_parts(sign, e, sig, fmt_out.op_sig_width, fmt_out);
    return r;
}

u128 UnitOutput::word() const
{
    if (!packed)
        return lo.word;
    return lo.word | (hi.word << 32);
}

UnitOutput MultiplierUnit::finish(const InFlight& f) const
{
    UnitOutput out;
    out.cycle = f.done_cycle;
    out.valid = true;
    out.packed = f.op.packed;
    const FpFormat& fmt_out = format(f.op.fmt_out);
    const FpFormat& fmt_in = format(f.op.fmt_in);
    const Precision prec = precision_of(fmt_out);
    const int lanes = f.op.packed ? 2 : 1;
    for (int l = 0; l < lanes; ++l) {
        LaneResult& dst = l == 0 ? out.lo : out.hi;
        if (f.special[l]) {
            dst.word = f.forced[l].word;
            dst.flags = f.forced[l].flags;
            continue;
        }
        RoundInput rin;
        rin.cs = f.st.frame;
        rin.sign = f.sign[l];
        rin.mode = f.op.mode;
        rin.prec = prec;
        rin.op_width = fmt_in.op_sig_width;
        rin.iter_sticky = f.st.sticky;
        rin.iter_carry = f.st.carry;
        rin.wrap = f.st.pending_sign_carry;
        rin.exp = f.exp_base[l];
        RoundOutput ro =
            f.op.packed ? sp_round(rin, /*upper_lane=*/l == 1)
                        : (f.op.opcode == Opcode::FMUL2 ? sp_round(rin) : dpep_round(rin));
        dst = format_lane(ro, f.sign[l], fmt_out, f.op.mode);
    }
    return out;
}

UnitOutput MultiplierUnit::clock(const Stimulus& in)
{
    UnitOutput out;
    out.cycle = cycle_;
    bool violation = false;

    if (in.enable) {
        if (array_.has_value())
            violation = true; // issue while the accumulation stage is busy
        InFlight f;
        f.op = in.op;
        f.op.issue_cycle = cycle_;
        f.done_cycle = cycle_ + latency_of(in.op.opcode) - 1;
        for (const InFlight& r : rounding_)
            if (r.done_cycle == f.done_cycle)
                violation = true; // result bus contention
        const FpFormat& fin = format(in.op.fmt_in);
        const FpFormat& fout = format(in.op.fmt_out);
        if (!in.op.packed) {
            DecodedOperand a = decode_operand(in.a_bits, fin);
            DecodedOperand b = decode_operand(in.b_bits, fin);
            if (auto sp = classify_special(a, b, fout)) {
                f.special[0] = true;
                f.forced[0] = *sp;
            }
            f.st = init_iteration(in.op, a, b);
            f.sign[0] = a.sign ^ b.sign;
            f.exp_base[0] = (static_cast<long>(a.exp) - kInternalBias) +
                            (static_cast<long>(b.exp) - kInternalBias);
        } else {
            DecodedOperand a_lo = decode_operand(in.a_bits & mask_bits(32), fin);
            DecodedOperand a_hi = decode_operand((in.a_bits >> 32) & mask_bits(32), fin);
            DecodedOperand b_lo = decode_operand(in.b_bits & mask_bits(32), fin);
            DecodedOperand b_hi = decode_operand((in.b_bits >> 32) & mask_bits(32), fin);
            const DecodedOperand* as[2] = {&a_lo, &a_hi};
            const DecodedOperand* bs[2] = {&b_lo, &b_hi};
            for (int l = 0; l < 2; ++l) {
                if (auto sp = classify_special(*as[l], *bs[l], fout)) {
                    f.special[l] = true;
                    f.forced[l] = *sp;
                }
                f.sign[l] = as[l]->sign ^ bs[l]->sign;
                f.exp_base[l] = (static_cast<long>(as[l]->exp) - kInternalBias) +
                                (static_cast<long>(bs[l]->exp) - kInternalBias);
            }
            f.st = init_iteration_packed(in.op, a_hi, a_lo, b_hi, b_lo);
        }
        f.st.force_pending_zero = force_pending_zero_;
        array_ = f; // a new issue takes over the accumulation stage
    }

    TraceRecord tr;
    tr.cycle = cycle_;

    // accumulation stage advances one iteration per cycle
    if (array_.has_value()) {
        tr.iter = array_->st.iter;
        array_->st = step_iteration(array_->st);
        tr.fb_sum = array_->st.fb.sum;
        tr.fb_carry = array_->st.fb.carry;
        tr.sticky = array_->st.sticky;
        tr.carry = array_->st.carry;
        tr.pending = array_->st.pending_sign_carry;
        if (array_->st.iter == iterations_for(array_->op)) {
            rounding_.push_back(*array_);
            array_.reset();
        }
    }

    // result bus: at most one op completes per cycle by construction
    for (auto it = rounding_.begin(); it != rounding_.end();) {
        if (it->done_cycle == cycle_) {
            UnitOutput done = finish(*it);
            done.schedule_violation = violation;
            out = done;
            out.cycle = cycle_;
            it = rounding_.erase(it);
        } else {
            ++it;
        }
    }
    out.schedule_violation |= violation;

    // delayed input registers: enable_D1 <= enable, etc.
    for (int i = 4; i >= 1; --i) {
        enable_d_[i] = enable_d_[i - 1];
        opcode_d_[i] = opcode_d_[i - 1];
    }
    enable_d_[0] = in.enable;
    opcode_d_[0] = in.op.opcode;

    tr.out_valid = out.valid;
    if (trace_on_)
        trace_.push_back(tr);

    ++cycle_;
    return out;
}

std::vector<UnitOutput> run_unit(const std::vector<Stimulus>& stimulus,
                                 bool force_pending_zero)
{
    MultiplierUnit unit;
    unit.set_force_pending_zero(force_pending_zero);
    std::vector<UnitOutput> outs;
    outs.reserve(stimulus.size() + 8);
    for (const Stimulus& s : stimulus)
        outs.push_back(unit.clock(s));
    for (int i = 0; i < 8; ++i)
        outs.push_back(unit.clock(Stimulus{}));
    return outs;
}

UnitOutput multiply_once(const MulOp& op, u128 a_bits, u128 b_bits, bool force_pending_zero)
{
    MultiplierUnit unit;
    unit.set_force_pending_zero(force_pending_zero);
    Stimulus s{true, op, a_bits, b_bits};
    UnitOutput out = unit.clock(s);
    for (int i = 0; i < 8 && !out.valid; ++i)
        out = unit.clock(Stimulus{});
    return out;
}

} // namespace fpm
