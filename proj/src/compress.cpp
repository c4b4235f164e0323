// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#include "fpm/compress.hpp"

#include "fpm/errors.hpp"

namespace fpm {

namespace {

inline u128 maj(u128 a, u128 b, u128 c)
{
    return (a & b) | (a & c) | (b & c);
}

} // namespace

Cell42 compress42_cell(int a, int b, int c, int d, int cin)
{
    int s1 = a ^ b ^ c;
    int cout = (a & b) | (a & c) | (b & c);
    int s = s1 ^ d ^ cin;
    int cv = (s1 & d) | (s1 & cin) | (d & cin);
    return {s, cv, cout};
}

CarrySaveVector compress42_vector(u128 a, u128 b, u128 c, u128 d)
{
    // FA1 couts do not depend on cin, so the whole column chain vectorizes:
    // cin of column k is FA1's cout from column k-1.
    u128 s1 = a ^ b ^ c;
    u128 cout = maj(a, b, c);
    u128 cin = (cout << 1) & kMask103;
    u128 s = s1 ^ d ^ cin;
    u128 cv = maj(s1, d, cin);
    return {s & kMask103, (cv << 1) & kMask103, 103};
}

CarrySaveVector reduce_tree(const RowSet16& rows)
{
    static_assert(sizeof(rows.rows) / sizeof(rows.rows[0]) == 16);
    u128 l1[8];
    for (int g = 0; g < 4; ++g) {
        CarrySaveVector cs = compress42_vector(rows.rows[4 * g + 0], rows.rows[4 * g + 1],
                                               rows.rows[4 * g + 2], rows.rows[4 * g + 3]);
        l1[2 * g] = cs.sum;
        l1[2 * g + 1] = cs.carry;
    }
    u128 l2[4];
    for (int g = 0; g < 2; ++g) {
        CarrySaveVector cs = compress42_vector(l1[4 * g + 0], l1[4 * g + 1], l1[4 * g + 2],
                                               l1[4 * g + 3]);
        l2[2 * g] = cs.sum;
        l2[2 * g + 1] = cs.carry;
    }
    return compress42_vector(l2[0], l2[1], l2[2], l2[3]);
}

int carry_span(int level)
{
    if (level < 1 || level > 3)
        throw ContractViolation("carry_span: level must be 1..3");
    // per level: lateral cout moves one column, the carry vector one more;
    // 3 levels move a carry at most 6 columns, within the 7-bit packed gap
    return 2;
}

} // namespace fpm
