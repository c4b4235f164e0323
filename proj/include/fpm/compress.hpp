// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fpm/bits.hpp"
#include "fpm/ppgen.hpp"

namespace fpm {

// Redundant carry-save value: (sum + carry) mod 2^width.
struct CarrySaveVector {
    u128 sum = 0;
    u128 carry = 0;
    int width = 103;

    u128 value() const { return (sum + carry) & mask_bits(width); }
    // wrap bit: sum+carry reached 2^width inside the redundant pair
    bool wrap() const { return ((sum + carry) >> width) != 0; }
};

// One 4-2 compressor cell built from two cascaded full adders:
// a+b+c+d+cin == s + 2*(c_out_vec + cout), with cout independent of cin.
struct Cell42 {
    int s;
    int c;    // carry into the next column's carry vector
    int cout; // lateral carry into the neighbor cell's cin
};
Cell42 compress42_cell(int a, int b, int c, int d, int cin);

// Column-parallel 4-2 compression of four 103-bit rows; lateral couts chain
// into the adjacent higher column, carries out of column 102 are dropped.
CarrySaveVector compress42_vector(u128 a, u128 b, u128 c, u128 d);

// Three levels of 4-2 compressors: 16 rows -> 8 -> 4 -> (sum, carry).
CarrySaveVector reduce_tree(const RowSet16& rows);

// Maximum number of columns a carry advances per level for this wiring
// (one for the lateral cout, one more for the carry vector shift).
int carry_span(int level);

} // namespace fpm
