// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace fpm {

using u128 = unsigned __int128;
using u64 = std::uint64_t;
using u32 = std::uint32_t;

// mask of n low bits, n in [0,128]
constexpr u128 mask_bits(int n)
{
    if (n <= 0)
        return 0;
    if (n >= 128)
        return ~u128{0};
    return (u128{1} << n) - 1;
}

constexpr u128 kMask103 = mask_bits(103);
constexpr u128 kMask76 = mask_bits(76);
constexpr u128 kMask27 = mask_bits(27);

constexpr int bit_of(u128 v, int i)
{
    return static_cast<int>((v >> i) & 1);
}

constexpr int top_bit_index(u128 v)
{
    int i = -1;
    while (v != 0) {
        v >>= 1;
        ++i;
    }
    return i;
}

std::string to_hex(u128 v, int hex_digits = 0);
u128 from_hex(const std::string& s);

// SplitMix64: deterministic stream generator; harness keys one stream per
// vector index so sharding never changes the vectors.
struct SplitMix64 {
    u64 state;
    explicit SplitMix64(u64 seed) : state(seed) {}
    u64 next()
    {
        u64 z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    u64 next_below(u64 bound) { return bound ? next() % bound : 0; }
    u128 next128() { return (u128{next()} << 64) | next(); }
    u128 next_bits(int n) { return next128() & mask_bits(n); }
};

} // namespace fpm
