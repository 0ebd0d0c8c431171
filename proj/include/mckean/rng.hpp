/*
   Copyright 2026 The mckean-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace mckean {

/// Philox-2x64 counter-based generator (10 rounds). Output depends only on
/// (key, counter), so any (stream, index) pair can be evaluated independently
/// and in any order; results are bitwise reproducible under every parallel
/// schedule.
struct Philox2x64 {
    static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

    static std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ key ^ c1;
            c1 = lo;
            key += kWeyl;
        }
        return {c0, c1};
    }
};

/// Uniform in (0, 1), never returning an exact endpoint: with 52 mantissa
/// bits, k + 0.5 is exactly representable, so the largest value is 1 - 2^-53.
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal draw addressed by (seed, stream, index) via Box-Muller on
/// one Philox block.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto [b0, b1] = Philox2x64::block(seed, stream, index);
    const double u1 = uniform01(b0);
    const double u2 = uniform01(b1);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace mckean
