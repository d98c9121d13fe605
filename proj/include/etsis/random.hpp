/*
* Copyright (C) 2026 The etsis authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef ETSIS_RANDOM_HPP
#define ETSIS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace etsis
{

/// Purpose tags for splitting one master seed into independent streams.
enum class SeedPurpose : std::uint64_t
{
    Graph = 1,
    Delta = 2,
    InitialState = 3,
};

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z               = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z               = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of stream (purpose, index): splitmix64 applied to
/// master ^ splitmix64(purpose * 2^32 + index).
inline std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::uint64_t index = 0)
{
    std::uint64_t tag = (static_cast<std::uint64_t>(purpose) << 32) + index;
    std::uint64_t s   = master ^ splitmix64(tag);
    return splitmix64(s);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double a, double b)
{
    return a + (b - a) * uniform01(rng);
}

/// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n)
{
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

} // namespace etsis

#endif // ETSIS_RANDOM_HPP
