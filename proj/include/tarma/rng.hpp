// Copyright 2026 The tarmagarch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TARMA__RNG_HPP_
#define TARMA__RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace tarma
{

/// 64-bit Mersenne Twister; the engine is specified bit-exactly by the standard.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed for replication `rep` of cell `cell` under `master`. Independent of
/// scheduling, so results do not depend on the worker count.
inline constexpr std::uint64_t replication_seed(
  std::uint64_t master, std::uint64_t cell, std::uint64_t rep) noexcept
{
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ cell);
  s = splitmix64(s ^ rep);
  return s;
}

/// Standard normal sampler. Boost's distribution is used because the
/// std::normal_distribution algorithm differs between standard libraries.
class GaussianSampler
{
public:
  explicit GaussianSampler(std::uint64_t seed)
  : engine_(seed) {}

  double operator()() {return dist_(engine_);}
  Rng & engine() noexcept {return engine_;}

private:
  Rng engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace tarma

#endif  // TARMA__RNG_HPP_
