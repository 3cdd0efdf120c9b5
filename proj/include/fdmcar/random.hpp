// Copyright 2026 The fdmcar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reproducible random numbers.
//
// All randomness in the library flows from a single 64-bit seed through
// named substreams. A substream is a Philox4x32-10 counter-based generator
// keyed by (seed, tag) whose upper counter words hold a 64-bit stream index,
// so draw b of a Monte Carlo loop can be generated independently of every
// other draw and of the thread that happens to compute it.
//
// Transforms are pinned so results are bit-identical across platforms that
// share an IEEE-754 libm:
//   uniform()  : top 53 bits of a 64-bit word, scaled to [0, 1)
//   normal()   : Box-Muller on (1 - u1, u2), both outputs used in turn
//   index(n)   : Lemire's multiply-and-reject, unbiased

#ifndef FDMCAR_RANDOM_HPP_
#define FDMCAR_RANDOM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace fdmcar {

// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RandomStream {
 public:
  RandomStream(std::uint64_t key, std::uint64_t stream_index);

  std::uint64_t next_u64();
  double uniform();
  double normal();
  std::size_t index(std::size_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_index_;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int words_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RandomStream stream(std::string_view tag, std::uint64_t index = 0) const;

  // Child source with its own seed, e.g. one per simulation replicate.
  RandomSource derive(std::string_view tag, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
};

}  // namespace fdmcar

#endif  // FDMCAR_RANDOM_HPP_
