// Copyright 2026 The llgas Authors
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

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace llgas {

__extension__ typedef unsigned __int128 uint128;

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC 2011).
//
// The generator is a keyed bijection on 128-bit counters.  A stream is fully
// described by (key, stream id): the high 64 counter bits hold the stream id
// and the low 64 bits count blocks, so two streams with the same key never
// overlap and the state is a pure function of its construction arguments.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t key, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 2) {
      buffer_ = generate(key_, counter());
      ++block_;
      pos_ = 0;
    }
    const std::uint64_t lo = buffer_[2 * pos_];
    const std::uint64_t hi = buffer_[2 * pos_ + 1];
    ++pos_;
    return lo | (hi << 32);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n), Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    uint128 m = static_cast<uint128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t blocks_consumed() const noexcept { return block_; }

  static Block generate(std::array<std::uint32_t, 2> key, Block ctr) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  /// One-shot uniform in [0, 1) for counter value (index, lane) under `key`.
  static double uniform_at(std::uint64_t key, std::uint64_t index,
                           std::uint64_t lane = 0) noexcept {
    const Block out = generate(
        {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32)});
    const std::uint64_t bits = static_cast<std::uint64_t>(out[0]) |
                               (static_cast<std::uint64_t>(out[1]) << 32);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

  Block counter() const noexcept {
    return {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int pos_ = 2;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Purposes get disjoint keys so that, e.g., the walk stream and the epsilon
// stream of one replica are unrelated.
enum class StreamTag : std::uint64_t {
  walk = 1,
  environment = 2,
  epsilon = 3,
  solver = 4,
};

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamTag tag) noexcept {
  // splitmix64 is a bijection, so distinct seeds give distinct keys per tag.
  return splitmix64(seed ^ (static_cast<std::uint64_t>(tag) * 0xA24BAED4963EE407ULL));
}

/// Reproducible stream for one replica: a pure function of (seed, replica_id, tag).
inline Philox rng_for_replica(std::uint64_t seed, std::uint64_t replica_id,
                              StreamTag tag = StreamTag::walk) noexcept {
  return Philox(stream_key(seed, tag), replica_id);
}

/// Seed of the environment owned by one replica.
constexpr std::uint64_t environment_seed(std::uint64_t seed, std::uint64_t replica_id) noexcept {
  return splitmix64(stream_key(seed, StreamTag::environment) + splitmix64(replica_id));
}

}  // namespace llgas
