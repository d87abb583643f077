#pragma once

#include <cstdint>
#include <initializer_list>

namespace cogbench {

// Seeding and random streams.
//
// Every random quantity in a simulation is drawn from a Stream. A Stream is
// counter based: draw number n (1-based) of a stream with key k is
//
//     mix64(k + n * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer. Keys are derived with hash64, which
// folds a list of 64-bit words left to right:
//
//     h = 0x6A09E667F3BCC908
//     for each word w:  h = mix64(h ^ w) + 0x9E3779B97F4A7C15
//
// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53, giving [0, 1).
// Integer draws in [0, n) use floor(uniform() * n). These definitions are
// complete; any language can reproduce a run bit for bit from them.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash64(std::initializer_list<std::uint64_t> words) noexcept;

class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  // Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Uniform integer on [0, n). n must be positive.
  int index(int n) noexcept {
    const int i = static_cast<int>(uniform() * n);
    return i < n ? i : n - 1;
  }

  // Child stream whose key is hash64({key, tag}); does not advance this one.
  Stream derive(std::uint64_t tag) const noexcept {
    return Stream(hash64({key_, tag}));
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Tags for the per-repetition streams derived from
// hash64({master_seed, radio_id, scenario_id, rep}).
enum class StreamTag : std::uint64_t {
  kEnvironment = 1,  // PU occupancy
  kPolicy = 2,       // access-policy randomization
  kRadio = 3,        // sensing errors and frame delivery
};

struct RepStreams {
  Stream environment;
  Stream policy;
  Stream radio;
};

RepStreams rep_streams(std::uint64_t master_seed, int radio_id, int scenario_id,
                       int rep) noexcept;

}  // namespace cogbench
