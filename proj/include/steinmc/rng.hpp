#pragma once

#include <array>
#include <cstdint>

namespace steinmc {

// SplitMix64 step; used for seeding and stream derivation only.
std::uint64_t splitmix64(std::uint64_t& state);

// Hash-combine two 64-bit values into a stream identifier.
std::uint64_t derive_stream_id(std::uint64_t parent, std::uint64_t child);

// Counter-addressable xoshiro256++ stream.  Every Monte-Carlo work item
// owns a stream derived from (master seed, stream id), so results do not
// depend on worker count or on replicates added later.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform double in [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Unbiased integer in [0,n) (Lemire rejection).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller (second value cached).
  double normal();

  // Child stream with an independent state, addressed by child_id.
  RngStream substream(std::uint64_t child_id) const;

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return id_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t master_ = 0;
  std::uint64_t id_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace steinmc
