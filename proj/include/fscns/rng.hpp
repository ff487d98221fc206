#pragma once

#include <cstdint>

namespace fscns {

// Identifies one reproducible stream: a base seed plus a stream index
// (replicate number). Equal pairs give bit-identical draw sequences on a
// platform, independent of how streams are scheduled.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Counter-based generator (splitmix64 core). Streams are separated by
// hashing (seed, stream_id) into the starting counter, so replicates can be
// generated concurrently without shared state.
class RngStream {
public:
  explicit RngStream(RngSeed s);

  std::uint64_t next_u64();

  // Uniform on (0,1), never returning the endpoints.
  double uniform01();

  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via inverse-cdf transform (platform independent).
  double normal();
  double normal(double mu, double sigma);

private:
  std::uint64_t state_;
};

}  // namespace fscns
