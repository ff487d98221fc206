#include "fscns/rng.hpp"

#include "fscns/dist.hpp"

namespace fscns {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(RngSeed s)
    : state_(mix64(s.seed + kGamma) ^ mix64(s.stream_id * kGamma + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::uniform01() {
  // 53 random bits; offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  // Rejection to remove modulo bias.
  const std::uint64_t limit = n * (~0ULL / n);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double RngStream::normal() { return std_normal_quantile(uniform01()); }

double RngStream::normal(double mu, double sigma) {
  return mu + sigma * normal();
}

}  // namespace fscns
