#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stablemf {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                          std::array<std::uint32_t, 2> key);

/// Substream domains. Every random quantity in a run is drawn from a stream
/// whose id encodes (domain, replication, index), so draws never depend on
/// scheduling or on the order in which other streams are consumed.
enum class StreamDomain : std::uint8_t {
  generic = 0,
  initial_positions = 1,
  particle_atoms = 2,
  fresh_slot_draws = 3,
  reference_atoms = 4,
  reference_initial = 5,
  subordinator = 6,
  validation = 7,
  battery = 8,
};

/// Packs (domain, replication, index) into a 64-bit stream id:
/// 8 bits domain | 24 bits replication | 32 bits index.
constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t replication,
                                  std::uint64_t index) {
  return (static_cast<std::uint64_t>(domain) << 56) |
         ((replication & 0xFFFFFFull) << 32) | (index & 0xFFFFFFFFull);
}

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Identical keys reproduce identical sequences; distinct stream ids feed
/// disjoint Philox inputs. Satisfies UniformRandomBitGenerator so the
/// standard distributions can be driven by it. Not thread-safe: one stream
/// per consumer.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unit-mean exponential.
  double exponential();
  /// Poisson count with the given mean (mean >= 0).
  std::int64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return stream_id_; }
  /// A child stream sharing the seed; used for per-item substreams.
  RngStream substream(std::uint64_t id) const { return RngStream(seed_, id); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

}  // namespace stablemf
