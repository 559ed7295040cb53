#pragma once

#include <cmath>
#include <cstdint>

namespace phasesim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Reduce an angle to [0, 2*pi) with a non-negative result for any input.
inline double wrap_two_pi(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod of tiny negatives can round up to 2*pi
  return r;
}

/// Absolute phase constant of a wavepacket or cluster, always in [0, 2*pi).
class PhaseConstant {
 public:
  PhaseConstant() = default;
  explicit PhaseConstant(double radians) : value_(wrap_two_pi(radians)) {}

  double value() const { return value_; }

  /// Phase additivity: composing independent packets sums their constants mod 2*pi.
  PhaseConstant operator+(PhaseConstant other) const {
    return PhaseConstant(value_ + other.value_);
  }

  bool operator==(const PhaseConstant&) const = default;

 private:
  double value_ = 0.0;
};

/// Shortest angular separation, in [0, pi]. Symmetric in its arguments.
inline double circular_distance(PhaseConstant a, PhaseConstant b) {
  const double d = std::fabs(a.value() - b.value());
  return d > kTwoPi - d ? kTwoPi - d : d;
}

namespace detail {

/// SplitMix64 finalizer: a bijective mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

}  // namespace detail

/// Counter-based uniform stream: the draw at (seed, stream_id, position) is a pure
/// function of those three integers, so any draw can be addressed in O(1) without
/// replaying the sequence. Streams are plain values; clones replay identically.
/// Distinct stream_ids give statistically independent sequences.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t position = 0;

  SeededStream() = default;
  SeededStream(std::uint64_t seed_, std::uint64_t stream_id_, std::uint64_t position_ = 0)
      : seed(seed_), stream_id(stream_id_), position(position_) {}

  /// Word base mixing seed and stream id; draw k is mix64(base + (k+1)*gamma).
  std::uint64_t base() const {
    return detail::mix64(seed ^ detail::mix64(stream_id ^ 0xD1B54A32D192ED03ull));
  }

  /// Random-access draw in [0, 1) with full 53-bit resolution.
  double at(std::uint64_t pos) const {
    const std::uint64_t z = detail::mix64(base() + (pos + 1) * detail::kGoldenGamma);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  /// Sequential draw in [0, 1); advances position by one.
  double next() { return at(position++); }

  /// Derive an independent sub-stream; the same label always yields the same child.
  SeededStream fork(std::uint64_t label) const {
    return SeededStream(seed, detail::mix64(stream_id ^ detail::mix64(label ^ 0x9E6C63D0876A9F4Bull)));
  }
};

/// Next value of the stream as a phase, uniform on [0, 2*pi).
inline PhaseConstant draw_phase(SeededStream& stream) {
  return PhaseConstant(kTwoPi * stream.next());
}

/// Random-access variant of draw_phase; does not disturb the stream.
inline PhaseConstant phase_at(const SeededStream& stream, std::uint64_t pos) {
  return PhaseConstant(kTwoPi * stream.at(pos));
}

}  // namespace phasesim
