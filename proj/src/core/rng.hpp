// Deterministic counter-based random streams.
//
// Every draw is a pure function of (seed, stream_id, counter), so a stream
// replays identically no matter how work is scheduled across threads, and
// child streams can be derived without consuming the parent.
#pragma once

#include <cstdint>
#include <vector>

namespace rfts::numkit {

// splitmix64 finalizer; good avalanche, not cryptographic.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a * 0x9e3779b97f4a7c15ULL + mix64(b) + 0x2545f4914f6cdd1dULL);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed),
        stream_(stream_id),
        key1_(mix64(seed + 0x9e3779b97f4a7c15ULL)),
        key2_(mix64(key1_ ^ mix64(stream_id + 0x6a09e667f3bcc909ULL)) | 1ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t x = counter_++ * 0x9e3779b97f4a7c15ULL + key1_;
    return mix64(mix64(x) ^ key2_);
  }

  // uniform on [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1), safe to pass through log or a quantile function
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // unbiased integer in [0,n); Lemire's multiply-shift with rejection
  std::uint64_t below(std::uint64_t n);

  double gaussian();  // standard normal via inverse cdf

  // Independent child stream; pure in (this stream's identity, child_id).
  RngStream split(std::uint64_t child_id) const {
    return RngStream(seed_, hash_combine(stream_, child_id));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // Fisher-Yates
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key1_;
  std::uint64_t key2_;
  std::uint64_t counter_ = 0;
};

// Gamma(shape, rate) draw, valid for all shape > 0 (Marsaglia-Tsang with a
// power boost for shape < 1).
double gamma_sample(double shape, double rate, RngStream& rng);

}  // namespace rfts::numkit
