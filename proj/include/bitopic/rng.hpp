#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace bitopic {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Decorrelated stream seed for per-pair / per-document inference streams.
inline uint64_t stream_seed(uint64_t base, uint64_t salt, uint64_t index) {
  return splitmix64(splitmix64(base ^ salt) + index);
}

// Seeded generator wrapping std::mt19937_64. The engine's output sequence is
// fixed by the standard; the draw helpers below stay away from
// std::*_distribution so results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased via rejection.
  uint64_t uniform_int(uint64_t n) {
    assert(n > 0);
    const uint64_t threshold = (0 - n) % n;
    uint64_t r = engine_();
    while (r < threshold) r = engine_();
    return r % n;
  }

  // Standard normal via Box-Muller (polar form avoided to keep the draw count
  // deterministic per call pair).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang gamma(shape, 1).
  double gamma(double shape) {
    assert(shape > 0);
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u > 0 ? u : 1e-300, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  void dirichlet(double alpha, std::vector<double>& out) {
    double total = 0.0;
    for (double& x : out) {
      x = gamma(alpha);
      total += x;
    }
    if (total <= 0.0) {
      const double u = 1.0 / static_cast<double>(out.size());
      for (double& x : out) x = u;
      return;
    }
    for (double& x : out) x /= total;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(i))]);
    }
  }

  // First k entries of a random permutation of [0, n).
  std::vector<int32_t> sample_without_replacement(int32_t n, int32_t k) {
    assert(k >= 0 && k <= n);
    std::vector<int32_t> idx(static_cast<std::size_t>(n));
    for (int32_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int32_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<int32_t>(uniform_int(static_cast<uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
  }

  // Textual engine state; round-trips exactly (the format is standard-defined).
  // The cached Box-Muller spare is not persisted: samplers draw only uniforms,
  // normal() is for synthetic-data generation.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }
  void restore_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    have_spare_ = false;
    spare_ = 0.0;
  }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bitopic
