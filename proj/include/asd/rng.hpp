#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace asd {

// Seed mixing. All sub-streams in the project are derived through here so that
// a single top-level seed pins every random draw.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t hash_string(std::string_view s);

// mt19937_64 with portable bounded draws. The std:: distributions are
// implementation-defined, which would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound). bound must be > 0.
  std::size_t below(std::size_t bound);
  /// Uniform real in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Knuth's multiplication method; fine for the small means used here.
  int poisson(double mean);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// k distinct elements of pool, in draw order.
  template <class T>
  std::vector<T> sample(std::vector<T> pool, std::size_t k) {
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
      std::size_t j = below(pool.size());
      out.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace asd
