#ifndef FINSENT_RANDOM_H_
#define FINSENT_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace finsent {

// Seeded stream with a platform-independent draw sequence. The standard
// distributions and std::shuffle are implementation-defined, so every
// sampling step in the toolkit goes through this type instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  // Uniform in [lo, hi], inclusive.
  std::uint64_t uniform_between(std::uint64_t lo, std::uint64_t hi) {
    return lo + uniform_below(hi - lo + 1);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace finsent

#endif  // FINSENT_RANDOM_H_
