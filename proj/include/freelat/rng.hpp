#ifndef FREELAT_RNG_HPP
#define FREELAT_RNG_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace freelat {

/// splitmix64 step; used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives a per-module (or per-chunk) stream seed from a root seed and a
/// fixed label, so every consumer of randomness has its own stable stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  return splitmix64(root ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(root, label) ^ splitmix64(index));
}

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// the standard pins down exactly) and implements its own distributions,
/// because the std:: distribution objects are implementation-defined and
/// would break byte-identical output across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to feed into log().
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// -1 or +1 with equal probability.
  double sign() { return (next() & 1u) ? 1.0 : -1.0; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Standard exponential variate.
  double exponential() { return -std::log(uniform_open()); }

  /// Symmetric heavy-tailed variate: half the mass is uniform on [-1, 1],
  /// the other half is a signed reciprocal uniform (Pareto-like tail).
  double heavy_tailed() {
    if (next() & 1u) return uniform(-1.0, 1.0);
    return sign() / uniform_open();
  }

private:
  std::mt19937_64 engine_;
};

/// Splits [0, total) into fixed-size chunks and reduces worker results in
/// chunk order. The chunking rule (not the thread count) determines the
/// result, so any `threads` value yields identical output.
///
/// `worker(chunk_index, begin, end)` must be pure given its arguments; use
/// derive_seed(root, label, chunk_index) inside it for randomness.
template <typename T, typename Worker, typename Merge>
T chunked_reduce(std::size_t total, std::size_t chunk_size, int threads,
                 T init, Worker worker, Merge merge) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<T> partial(n_chunks);
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const std::size_t b = c * chunk_size;
      const std::size_t e = std::min(total, b + chunk_size);
      partial[c] = worker(c, b, e);
    }
  } else {
    std::atomic<std::size_t> next_chunk{0};
    auto run = [&]() {
      for (;;) {
        const std::size_t c = next_chunk.fetch_add(1);
        if (c >= n_chunks) return;
        const std::size_t b = c * chunk_size;
        const std::size_t e = std::min(total, b + chunk_size);
        partial[c] = worker(c, b, e);
      }
    };
    const int n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  T acc = init;
  for (std::size_t c = 0; c < n_chunks; ++c) acc = merge(acc, partial[c]);
  return acc;
}

}  // namespace freelat

#endif  // FREELAT_RNG_HPP
