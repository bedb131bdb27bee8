#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

// Stream-splittable RNG. Every stochastic task derives its own stream from
// (master seed, index...) so ensembles are reproducible independently of
// execution order or thread count.

namespace rabitrack {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash a seed and a list of stream indices into one 64-bit stream seed.
inline std::uint64_t derive_stream(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t k : keys) h = splitmix64(h ^ (k + 0x632be59bd9b4e019ULL));
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t stream_seed) : gen_(stream_seed) {}

    double uniform() { return uni_(gen_); }
    double gaussian() { return gauss_(gen_); }
    std::uint64_t bits() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace rabitrack
