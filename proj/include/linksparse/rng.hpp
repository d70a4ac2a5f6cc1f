#pragma once

// Seeded randomness for the whole project. We keep the distribution
// algorithms in-house (Box-Muller, Knuth Poisson, Lemire bounded ints)
// so that a (master_seed, role) pair always produces the same stream no
// matter which standard library we build against. std::mt19937_64 itself
// is bit-exact by the standard; the std:: distributions are not.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace linksparse {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive an independent sub-seed from a master seed and a role label,
// e.g. derive_seed(seed, "train/epoch=3/sample=17"). FNV-1a over the
// label, then a couple of splitmix rounds to decorrelate.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view role) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : role) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return splitmix64(splitmix64(master ^ h) + 0x632be59bd9b4e019ull);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform double in [0, 1), 53-bit resolution
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound), bound >= 1 (Lemire's method)
    std::uint64_t uniform_int(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // standard normal via Box-Muller (no cached spare, keeps state simple)
    double normal() {
        double u1 = 1.0 - u01();  // (0, 1], avoids log(0)
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Poisson via Knuth's product method; fine for the small lambdas we use
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace linksparse
