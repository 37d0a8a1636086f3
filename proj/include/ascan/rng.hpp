#pragma once

#include <cstdint>
#include <random>

namespace ascan {

// splitmix64, used to spread one user seed into independent streams
// (per grid location, per replication). Constants from Vigna's reference
// implementation.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for the stream belonging to cell (ix, iy) of a grid job. Mixing the
// indices through splitmix64 keeps neighbouring cells uncorrelated.
inline uint64_t derive_seed(uint64_t root, uint64_t ix, uint64_t iy) {
    uint64_t s = root;
    splitmix64(s);
    s ^= 0x632be59bd9b4e019ull * (ix + 1);
    splitmix64(s);
    s ^= 0x9e6c63d0876a9a47ull * (iy + 1);
    return splitmix64(s);
}

// mt19937_64 with explicit uniform/normal mappings. The standard library's
// distributions are implementation-defined, which would break bit-for-bit
// reproducibility of chains across toolchains; these are pinned.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1], safe as a log() argument.
    double uniform01_open_left() { return ((gen_() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01_open_left();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ascan
