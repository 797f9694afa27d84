#ifndef FREQBAND_RNG_HPP
#define FREQBAND_RNG_HPP

#include <cstdint>

namespace freqband {

// Deterministic double-precision RNG (xoshiro256++ with explicit uniform
// and Box-Muller mappings) so seeded outputs are identical across
// toolchains, which std:: distributions do not guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next_u64();
    double uniform01();                    // [0,1)
    double uniform(double lo, double hi);  // [lo,hi)
    double normal();                       // standard normal
    int uniform_int(int n);                // {0,...,n-1}

private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Per-item seed derivation so parallel and serial corpus runs agree.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace freqband

#endif
