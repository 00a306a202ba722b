#pragma once

#include <cstdint>

namespace sarsub {

// Thread count used by the OpenMP kernels. SARSUB_NUM_THREADS overrides the
// OpenMP default when set; set_num_threads() overrides both.
int num_threads();
void set_num_threads(int n);
// Reads SARSUB_NUM_THREADS; a value that is not a positive integer is a validation error.
void apply_thread_env();

// Deterministic, platform-independent random stream (SplitMix64-seeded xoshiro256**).
// Used instead of <random> distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    double uniform();                        // [0, 1)
    double uniform_open();                   // (0, 1)
    std::uint64_t below(std::uint64_t n);    // uniform in [0, n), unbiased
    double normal();                         // standard normal (Box-Muller, cached pair)

private:
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent sub-stream, e.g. one range column.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace sarsub
