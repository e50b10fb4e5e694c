#pragma once
// Portable seeded random streams.
//
// Stream (seed, index) seeds a std::mt19937_64, whose output sequence is fixed
// by the C++ standard, with splitmix64(seed ^ splitmix64(index)). Uniforms take
// the top 53 bits; normals use the Marsaglia polar method; bounded integers
// use rejection. No standard-library distribution is involved, so draws are
// identical across standard library implementations.

#include <cstdint>
#include <random>

namespace ridge {

std::uint64_t splitmix64(std::uint64_t x);

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    double uniform();  // [0, 1)
    double normal();   // N(0, 1)
    std::uint64_t below(std::uint64_t bound);  // uniform on [0, bound)

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ridge
