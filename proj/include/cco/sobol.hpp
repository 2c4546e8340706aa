#pragma once

#include <cstdint>
#include <vector>

namespace cco {

// Scrambled Sobol sequence, up to 32 dimensions (Joe-Kuo direction
// numbers). Scrambling is a per-dimension random digital shift derived
// from the seed, so the point set is deterministic given (d, seed).
class SobolSequence {
public:
    SobolSequence(int dimension, std::uint64_t seed);

    // next point in [0,1)^d
    std::vector<double> next();

    static constexpr int kMaxDimension = 32;

private:
    int dim_;
    std::uint32_t count_ = 0;
    std::vector<std::uint32_t> state_;       // per-dimension XOR state
    std::vector<std::uint32_t> shift_;       // digital scramble
    std::vector<std::uint32_t> direction_;   // [dim][bit], flattened
};

std::vector<std::vector<double>> sobol_points(int n, int dimension, std::uint64_t seed);

}  // namespace cco
