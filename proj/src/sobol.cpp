#include "cco/sobol.hpp"

#include <stdexcept>

#include "cco/random.hpp"

namespace cco {

namespace {

constexpr int kBits = 32;

// Joe-Kuo D6 primitive polynomials and initial direction numbers for
// dimensions 2..32 (dimension 1 is the plain van der Corput sequence).
struct JoeKuoRow {
    int degree;
    std::uint32_t poly;        // interior coefficients
    std::uint32_t m[7];
};

constexpr JoeKuoRow kJoeKuo[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
};

}  // namespace

SobolSequence::SobolSequence(int dimension, std::uint64_t seed) : dim_(dimension) {
    if (dimension < 1 || dimension > kMaxDimension)
        throw std::invalid_argument("SobolSequence: dimension must be in [1, 32]");

    direction_.assign(static_cast<std::size_t>(dim_) * kBits, 0);
    state_.assign(dim_, 0);
    shift_.assign(dim_, 0);

    for (int j = 0; j < dim_; ++j) {
        std::uint32_t* v = direction_.data() + static_cast<std::size_t>(j) * kBits;
        if (j == 0) {
            for (int i = 0; i < kBits; ++i) v[i] = 1u << (kBits - 1 - i);
            continue;
        }
        const JoeKuoRow& row = kJoeKuo[j - 1];
        const int s = row.degree;
        for (int i = 0; i < s; ++i) v[i] = row.m[i] << (kBits - 1 - i);
        for (int i = s; i < kBits; ++i) {
            v[i] = v[i - s] ^ (v[i - s] >> s);
            for (int k = 1; k < s; ++k)
                if ((row.poly >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
        }
    }

    Rng rng(mix_seed(seed, 0x50B01ull));
    for (int j = 0; j < dim_; ++j)
        shift_[j] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
}

std::vector<double> SobolSequence::next() {
    std::vector<double> point(dim_);
    for (int j = 0; j < dim_; ++j)
        point[j] = static_cast<double>(state_[j] ^ shift_[j]) * 0x1.0p-32;

    // Gray-code update: flip the direction number of the lowest zero bit
    std::uint32_t c = 0, n = count_;
    while (n & 1u) {
        n >>= 1;
        ++c;
    }
    for (int j = 0; j < dim_; ++j)
        state_[j] ^= direction_[static_cast<std::size_t>(j) * kBits + c];
    ++count_;
    return point;
}

std::vector<std::vector<double>> sobol_points(int n, int dimension, std::uint64_t seed) {
    SobolSequence seq(dimension, seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(seq.next());
    return pts;
}

}  // namespace cco
