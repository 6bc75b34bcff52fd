#pragma once

// Counter-based generator used for every random draw in the library.
//
// Stream (seed, stream_id) yields outputs mix64(key + (i + 1) * G), i = 0, 1, ...
// where G = 0x9E3779B97F4A7C15, key = mix64(seed ^ mix64(stream_id)) and mix64
// is the SplitMix64 finalizer. Uniforms take the top 53 bits, u = (r >> 11) 2^-53.
// Normals use the Box-Muller transform on two consecutive outputs, the first
// shifted into (0, 1] as ((r >> 11) + 1) 2^-53; the cosine branch is returned
// first and the sine branch second.

#include <cstdint>
#include <vector>

#include "bregman/types.hpp"

namespace bregman {

std::uint64_t mix64(std::uint64_t z);

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    double normal();
    /// Uniform integer in [0, bound), rejection sampled.
    std::uint64_t below(std::uint64_t bound);

    Vector normal_vector(Eigen::Index n);
    /// Row-major fill.
    Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
    /// k distinct indices from [0, n), partial Fisher-Yates, sorted ascending.
    std::vector<Eigen::Index> choose(Eigen::Index n, Eigen::Index k);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bregman
