#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace collapse::rng {

/// Mixes (seed, stream) into an independent generator seed. Streams are
/// counter-based: adding a new stream id never perturbs existing ones.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0);

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& gen);

/// Random symmetric positive-definite matrix with eigenvalues drawn
/// uniformly from [lo, hi].
Eigen::MatrixXd random_spd(int n, std::mt19937_64& gen, double lo = 0.5, double hi = 2.0);

}  // namespace collapse::rng
