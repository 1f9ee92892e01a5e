#include "collapse/rng.hpp"

namespace collapse::rng {

namespace {

// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xda3e39cb94b95bdbULL + 1));
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix(seed, stream));
}

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(gen);
  return m;
}

Eigen::MatrixXd random_spd(int n, std::mt19937_64& gen, double lo, double hi) {
  Eigen::MatrixXd g = gaussian(n, n, gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd eigs(n);
  for (int i = 0; i < n; ++i) eigs[i] = u(gen);
  return q * eigs.asDiagonal() * q.transpose();
}

}  // namespace collapse::rng
