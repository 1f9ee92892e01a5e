#pragma once

// Shared oracles for the test suites. These deliberately avoid the
// library's own code paths: statistics are accumulated example by
// example and losses are evaluated from the raw definition.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "collapse/classifier.hpp"
#include "collapse/features.hpp"
#include "collapse/rng.hpp"
#include "collapse/snr.hpp"
#include "collapse/synthesis.hpp"

namespace collapse::testing {

using collapse::features_with_spectrum;
using collapse::simplex_etf;
using collapse::state_with_omegas;
using collapse::whitened_deviations;

/// Per-example loop implementation of all feature statistics.
struct BruteStats {
  Eigen::MatrixXd class_means, centered_means, sigma_w, sigma_b, sigma_t;
  Eigen::VectorXd global_mean;
};

inline BruteStats brute_stats(const FeatureMatrix& f) {
  const int c = f.dims.num_classes, n = f.dims.examples_per_class, p = f.dims.feature_dim;
  BruteStats s;
  s.class_means = Eigen::MatrixXd::Zero(p, c);
  for (int cls = 0; cls < c; ++cls)
    for (int i = 0; i < n; ++i) s.class_means.col(cls) += f.data.col(cls * n + i) / n;
  s.global_mean = Eigen::VectorXd::Zero(p);
  for (int col = 0; col < c * n; ++col) s.global_mean += f.data.col(col) / (c * n);
  s.centered_means = s.class_means.colwise() - s.global_mean;
  s.sigma_w = Eigen::MatrixXd::Zero(p, p);
  s.sigma_t = Eigen::MatrixXd::Zero(p, p);
  for (int cls = 0; cls < c; ++cls) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd dw = f.data.col(cls * n + i) - s.class_means.col(cls);
      Eigen::VectorXd dt = f.data.col(cls * n + i) - s.global_mean;
      s.sigma_w += dw * dw.transpose() / (c * n);
      s.sigma_t += dt * dt.transpose() / (c * n);
    }
  }
  s.sigma_b = Eigen::MatrixXd::Zero(p, p);
  for (int cls = 0; cls < c; ++cls) {
    Eigen::VectorXd d = s.centered_means.col(cls);
    s.sigma_b += d * d.transpose() / c;
  }
  return s;
}

/// Loss straight from the definition, one example at a time.
inline double brute_mse_loss(const Eigen::MatrixXd& w_stacked, const ExtendedFeatures& ext,
                             double lambda) {
  const int c = ext.dims.num_classes, n = ext.dims.examples_per_class;
  double sum = 0.0;
  for (int cls = 0; cls < c; ++cls) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd pred = w_stacked * ext.data.col(cls * n + i);
      pred[cls] -= 1.0;
      sum += pred.squaredNorm();
    }
  }
  return 0.5 * sum / (c * n) + 0.5 * lambda * w_stacked.squaredNorm();
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace collapse::testing
