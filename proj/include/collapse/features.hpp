#pragma once

#include <cstdint>
#include <iosfwd>

#include "collapse/dims.hpp"

namespace collapse {

/// Last-layer feature matrix H, shape P x CN, i-then-c column order.
/// Construction validates shape and finiteness.
struct FeatureMatrix {
  ProblemDims dims;
  Eigen::MatrixXd data;
};

FeatureMatrix make_features(const ProblemDims& dims, Eigen::MatrixXd data);

/// First and second order statistics of a feature matrix. All averages
/// use the population convention (divide by CN or C, never n-1).
struct FeatureStats {
  Eigen::MatrixXd class_means;    // M, P x C
  Eigen::VectorXd global_mean;    // mu_G, length P
  Eigen::MatrixXd centered_means; // Mbar = M - mu_G 1^T, P x C
  Eigen::MatrixXd sigma_w;        // within-class covariance, P x P
  Eigen::MatrixXd sigma_b;        // between-class covariance Mbar Mbar^T / C
  Eigen::MatrixXd sigma_t;        // total covariance of globally centered features
};

/// Computes all statistics. Satisfies sigma_t = sigma_w + sigma_b exactly
/// in real arithmetic. Throws PreconditionError on non-finite entries.
FeatureStats compute_stats(const FeatureMatrix& features);

/// Seeded i.i.d. Gaussian features times `scale`, then the global mean is
/// subtracted so mu_G = 0 up to roundoff. Deterministic under seed.
FeatureMatrix init_features(const ProblemDims& dims, std::uint64_t seed, double scale);

/// CSV form: header row "P,C,N", then P rows of CN values (17 significant
/// digits, so doubles round-trip).
void write_features_csv(const FeatureMatrix& features, std::ostream& out);
FeatureMatrix read_features_csv(std::istream& in);

}  // namespace collapse
