#pragma once

#include <random>
#include <vector>

#include "collapse/snr.hpp"

namespace collapse {

/// C equal-norm columns with pairwise cosines -1/(C-1): the columns of
/// Q (I - 11^T/C) for a random orthonormal Q, times `scale`.
Eigen::MatrixXd simplex_etf(int feature_dim, int num_classes, std::mt19937_64& gen,
                            double scale = 1.0);

/// Class-centered noise block E (P x CN) with E Cmat E^T = I_P.
/// Requires C(N-1) >= P.
Eigen::MatrixXd whitened_deviations(const ProblemDims& dims, std::mt19937_64& gen);

/// Features with a prescribed SNR spectrum: SigmaW = I, zero global mean,
/// centered class means U diag(omegas, 0) V^T with V's last column along
/// the ones vector. Requires P >= C and C(N-1) >= P.
FeatureMatrix features_with_spectrum(const ProblemDims& dims, const std::vector<double>& omegas,
                                     std::mt19937_64& gen);

/// Aligned-chart state with prescribed diagonal Omega and generic
/// whitened deviations (X = Omega Y + E). Requires N >= 2.
AlignedState state_with_omegas(int num_classes, int examples_per_class,
                               const std::vector<double>& omegas, std::mt19937_64& gen);

}  // namespace collapse
