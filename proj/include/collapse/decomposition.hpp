#pragma once

#include <vector>

#include "collapse/classifier.hpp"

namespace collapse {

/// Three-way split of the MSE loss:
///   total = nc1_part + nc23_part + perp_part,  ls_part = nc1_part + nc23_part.
struct LossBreakdown {
  double total = 0.0;
  double ls_part = 0.0;
  double perp_part = 0.0;
  double nc1_part = 0.0;
  double nc23_part = 0.0;
};

/// 0.5 Ave_{i,c} ||Wt htilde - y||^2 + (lambda/2) ||Wt||_F^2.
double mse_loss(const ExtendedClassifier& clf, const ExtendedFeatures& ext, double lambda);

/// Full decomposition at a given classifier. perp_part is evaluated from
/// the quadratic form, not as a difference of losses.
LossBreakdown decompose(const ExtendedClassifier& clf, const ExtendedFeatures& ext, double lambda);

/// Central-path decomposition at lambda = 0 on globally centered data:
///   nc1  = 0.5 tr(W_LS SigmaW W_LS^T)
///   nc23 = (1/2C) ||W_LS Mbar - Phi||_F^2,  Phi = I - (1/C) 1 1^T.
/// perp_part is zero by construction.
LossBreakdown decompose_centered(const FeatureMatrix& centered);

/// Central-path loss written in the SNR singular values (lambda = 0):
///   total = 0.5 sum 1/(w^2 + C)
///   nc1   = 0.5 sum w^2/(C + w^2)^2
///   nc23  = 0.5 sum (1/C) (w^2/(w^2 + C) - 1)^2.
/// Expects exactly C-1 entries, all >= 0 (w = 0 is a valid input and
/// contributes 1/(2C) to the total).
LossBreakdown spectral_loss(const std::vector<double>& omegas, int num_classes);

}  // namespace collapse
