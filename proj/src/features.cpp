#include "collapse/features.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"
#include "collapse/rng.hpp"

namespace collapse {

FeatureMatrix make_features(const ProblemDims& dims, Eigen::MatrixXd data) {
  if (data.rows() != dims.feature_dim || data.cols() != dims.total_examples()) {
    throw ShapeError("make_features: expected " + std::to_string(dims.feature_dim) + "x" +
                     std::to_string(dims.total_examples()) + ", got " +
                     std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (!data.allFinite()) {
    throw PreconditionError("make_features: feature matrix has non-finite entries");
  }
  return FeatureMatrix{dims, std::move(data)};
}

namespace {

// Sums in ascending value order, which makes every statistic bit-exact
// under permutations of the summands (equal values commute).
double canonical_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

Eigen::MatrixXd canonical_cov(const Eigen::MatrixXd& deviations, int denominator) {
  const int p = static_cast<int>(deviations.rows());
  Eigen::MatrixXd cov(p, p);
  std::vector<double> products(deviations.cols());
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      for (int k = 0; k < deviations.cols(); ++k) products[k] = deviations(i, k) * deviations(j, k);
      cov(i, j) = cov(j, i) = canonical_sum(products) / denominator;
    }
  }
  return cov;
}

}  // namespace

FeatureStats compute_stats(const FeatureMatrix& features) {
  if (!features.data.allFinite()) {
    throw PreconditionError("compute_stats: feature matrix has non-finite entries");
  }
  const ProblemDims& dims = features.dims;
  const int c = dims.num_classes, n = dims.examples_per_class, p = dims.feature_dim;
  FeatureStats stats;

  // Accumulation order is canonicalized so that permuting examples within
  // a class reproduces identical bits in every field.
  stats.class_means.resize(p, c);
  std::vector<double> buffer;
  for (int cls = 0; cls < c; ++cls) {
    for (int i = 0; i < p; ++i) {
      buffer.assign(features.data.row(i).segment(cls * n, n).begin(),
                    features.data.row(i).segment(cls * n, n).end());
      stats.class_means(i, cls) = canonical_sum(buffer) / n;
    }
  }
  stats.global_mean.resize(p);
  for (int i = 0; i < p; ++i) {
    buffer.assign(features.data.row(i).begin(), features.data.row(i).end());
    stats.global_mean[i] = canonical_sum(buffer) / (c * n);
  }
  stats.centered_means = stats.class_means.colwise() - stats.global_mean;

  Eigen::MatrixXd within_dev = features.data;
  for (int cls = 0; cls < c; ++cls) {
    within_dev.middleCols(cls * n, n).colwise() -= stats.class_means.col(cls).eval();
  }
  stats.sigma_w = canonical_cov(within_dev, c * n);
  stats.sigma_t = canonical_cov(features.data.colwise() - stats.global_mean, c * n);
  stats.sigma_b = stats.centered_means * stats.centered_means.transpose() / c;
  return stats;
}

FeatureMatrix init_features(const ProblemDims& dims, std::uint64_t seed, double scale) {
  auto gen = rng::make_stream(seed, 0);
  Eigen::MatrixXd h = scale * rng::gaussian(dims.feature_dim, dims.total_examples(), gen);
  h.colwise() -= h.rowwise().mean().eval();
  return FeatureMatrix{dims, std::move(h)};
}

void write_features_csv(const FeatureMatrix& features, std::ostream& out) {
  out << features.dims.feature_dim << ',' << features.dims.num_classes << ','
      << features.dims.examples_per_class << '\n';
  csv::write_matrix(out, features.data);
}

FeatureMatrix read_features_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError("read_features_csv: empty stream");
  int p = 0, c = 0, n = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> p >> comma >> c >> comma >> n)) {
      throw PreconditionError("read_features_csv: malformed header '" + line + "'");
    }
  }
  ProblemDims dims = make_dims(c, n, p);
  Eigen::MatrixXd data(p, dims.total_examples());
  for (int i = 0; i < p; ++i) {
    if (!std::getline(in, line)) {
      throw PreconditionError("read_features_csv: expected " + std::to_string(p) + " data rows");
    }
    std::istringstream row(line);
    std::string cell;
    for (int j = 0; j < data.cols(); ++j) {
      if (!std::getline(row, cell, ',')) {
        throw PreconditionError("read_features_csv: short row " + std::to_string(i));
      }
      data(i, j) = std::stod(cell);
    }
  }
  return make_features(dims, std::move(data));
}

}  // namespace collapse
