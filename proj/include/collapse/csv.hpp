#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace collapse::csv {

/// Formats a double with 17 significant digits so it round-trips exactly.
/// No locale: '.' decimal separator always.
std::string format(double value);

void write_row(std::ostream& out, const Eigen::RowVectorXd& row);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace collapse::csv
