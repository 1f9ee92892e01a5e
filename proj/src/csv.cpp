#include "collapse/csv.hpp"

#include <cstdio>
#include <ostream>

namespace collapse::csv {

std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_row(std::ostream& out, const Eigen::RowVectorXd& row) {
  for (int j = 0; j < row.size(); ++j) {
    if (j > 0) out << ',';
    out << format(row[j]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

}  // namespace collapse::csv
