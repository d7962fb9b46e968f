#include <iomanip>
#include <ostream>

#include "cvxpoly/sdp.hpp"

namespace cvxpoly {

namespace {

void write_block_entries(std::ostream& out, int matno, int block,
                         const Eigen::MatrixXd& m, double sign) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      const double v = sign * m(i, j);
      if (v == 0.0) continue;
      out << matno << ' ' << (block + 1) << ' ' << (i + 1) << ' ' << (j + 1)
          << ' ' << v << '\n';
    }
  }
}

}  // namespace

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "* cvxpoly export: SDPA objective is the negative of min <C,X>\n";
  out << problem.num_constraints() << '\n';
  out << problem.block_sizes.size() << '\n';
  for (std::size_t k = 0; k < problem.block_sizes.size(); ++k) {
    out << (k ? " " : "") << problem.block_sizes[k];
  }
  out << '\n';
  for (int i = 0; i < problem.num_constraints(); ++i) {
    out << (i ? " " : "") << problem.constraints[static_cast<std::size_t>(i)].rhs;
  }
  out << '\n';
  for (std::size_t k = 0; k < problem.objective.size(); ++k) {
    write_block_entries(out, 0, static_cast<int>(k), problem.objective[k], -1.0);
  }
  for (int i = 0; i < problem.num_constraints(); ++i) {
    for (const auto& e : problem.constraints[static_cast<std::size_t>(i)].blocks) {
      write_block_entries(out, i + 1, e.block, e.matrix, 1.0);
    }
  }
  out.precision(old_precision);
}

}  // namespace cvxpoly
