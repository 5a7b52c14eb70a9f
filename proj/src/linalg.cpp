#include "rscc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rscc {

namespace {

EigenDecomposition sorted_descending(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
  EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(vectors.rows(), n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = values[order[i]];
    out.vectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

}  // namespace

EigenDecomposition symmetric_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eig: matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("symmetric_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (a + a.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric_eig: solver did not converge");
  return sorted_descending(solver.eigenvalues(), solver.eigenvectors());
}

EigenDecomposition generalized_symmetric_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("generalized_symmetric_eig: shape mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (b + b.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("generalized_symmetric_eig: right-hand matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd pivots = l.diagonal().cwiseAbs2();
  if (pivots.minCoeff() <= 1e-13 * pivots.maxCoeff()) {
    throw std::runtime_error("generalized_symmetric_eig: right-hand matrix is numerically singular");
  }
  // C = L^-1 A L^-T is symmetric with the same eigenvalues.
  const Eigen::MatrixXd linv_a = l.triangularView<Eigen::Lower>().solve(a);
  Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(linv_a.transpose()).transpose();
  c = 0.5 * (c + c.transpose());
  auto eig = symmetric_eig(c);
  eig.vectors = l.transpose().triangularView<Eigen::Upper>().solve(eig.vectors);
  return eig;
}

void canonicalize_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double m = std::abs(columns(i, j));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    if (columns(arg, j) < 0.0) columns.col(j) = -columns.col(j);
  }
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& v, const Eigen::VectorXd& c, const NnlsOptions& opts) {
  if (v.cols() != c.size()) {
    throw std::invalid_argument("nnls: basis has " + std::to_string(v.cols()) + " columns but vector has " +
                                std::to_string(c.size()) + " entries");
  }
  if (!v.allFinite() || !c.allFinite()) throw std::invalid_argument("nnls: non-finite input");
  const Eigen::MatrixXd a = v.transpose();  // d x k
  const Eigen::Index k = a.cols();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(30 * std::max<Eigen::Index>(k, 1));
  const double tol =
      std::max(opts.tol, 10.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(a.rows(), k)) *
                             a.cwiseAbs().colwise().sum().maxCoeff() * std::max(1.0, c.cwiseAbs().maxCoeff()));

  Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
  std::vector<bool> passive(static_cast<std::size_t>(k), false);
  Eigen::VectorXd w = a.transpose() * c;

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) ap.col(static_cast<Eigen::Index>(t)) = a.col(idx[t]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(c);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
    for (std::size_t t = 0; t < idx.size(); ++t) s[idx[t]] = sp[static_cast<Eigen::Index>(t)];
    return s;
  };

  int iter = 0;
  while (true) {
    Eigen::Index j_max = -1;
    double w_max = tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!passive[j] && w[j] > w_max) {
        w_max = w[j];
        j_max = j;
      }
    }
    if (j_max < 0) break;
    passive[j_max] = true;

    Eigen::VectorXd s = solve_passive();
    while (true) {
      if (++iter > max_iter) throw std::runtime_error("nnls: iteration cap exceeded");
      bool feasible = true;
      for (Eigen::Index j = 0; j < k; ++j) feasible &= !passive[j] || s[j] > 0.0;
      if (feasible) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[j] && s[j] <= 0.0) {
          const double denom = z[j] - s[j];
          alpha = std::min(alpha, denom > 0.0 ? z[j] / denom : 0.0);
        }
      }
      z += alpha * (s - z);
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[j] && z[j] <= tol) {
          passive[j] = false;
          z[j] = 0.0;
        }
      }
      s = solve_passive();
    }
    z = s;
    w = a.transpose() * (c - a * z);
  }
  return z;
}

}  // namespace rscc
