#pragma once

// Seeded subspace iteration for the leading eigenpairs of a symmetric linear
// map, dense or matrix-free.  Deterministic given the seed.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "decotopo/rng.hpp"

namespace decotopo {

using MatVec = std::function<void(const double* in, double* out)>;

struct SpectrumResult {
  std::vector<double> eigenvalues;  // sorted by descending magnitude
  Eigen::MatrixXd vectors;          // columns matching eigenvalues
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
  // |lambda0| - |lambda1| within relative degeneracy_tol
  bool degenerate_top = false;
  static constexpr double kDegeneracyTol = 1e-8;
};

// Orthogonal (subspace) iteration with Rayleigh-Ritz extraction.  The map
// must be symmetric; eigenvalues may be of either sign and are returned by
// descending magnitude.  An optional projector restricts the iteration to a
// symmetry sector; it must commute with the map.
inline SpectrumResult dominant_eigs(const MatVec& apply, std::ptrdiff_t dim, int k,
                                    uint64_t seed = 1, double tol = 1e-12,
                                    int max_iters = 2000,
                                    const std::function<void(double*)>& project = nullptr) {
  const int nv = std::min<std::ptrdiff_t>(dim, k + 2);
  Eigen::MatrixXd Q(dim, nv);
  RngStream rng(seed);
  for (std::ptrdiff_t i = 0; i < dim; ++i)
    for (int j = 0; j < nv; ++j) Q(i, j) = rng.next_normal();
  if (project)
    for (int j = 0; j < nv; ++j) project(Q.col(j).data());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, nv);

  Eigen::MatrixXd AQ(dim, nv);
  SpectrumResult res;
  Eigen::VectorXd ritz_old = Eigen::VectorXd::Zero(nv);
  for (int it = 0; it < max_iters; ++it) {
    for (int j = 0; j < nv; ++j) {
      apply(Q.col(j).data(), AQ.col(j).data());
      if (project) project(AQ.col(j).data());
    }
    Eigen::MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // magnitude-descending order of Ritz values
    std::vector<int> idx(nv);
    for (int j = 0; j < nv; ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    Eigen::VectorXd ritz(nv);
    Eigen::MatrixXd W(nv, nv);
    for (int j = 0; j < nv; ++j) {
      ritz[j] = es.eigenvalues()[idx[j]];
      W.col(j) = es.eigenvectors().col(idx[j]);
    }
    Eigen::MatrixXd QW = AQ * W;  // A Q W; next subspace before orthonormalization
    res.iterations = it + 1;
    const double scale = std::max(std::abs(ritz[0]), 1e-300);
    double drift = 0.0;
    for (int j = 0; j < std::min(k, nv); ++j)
      drift = std::max(drift, std::abs(ritz[j] - ritz_old[j]));
    ritz_old = ritz;
    if (drift < tol * scale && it > 0) {
      // converged by Ritz-value stability; compute final residual on the top pair
      Eigen::MatrixXd V = Q * W;
      Eigen::VectorXd t(dim);
      apply(V.col(0).data(), t.data());
      res.residual = (t - ritz[0] * V.col(0)).norm() / scale;
      res.converged = res.residual < std::sqrt(tol) * 100;
      res.vectors = V.leftCols(std::min(k, nv));
      res.eigenvalues.assign(ritz.data(), ritz.data() + std::min(k, nv));
      break;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr2(QW);
    Q = qr2.householderQ() * Eigen::MatrixXd::Identity(dim, nv);
  }
  if (res.eigenvalues.empty()) {  // hit max_iters; report best estimate
    for (int j = 0; j < nv; ++j) apply(Q.col(j).data(), AQ.col(j).data());
    Eigen::MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    std::vector<int> idx(nv);
    for (int j = 0; j < nv; ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    Eigen::MatrixXd V(dim, std::min(k, nv));
    for (int j = 0; j < std::min(k, nv); ++j) {
      res.eigenvalues.push_back(es.eigenvalues()[idx[j]]);
      V.col(j) = Q * es.eigenvectors().col(idx[j]);
    }
    res.vectors = V;
    Eigen::VectorXd t(dim);
    apply(V.col(0).data(), t.data());
    res.residual = (t - res.eigenvalues[0] * V.col(0)).norm() /
                   std::max(std::abs(res.eigenvalues[0]), 1e-300);
    res.converged = false;
  }
  if (res.eigenvalues.size() >= 2) {
    const double l0 = std::abs(res.eigenvalues[0]), l1 = std::abs(res.eigenvalues[1]);
    res.degenerate_top = (l0 - l1) <= SpectrumResult::kDegeneracyTol * l0;
  }
  return res;
}

}  // namespace decotopo
