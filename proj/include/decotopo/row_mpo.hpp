#pragma once

// Matrix-product-operator form of one transfer row.  The local tensor is
//   A[l, r](s, s') = Wv(s, s') G(l, s') F(s', r),      W_h = F G  (SVD),
// so a closed ring of L tensors reproduces the asymmetric-gauge transfer
// matrix V * D exactly; conjugating by D^{1/2} gives the symmetric gauge.
// The bond dimension is the numerical rank of the weight table.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "decotopo/statmech.hpp"

namespace decotopo {

struct RowMPO {
  int site_dim = 0;  // d = 2^flavors
  int bond_dim = 0;  // numerical rank of the horizontal weight matrix
  // tensor[(a * bond + b)](s, s') with a = left bond, b = right bond
  std::vector<Eigen::MatrixXd> tensor;
  int measured_rank = 0;

  const Eigen::MatrixXd& block(int a, int b) const { return tensor[a * bond_dim + b]; }
};

inline RowMPO build_row_mpo(const StatMechModel& m, double rank_tol = 1e-13) {
  if (!m.eta_edges.empty())
    throw std::invalid_argument("row MPO requires a translation-invariant model");
  const int d = m.dim();
  Eigen::MatrixXd W(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) W(a, b) = m.weight(a, b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& S = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < d; ++k)
    if (S[k] > rank_tol * S[0]) ++rank;
  Eigen::MatrixXd F(d, rank), G(rank, d);
  for (int k = 0; k < rank; ++k) {
    const double s = std::sqrt(S[k]);
    F.col(k) = svd.matrixU().col(k) * s;
    G.row(k) = svd.matrixV().col(k).transpose() * s;
  }
  RowMPO mpo;
  mpo.site_dim = d;
  mpo.bond_dim = rank;
  mpo.measured_rank = rank;
  mpo.tensor.assign(rank * rank, Eigen::MatrixXd::Zero(d, d));
  for (int a = 0; a < rank; ++a)
    for (int b = 0; b < rank; ++b)
      for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) mpo.tensor[a * rank + b](s, t) = W(s, t) * G(a, t) * F(t, b);
  return mpo;
}

// Contract a periodic ring of L tensors into the dense row operator
// (asymmetric gauge V * D); index order matches TransferOperator: site 0
// fastest.
inline Eigen::MatrixXd ring_contract(const RowMPO& mpo, int L) {
  const int d = mpo.site_dim, D = mpo.bond_dim;
  std::ptrdiff_t dim = 1;
  for (int x = 0; x < L; ++x) dim *= d;
  if (dim > 4096) throw std::invalid_argument("ring contraction capped at dimension 4096");
  Eigen::MatrixXd out(dim, dim);
  std::vector<std::ptrdiff_t> pw(L + 1, 1);
  for (int x = 0; x < L; ++x) pw[x + 1] = pw[x] * d;
  Eigen::MatrixXd E(D, D), En(D, D);
  for (std::ptrdiff_t i = 0; i < dim; ++i) {
    for (std::ptrdiff_t j = 0; j < dim; ++j) {
      E.setIdentity();
      for (int x = 0; x < L; ++x) {
        const int s = int((i / pw[x]) % d), t = int((j / pw[x]) % d);
        for (int a = 0; a < D; ++a)
          for (int b = 0; b < D; ++b) {
            double acc = 0.0;
            for (int k = 0; k < D; ++k) acc += E(a, k) * mpo.block(k, b)(s, t);
            En(a, b) = acc;
          }
        E.swap(En);
      }
      out(i, j) = E.trace();
    }
  }
  return out;
}

}  // namespace decotopo
