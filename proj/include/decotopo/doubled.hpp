#pragma once

// Dense operators on the doubled space H (x) H-bar of a few edges, used to
// machine-check channel algebra: composition, partial-transpose symmetry,
// and Kraus-set covariance under the duality rotation.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace decotopo {

using CMat = Eigen::MatrixXcd;

namespace pauli_mats {
inline CMat I2() { return CMat::Identity(2, 2); }
inline CMat X() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMat Y() {
  CMat m(2, 2);
  m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  return m;
}
inline CMat Z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline CMat sigma(double theta) { return std::cos(theta) * Z() + std::sin(theta) * X(); }
}  // namespace pauli_mats

inline CMat kron(const CMat& a, const CMat& b) {
  CMat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

// operator acting on n qubits, nontrivially on `site` with single-qubit op
inline CMat op_at(const CMat& op, int site, int n) {
  CMat r = CMat::Identity(1, 1);
  for (int k = 0; k < n; ++k) r = kron(r, k == site ? op : pauli_mats::I2());
  return r;
}

// Linear operator on H (x) H-bar, both factors 2^n_edges dimensional, stored
// densely with the unbarred factor slowest.
struct DoubledOperator {
  int n_edges = 0;
  CMat mat;  // dimension 4^n_edges

  int factor_dim() const { return 1 << n_edges; }
};

// K acting on the unbarred copy together with conj(K) on the barred copy
inline CMat doubled_kraus(const CMat& K) { return kron(K, K.conjugate()); }

// prod_e [(1-p) I + p sigma_e(theta) (x) conj(sigma_e(theta))]
inline DoubledOperator build_edge_channel(double p, double theta, int n_edges) {
  if (n_edges < 1 || n_edges > 4)
    throw std::invalid_argument("dense doubled operators capped at 4 edges (dimension 256)");
  const int dim = 1 << (2 * n_edges);
  DoubledOperator out{n_edges, CMat::Identity(dim, dim)};
  for (int e = 0; e < n_edges; ++e) {
    const CMat s = op_at(pauli_mats::sigma(theta), e, n_edges);
    // sigma acts at slot e in the unbarred block and slot e in the barred one
    const CMat factor = (1.0 - p) * CMat::Identity(dim, dim) + p * kron(s, s.conjugate());
    out.mat = (factor * out.mat).eval();
  }
  return out;
}

// channel with Kraus operators {sqrt(1-p) I, sqrt(p) Y_e} on each edge
inline DoubledOperator build_y_channel(double p, int n_edges) {
  if (n_edges < 1 || n_edges > 4) throw std::invalid_argument("dense cap is 4 edges");
  const int dim = 1 << (2 * n_edges);
  DoubledOperator out{n_edges, CMat::Identity(dim, dim)};
  for (int e = 0; e < n_edges; ++e) {
    const CMat y = op_at(pauli_mats::Y(), e, n_edges);
    const CMat factor = (1.0 - p) * CMat::Identity(dim, dim) + p * kron(y, y.conjugate());
    out.mat = (factor * out.mat).eval();
  }
  return out;
}

// || E(p)^dagger E(p) - E(2p(1-p)) ||_F on a single edge
inline double compose_check(double p, double theta) {
  const DoubledOperator e = build_edge_channel(p, theta, 1);
  const DoubledOperator e2 = build_edge_channel(2.0 * p * (1.0 - p), theta, 1);
  return (e.mat.adjoint() * e.mat - e2.mat).norm();
}

// partial transpose on the unbarred (first) or barred (second) factor
inline CMat partial_transpose(const CMat& m, int factor_dim, bool first_factor) {
  const int D = factor_dim;
  CMat r(m.rows(), m.cols());
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c)
        for (int d = 0; d < D; ++d) {
          // m[(a,b),(c,d)] with unbarred indices a, c
          const auto v = m(a * D + b, c * D + d);
          if (first_factor)
            r(c * D + b, a * D + d) = v;
          else
            r(a * D + d, c * D + b) = v;
        }
  return r;
}

// max over the two one-sided partial transposes of ||op^T_factor - op||_F
inline double partial_transpose_check(const DoubledOperator& op) {
  const int D = op.factor_dim();
  const double r1 = (partial_transpose(op.mat, D, true) - op.mat).norm();
  const double r2 = (partial_transpose(op.mat, D, false) - op.mat).norm();
  return std::max(r1, r2);
}

// Kraus-set covariance under the sigma-product rotation: conjugating every
// Kraus operator by prod_e sigma_e must permute the set up to phases.
inline bool kraus_set_covariant_under_sigma(double p, double theta, int n_edges) {
  const int D = 1 << n_edges;
  CMat rot = CMat::Identity(D, D);
  for (int e = 0; e < n_edges; ++e) rot = (op_at(pauli_mats::sigma(0.7853981633974483), e, n_edges) * rot).eval();
  // Kraus set of the composed channel: products over edges of {sqrt(1-p) I, sqrt(p) sigma_e}
  std::vector<CMat> kraus;
  for (int pat = 0; pat < (1 << n_edges); ++pat) {
    CMat k = CMat::Identity(D, D);
    double amp = 1.0;
    for (int e = 0; e < n_edges; ++e) {
      if (pat >> e & 1) {
        k = (op_at(pauli_mats::sigma(theta), e, n_edges) * k).eval();
        amp *= std::sqrt(p);
      } else {
        amp *= std::sqrt(1.0 - p);
      }
    }
    kraus.push_back(amp * k);
  }
  for (const CMat& k : kraus) {
    const CMat kc = rot * k * rot.adjoint();
    bool matched = false;
    for (const CMat& k2 : kraus) {
      // match up to a phase: compare |<k2, kc>| with norms
      const std::complex<double> ip = (k2.adjoint() * kc).trace();
      if (std::abs(std::abs(ip) - k2.norm() * kc.norm()) < 1e-10 &&
          std::abs(k2.norm() - kc.norm()) < 1e-10) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace decotopo
