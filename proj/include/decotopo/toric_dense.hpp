#pragma once

// Dense toric-code states on tiny tori: the group-averaged ground state, the
// perturbed states, channel application on density matrices, the convex
// decomposition over sign patterns with its Ising-representation check, and
// the phase-flip (loop-representation) density-matrix moments.

#include <vector>

#include <Eigen/Dense>

#include "decotopo/pauli.hpp"
#include "decotopo/statmech.hpp"
#include "decotopo/transfer.hpp"

namespace decotopo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Z-basis dense vectors over 2^n_edges amplitudes; bit e set = edge e flipped
// by X.  Caps at 8 edges (a 2x2 torus).
class ToricDense {
 public:
  explicit ToricDense(const TorusLattice& lat) : lat_(lat) {
    if (lat.n_edges() > 8) throw std::invalid_argument("dense torus capped at 8 edges");
    dim_ = 1 << lat.n_edges();
    build_masks();
  }

  const TorusLattice& lattice() const { return lat_; }
  int dim() const { return dim_; }
  int n_edges() const { return lat_.n_edges(); }

  // group average of closed X-loops: prod_p (1 + B_p) |0>
  Vec ground_state() const {
    Vec v = Vec::Zero(dim_);
    v[0] = 1.0;
    for (int mask : plaquette_masks_) {
      Vec w = v;
      for (int s = 0; s < dim_; ++s) w[s ^ mask] += v[s];
      v = w;
    }
    return v / v.norm();
  }

  // apply sigma_e = (X_e + Z_e)/sqrt(2)
  void apply_sigma(int e, const Vec& in, Vec& out) const {
    constexpr double r = 0.7071067811865476;
    out.resize(dim_);
    const int m = 1 << e;
    for (int s = 0; s < dim_; ++s) out[s] = r * (in[s ^ m] + ((s >> e & 1) ? -in[s] : in[s]));
  }

  Vec perturbed_state(double h) const {
    Vec v = ground_state(), w(dim_);
    for (int e = 0; e < n_edges(); ++e) {
      apply_sigma(e, v, w);
      v += h * w;
    }
    return v;
  }

  // |Psi(h)> = prod (1 + h Z_e) |Psi0>, normalized
  Vec chamon_state(double h) const {
    Vec v = ground_state();
    for (int e = 0; e < n_edges(); ++e)
      for (int s = 0; s < dim_; ++s) v[s] *= 1.0 + ((s >> e & 1) ? -h : h);
    return v / v.norm();
  }

  Mat sigma_matrix(int e) const {
    Mat m = Mat::Zero(dim_, dim_);
    constexpr double r = 0.7071067811865476;
    const int bit = 1 << e;
    for (int s = 0; s < dim_; ++s) {
      m(s ^ bit, s) += r;
      m(s, s) += (s >> e & 1) ? -r : r;
    }
    return m;
  }

  // E[rho] = prod_e [(1-p) rho + p S_e rho S_e] with S the coherent sigma
  Mat apply_coherent_channel(Mat rho, double p) const {
    for (int e = 0; e < n_edges(); ++e) {
      const Mat s = sigma_matrix(e);
      rho = ((1.0 - p) * rho + p * s * rho * s).eval();
    }
    return rho;
  }

  Mat apply_phase_flip_channel(Mat rho, double p) const {
    for (int e = 0; e < n_edges(); ++e) {
      Mat zrz = rho;
      const int bit = 1 << e;
      for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b) {
          const int sgn = ((a >> e & 1) ^ (b >> e & 1)) ? -1 : 1;
          zrz(a, b) = sgn * rho(a, b);
        }
      (void)bit;
      rho = ((1.0 - p) * rho + p * zrz).eval();
    }
    return rho;
  }

 private:
  void build_masks() {
    for (int y = 0; y < lat_.Ly; ++y)
      for (int x = 0; x < lat_.Lx; ++x) {
        int m = 0;
        for (int e : lat_.plaquette(x, y)) m |= 1 << e;
        plaquette_masks_.push_back(m);
      }
  }

  TorusLattice lat_;
  int dim_ = 0;
  std::vector<int> plaquette_masks_;
};

// ---------------------------------------------------------------------------
// Convex decomposition over Kraus sign patterns
// ---------------------------------------------------------------------------

struct ConvexDecomposition {
  std::vector<double> probabilities;  // P_m over all 2^n_edges sign patterns
  double sum_p = 0.0;
  double sum_p2 = 0.0;
  double tr_rho2 = 0.0;                 // from the dense channel output
  double max_offdiag_overlap = 0.0;     // |<psi_m' | psi_m>| for m' != m
  double max_formula_error = 0.0;       // P_m vs Ising-representation product
};

// P_m as an Ising sum: two plaquette-spin copies (ket and bra of the ground
// state) with the per-edge weight w(u, u'; m_e mu), mu = 2 sqrt(p(1-p)),
//   w(u, u'; g) = sqrt(2) + g + g (u + u') + (sqrt(2) - g) u u'.
// Edge (x, y, 0) couples plaquettes (x, y) and (x, y-1); edge (x, y, 1)
// couples (x, y) and (x-1, y).
inline double convex_probability_formula(const TorusLattice& lat, const std::vector<int>& pattern,
                                         double mu) {
  const int np = lat.Lx * lat.Ly;
  auto pidx = [&](int x, int y) {
    return (((y % lat.Ly) + lat.Ly) % lat.Ly) * lat.Lx + ((x % lat.Lx) + lat.Lx) % lat.Lx;
  };
  double num = 0.0, den = 0.0;
  for (int ket = 0; ket < (1 << np); ++ket) {
    for (int bra = 0; bra < (1 << np); ++bra) {
      double w1 = 1.0, w0 = 1.0;
      for (int y = 0; y < lat.Ly; ++y) {
        for (int x = 0; x < lat.Lx; ++x) {
          for (int o = 0; o < 2; ++o) {
            const int e = lat.edge(x, y, o);
            const int pa = pidx(x, y);
            const int pb = o == 0 ? pidx(x, y - 1) : pidx(x - 1, y);
            const int u = ((ket >> pa & 1) ^ (ket >> pb & 1)) ? -1 : 1;
            const int up = ((bra >> pa & 1) ^ (bra >> pb & 1)) ? -1 : 1;
            w1 *= detail::omega_factor(u, up, pattern[e] * mu);
            w0 *= detail::omega_factor(u, up, 0.0);
          }
        }
      }
      num += w1;
      den += w0;
    }
  }
  return num / den / double(1 << lat.n_edges());
}

inline ConvexDecomposition convex_decomposition(double p, const TorusLattice& lat) {
  ToricDense td(lat);
  const int ne = lat.n_edges();
  const Vec psi0 = td.ground_state();
  const double mu = 2.0 * std::sqrt(p * (1.0 - p));
  std::vector<Vec> states;
  states.reserve(size_t(1) << ne);
  ConvexDecomposition out;
  for (int m = 0; m < (1 << ne); ++m) {
    Vec v = psi0, w(td.dim());
    for (int e = 0; e < ne; ++e) {
      const double sgn = (m >> e & 1) ? -1.0 : 1.0;
      td.apply_sigma(e, v, w);
      v = (std::sqrt(1.0 - p) * v + sgn * std::sqrt(p) * w) / std::sqrt(2.0);
    }
    states.push_back(v);
    out.probabilities.push_back(v.squaredNorm());
  }
  for (double q : out.probabilities) {
    out.sum_p += q;
    out.sum_p2 += q * q;
  }
  // dense second moment
  Mat rho = td.apply_coherent_channel(psi0 * psi0.transpose(), p);
  out.tr_rho2 = (rho * rho).trace();
  // pairwise overlaps
  for (size_t a = 0; a < states.size(); ++a)
    for (size_t b = a + 1; b < states.size(); ++b)
      out.max_offdiag_overlap = std::max(out.max_offdiag_overlap, std::abs(states[a].dot(states[b])));
  // Ising-representation product formula on a sample of patterns (each
  // evaluation sums 4^{n_plaquettes} terms)
  for (int m = 0; m < (1 << ne); m += 37) {
    std::vector<int> pattern(ne);
    for (int e = 0; e < ne; ++e) pattern[e] = (m >> e & 1) ? -1 : 1;
    const double f = convex_probability_formula(lat, pattern, mu);
    out.max_formula_error = std::max(out.max_formula_error, std::abs(f - out.probabilities[m]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phase-flip moments
// ---------------------------------------------------------------------------

struct ChamonMoment {
  double tr_rho2_dense = 0.0;    // direct density-matrix computation
  double tr_rho2_classical = 0.0;  // e^{-K4 Ne} Z_AT(K, K4) / Z_Ising(K)^2
};

// The perturbed state under phase flips has, in the loop representation,
//   tr rho^2 = e^{-K4 Ne} Z_AT(K, K4) / Z_Ising(K)^2
// with K = ln((1+h)/(1-h)), K4 = -ln(1-2p); the classical spins live on the
// plaquette torus, which is the same Lx x Ly graph.
inline ChamonMoment chamon_second_moment(double h, double p, const TorusLattice& lat) {
  ToricDense td(lat);
  const Vec psi = td.chamon_state(h);
  Mat rho = td.apply_phase_flip_channel(psi * psi.transpose(), p);
  ChamonMoment out;
  out.tr_rho2_dense = (rho * rho).trace();
  const ATCouplings c = chamon_couplings(h, p);
  const double K = c.K.value, K4 = c.K4.value;
  const double logZat = brute_partition(at_model(c, lat.Lx), lat.Lx, lat.Ly).logZ;
  const double logZising = brute_partition(ising_model(K, lat.Lx), lat.Lx, lat.Ly).logZ;
  out.tr_rho2_classical = std::exp(-K4 * lat.n_edges() + logZat - 2.0 * logZising);
  return out;
}

}  // namespace decotopo
