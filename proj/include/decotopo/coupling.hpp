#pragma once

// Closed-form maps from channel/state parameters (p, theta, h) to classical
// couplings: the self-dual Ashkin-Teller line, the general coherent-angle
// couplings, the perturbed-state parameters, and the phase-flip (n-flavor)
// couplings.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace decotopo {

// A dimensionless coupling that may be exactly infinite (locked bond).
// Infinities are carried as an explicit flag, never as a large float, so
// downstream weight builders can treat them as hard constraints.
struct Coupling {
  double value = 0.0;
  bool infinite = false;

  static Coupling finite(double v) { return {v, false}; }
  static Coupling inf() { return {std::numeric_limits<double>::infinity(), true}; }

  bool is_finite() const { return !infinite; }
  double tanh_value() const { return infinite ? 1.0 : std::tanh(value); }
};

struct ChannelSpec {
  double p = 0.0;      // error rate in [0, 1/2]
  double theta = 0.0;  // channel angle in [0, pi/2]
  double h = 0.0;      // pure-state perturbation strength in [0, 1]

  void validate() const;
};

struct ATCouplings {
  Coupling K;   // two-spin coupling
  Coupling K4;  // four-spin coupling
};

struct PerturbedParams {
  double h_prime = 0.0;  // 2h/(1+h^2)
  double f = 0.0;        // lambda * h'^2, weight of the dual-coupling branch
  double lambda = 0.0;   // effective error strength
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace detail

inline void ChannelSpec::validate() const {
  detail::require(p >= 0.0 && p <= 0.5, "p out of [0, 0.5]");
  detail::require(theta >= 0.0 && theta <= 1.5707963267948967, "theta out of [0, pi/2]");
  detail::require(h >= 0.0 && h <= 1.0, "h out of [0, 1]");
}

// lambda = 2p(1-p) / (1 - 2p + 2p^2); monotone from 0 (p=0) to 1 (p=1/2).
inline double lambda_of_p(double p) {
  detail::require(p >= 0.0 && p <= 0.5, "p out of [0, 0.5]");
  return 2.0 * p * (1.0 - p) / (1.0 - 2.0 * p + 2.0 * p * p);
}

// Couplings of the self-dual AT line:
//   tanh K  = (2 - sqrt(4 - l^2)) / l
//   tanh K4 = (2 - l sqrt(4 - l^2)) / (2 - l^2)
// The pair satisfies exp(-2 K4) = sinh(2 K) identically.  p = 0 is the
// flagged limit (K, K4) = (0, inf).
inline ATCouplings selfdual_couplings(double p) {
  const double l = lambda_of_p(p);
  if (l == 0.0) return {Coupling::finite(0.0), Coupling::inf()};
  const double root = std::sqrt(4.0 - l * l);
  // (2 - root)/l rationalized to avoid cancellation at small l
  const double tK = l / (2.0 + root);
  const double tK4 = (2.0 - l * root) / (2.0 - l * l);
  return {Coupling::finite(std::atanh(tK)), Coupling::finite(std::atanh(tK4))};
}

// Couplings of the general coherent channel at angle theta.  With
//   B = l sin^2(t) / (1 + l cos^2(t)),  C = (1 - l cos^2(t)) / (1 + l cos^2(t))
// the pair (a, b) = (tanh K, tanh K4) solves
//   a (1 + b) = B (1 + a^2 b),   a^2 + b = C (1 + a^2 b).
// Eliminating b gives B a^2 - (1+C) a + B = 0; the physical root lies in
// [0, 1).  b = 1 (pure-X limit, cos t = 0) is flagged as infinite K4.
inline ATCouplings general_couplings(double p, double theta) {
  detail::require(theta >= 0.0 && theta <= 1.5707963267948967, "theta out of [0, pi/2]");
  const double l = lambda_of_p(p);
  if (l == 0.0) return {Coupling::finite(0.0), Coupling::inf()};
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double B = l * s2 / (1.0 + l * c2);
  const double C = (1.0 - l * c2) / (1.0 + l * c2);
  // rationalized quadratic root; exact at B = 0 (pure-Z channel, K = 0)
  const double disc = (1.0 + C) * (1.0 + C) - 4.0 * B * B;
  double a = 2.0 * B / ((1.0 + C) + std::sqrt(std::max(disc, 0.0)));
  if (disc < 0.0) {  // bracketing fallback for degenerate angles
    a = B / (1.0 + C) * 2.0;
  }
  const double den = 1.0 - C * a * a;
  const double num = C - a * a;
  const Coupling K = Coupling::finite(std::atanh(a));
  if (den <= 0.0 || num >= den * (1.0 - 1e-14)) return {K, Coupling::inf()};
  return {K, Coupling::finite(std::atanh(num / den))};
}

// exp(-2 K4) - sinh(2 K); zero exactly on the AT self-dual line.
inline double selfduality_residual(const ATCouplings& c) {
  detail::require(c.K.is_finite() && c.K4.is_finite(), "couplings must be finite");
  return std::exp(-2.0 * c.K4.value) - std::sinh(2.0 * c.K.value);
}

inline PerturbedParams perturbed_params(double h, double p) {
  detail::require(h >= 0.0 && h <= 1.0, "h out of [0, 1]");
  PerturbedParams out;
  out.lambda = lambda_of_p(p);
  out.h_prime = 2.0 * h / (1.0 + h * h);
  out.f = out.lambda * out.h_prime * out.h_prime;
  return out;
}

// Phase-flip family (perturbed state + Z errors):
//   K  = ln(1+h) - ln(1-h),   K4 = -ln(1-2p)
// h = 1 and p = 1/2 are flagged infinite limits.
inline ATCouplings chamon_couplings(double h, double p) {
  detail::require(h >= 0.0 && h <= 1.0, "h out of [0, 1]");
  detail::require(p >= 0.0 && p <= 0.5, "p out of [0, 0.5]");
  Coupling K = (h >= 1.0) ? Coupling::inf()
                          : Coupling::finite(std::log(1.0 + h) - std::log(1.0 - h));
  Coupling K4 = (p >= 0.5) ? Coupling::inf() : Coupling::finite(-std::log(1.0 - 2.0 * p));
  return {K, K4};
}

}  // namespace decotopo
