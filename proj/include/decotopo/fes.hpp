#pragma once

// Finite-entanglement scaling: extract the central charge from a chi ladder
// of (xi, S) samples via S = (c/6) ln xi + const, with the kappa-based
// S vs ln(chi) slope as a secondary consistency value.

#include <stdexcept>
#include <vector>

namespace decotopo {

struct FESSample {
  int chi = 0;
  double xi = 0.0;
  double entropy = 0.0;
};

struct FESFit {
  double c = 0.0;              // primary: 6 * slope of S vs ln xi
  double residual = 0.0;       // rms residual of the primary fit
  double slope_ln_chi = 0.0;   // measured slope of S vs ln chi
  double kappa_c = 0.0;        // kappa evaluated at the fitted c
  double secondary = 0.0;      // c * kappa(c) / 6, to compare with slope_ln_chi
  std::vector<FESSample> samples;
};

inline double fes_kappa(double c) { return 6.0 / (std::sqrt(12.0 * c) + c); }

inline FESFit fit_central_charge(const std::vector<FESSample>& samples) {
  if (samples.size() < 4) throw std::invalid_argument("central-charge fit needs >= 4 samples");
  for (size_t i = 1; i < samples.size(); ++i)
    if (samples[i].chi <= samples[i - 1].chi)
      throw std::invalid_argument("chi ladder must be strictly increasing");
  auto linfit = [](const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    return std::pair{slope, icept};
  };
  std::vector<double> lnxi, lnchi, S;
  for (const FESSample& s : samples) {
    if (!(s.xi > 0.0) || !std::isfinite(s.xi))
      throw std::invalid_argument("samples need finite positive xi");
    lnxi.push_back(std::log(s.xi));
    lnchi.push_back(std::log(double(s.chi)));
    S.push_back(s.entropy);
  }
  FESFit fit;
  fit.samples = samples;
  auto [a1, b1] = linfit(lnxi, S);
  fit.c = 6.0 * a1;
  double rss = 0.0;
  for (size_t i = 0; i < S.size(); ++i) {
    const double r = S[i] - (a1 * lnxi[i] + b1);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / double(S.size()));
  fit.slope_ln_chi = linfit(lnchi, S).first;
  fit.kappa_c = fes_kappa(std::max(fit.c, 1e-6));
  fit.secondary = fit.c * fit.kappa_c / 6.0;
  return fit;
}

}  // namespace decotopo
