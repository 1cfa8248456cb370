#pragma once

// Exact row-to-row transfer operators on width-Lx cylinders: spectra,
// correlation lengths, order/disorder two-point functions, and a
// full-enumeration partition-function oracle for tiny systems.
//
// Conventions.  Sites on a square lattice, x = 0..Lx-1 around the cylinder,
// y along the transfer direction.  A row configuration is encoded base-d
// with site 0 fastest.  The symmetric-gauge operator is
//   T = D^{1/2} V D^{1/2},
// where V(s, s') = prod_x W(s_x, s'_x) carries the vertical bonds and
// D(s) = prod_x W(s_x, s_{x+1}) the horizontal bonds of one row, so
// tr(T^Ly) is exactly the torus partition sum.  Row operators with disorder
// seams compose in the asymmetric gauge V * D, where every row's horizontal
// weights enter exactly once and seam ends do not mix.

#include <bit>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "decotopo/spectra.hpp"
#include "decotopo/statmech.hpp"

namespace decotopo {

class TransferOperator {
 public:
  enum class Rep { Auto, Dense, MatrixFree };

  static constexpr std::ptrdiff_t kStateCap = std::ptrdiff_t(1) << 24;
  static constexpr std::ptrdiff_t kDenseCap = 4096;

  TransferOperator(StatMechModel model, int Lx, Rep rep = Rep::Auto)
      : model_(std::move(model)), Lx_(Lx) {
    if (!model_.eta_edges.empty())
      throw std::invalid_argument("transfer operator needs a translation-invariant model; "
                                  "disorder seams enter through disorder_parameter");
    d_ = model_.dim();
    dim_ = 1;
    for (int x = 0; x < Lx_; ++x) {
      dim_ *= d_;
      if (dim_ > kStateCap) throw std::invalid_argument("state space exceeds 2^24 cap");
    }
    dense_ = (rep == Rep::Dense) || (rep == Rep::Auto && dim_ <= kDenseCap);
    if (rep == Rep::Dense && dim_ > 2 * kDenseCap)
      throw std::invalid_argument("dense representation capped at dimension 8192");
    build_row_products();
    if (dense_) materialize();
  }

  const StatMechModel& model() const { return model_; }
  int width() const { return Lx_; }
  std::ptrdiff_t dim() const { return dim_; }
  bool is_dense() const { return dense_; }
  const Eigen::MatrixXd& matrix() const {
    if (!dense_) throw std::logic_error("operator not materialized");
    return T_;
  }

  int digit(std::ptrdiff_t s, int x) const { return int((s / pow_[x]) % d_); }

  // symmetric-gauge matvec; scratch space is per-thread, so concurrent
  // applications on distinct operators are safe
  void apply(const double* in, double* out) const {
    std::vector<double>& scratch = tls_buffer(0);
    scratch.resize(dim_);
    for (std::ptrdiff_t i = 0; i < dim_; ++i) scratch[i] = sqrtD_[i] * in[i];
    apply_vertical(scratch.data(), out, nullptr);
    for (std::ptrdiff_t i = 0; i < dim_; ++i) out[i] *= sqrtD_[i];
  }

  MatVec matvec() const {
    return [this](const double* in, double* out) { apply(in, out); };
  }

  // Disorder seam data for one row: masks on horizontal bonds (x -> x+1)
  // within the row and on vertical bonds (to the next row) per column.
  struct RowSeam {
    std::map<int, uint8_t> horizontal;
    std::map<int, uint8_t> vertical;
    bool empty() const { return horizontal.empty() && vertical.empty(); }
  };

  // asymmetric-gauge modified row: out = V_mod (D_mod .* in)
  void apply_row_asym(const RowSeam& seam, const double* in, double* out) const {
    std::vector<double>& scratch = tls_buffer(0);
    scratch.resize(dim_);
    if (seam.horizontal.empty()) {
      for (std::ptrdiff_t i = 0; i < dim_; ++i) scratch[i] = D_[i] * in[i];
    } else {
      for (std::ptrdiff_t i = 0; i < dim_; ++i) scratch[i] = row_product(i, seam.horizontal) * in[i];
    }
    apply_vertical(scratch.data(), out, seam.vertical.empty() ? nullptr : &seam.vertical);
  }

  double row_diag(std::ptrdiff_t s) const { return D_[s]; }
  double sqrt_row_diag(std::ptrdiff_t s) const { return sqrtD_[s]; }

  // Global-flip parity sectors: Full keeps the whole space; Even projects
  // onto states invariant under every single-flavor global flip, where the
  // physical (non-symmetry-breaking) gap lives.
  enum class Sector { Full, Even };

  // leading eigenpairs, cached; deterministic given the seed
  const SpectrumResult& spectrum(int k = 4, uint64_t seed = 11, int max_iters = 4000,
                                 Sector sector = Sector::Full) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::optional<SpectrumResult>& slot = (sector == Sector::Full) ? spec_ : spec_even_;
    if (!slot || int(slot->eigenvalues.size()) < std::min<std::ptrdiff_t>(k, dim_)) {
      std::function<void(double*)> project;
      if (sector == Sector::Even) project = [this](double* v) { project_even(v); };
      MatVec mv = matvec();
      if (dense_) {
        mv = [this](const double* in, double* out) {
          Eigen::Map<const Eigen::VectorXd> vi(in, dim_);
          Eigen::Map<Eigen::VectorXd> vo(out, dim_);
          vo = T_.selfadjointView<Eigen::Lower>() * vi;
        };
      }
      slot = dominant_eigs(mv, dim_, k, seed, dense_ ? 1e-13 : 1e-12, max_iters, project);
    }
    return *slot;
  }

  // average over the 2^n simultaneous global flips of each flavor
  void project_even(double* v) const { project_parity(v, 0); }

  // project onto the parity sector where the global flip of flavor f carries
  // character -1 iff bit f of odd_mask is set
  void project_parity(double* v, uint8_t odd_mask) const {
    const int n = model_.flavors;
    std::vector<double>& acc = tls_buffer(1);
    acc.assign(dim_, 0.0);
    for (int g = 0; g < (1 << n); ++g) {
      std::ptrdiff_t flip = 0;
      for (int x = 0; x < Lx_; ++x) flip += std::ptrdiff_t(g) * pow_[x];
      const double chr = (std::popcount(unsigned(g & odd_mask)) & 1) ? -1.0 : 1.0;
      for (std::ptrdiff_t s = 0; s < dim_; ++s) acc[s] += chr * v[s ^ flip];
    }
    const double norm = 1.0 / (1 << n);
    for (std::ptrdiff_t s = 0; s < dim_; ++s) v[s] = acc[s] * norm;
  }

  // leading eigenpairs within one global-flip parity sector (uncached)
  SpectrumResult parity_spectrum(int k, uint8_t odd_mask, uint64_t seed = 11,
                                 int max_iters = 4000) const {
    std::function<void(double*)> project = [this, odd_mask](double* v) {
      project_parity(v, odd_mask);
    };
    MatVec mv = matvec();
    if (dense_) {
      mv = [this](const double* in, double* out) {
        Eigen::Map<const Eigen::VectorXd> vi(in, dim_);
        Eigen::Map<Eigen::VectorXd> vo(out, dim_);
        vo = T_.selfadjointView<Eigen::Lower>() * vi;
      };
    }
    return dominant_eigs(mv, dim_, k, seed, dense_ ? 1e-13 : 1e-12, max_iters, project);
  }

 private:
  void build_row_products() {
    pow_.resize(Lx_ + 1);
    pow_[0] = 1;
    for (int x = 0; x < Lx_; ++x) pow_[x + 1] = pow_[x] * d_;
    D_.resize(dim_);
    sqrtD_.resize(dim_);
    for (std::ptrdiff_t s = 0; s < dim_; ++s) {
      double w = 1.0;
      for (int x = 0; x < Lx_; ++x) w *= model_.weight(digit(s, x), digit(s, (x + 1) % Lx_));
      D_[s] = w;
      sqrtD_[s] = std::sqrt(std::abs(w));
      if (w < 0.0)
        throw std::invalid_argument("negative horizontal row product; symmetric split undefined");
    }
  }

  double row_product(std::ptrdiff_t s, const std::map<int, uint8_t>& masks) const {
    double w = 1.0;
    for (int x = 0; x < Lx_; ++x) {
      auto it = masks.find(x);
      const uint8_t m = it == masks.end() ? 0 : it->second;
      w *= model_.weight_eta(digit(s, x), digit(s, (x + 1) % Lx_), m);
    }
    return w;
  }

  // out = (x-wise contraction of W over every site) applied to in;
  // per-column masks flip the target state's flavors (disorder on vertical bonds)
  void apply_vertical(const double* in, double* out, const std::map<int, uint8_t>* masks) const {
    auto mask_at = [&](int x) -> uint8_t {
      if (!masks) return 0;
      auto it = masks->find(x);
      return it == masks->end() ? 0 : it->second;
    };
    if (Lx_ == 1) {
      contract_site(in, out, 0, mask_at(0));
      return;
    }
    std::vector<double>& buf = tls_buffer(1);
    std::vector<double>& buf2 = tls_buffer(2);
    buf.resize(dim_);
    buf2.resize(dim_);
    const double* src = in;
    for (int x = 0; x < Lx_; ++x) {
      double* dst = (x == Lx_ - 1) ? out : (x % 2 == 0 ? buf.data() : buf2.data());
      contract_site(src, dst, x, mask_at(x));
      src = dst;
    }
  }

  // single-site contraction: out[..a..] = sum_b W(a, b ^ mask) in[..b..]
  void contract_site(const double* in, double* out, int x, uint8_t mask) const {
    const std::ptrdiff_t stride = pow_[x];
    const std::ptrdiff_t block = stride * d_;
    const double* W = model_.table.data();
    for (std::ptrdiff_t hi = 0; hi < dim_; hi += block) {
      for (std::ptrdiff_t lo = 0; lo < stride; ++lo) {
        const double* pin = in + hi + lo;
        double* pout = out + hi + lo;
        for (int a = 0; a < d_; ++a) {
          double acc = 0.0;
          const double* row = W + a * d_;
          for (int b = 0; b < d_; ++b) acc += row[b ^ mask] * pin[b * stride];
          pout[a * stride] = acc;
        }
      }
    }
  }

  void materialize() {
    T_.resize(dim_, dim_);
    for (std::ptrdiff_t i = 0; i < dim_; ++i) {
      for (std::ptrdiff_t j = 0; j < dim_; ++j) {
        double v = 1.0;
        for (int x = 0; x < Lx_; ++x) v *= model_.weight(digit(i, x), digit(j, x));
        T_(i, j) = sqrtD_[i] * v * sqrtD_[j];
      }
    }
  }

  static std::vector<double>& tls_buffer(int which) {
    thread_local std::vector<double> bufs[3];
    return bufs[which];
  }

  StatMechModel model_;
  int Lx_;
  int d_ = 2;
  std::ptrdiff_t dim_ = 1;
  bool dense_ = false;
  std::vector<std::ptrdiff_t> pow_;
  std::vector<double> D_, sqrtD_;
  Eigen::MatrixXd T_;
  mutable std::optional<SpectrumResult> spec_, spec_even_;
  mutable std::mutex mu_;
};

inline TransferOperator build_transfer(const StatMechModel& m, int Lx,
                                       TransferOperator::Rep rep = TransferOperator::Rep::Auto) {
  return TransferOperator(m, Lx, rep);
}

inline SpectrumResult dominant_spectrum(const TransferOperator& t, int k, uint64_t seed = 11) {
  if (k > 8) throw std::invalid_argument("dominant_spectrum capped at k = 8");
  return t.spectrum(k, seed);
}

// xi = 1 / ln(lambda0 / |lambda1|); infinite (flagged as +inf) when the top
// pair is degenerate within relative 1e-8, and 0 when lambda1 vanishes.
// The Even sector restricts to global-flip invariant states, giving the
// physical gap inside symmetry-broken phases.
inline double correlation_length(const TransferOperator& t,
                                 TransferOperator::Sector sector = TransferOperator::Sector::Full) {
  const SpectrumResult& s = t.spectrum(4, 11, 4000, sector);
  if (s.eigenvalues.size() < 2) return 0.0;
  const double l0 = std::abs(s.eigenvalues[0]);
  const double l1 = std::abs(s.eigenvalues[1]);
  if (l1 <= 1e-13 * l0) return 0.0;
  if ((l0 - l1) <= SpectrumResult::kDegeneracyTol * l0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / std::log(l0 / l1);
}

// diagonal insertion operator: product of masked flavor spins at one column
inline void order_insertion(const TransferOperator& t, const ObservableSpec& spec,
                            Eigen::VectorXd& diag) {
  diag.resize(t.dim());
  for (std::ptrdiff_t s = 0; s < t.dim(); ++s) {
    const int st = t.digit(s, spec.column % t.width());
    int v = 1;
    for (int f = 0; f < t.model().flavors; ++f)
      if (spec.flavor_mask & (1 << f)) v *= spin_of(st, f);
    diag[s] = v;
  }
}

// <O_i O_{i+r}> for r = 1..rmax along the cylinder axis, normalized by
// lambda0^r, with both insertions at the spec's column.
inline std::vector<double> two_point_profile(const TransferOperator& t,
                                             const ObservableSpec& spec, int rmax) {
  if (spec.kind != ObservableSpec::Kind::Order)
    throw std::invalid_argument("two_point_profile takes an order spec");
  const SpectrumResult& s = t.spectrum(4);
  const double l0 = s.eigenvalues[0];
  Eigen::VectorXd psi = s.vectors.col(0);
  Eigen::VectorXd O;
  order_insertion(t, spec, O);
  Eigen::VectorXd v = O.cwiseProduct(psi);
  Eigen::VectorXd w(t.dim());
  std::vector<double> out;
  out.reserve(rmax);
  for (int r = 1; r <= rmax; ++r) {
    t.apply(v.data(), w.data());
    v = w / l0;
    out.push_back(psi.dot(O.cwiseProduct(v)));
  }
  return out;
}

inline double two_point_order(const TransferOperator& t, const ObservableSpec& spec, int r) {
  if (r <= 0) return 1.0;  // spins square to one
  if (r > 64) throw std::invalid_argument("separation capped at 64");
  return two_point_profile(t, spec, r).back();
}

// Z_defect / Z for a dual path.  Rows carrying seam modifications are applied
// in the asymmetric gauge V * D~, sandwiched between the dressed dominant
// eigenvectors; rows beyond the path contribute exactly 1.
inline double disorder_parameter(const TransferOperator& t, const DualPath& path,
                                 uint8_t flavor_mask) {
  if (path.empty()) return 1.0;
  if (flavor_mask >= (1u << t.model().flavors))
    throw std::invalid_argument("flavor mask references absent flavors");
  int rows = 0;
  for (const EdgeRef& e : path) rows = std::max(rows, e.y + (e.orient == 0 ? 1 : 2));
  std::vector<TransferOperator::RowSeam> seams(rows);
  for (const EdgeRef& e : path) {
    const int x = ((e.x % t.width()) + t.width()) % t.width();
    if (e.orient == 0)
      seams[e.y].horizontal[x] ^= flavor_mask;
    else
      seams[e.y].vertical[x] ^= flavor_mask;
  }
  const SpectrumResult& s = t.spectrum(4);
  const double l0 = s.eigenvalues[0];
  const Eigen::VectorXd psi = s.vectors.col(0);
  Eigen::VectorXd v(t.dim()), w(t.dim());
  for (std::ptrdiff_t i = 0; i < t.dim(); ++i) v[i] = psi[i] / t.sqrt_row_diag(i);
  for (int y = 0; y < rows; ++y) {
    t.apply_row_asym(seams[y], v.data(), w.data());
    v = w / l0;
  }
  double acc = 0.0;
  for (std::ptrdiff_t i = 0; i < t.dim(); ++i) acc += psi[i] * t.sqrt_row_diag(i) * v[i];
  return acc;
}

// straight seam of length r at column x0: profile of Z_defect/Z for 1..rmax
inline std::vector<double> disorder_profile(const TransferOperator& t, int x0, uint8_t flavor_mask,
                                            int rmax) {
  const SpectrumResult& s = t.spectrum(4);
  const double l0 = s.eigenvalues[0];
  const Eigen::VectorXd psi = s.vectors.col(0);
  TransferOperator::RowSeam seam;
  seam.horizontal[((x0 % t.width()) + t.width()) % t.width()] = flavor_mask;
  Eigen::VectorXd v(t.dim()), w(t.dim());
  for (std::ptrdiff_t i = 0; i < t.dim(); ++i) v[i] = psi[i] / t.sqrt_row_diag(i);
  std::vector<double> out;
  out.reserve(rmax);
  for (int r = 1; r <= rmax; ++r) {
    t.apply_row_asym(seam, v.data(), w.data());
    v = w / l0;
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i < t.dim(); ++i) acc += psi[i] * t.sqrt_row_diag(i) * v[i];
    out.push_back(acc);
  }
  return out;
}

// log tr(T^Ly) with per-step rescaling; dense representation only
inline double log_trace_power(const TransferOperator& t, int Ly) {
  if (!t.is_dense()) throw std::invalid_argument("log_trace_power needs a dense operator");
  Eigen::MatrixXd P = t.matrix();
  double logscale = 0.0;
  for (int y = 1; y < Ly; ++y) {
    const double sc = P.cwiseAbs().maxCoeff();
    P /= sc;
    logscale += std::log(sc);
    P = (P * t.matrix()).eval();
  }
  return std::log(P.trace()) + logscale;
}

// ---------------------------------------------------------------------------
// Exact enumeration oracle
// ---------------------------------------------------------------------------

struct BruteResult {
  double logZ = 0.0;
  std::vector<double> two_points;  // one per requested order spec
  double defect_ratio = 1.0;       // Z_eta / Z when a path was given
};

struct BruteRequest {
  std::vector<ObservableSpec> order_specs;  // correlate (column, 0) with (column, sep)
  std::vector<int> separations;
  DualPath defect_path;
  uint8_t defect_mask = 0;
};

// Exhaustive sum over all configurations of an Lx x Ly torus.  Total spin
// count n * Lx * Ly is capped at 24.  Each horizontal/vertical edge weight
// enters once; a 1x1 torus has two self-bonds of weight W(s, s).
inline BruteResult brute_partition(const StatMechModel& m, int Lx, int Ly,
                                   const BruteRequest& req = {}) {
  if (m.flavors * Lx * Ly > 24) throw std::invalid_argument("brute enumeration capped at 24 spins");
  const int d = m.dim();
  const int N = Lx * Ly;
  std::ptrdiff_t total = 1;
  for (int i = 0; i < N; ++i) total *= d;
  // per-edge eta masks
  std::vector<uint8_t> base_mask(2 * N, 0);
  auto edge_slot = [&](int x, int y, int o) { return 2 * (y * Lx + x) + o; };
  for (const auto& [e, mask] : m.eta_edges) {
    const int x = ((e.x % Lx) + Lx) % Lx, y = ((e.y % Ly) + Ly) % Ly;
    base_mask[edge_slot(x, y, e.orient)] ^= mask;
  }
  std::vector<uint8_t> defect_mask_slots(2 * N, 0);
  for (const EdgeRef& e : req.defect_path) {
    const int x = ((e.x % Lx) + Lx) % Lx, y = ((e.y % Ly) + Ly) % Ly;
    defect_mask_slots[edge_slot(x, y, e.orient)] ^= req.defect_mask;
  }

  double Z = 0.0, Zdef = 0.0;
  std::vector<double> corr(req.order_specs.size(), 0.0);
  std::vector<int> st(N);
  for (std::ptrdiff_t cfg = 0; cfg < total; ++cfg) {
    std::ptrdiff_t c = cfg;
    for (int i = 0; i < N; ++i) {
      st[i] = int(c % d);
      c /= d;
    }
    double w = 1.0, wd = 1.0;
    for (int y = 0; y < Ly; ++y) {
      for (int x = 0; x < Lx; ++x) {
        const int i = y * Lx + x;
        const int jh = y * Lx + (x + 1) % Lx;
        const int jv = ((y + 1) % Ly) * Lx + x;
        const int sh = edge_slot(x, y, 0), sv = edge_slot(x, y, 1);
        const double wh = m.weight_eta(st[i], st[jh], base_mask[sh]);
        const double wv = m.weight_eta(st[i], st[jv], base_mask[sv]);
        w *= wh * wv;
        if (!req.defect_path.empty()) {
          wd *= m.weight_eta(st[i], st[jh], base_mask[sh] ^ defect_mask_slots[sh]) *
                m.weight_eta(st[i], st[jv], base_mask[sv] ^ defect_mask_slots[sv]);
        }
      }
    }
    Z += w;
    Zdef += wd;
    for (size_t k = 0; k < req.order_specs.size(); ++k) {
      const auto& spec = req.order_specs[k];
      const int x0 = spec.column % Lx;
      const int i = x0, j = ((req.separations[k] % Ly) + Ly) % Ly * Lx + x0;
      int v = 1;
      for (int f = 0; f < m.flavors; ++f)
        if (spec.flavor_mask & (1 << f)) v *= spin_of(st[i], f) * spin_of(st[j], f);
      corr[k] += v * w;
    }
  }
  BruteResult out;
  out.logZ = std::log(Z);
  for (size_t k = 0; k < corr.size(); ++k) out.two_points.push_back(corr[k] / Z);
  if (!req.defect_path.empty()) out.defect_ratio = Zdef / Z;
  return out;
}

// ---------------------------------------------------------------------------
// Decay classification
// ---------------------------------------------------------------------------

struct DecayFit {
  double rate = 0.0;       // minus the log-linear slope
  double intercept = 0.0;
  bool plateau = false;    // |rate| below the plateau threshold
  static constexpr double kPlateauRate = 1e-3;
};

// log-linear fit of |profile(r)| over r in [r_max/2, r_max]
inline DecayFit fit_decay(const std::vector<double>& profile) {
  const int rmax = int(profile.size());
  const int lo = std::max(1, rmax / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int r = lo; r <= rmax; ++r) {
    const double y = std::log(std::max(std::abs(profile[r - 1]), 1e-300));
    sx += r;
    sy += y;
    sxx += double(r) * r;
    sxy += r * y;
    ++n;
  }
  DecayFit fit;
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / n;
  fit.plateau = std::abs(fit.rate) < DecayFit::kPlateauRate;
  return fit;
}

}  // namespace decotopo
