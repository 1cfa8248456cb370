#pragma once

// Classical spin models with dense per-edge Boltzmann weight tables: the
// isotropic Ashkin-Teller model, the coupled two-copy model of the perturbed
// state, the n-flavored Ising family, disorder-line (eta) insertions, and the
// anyon -> observable dictionary.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decotopo/coupling.hpp"

namespace decotopo {

// Spin of flavor f in local state s: bit 0 -> +1, bit 1 -> -1.
inline int spin_of(int state, int flavor) { return 1 - 2 * ((state >> flavor) & 1); }

struct EdgeRef {
  int x = 0;
  int y = 0;
  int orient = 0;  // 0: horizontal (x -> x+1), 1: vertical (y -> y+1)
  auto operator<=>(const EdgeRef&) const = default;
};

// Lattice geometry plus a dense edge-weight table over pairs of local spin
// states.  Weights are precomputed once; engines only do table lookups.
struct StatMechModel {
  int flavors = 1;                 // n; site state space 2^n
  int Lx = 0;                      // cylinder circumference
  std::optional<int> Ly;           // transfer-direction length; nullopt = infinite
  std::vector<double> table;       // (2^n)^2 entries, row-major W(a, b)
  bool sign_indefinite = false;
  std::map<EdgeRef, uint8_t> eta_edges;  // edge -> flavor mask with flipped bonds

  std::string family;              // builder tag for serialization
  std::map<std::string, double> params;

  int dim() const { return 1 << flavors; }

  double weight(int a, int b) const { return table[a * dim() + b]; }

  // Weight of an edge with a disorder mask: flipping the masked flavor bond
  // terms equals evaluating the table with those flavors of one endpoint
  // flipped.  Exact for any table invariant under simultaneous flips.
  double weight_eta(int a, int b, uint8_t mask) const {
    return table[a * dim() + (b ^ mask)];
  }

  uint8_t eta_mask(const EdgeRef& e) const {
    auto it = eta_edges.find(e);
    return it == eta_edges.end() ? 0 : it->second;
  }

  double edge_weight(int a, int b, const EdgeRef& e) const {
    return weight_eta(a, b, eta_mask(e));
  }

  // True if W(a,b) = W(a ^ m, b ^ m) for every single-flavor mask m.
  bool flip_invariant(double tol = 0.0) const;
  bool symmetric(double tol = 0.0) const;

  void audit_signs();  // sets sign_indefinite
};

inline bool StatMechModel::flip_invariant(double tol) const {
  const int d = dim();
  for (int f = 0; f < flavors; ++f) {
    const int m = 1 << f;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (std::abs(weight(a, b) - weight(a ^ m, b ^ m)) > tol) return false;
  }
  return true;
}

inline bool StatMechModel::symmetric(double tol) const {
  const int d = dim();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (std::abs(weight(a, b) - weight(b, a)) > tol) return false;
  return true;
}

inline void StatMechModel::audit_signs() {
  sign_indefinite = false;
  for (double w : table)
    if (w < 0.0) sign_indefinite = true;
}

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

// Isotropic AT weight exp[K(ss' + tt') + K4 ss'tt'].  A flagged-infinite
// coupling locks the corresponding product to +1 (zero weight otherwise).
inline StatMechModel at_model(const ATCouplings& c, int Lx) {
  StatMechModel m;
  m.flavors = 2;
  m.Lx = Lx;
  m.family = "at";
  m.params["K"] = c.K.is_finite() ? c.K.value : -1.0;
  m.params["K4"] = c.K4.is_finite() ? c.K4.value : -1.0;
  m.table.resize(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int ss = spin_of(a, 0) * spin_of(b, 0);
      const int tt = spin_of(a, 1) * spin_of(b, 1);
      double w = 1.0;
      if (c.K.is_finite())
        w *= std::exp(c.K.value * (ss + tt));
      else if (ss != 1 || tt != 1)
        w = 0.0;
      if (c.K4.is_finite())
        w *= std::exp(c.K4.value * ss * tt);
      else if (ss * tt != 1)
        w = 0.0;
      m.table[a * 4 + b] = w;
    }
  }
  return m;
}

// Single-flavor Ising, exp[K ss'].  Used for calibration runs.
inline StatMechModel ising_model(double K, int Lx) {
  StatMechModel m;
  m.flavors = 1;
  m.Lx = Lx;
  m.family = "ising";
  m.params["K"] = K;
  m.table = {std::exp(K), std::exp(-K), std::exp(-K), std::exp(K)};
  return m;
}

namespace detail {
inline double omega_factor(int uu, int vv, double g) {
  constexpr double r2 = 1.4142135623730951;
  return (r2 + g) + g * (uu + vv) + (r2 - g) * uu * vv;
}
}  // namespace detail

// Two coupled AT copies for the perturbed state under the self-dual channel:
//   W = w(z,t;h') w(zb,tb;h') + f(p) w(z,t;1/h') w(zb,tb;1/h'),
//   w(z,t;g) = sqrt(2)+g + g(zz'+tt') + (sqrt(2)-g) zz'tt'.
// Flavor order: bit0 = z, bit1 = t, bit2 = zb, bit3 = tb.  The table can be
// sign-indefinite at small h and large p; the audit records this and the MC
// engine refuses such models.
inline StatMechModel coupled_model(double h, double p, int Lx) {
  detail::require(h > 0.0 && h <= 1.0, "coupled_model requires h in (0, 1]; use at_model at h = 0");
  detail::require(p >= 0.0 && p <= 0.5, "p out of [0, 0.5]");
  const PerturbedParams pp = perturbed_params(h, p);
  StatMechModel m;
  m.flavors = 4;
  m.Lx = Lx;
  m.family = "coupled";
  m.params["h"] = h;
  m.params["p"] = p;
  m.table.resize(256);
  const double g1 = pp.h_prime, g2 = 1.0 / pp.h_prime;
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const int zz = spin_of(a, 0) * spin_of(b, 0);
      const int tt = spin_of(a, 1) * spin_of(b, 1);
      const int zb = spin_of(a, 2) * spin_of(b, 2);
      const int tb = spin_of(a, 3) * spin_of(b, 3);
      m.table[a * 16 + b] = detail::omega_factor(zz, tt, g1) * detail::omega_factor(zb, tb, g1) +
                            pp.f * detail::omega_factor(zz, tt, g2) * detail::omega_factor(zb, tb, g2);
    }
  }
  m.audit_signs();
  return m;
}

// n-flavored Ising of the phase-flip family:
//   W = exp sum_s [2K u_s + K4 u_s u_{s+1 mod n}],  u_s = sigma^s sigma^s'.
// For n = 2 the doubled four-spin term merges, giving the AT model at
// (2K, 2K4).  Couplings come from chamon_couplings.
inline StatMechModel nflavor_model(double h, double p, int n, int Lx) {
  detail::require(n >= 2, "nflavor_model requires n >= 2");
  detail::require(n <= 4, "nflavor_model capped at n = 4 flavors");
  const ATCouplings c = chamon_couplings(h, p);
  StatMechModel m;
  m.flavors = n;
  m.Lx = Lx;
  m.family = "nflavor";
  m.params["h"] = h;
  m.params["p"] = p;
  m.params["n"] = n;
  const int d = 1 << n;
  m.table.resize(d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      double w = 1.0;
      for (int s = 0; s < n && w != 0.0; ++s) {
        const int u = spin_of(a, s) * spin_of(b, s);
        const int un = spin_of(a, (s + 1) % n) * spin_of(b, (s + 1) % n);
        if (c.K.is_finite())
          w *= std::exp(2.0 * c.K.value * u);
        else if (u != 1)
          w = 0.0;
        if (c.K4.is_finite())
          w *= std::exp(c.K4.value * u * un);
        else if (u * un != 1)
          w = 0.0;
      }
      m.table[a * d + b] = w;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Disorder lines
// ---------------------------------------------------------------------------

// A dual-lattice path given by the set of primal edges it crosses.
using DualPath = std::vector<EdgeRef>;

// Straight dual path running r rows along the transfer direction, crossing
// the horizontal bond (x0 -> x0+1) in rows 0..r-1.
inline DualPath straight_dual_path(int x0, int r) {
  DualPath p;
  for (int y = 0; y < r; ++y) p.push_back({x0, y, 0});
  return p;
}

// Flips the masked flavor bond terms on every edge crossed by the path.
// Crossing the same edge twice cancels exactly.
inline StatMechModel insert_disorder_line(const StatMechModel& m, const DualPath& path,
                                          uint8_t flavor_mask) {
  detail::require(flavor_mask < (1u << m.flavors), "flavor mask references absent flavors");
  StatMechModel out = m;
  for (const EdgeRef& e : path) {
    uint8_t& cur = out.eta_edges[e];
    cur ^= flavor_mask;
    if (cur == 0) out.eta_edges.erase(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Anyon dictionary
// ---------------------------------------------------------------------------

enum class Anyon { I, E, M, F };

struct AnyonPair {
  Anyon first = Anyon::I;   // H copy
  Anyon second = Anyon::I;  // conjugate copy
};

struct ObservableSpec {
  enum class Kind { Order, Disorder } kind = Kind::Order;
  uint8_t flavor_mask = 0;  // flavors whose product (order) or bonds (disorder) enter
  int column = 0;           // circumference position of the insertions
  std::string label;
};

inline Anyon parse_anyon(char c) {
  switch (c) {
    case 'I': case 'i': return Anyon::I;
    case 'E': case 'e': return Anyon::E;
    case 'M': case 'm': return Anyon::M;
    case 'F': case 'f': return Anyon::F;
    default: throw std::invalid_argument(std::string("unknown anyon label '") + c + "'");
  }
}

// Parses "a.b|c.d" as bra pair (a, b-bar), ket pair (c, d-bar).
inline std::pair<AnyonPair, AnyonPair> parse_anyon_label(const std::string& s) {
  auto bar = s.find('|');
  detail::require(bar != std::string::npos && bar >= 3 && s.size() - bar >= 4,
                  "anyon label must look like 'I.I|e.e'");
  auto parse_pair = [](const std::string& t) {
    auto dot = t.find('.');
    detail::require(dot != std::string::npos, "anyon pair must look like 'e.e'");
    return AnyonPair{parse_anyon(t[0]), parse_anyon(t[dot + 1])};
  };
  return {parse_pair(s.substr(0, bar)), parse_pair(s.substr(bar + 1))};
}

// Maps a bra/ket anyon-pair overlap to a spin observable of the classical
// model.  In the 4-flavor model: ket e -> z, ket e-bar -> zb, bra e -> t,
// bra e-bar -> tb; m insertions become disorder lines on the same flavors.
// In the reduced 2-flavor AT (s = z zb, tau = t zb) only the four
// combinations below survive the reduction.  Order and disorder insertions
// cannot be mixed in one spec, so fermionic labels are rejected; compose
// them from separate e and m specs sharing endpoints.
inline ObservableSpec anyon_observable(const AnyonPair& bra, const AnyonPair& ket, int flavors,
                                       int column = 0) {
  for (Anyon a : {bra.first, bra.second, ket.first, ket.second})
    detail::require(a != Anyon::F,
                    "fermionic labels are composite (e and m sharing endpoints); "
                    "standalone f observables are not supported");
  auto count_e = [](const AnyonPair& p) {
    return int(p.first == Anyon::E) + int(p.second == Anyon::E);
  };
  auto count_m = [](const AnyonPair& p) {
    return int(p.first == Anyon::M) + int(p.second == Anyon::M);
  };
  const int ne = count_e(bra) + count_e(ket);
  const int nm = count_m(bra) + count_m(ket);
  detail::require(ne == 0 || nm == 0,
                  "mixed e/m overlaps need an order and a disorder insertion at once; "
                  "compose them from separate specs");
  ObservableSpec spec;
  spec.column = column;
  spec.kind = (nm > 0) ? ObservableSpec::Kind::Disorder : ObservableSpec::Kind::Order;
  if (flavors == 4) {
    uint8_t mask = 0;
    if (ket.first != Anyon::I) mask |= 1 << 0;   // z
    if (bra.first != Anyon::I) mask |= 1 << 1;   // t
    if (ket.second != Anyon::I) mask |= 1 << 2;  // z-bar
    if (bra.second != Anyon::I) mask |= 1 << 3;  // t-bar
    detail::require(mask != 0, "identity overlap has no insertion");
    spec.flavor_mask = mask;
    return spec;
  }
  detail::require(flavors == 2, "anyon dictionary supports 2- or 4-flavor models");
  auto same = [](const AnyonPair& a, Anyon x, Anyon y) { return a.first == x && a.second == y; };
  const bool bra_id = same(bra, Anyon::I, Anyon::I);
  if (ne > 0) {
    if (bra_id && same(ket, Anyon::E, Anyon::E)) { spec.flavor_mask = 0b01; return spec; }         // <s s>
    if (same(bra, Anyon::E, Anyon::I) && same(ket, Anyon::E, Anyon::I)) { spec.flavor_mask = 0b11; return spec; }  // <s tau ; s tau>
  } else {
    if (bra_id && same(ket, Anyon::M, Anyon::M)) { spec.flavor_mask = 0b01; return spec; }         // mu^s mu^s
    if (same(bra, Anyon::M, Anyon::I) && same(ket, Anyon::M, Anyon::I)) { spec.flavor_mask = 0b11; return spec; }  // mu^s mu^tau
  }
  throw std::invalid_argument("overlap not expressible in the reduced 2-flavor variables");
}

inline ObservableSpec anyon_observable(const std::string& label, int flavors, int column = 0) {
  auto [bra, ket] = parse_anyon_label(label);
  ObservableSpec s = anyon_observable(bra, ket, flavors, column);
  s.label = label;
  return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const StatMechModel& m) {
  nlohmann::json j;
  j["flavors"] = m.flavors;
  j["family"] = m.family;
  j["params"] = m.params;
  j["lattice"] = {{"Lx", m.Lx}, {"Ly", m.Ly ? nlohmann::json(*m.Ly) : nlohmann::json()}};
  j["sign_indefinite"] = m.sign_indefinite;
  nlohmann::json etas = nlohmann::json::array();
  for (const auto& [e, mask] : m.eta_edges)
    etas.push_back({{"x", e.x}, {"y", e.y}, {"orient", e.orient}, {"mask", mask}});
  j["eta_edges"] = etas;
  j["table"] = m.table;
  return j;
}

}  // namespace decotopo
