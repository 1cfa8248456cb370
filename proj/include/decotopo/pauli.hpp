#pragma once

// Symbolic Pauli strings on the edges of a finite torus, with the
// electromagnetic-duality conjugation U_D = T_delta prod_e (X_e + Z_e)/sqrt(2).
// Strings are two bit-vectors plus a fourth-root-of-unity phase, so the
// duality identities can be checked exactly on lattices far beyond any dense
// cap.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace decotopo {

// Square-lattice torus with qubits on edges.  Edge (x, y, o): o = 0 runs from
// vertex (x, y) to (x+1, y), o = 1 from (x, y) to (x, y+1).  The diagonal
// translation T_delta shifts every edge midpoint by (1/2, 1/2); it requires
// even Lx, Ly so that repeated application closes consistently.
struct TorusLattice {
  int Lx = 0, Ly = 0;

  TorusLattice(int lx, int ly) : Lx(lx), Ly(ly) {
    if (lx < 2 || ly < 2 || lx % 2 || ly % 2)
      throw std::invalid_argument("EMD torus requires even Lx, Ly >= 2");
  }

  int n_edges() const { return 2 * Lx * Ly; }
  int edge(int x, int y, int o) const {
    x = ((x % Lx) + Lx) % Lx;
    y = ((y % Ly) + Ly) % Ly;
    return 2 * (y * Lx + x) + o;
  }
  // vertex (x, y): the four incident edges
  std::vector<int> star(int x, int y) const {
    return {edge(x, y, 0), edge(x - 1, y, 0), edge(x, y, 1), edge(x, y - 1, 1)};
  }
  // plaquette with corners (x, y), (x+1, y), (x, y+1)
  std::vector<int> plaquette(int x, int y) const {
    return {edge(x, y, 0), edge(x, y + 1, 0), edge(x, y, 1), edge(x + 1, y, 1)};
  }
  // diagonal translation: horizontal edge -> vertical edge one column over,
  // vertical edge -> horizontal edge one row up
  int translate_diag(int e) const {
    const int o = e % 2, cell = e / 2, x = cell % Lx, y = cell / Lx;
    return o == 0 ? edge(x + 1, y, 1) : edge(x, y + 1, 0);
  }
  // whole-lattice translation by (dx, dy)
  int translate(int e, int dx, int dy) const {
    const int o = e % 2, cell = e / 2, x = cell % Lx, y = cell / Lx;
    return edge(x + dx, y + dy, o);
  }
};

// i^phase * prod_e X_e^{x[e]} Z_e^{z[e]}
class PauliString {
 public:
  explicit PauliString(int n_edges) : x_(n_edges, 0), z_(n_edges, 0) {}

  static PauliString identity(int n_edges) { return PauliString(n_edges); }

  static PauliString x_string(int n_edges, const std::vector<int>& edges) {
    PauliString p(n_edges);
    for (int e : edges) p.x_[e] ^= 1;
    return p;
  }
  static PauliString z_string(int n_edges, const std::vector<int>& edges) {
    PauliString p(n_edges);
    for (int e : edges) p.z_[e] ^= 1;
    return p;
  }

  int size() const { return int(x_.size()); }
  int phase() const { return phase_; }
  bool has_x(int e) const { return x_[e]; }
  bool has_z(int e) const { return z_[e]; }

  // multiplication with phase bookkeeping: Z^z X^x = (-1)^(z x) X^x Z^z
  PauliString operator*(const PauliString& o) const {
    if (o.size() != size()) throw std::invalid_argument("mismatched string lengths");
    PauliString r(size());
    int swaps = 0;
    for (int e = 0; e < size(); ++e) {
      swaps += int(z_[e]) & int(o.x_[e]);
      r.x_[e] = x_[e] ^ o.x_[e];
      r.z_[e] = z_[e] ^ o.z_[e];
    }
    r.phase_ = (phase_ + o.phase_ + 2 * (swaps % 2)) % 4;
    return r;
  }

  bool operator==(const PauliString& o) const {
    return phase_ == o.phase_ && x_ == o.x_ && z_ == o.z_;
  }

  // equal letter content, phases ignored
  bool same_support(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }

  bool commutes_with(const PauliString& o) const {
    int sym = 0;
    for (int e = 0; e < size(); ++e)
      sym ^= (int(x_[e]) & int(o.z_[e])) ^ (int(z_[e]) & int(o.x_[e]));
    return sym == 0;
  }

  // conjugation by prod_e (X_e + Z_e)/sqrt(2): X <-> Z per edge, Y -> -Y
  PauliString conjugate_by_sigma_product() const {
    PauliString r(size());
    int ys = 0;
    for (int e = 0; e < size(); ++e) {
      r.x_[e] = z_[e];
      r.z_[e] = x_[e];
      ys += int(x_[e]) & int(z_[e]);
    }
    r.phase_ = (phase_ + 2 * (ys % 2)) % 4;
    return r;
  }

  PauliString relabel(const TorusLattice& lat, int (TorusLattice::*map)(int) const) const {
    PauliString r(size());
    r.phase_ = phase_;
    for (int e = 0; e < size(); ++e) {
      const int t = (lat.*map)(e);
      r.x_[t] = x_[e];
      r.z_[t] = z_[e];
    }
    return r;
  }

  PauliString translated(const TorusLattice& lat, int dx, int dy) const {
    PauliString r(size());
    r.phase_ = phase_;
    for (int e = 0; e < size(); ++e) {
      const int t = lat.translate(e, dx, dy);
      r.x_[t] = x_[e];
      r.z_[t] = z_[e];
    }
    return r;
  }

  std::string to_string() const {
    static const char* ph[] = {"+", "+i", "-", "-i"};
    std::string s = ph[phase_];
    for (int e = 0; e < size(); ++e) {
      const int c = x_[e] + 2 * z_[e];
      s += " IXZY"[c == 3 ? 3 : c == 0 ? 0 : c];
    }
    return s;
  }

 private:
  std::vector<uint8_t> x_, z_;
  int phase_ = 0;  // power of i; Y = i X Z carries phase 1 in (x=1, z=1)
};

// U_D w U_D^dagger: sigma-product conjugation followed by T_delta relabeling
inline PauliString emd_conjugate(const PauliString& w, const TorusLattice& lat) {
  if (w.size() != lat.n_edges()) throw std::invalid_argument("string/lattice size mismatch");
  return w.conjugate_by_sigma_product().relabel(lat, &TorusLattice::translate_diag);
}

// Horizontal lattice path of length len starting at vertex (x0, y0); its
// endpoints carry the charge pair.
inline std::vector<int> horizontal_path(const TorusLattice& lat, int x0, int y0, int len) {
  std::vector<int> es;
  for (int i = 0; i < len; ++i) es.push_back(lat.edge(x0 + i, y0, 0));
  return es;
}

// The canonical dual companion of a lattice path: its diagonal translate.
inline std::vector<int> diag_translate_path(const TorusLattice& lat, const std::vector<int>& path) {
  std::vector<int> es;
  for (int e : path) es.push_back(lat.translate_diag(e));
  return es;
}

// w_e(l): X-string on a lattice path
inline PauliString charge_string(const TorusLattice& lat, const std::vector<int>& path) {
  return PauliString::x_string(lat.n_edges(), path);
}

// w_m(l~): Z-string on a dual path (edges crossed)
inline PauliString flux_string(const TorusLattice& lat, const std::vector<int>& dual_path) {
  return PauliString::z_string(lat.n_edges(), dual_path);
}

// w_f(l) = w_e(l) w_m(l~) with l~ the diagonal translate of l
inline PauliString fermion_string(const TorusLattice& lat, const std::vector<int>& path) {
  return charge_string(lat, path) * flux_string(lat, diag_translate_path(lat, path));
}

}  // namespace decotopo
