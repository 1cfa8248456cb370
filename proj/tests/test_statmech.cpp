#include "decotopo/statmech.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace decotopo;

TEST(AtModel, UniformAtZeroCouplings) {
  StatMechModel m = at_model({Coupling::finite(0.0), Coupling::finite(0.0)}, 4);
  ASSERT_EQ(m.table.size(), 16u);
  for (double w : m.table) EXPECT_DOUBLE_EQ(w, 1.0);
}

TEST(AtModel, InfiniteK4LocksFourSpinProduct) {
  StatMechModel m = at_model({Coupling::finite(0.3), Coupling::inf()}, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int ss = spin_of(a, 0) * spin_of(b, 0);
      const int tt = spin_of(a, 1) * spin_of(b, 1);
      if (ss * tt == -1)
        EXPECT_DOUBLE_EQ(m.weight(a, b), 0.0);
      else
        EXPECT_NEAR(m.weight(a, b), std::exp(0.3 * (ss + tt)), 1e-15);
    }
  }
}

TEST(AtModel, SelfdualTableSatisfiesDualityResidual) {
  const ATCouplings c = selfdual_couplings(0.5);
  EXPECT_LT(std::abs(selfduality_residual(c)), 1e-13);
  StatMechModel m = at_model(c, 4);
  EXPECT_TRUE(m.flip_invariant(1e-14));
  EXPECT_TRUE(m.symmetric(0.0));
}

TEST(CoupledModel, FrozenEntriesAndPositivityAtScanPoint) {
  StatMechModel m = coupled_model(0.2, 0.3, 4);
  // frozen from direct evaluation of the omega products
  EXPECT_NEAR(m.weight(0, 0), 19.847694883023973, 1e-12);
  EXPECT_NEAR(m.weight(0, 1), 7.2394973088859889, 1e-12);
  double mn = 1e300;
  for (double w : m.table) mn = std::min(mn, w);
  EXPECT_NEAR(mn, 0.2629619079474057, 1e-12);
  EXPECT_FALSE(m.sign_indefinite);
  EXPECT_TRUE(m.flip_invariant(1e-12));
  EXPECT_TRUE(m.symmetric(1e-12));
}

TEST(CoupledModel, SignIndefiniteCornerIsFlagged) {
  // small h, large p: the dual-branch omega drives entries negative
  StatMechModel m = coupled_model(0.1, 0.5, 4);
  EXPECT_TRUE(m.sign_indefinite);
}

TEST(CoupledModel, HEqualsOneTablesProportionalAcrossP) {
  StatMechModel a = coupled_model(1.0, 0.0, 4);
  StatMechModel b = coupled_model(1.0, 0.4, 4);
  const double r0 = b.table[0] / a.table[0];
  for (size_t i = 0; i < a.table.size(); ++i)
    EXPECT_NEAR(b.table[i] / a.table[i], r0, 1e-12);
}

TEST(CoupledModel, PZeroFactorizesIntoTwoCopies) {
  StatMechModel m = coupled_model(0.4, 0.0, 4);
  // with f = 0 the table is w(z,t) * w(zb,tb); check the product structure
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const int a1 = a & 3, a2 = (a >> 2) & 3;
      const int b1 = b & 3, b2 = (b >> 2) & 3;
      const double w11 = m.weight(a1, b1);       // zb = tb = + on both sites
      const double w22 = m.weight(a2 << 2, b2 << 2);
      const double w00 = m.weight(0, 0);
      EXPECT_NEAR(m.weight(a, b) * w00, w11 * w22, 1e-9 * w11 * w22 + 1e-12);
    }
  }
  EXPECT_THROW(coupled_model(0.0, 0.3, 4), std::invalid_argument);
}

TEST(NFlavorModel, NTwoEqualsMergedAT) {
  const double h = 0.2, p = 0.1;
  StatMechModel n2 = nflavor_model(h, p, 2, 3);
  const ATCouplings c = chamon_couplings(h, p);
  StatMechModel at = at_model({Coupling::finite(2.0 * c.K.value), Coupling::finite(2.0 * c.K4.value)}, 3);
  ASSERT_EQ(n2.table.size(), at.table.size());
  for (size_t i = 0; i < at.table.size(); ++i) EXPECT_NEAR(n2.table[i], at.table[i], 1e-12);
}

TEST(NFlavorModel, DecoupledIsingAtZeroP) {
  // p = 0: K4 = 0, two independent Ising flavors at coupling 2K
  StatMechModel m = nflavor_model(0.2, 0.0, 2, 3);
  const double K = std::log(1.5);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const int u0 = spin_of(a, 0) * spin_of(b, 0), u1 = spin_of(a, 1) * spin_of(b, 1);
      EXPECT_NEAR(m.weight(a, b), std::exp(2.0 * K * (u0 + u1)), 1e-12);
    }
}

TEST(NFlavorModel, CyclicFlavorRelabelInvariance) {
  StatMechModel m = nflavor_model(0.3, 0.2, 3, 3);
  auto cyc = [](int s) {  // rotate bits 0->1->2->0
    return ((s & 1) << 1) | ((s >> 1 & 1) << 2) | (s >> 2 & 1);
  };
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      EXPECT_NEAR(m.weight(a, b), m.weight(cyc(a), cyc(b)), 1e-13);
}

TEST(FlipInvariance, AllFamilies) {
  EXPECT_TRUE(at_model(selfdual_couplings(0.23), 4).flip_invariant(1e-13));
  EXPECT_TRUE(coupled_model(0.5, 0.3, 4).flip_invariant(1e-11));
  EXPECT_TRUE(nflavor_model(0.4, 0.2, 3, 4).flip_invariant(1e-13));
  EXPECT_TRUE(ising_model(0.44, 4).flip_invariant(0.0));
}

TEST(DisorderLine, SingleEdgeFlipsMaskedBondTerms) {
  const ATCouplings c = selfdual_couplings(0.3);
  StatMechModel m = at_model(c, 4);
  StatMechModel md = insert_disorder_line(m, {{1, 2, 0}}, 0b01);  // flip s on one edge
  const EdgeRef e{1, 2, 0};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const int ss = spin_of(a, 0) * spin_of(b, 0);
      const int tt = spin_of(a, 1) * spin_of(b, 1);
      const double expect = std::exp(c.K.value * (-ss + tt) - c.K4.value * ss * tt);
      EXPECT_NEAR(md.edge_weight(a, b, e), expect, 1e-13);
      EXPECT_NEAR(md.edge_weight(a, b, {0, 0, 0}), m.weight(a, b), 0.0);
    }
}

TEST(DisorderLine, TwiceRestoresModel) {
  StatMechModel m = at_model(selfdual_couplings(0.3), 4);
  DualPath path = straight_dual_path(0, 3);
  StatMechModel md = insert_disorder_line(insert_disorder_line(m, path, 0b11), path, 0b11);
  EXPECT_TRUE(md.eta_edges.empty());
}

TEST(DisorderLine, EmptyPathIsIdentity) {
  StatMechModel m = at_model(selfdual_couplings(0.3), 4);
  StatMechModel md = insert_disorder_line(m, {}, 0b01);
  EXPECT_TRUE(md.eta_edges.empty());
  EXPECT_THROW(insert_disorder_line(m, {{0, 0, 0}}, 0b100), std::invalid_argument);
}

TEST(AnyonDictionary, ReducedATCombinations) {
  ObservableSpec ee = anyon_observable("I.I|e.e", 2);
  EXPECT_EQ(ee.kind, ObservableSpec::Kind::Order);
  EXPECT_EQ(ee.flavor_mask, 0b01);

  ObservableSpec conf = anyon_observable("e.I|e.I", 2);
  EXPECT_EQ(conf.kind, ObservableSpec::Kind::Order);
  EXPECT_EQ(conf.flavor_mask, 0b11);

  ObservableSpec mm = anyon_observable("I.I|m.m", 2);
  EXPECT_EQ(mm.kind, ObservableSpec::Kind::Disorder);
  EXPECT_EQ(mm.flavor_mask, 0b01);

  ObservableSpec mconf = anyon_observable("m.I|m.I", 2);
  EXPECT_EQ(mconf.kind, ObservableSpec::Kind::Disorder);
  EXPECT_EQ(mconf.flavor_mask, 0b11);
}

TEST(AnyonDictionary, FourFlavorMapping) {
  ObservableSpec ee = anyon_observable("I.I|e.e", 4);
  EXPECT_EQ(ee.flavor_mask, 0b0101);  // z and z-bar
  ObservableSpec conf = anyon_observable("e.I|e.I", 4);
  EXPECT_EQ(conf.flavor_mask, 0b0011);  // z and t
  ObservableSpec mm = anyon_observable("I.I|m.m", 4);
  EXPECT_EQ(mm.kind, ObservableSpec::Kind::Disorder);
  EXPECT_EQ(mm.flavor_mask, 0b0101);
}

TEST(AnyonDictionary, RejectsFermionsAndMixtures) {
  EXPECT_THROW(anyon_observable("I.I|f.f", 4), std::invalid_argument);
  EXPECT_THROW(anyon_observable("I.I|e.m", 4), std::invalid_argument);
  EXPECT_THROW(anyon_observable("I.I|e.I", 2), std::invalid_argument);  // not reducible
  EXPECT_THROW(anyon_observable("bad", 2), std::invalid_argument);
}

TEST(Serialization, ModelRoundTripFields) {
  StatMechModel m = coupled_model(0.2, 0.3, 6);
  m = insert_disorder_line(m, straight_dual_path(1, 2), 0b0101);
  nlohmann::json j = to_json(m);
  EXPECT_EQ(j["flavors"], 4);
  EXPECT_EQ(j["family"], "coupled");
  EXPECT_EQ(j["eta_edges"].size(), 2u);
  EXPECT_EQ(j["lattice"]["Lx"], 6);
  EXPECT_EQ(j["table"].size(), 256u);
}
