#include <cmath>

#include "decotopo/doubled.hpp"
#include "decotopo/pauli.hpp"
#include "decotopo/toric_dense.hpp"
#include "decotopo/verify.hpp"
#include "gtest/gtest.h"

using namespace decotopo;

constexpr double kQuarterPi = 0.7853981633974483;

TEST(BuildEdgeChannel, IdentityAtZeroErrorRate) {
  const DoubledOperator e = build_edge_channel(0.0, kQuarterPi, 2);
  EXPECT_LT((e.mat - CMat::Identity(16, 16)).norm(), 1e-14);
  EXPECT_THROW(build_edge_channel(0.2, kQuarterPi, 5), std::invalid_argument);
}

TEST(BuildEdgeChannel, HalfErrorRateIsEvenSectorProjector) {
  // at p = 1/2 the factor is (I + sigma (x) sigma-bar)/2, a projector
  const DoubledOperator e = build_edge_channel(0.5, kQuarterPi, 1);
  EXPECT_LT((e.mat * e.mat - e.mat).norm(), 1e-13);
  const CMat s = kron(pauli_mats::sigma(kQuarterPi), pauli_mats::sigma(kQuarterPi).conjugate());
  EXPECT_LT((e.mat * s - e.mat).norm(), 1e-13);
}

TEST(BuildEdgeChannel, TwoEdgeSpectrumIsProductOfSingleEdgeSpectra) {
  const double p = 0.3;
  const DoubledOperator e1 = build_edge_channel(p, kQuarterPi, 1);
  const DoubledOperator e2 = build_edge_channel(p, kQuarterPi, 2);
  Eigen::VectorXcd ev1 = Eigen::ComplexEigenSolver<CMat>(e1.mat).eigenvalues();
  Eigen::VectorXcd ev2 = Eigen::ComplexEigenSolver<CMat>(e2.mat).eigenvalues();
  std::vector<double> prod, got;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) prod.push_back(std::real(ev1[i] * ev1[j]));
  for (int i = 0; i < 16; ++i) got.push_back(std::real(ev2[i]));
  std::sort(prod.begin(), prod.end());
  std::sort(got.begin(), got.end());
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(prod[i], got[i], 1e-12);
}

TEST(ComposeCheck, ChannelComposesAtPPrime) {
  EXPECT_LT(compose_check(0.0, kQuarterPi), 1e-13);
  EXPECT_LT(compose_check(0.5, kQuarterPi), 1e-13);
  EXPECT_LT(compose_check(0.25, kQuarterPi), 1e-13);
  for (int i = 0; i <= 20; ++i) EXPECT_LT(compose_check(0.5 * i / 20.0, 0.3), 1e-12);
}

TEST(PartialTranspose, SelfdualChannelInvariantYChannelNot) {
  EXPECT_LT(partial_transpose_check({1, CMat::Identity(4, 4)}), 1e-15);
  for (double p : {0.1, 0.3, 0.5}) {
    const DoubledOperator e = build_edge_channel(p, kQuarterPi, 1);
    const DoubledOperator ee{1, (e.mat.adjoint() * e.mat).eval()};
    EXPECT_LT(partial_transpose_check(ee), 1e-12);
  }
  const DoubledOperator y = build_y_channel(0.25, 1);
  const DoubledOperator yy{1, (y.mat.adjoint() * y.mat).eval()};
  EXPECT_GT(partial_transpose_check(yy), 1e-3);
}

TEST(PauliString, MultiplicationPhases) {
  // single edge: strings are i^phase X^x Z^z; Z X picks up a sign
  PauliString X = PauliString::x_string(1, {0});
  PauliString Z = PauliString::z_string(1, {0});
  PauliString XZ = X * Z;
  EXPECT_EQ(XZ.phase(), 0);
  PauliString ZX = Z * X;
  EXPECT_EQ(ZX.phase(), 2);
  EXPECT_TRUE(XZ.same_support(ZX));
  EXPECT_FALSE(XZ == ZX);
  PauliString sq = XZ * XZ;
  EXPECT_TRUE(sq.same_support(PauliString::identity(1)));
  EXPECT_FALSE(X.commutes_with(Z));
  EXPECT_TRUE((X * X).commutes_with(Z));
}

TEST(EmdConjugate, ChargeStringMapsToFluxString) {
  TorusLattice lat(4, 4);
  for (int len : {1, 2, 3}) {
    const auto path = horizontal_path(lat, 1, 2, len);
    const PauliString we = charge_string(lat, path);
    const PauliString expect = flux_string(lat, diag_translate_path(lat, path));
    EXPECT_TRUE(emd_conjugate(we, lat) == expect) << "len = " << len;
  }
  EXPECT_TRUE(emd_conjugate(PauliString::identity(lat.n_edges()), lat) ==
              PauliString::identity(lat.n_edges()));
}

TEST(EmdConjugate, InvolutionUpToDiagonalTranslation) {
  TorusLattice lat(4, 4);
  const auto path = horizontal_path(lat, 0, 0, 2);
  const PauliString we = charge_string(lat, path);
  EXPECT_TRUE(emd_conjugate(emd_conjugate(we, lat), lat) == we.translated(lat, 1, 1));
  const PauliString wm = flux_string(lat, diag_translate_path(lat, path));
  EXPECT_TRUE(emd_conjugate(wm, lat) == we.translated(lat, 1, 1));
}

TEST(EmdConjugate, FermionStringRotatesRatherThanTranslates) {
  TorusLattice lat(4, 4);
  const auto path = horizontal_path(lat, 0, 1, 2);
  const PauliString wf = fermion_string(lat, path);
  const PauliString conj = emd_conjugate(wf, lat);
  // U_D w_f U_D^dag = w_e(l + 2 delta) w_m(l~) with l~ the translate of l
  const auto l_plus_2d = diag_translate_path(lat, diag_translate_path(lat, path));
  const PauliString expect =
      charge_string(lat, l_plus_2d) * flux_string(lat, diag_translate_path(lat, path));
  EXPECT_TRUE(conj.same_support(expect));
  // ... and differs from the translated fermion string
  const PauliString translated_fermion = wf.translated(lat, 1, 1);
  EXPECT_FALSE(conj.same_support(translated_fermion));
}

TEST(KrausCovariance, SigmaProductPermutesKrausSet) {
  EXPECT_TRUE(kraus_set_covariant_under_sigma(0.3, kQuarterPi, 2));
  // a theta != pi/4 channel is not sigma-covariant
  EXPECT_FALSE(kraus_set_covariant_under_sigma(0.3, 0.2, 1));
}

TEST(ConvexDecomposition, ZeroErrorRateIsUniform) {
  TorusLattice lat(2, 2);
  const ConvexDecomposition cd = convex_decomposition(0.0, lat);
  EXPECT_NEAR(cd.sum_p, 1.0, 1e-12);
  for (double q : cd.probabilities) EXPECT_NEAR(q, 1.0 / 256.0, 1e-14);
}

TEST(ConvexDecomposition, GenericRateNormalizationAndFormula) {
  TorusLattice lat(2, 2);
  const ConvexDecomposition cd = convex_decomposition(0.3, lat);
  EXPECT_NEAR(cd.sum_p, 1.0, 1e-12);
  EXPECT_LT(cd.max_formula_error, 1e-12);
}

TEST(ConvexDecomposition, MaximalErrorRate) {
  TorusLattice lat(2, 2);
  const ConvexDecomposition cd = convex_decomposition(0.5, lat);
  EXPECT_NEAR(cd.sum_p, 1.0, 1e-12);
  EXPECT_NEAR(cd.tr_rho2, cd.sum_p2, 1e-10);
  EXPECT_LT(cd.max_offdiag_overlap, 1e-10);
  EXPECT_LT(cd.max_formula_error, 1e-12);
}

TEST(ChamonMoment, DensityMatrixMatchesClassicalModel) {
  TorusLattice lat(2, 2);
  for (auto [h, p] : {std::pair{0.2, 0.1}, {0.4, 0.3}, {0.0, 0.25}}) {
    const ChamonMoment m = chamon_second_moment(h, p, lat);
    EXPECT_NEAR(m.tr_rho2_dense, m.tr_rho2_classical, 1e-8 * m.tr_rho2_dense) << h << " " << p;
  }
}

TEST(VerifyChannel, FullBatteryPasses) {
  const auto checks = run_channel_checks();
  for (const CheckResult& c : checks)
    EXPECT_TRUE(c.pass) << c.check_name << " residual " << c.residual;
  const nlohmann::json j = checks_to_json(checks);
  EXPECT_GE(j.size(), 8u);
  EXPECT_TRUE(j[0].contains("check_name"));
}
