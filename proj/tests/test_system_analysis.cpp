#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <Eigen/SVD>

#include "roomreg/dense_linalg.hpp"
#include "roomreg/eigen_analysis.hpp"
#include "roomreg/system_analysis.hpp"
#include "support.hpp"

using namespace roomreg;

namespace {

SpMat sparse(const Mat& m) { return m.sparseView(); }

const AssumptionItem* find(const AssumptionReport& r, const std::string& id) {
  for (const auto& it : r.items)
    if (it.id == id) return &it;
  return nullptr;
}

bool any_failed(const AssumptionReport& r, const std::string& prefix) {
  return std::any_of(r.items.begin(), r.items.end(),
                     [&](const AssumptionItem& it) { return it.id.rfind(prefix, 0) == 0 && !it.pass; });
}

// Brute-force PBH: rank [lambda I - A; C] = n, judged by the smallest
// singular value of the stacked matrix.
bool pbh_full_rank(const Mat& A, const Mat& C, cplx lambda, double rel) {
  const int n = static_cast<int>(A.rows());
  CMat S(n + C.rows(), n);
  S << lambda * CMat::Identity(n, n) - A.cast<cplx>(), C.cast<cplx>();
  const Eigen::JacobiSVD<CMat> svd(S);
  const double smin = svd.singularValues()[n - 1];
  return smin > rel * std::max(1.0, svd.singularValues()[0]);
}

struct RandomSystem {
  Mat A, C;
  std::vector<cplx> unstable;
  bool detectable = true;
};

// Block-diagonal spectrum with random unstable complex pairs, conjugated by
// a random similarity; every other trial makes one unstable mode invisible.
RandomSystem random_system(std::mt19937_64& rng, int trial) {
  std::uniform_int_distribution<int> dim(3, 8);
  std::uniform_real_distribution<double> re(0.05, 2.0), im(0.1, 3.0), st(-3.0, -0.1);
  const int n = dim(rng);
  Mat J = Mat::Zero(n, n);
  RandomSystem s;
  int i = 0;
  const int pairs = 1 + trial % 2;
  for (int k = 0; k < pairs && i + 1 < n; ++k, i += 2) {
    const double a = re(rng), b = im(rng);
    J(i, i) = J(i + 1, i + 1) = a;
    J(i, i + 1) = b;
    J(i + 1, i) = -b;
    s.unstable.emplace_back(a, b);
    s.unstable.emplace_back(a, -b);
  }
  for (; i < n; ++i) J(i, i) = st(rng);
  Mat T = test::random_matrix(rng, n, n) + 2.0 * Mat::Identity(n, n);
  const Mat Ti = T.inverse();
  s.A = T * J * Ti;
  std::uniform_int_distribution<int> outs(1, 3);
  Mat Cj = test::random_matrix(rng, outs(rng), n);
  if (trial % 2 == 1) {
    // Hide the first unstable pair: zero the columns acting on it.
    Cj.col(0).setZero();
    Cj.col(1).setZero();
    s.detectable = false;
  }
  s.C = Cj * Ti;
  return s;
}

}  // namespace

TEST(UnstableSpectrum, StableDiagonalIsEmpty) {
  Mat A(2, 2);
  A << -1, 0, 0, -2;
  EXPECT_TRUE(unstable_spectrum(A, Mat::Identity(2, 2), 0.0).pairs.empty());
  EigenOptions o;
  o.dense_threshold = 0;
  o.krylov_dim = 1;
  EXPECT_TRUE(unstable_spectrum(sparse(A), sparse(Mat::Identity(2, 2)), 0.0, o).pairs.empty());
}

TEST(UnstableSpectrum, RotationBlockClosedForm) {
  Mat A(2, 2);
  A << 0.0621, 0.4908, -0.4908, 0.0621;
  const SpectralReport r = unstable_spectrum(A, Mat::Identity(2, 2), 0.0);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_NEAR(r.pairs[0].value.real(), 0.0621, 1e-14);
  EXPECT_NEAR(std::abs(r.pairs[0].value.imag()), 0.4908, 1e-14);
  EXPECT_NEAR(r.pairs[1].value.real(), 0.0621, 1e-14);
  EXPECT_NEAR(r.pairs[0].value.imag(), -r.pairs[1].value.imag(), 1e-14);
  for (const auto& p : r.pairs) EXPECT_LE(p.residual, EigenOptions{}.residual_tol);
}

TEST(UnstableSpectrum, NegativeMarginRejected) {
  EXPECT_THROW(unstable_spectrum(Mat::Identity(2, 2), Mat::Identity(2, 2), -1.0), std::invalid_argument);
}

TEST(UnstableSpectrum, ArnoldiMatchesDenseQz) {
  // Coarse plant at rest; keep the eigenvalues closest to the axis.
  const test::CoarseModel m = test::coarse_model(8);
  const PenaltyPlant pp = eliminate_pressure_penalty(m.plant, 1e-5);
  const CVec all = generalized_eigenvalues(Mat(pp.sys.A), Mat(pp.sys.E));
  std::vector<double> re;
  for (const cplx l : all) re.push_back(l.real());
  std::sort(re.rbegin(), re.rend());
  const double margin = -0.5 * (re[5] + re[6]);
  ASSERT_GT(margin, 0.0);
  size_t expected = 0;
  for (const cplx l : all) expected += l.real() > -margin;
  EigenOptions o;
  o.dense_threshold = 0;
  const SpectralReport r = unstable_spectrum(pp.sys.A, pp.sys.E, margin, o);
  EXPECT_EQ(r.method, "shift-invert Arnoldi");
  ASSERT_EQ(r.pairs.size(), expected);
  for (const auto& p : r.pairs) {
    double best = 1e300;
    for (const cplx l : all) best = std::min(best, std::abs(l - p.value));
    EXPECT_LT(best, 1e-8 * (1 + std::abs(p.value)));
  }
}

TEST(Hautus, DetectableUnstableMode) {
  Mat A(2, 2);
  A << 1, 0, 0, -1;
  Mat C(1, 2);
  C << 1, 0;
  const auto v = hautus_check(A, Mat(), C, HautusSide::Detectability, {cplx(1, 0)});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].pass);
  EXPECT_NEAR(v[0].sigma_min, 1.0, 1e-14);
}

TEST(Hautus, HiddenUnstableMode) {
  Mat A(2, 2);
  A << 1, 0, 0, -1;
  Mat C(1, 2);
  C << 0, 1;
  const auto v = hautus_check(A, Mat(), C, HautusSide::Detectability, {cplx(1, 0)});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].pass);
  EXPECT_NEAR(v[0].sigma_min, 0.0, 1e-15);
}

TEST(Hautus, StabilizabilityUsesLeftEigenvectors) {
  Mat A(2, 2);
  A << 1, 1, 0, -1;
  Mat B(2, 1);
  B << 0, 1;  // reaches the unstable mode only through the coupling
  EXPECT_TRUE(hautus_check(A, Mat(), B, HautusSide::Stabilizability, {cplx(1, 0)})[0].pass);
  B << 1, 0;
  A << 1, 0, 1, -1;
  EXPECT_TRUE(hautus_check(A, Mat(), B, HautusSide::Stabilizability, {cplx(1, 0)})[0].pass);
  B << 0, 1;
  EXPECT_FALSE(hautus_check(A, Mat(), B, HautusSide::Stabilizability, {cplx(1, 0)})[0].pass);
}

TEST(Assumptions, ScalarToyPasses) {
  // P_b(s) = 1/(s-1), P_a = P_s = 1/(s+1).
  SparseSystem b;
  b.E = sparse(Mat::Identity(1, 1));
  b.A = sparse(Mat::Identity(1, 1));
  b.B = b.C = Mat::Identity(1, 1);
  b.Bd = Mat::Zero(1, 0);
  b.Dd = Mat::Zero(1, 0);
  const AssumptionReport r = cascade_assumption_check(b, ActuatorSensor::identity_lag(1, 1), {0.0, 0.5, 1.0, 2.0});
  EXPECT_TRUE(r.all_pass());
  ASSERT_EQ(r.plant_spectrum.pairs.size(), 1u);
  EXPECT_NEAR(r.plant_spectrum.pairs[0].value.real(), 1.0, 1e-12);
  for (double w : {0.0, 0.5, 1.0, 2.0}) {
    std::ostringstream id;
    id << "zero(w=" << w << ")";
    const AssumptionItem* it = find(r, id.str());
    ASSERT_NE(it, nullptr) << id.str();
    // |P(iw)| = 1 / (|iw - 1| |iw + 1|^2) = 1 / (1 + w^2)^{3/2}
    EXPECT_NEAR(it->sigma_min, 1.0 / std::pow(1 + w * w, 1.5), 1e-12);
  }
}

TEST(Assumptions, BlindUnstableSensorFailsDetectability) {
  SparseSystem b;
  b.E = sparse(Mat::Identity(1, 1));
  b.A = sparse(-Mat::Identity(1, 1));
  b.B = b.C = Mat::Identity(1, 1);
  b.Bd = Mat::Zero(1, 0);
  b.Dd = Mat::Zero(1, 0);
  ActuatorSensor as = ActuatorSensor::identity_lag(1, 1);
  as.A_s = Mat::Identity(1, 1);
  as.C_s = Mat::Zero(1, 1);
  EXPECT_TRUE(any_failed(cascade_assumption_check(b, as, {0.0}), "det(ii)"));
  // A stable sensor with C_s = 0 is detectable but blinds the transmission.
  as.A_s = -Mat::Identity(1, 1);
  const AssumptionReport r = cascade_assumption_check(b, as, {0.0});
  EXPECT_FALSE(any_failed(r, "det(ii)"));
  EXPECT_TRUE(any_failed(r, "zero("));
}

TEST(Assumptions, FrequencyOnPlantSpectrumReported) {
  SparseSystem b;
  b.E = sparse(Mat::Identity(1, 1));
  b.A = sparse(Mat::Zero(1, 1));
  b.B = b.C = Mat::Identity(1, 1);
  b.Bd = Mat::Zero(1, 0);
  b.Dd = Mat::Zero(1, 0);
  const AssumptionReport r = cascade_assumption_check(b, ActuatorSensor::identity_lag(1, 1), {0.0});
  EXPECT_FALSE(r.all_pass());
}

TEST(HautusProperty, AgreesWithPbhRankTest) {
  std::mt19937_64 rng(2024);
  int disagreements = 0, undetectable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomSystem s = random_system(rng, trial);
    const auto verdicts = hautus_check(s.A, Mat(), s.C, HautusSide::Detectability, s.unstable, 1e-8);
    bool all = true;
    for (size_t k = 0; k < verdicts.size(); ++k) {
      const bool pbh = pbh_full_rank(s.A, s.C, s.unstable[k], 1e-8);
      disagreements += pbh != verdicts[k].pass;
      all = all && verdicts[k].pass;
    }
    EXPECT_EQ(all, s.detectable) << "trial " << trial;
    undetectable += !s.detectable;
  }
  EXPECT_EQ(disagreements, 0);
  EXPECT_EQ(undetectable, 50);
}

TEST(HautusProperty, InvariantUnderSimilarity) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const RandomSystem s = random_system(rng, trial);
    const int n = static_cast<int>(s.A.rows());
    const Mat T = test::random_matrix(rng, n, n) + 3.0 * Mat::Identity(n, n);
    const Mat At = T.inverse() * s.A * T, Ct = s.C * T;
    const auto a = hautus_check(s.A, Mat(), s.C, HautusSide::Detectability, s.unstable);
    const auto b = hautus_check(At, Mat(), Ct, HautusSide::Detectability, s.unstable);
    for (size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].pass, b[k].pass);
    // Duality: (A, C) detectable iff (A^T, C^T) stabilizable.
    const auto c = hautus_check(Mat(s.A.transpose()), Mat(), Mat(s.C.transpose()), HautusSide::Stabilizability,
                                s.unstable);
    for (size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].pass, c[k].pass);
  }
}

class ReferencePlant : public ::testing::Test {
 protected:
  static const AnalysisResult& analysis() {
    static const AnalysisResult r = test::reference_pipeline().analyze();
    return r;
  }
};

TEST_F(ReferencePlant, OneUnstablePair) {
  const SpectralReport& s = analysis().assumptions.plant_spectrum;
  ASSERT_EQ(s.pairs.size(), 2u);
  for (const auto& p : s.pairs) {
    EXPECT_GT(p.value.real(), 0.0);
    EXPECT_LT(p.value.real(), 0.2);
    EXPECT_GT(std::abs(p.value.imag()), 0.3);
    EXPECT_LT(std::abs(p.value.imag()), 0.7);
    EXPECT_LT(p.residual, 1e-8);
  }
  // The cascade adds only stable actuator and sensor modes.
  EXPECT_EQ(analysis().spectrum.pairs.size(), 2u);
  EXPECT_EQ(analysis().spectrum.count(StateBlock::Plant), 2);
}

TEST_F(ReferencePlant, CascadeHautusChecksPass) {
  ASSERT_EQ(analysis().detectability.size(), 2u);
  ASSERT_EQ(analysis().stabilizability.size(), 2u);
  for (const auto& v : analysis().detectability) EXPECT_TRUE(v.pass);
  for (const auto& v : analysis().stabilizability) EXPECT_TRUE(v.pass);
}

TEST_F(ReferencePlant, AssumptionsHoldIncludingTransmissionZeros) {
  const AssumptionReport& r = analysis().assumptions;
  EXPECT_TRUE(r.all_pass());
  for (double w : {0.0, 0.5, 1.0, 2.0}) {
    std::ostringstream id;
    id << "zero(w=" << w << ")";
    const AssumptionItem* it = find(r, id.str());
    ASSERT_NE(it, nullptr);
    EXPECT_GT(it->sigma_min, it->threshold);
  }
}
