#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

#include "support.hpp"

using namespace roomreg;
using std::numbers::pi;

namespace {

FemSpaces spaces_at(int n) { return build_spaces(build_mesh(reference_room(), n)); }

ForcingFields heat_only(double scale) {
  ForcingFields f;
  f.fx = f.fy = [](const Eigen::Vector2d&) { return 0.0; };
  f.fT = [scale](const Eigen::Vector2d& p) { return scale * 5 * std::sin(2 * pi * p.x()) * std::cos(2 * pi * p.y()); };
  return f;
}

// [v; th] solving the problem linearized at rest: A_v v - B0 th + D^T q = f_w,
// A_t th = f_T, D v = 0.
Vec linear_solve(const FemSpaces& s, const LinearForms& f, const ForcingLoads& loads) {
  const int nv = s.n_v, nt = s.n_t, np = s.n_p, n = nv + nt + np;
  std::vector<Triplet> t;
  auto add = [&](const SpMat& m, int r0, int c0, double a) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), a * it.value());
  };
  add(f.A_v, 0, 0, 1.0);
  add(f.B0, 0, nv, -1.0);
  add(f.A_t, nv, nv, 1.0);
  add(SpMat(f.D.transpose()), 0, nv + nt, 1.0);
  add(f.D, nv + nt, 0, 1.0);
  SpMat K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  Vec rhs = Vec::Zero(n);
  rhs.head(nv) = loads.f_w;
  rhs.segment(nv, nt) = loads.f_T;
  Eigen::SparseLU<SpMat> lu(K);
  return lu.solve(rhs).head(nv + nt);
}

}  // namespace

TEST(SteadyState, ZeroStateZeroForcingHasZeroResidual) {
  const FemSpaces s = spaces_at(8);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  const ForcingLoads loads{Vec::Zero(s.n_v), Vec::Zero(s.n_t)};
  EXPECT_EQ(nonlinear_residual(s, f, SteadyState::zero(s), loads).norm(), 0.0);
}

TEST(SteadyState, HeatLoadAppearsInEnergyResidual) {
  const FemSpaces s = spaces_at(8);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  const ForcingLoads loads = assemble_forcing(s, heat_only(1.0));
  const Vec r = nonlinear_residual(s, f, SteadyState::zero(s), loads);
  EXPECT_EQ(r.head(s.n_v).norm(), 0.0);
  EXPECT_LT((r.segment(s.n_v, s.n_t) - loads.f_T).norm(), 1e-15);
  EXPECT_EQ(r.tail(s.n_p).norm(), 0.0);
}

TEST(SteadyState, ZeroForcingGivesZeroState) {
  const FemSpaces s = spaces_at(8);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  const ForcingLoads loads{Vec::Zero(s.n_v), Vec::Zero(s.n_t)};
  const SteadyState st = newton_solve(s, f, loads, SteadyState::zero(s));
  EXPECT_LE(st.iterations(), 1);
  EXPECT_EQ(st.w.norm() + st.T.norm() + st.q.norm(), 0.0);
}

TEST(SteadyState, BadToleranceRejected) {
  const FemSpaces s = spaces_at(8);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  NewtonOptions o;
  o.tol = 0.0;
  EXPECT_THROW(newton_solve(s, f, {Vec::Zero(s.n_v), Vec::Zero(s.n_t)}, SteadyState::zero(s), o),
               std::invalid_argument);
}

TEST(SteadyState, DivergenceReportsHistory) {
  const FemSpaces s = spaces_at(16);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  NewtonOptions o;
  o.max_iter = 2;
  const RoomScenario sc = test::room();
  try {
    newton_solve(s, f, assemble_forcing(s, sc.forcing_fields()), SteadyState::zero(s), o);
    FAIL() << "expected NewtonDivergence";
  } catch (const NewtonDivergence& e) {
    EXPECT_EQ(e.history().size(), 3u);
  }
}

TEST(SteadyState, SmallForcingMatchesLinearResponse) {
  const FemSpaces s = spaces_at(8);
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  const Vec unit = linear_solve(s, f, assemble_forcing(s, heat_only(1.0)));
  double prev = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const SteadyState st = newton_solve(s, f, assemble_forcing(s, heat_only(eps)), SteadyState::zero(s));
    Vec x(s.n_v + s.n_t);
    x << st.w, st.T;
    const double norm_ratio = x.norm() / (eps * unit.norm());
    EXPECT_NEAR(norm_ratio, 1.0, 50 * eps);
    const double dev = (x - eps * unit).norm() / eps;
    if (prev > 0.0) EXPECT_LT(dev, 0.2 * prev);  // O(eps) relative deviation
    prev = dev;
  }
}

class ReferenceSteadyState : public ::testing::Test {
 protected:
  static const PlantModel& model() { return test::reference_pipeline().model(16); }
};

TEST_F(ReferenceSteadyState, ConvergedAndConsistent) {
  const PlantModel& m = model();
  const SteadyState& st = m.steady.final;
  EXPECT_GT(st.w.norm(), 0.0);
  EXPECT_GT(st.T.norm(), 0.0);
  EXPECT_LT(st.residual_norm, 1e-10);
  const ForcingLoads loads = assemble_forcing(m.spaces, test::room().forcing_fields());
  EXPECT_LT(nonlinear_residual(m.spaces, m.forms, st, loads).norm(), 1e-10);
  EXPECT_LE((m.forms.D * st.w).norm(), 1e-10);
  EXPECT_LE(m.steady.total_iterations(), 25);
}

TEST_F(ReferenceSteadyState, QuadraticLocalConvergence) {
  for (const SteadyState* st : {&model().steady.initial, &model().steady.final}) {
    const auto& h = st->history;
    int checked = 0;
    for (size_t k = 0; k + 1 < h.size(); ++k) {
      if (h[k] >= 1e-3 || h[k + 1] < 1e-13) continue;  // outside the basin or at round-off
      EXPECT_LE(h[k + 1], 100.0 * h[k] * h[k]) << "step " << k;
      ++checked;
    }
    EXPECT_GE(checked, 1);
  }
}
