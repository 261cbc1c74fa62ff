#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pllstab/errors.hpp"
#include "pllstab/lyap_atrm.hpp"

using namespace pllstab;

namespace {

SwingParams post_sp() {
  CircuitParams p;
  return swing_params(network_equivalents(p, false), p);
}

const AtrmCertificate& default_cert() {
  static const AtrmCertificate c = build_atrm(post_sp());
  return c;
}

Poly2 seed(const AtrmOptions& o) {
  Poly2 p(2);
  p.coeff(2, 0) = o.seed_delta;
  p.coeff(0, 2) = o.seed_omega;
  return p;
}

double shoelace(const std::vector<ReducedState>& b) {
  double a = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const ReducedState& p = b[i];
    const ReducedState& q = b[(i + 1) % b.size()];
    a += p.delta * q.omega - q.delta * p.omega;
  }
  return 0.5 * std::abs(a);
}

}  // namespace

TEST(AtrmSeed, EllipseThroughSqrtK0) {
  const AtrmOptions o;
  const Poly2 p = seed(o);
  EXPECT_NEAR(p.eval(std::sqrt(0.8), 0.0), o.k0, 1e-15);
  EXPECT_EQ(p.eval(0.0, 0.0), 0.0);
  EXPECT_GT(p.coeff(2, 0), 0.0);
  EXPECT_GT(p.coeff(0, 2), 0.0);
  EXPECT_EQ(p.coeff(1, 1), 0.0);
}

TEST(AtrmEvolve, SeedLiesInsideTheDomain) {
  const SwingParams sp = post_sp();
  const double sep = equilibria(sp).delta_sep;
  const AtrmOptions o;
  const Poly2 p = seed(o);
  double min_vdot = 1e300;
  for (const ReducedState& b : atrm_boundary(p, o.k0, o)) {
    const auto [gd, gw] = p.grad(b.delta, b.omega);
    const auto [f1, f2] = rhs({b.delta + sep, b.omega}, sp);
    min_vdot = std::min(min_vdot, gd * f1 + gw * f2);
  }
  EXPECT_LT(min_vdot, 0.0);
}

TEST(AtrmEvolve, RegionGrowsBeforeTangency) {
  const AtrmCertificate& c = default_cert();
  const AtrmOptions& o = c.opts;
  const double a0 = shoelace(atrm_boundary(seed(o), o.k0, o));
  const double a1 = shoelace(atrm_boundary(c.stages[0].restart, o.k0, o));
  EXPECT_GT(a1, a0);
  EXPECT_GT(c.stages[0].t_s, o.eps0);
}

TEST(AtrmEvolve, StepHalvingStable) {
  const SwingParams sp = post_sp();
  const double sep = equilibria(sp).delta_sep;
  AtrmOptions o;
  o.dt_p = 2e-4;
  const AtrmStage a = atrm_evolve(seed(o), 2, sp, sep, o);
  o.dt_p = 1e-4;
  const AtrmStage b = atrm_evolve(seed(o), 2, sp, sep, o);
  EXPECT_LT(std::abs(a.t_s - b.t_s) / b.t_s, 0.01);
  AtrmCertificate ca, cb;
  ca.p = a.last_safe;
  cb.p = b.last_safe;
  ca.delta_sep = cb.delta_sep = sep;
  ca.k0 = cb.k0 = o.k0;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> ud(-2.5, 2.5), uw(-25.0, 25.0);
  int diff = 0;
  for (int i = 0; i < 100; ++i) {
    const ReducedState x{sep + ud(rng), uw(rng)};
    diff += judge(ca, x) != judge(cb, x);
  }
  EXPECT_EQ(diff, 0);
}

TEST(AtrmEvolve, BudgetExceededWithoutTangency) {
  const SwingParams sp = post_sp();
  AtrmOptions o;
  o.stage_budget = 0.01;
  EXPECT_THROW(atrm_evolve(seed(o), 2, sp, equilibria(sp).delta_sep, o), BudgetExceededError);
}

TEST(AtrmEvolve, DivergenceDetected) {
  const SwingParams sp = post_sp();
  AtrmOptions o;
  o.r_max = 1.0;  // seed ellipse exceeds the search radius almost at once
  o.tau = 0.99;
  EXPECT_THROW(atrm_evolve(seed(o), 2, sp, equilibria(sp).delta_sep, o), EvolutionDivergedError);
}

TEST(AtrmExpand, PaddedCoefficientsAreZero) {
  const Poly2 p = default_cert().stages[0].restart.resized(6);
  for (int m = 3; m <= 6; ++m) {
    for (int j = 0; j <= m; ++j) EXPECT_EQ(p.coeff(m - j, j), 0.0);
  }
}

TEST(AtrmExpand, StageTwoContainsStageOne) {
  const AtrmCertificate& c = default_cert();
  const auto b1 = atrm_boundary(c.stages[0].restart, c.k0, c.opts);
  int inside = 0;
  for (const ReducedState& b : b1) inside += c.p.eval(b.delta, b.omega) <= c.k0 + 1e-12;
  EXPECT_GE(inside, static_cast<int>(0.99 * b1.size()));
}

TEST(AtrmExpand, DegreeSixScheduleCompletes) {
  AtrmOptions o;
  o.schedule = {2, 6};
  AtrmCertificate c;
  EXPECT_NO_THROW(c = build_atrm(post_sp(), o));
  EXPECT_EQ(c.p.max_degree(), 6);
  EXPECT_EQ(c.stages.size(), 2u);
}

TEST(AtrmJudge, SepStable) {
  const AtrmCertificate& c = default_cert();
  EXPECT_TRUE(judge(c, {c.delta_sep, 0.0}));
}

TEST(AtrmJudge, CertifiedPointsAreOracleStable) {
  const AtrmCertificate& c = default_cert();
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> ud(-3.0, 3.0), uw(-30.0, 30.0);
  int n = 0, bad = 0;
  while (n < 500) {
    const ReducedState x{c.delta_sep + ud(rng), uw(rng)};
    if (!judge(c, x)) continue;
    ++n;
    bad += !point_stability_oracle(x, c.sp).stable();
  }
  EXPECT_EQ(bad, 0);
}

TEST(AtrmJudge, BoundaryInsideExactDomain) {
  const AtrmCertificate& c = default_cert();
  int bad = 0;
  for (const ReducedState& b : atrm_boundary(c.p, c.k0, c.opts)) {
    bad += !point_stability_oracle({b.delta + c.delta_sep, b.omega}, c.sp).stable();
  }
  EXPECT_EQ(bad, 0);
}

TEST(AtrmCct, ReferenceValues) {
  Scenario sc;
  EXPECT_LT(std::abs(atrm_cct(sc, 1.0).value - 0.2044) / 0.2044, 0.08);
  EXPECT_LT(std::abs(atrm_cct(sc, 3.0).value - 0.2132) / 0.2132, 0.08);
  EXPECT_LT(std::abs(atrm_cct(sc, 0.1).value - 0.2007) / 0.2007, 0.08);
}

TEST(AtrmCct, NeverExceedsRealCct) {
  Scenario sc;
  for (double rf : {3.0, 1.0, 0.5, 0.1}) EXPECT_LE(atrm_cct(sc, rf).value, real_cct(sc, rf).value) << rf;
}

TEST(AtrmCsv, CertificateAndBoundary) {
  std::ostringstream a, b;
  write_certificate_csv(a, default_cert());
  write_boundary_csv(b, default_cert());
  EXPECT_EQ(a.str().rfind("# atrm degree=4", 0), 0u);
  const std::string bs = b.str();
  EXPECT_EQ(bs.rfind("delta,omega\n", 0), 0u);
  EXPECT_EQ(std::count(bs.begin(), bs.end(), '\n'), 257);
}
