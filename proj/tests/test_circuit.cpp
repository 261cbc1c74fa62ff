#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "pllstab/circuit.hpp"
#include "pllstab/errors.hpp"

using namespace pllstab;

namespace {

// Independent reduction: voltage-divider and Thevenin forms written out directly.
struct Oracle {
  std::complex<double> eq1, eq2;
};

Oracle oracle(const CircuitParams& p, bool faulted) {
  using C = std::complex<double>;
  const C zg{p.r_g, p.x_g}, zc{p.r_c, p.x_c};
  C zl{p.r_l, p.x_l};
  if (faulted) {
    const double rf = p.r_f_ohm * p.s_base / (p.u_base * p.u_base);
    zl = 1.0 / (1.0 / zl + 1.0 / rf);
  }
  return {1.0 / (1.0 + zg / zl), 1.0 / (1.0 / zl + 1.0 / zg) + zc};
}

}  // namespace

TEST(NetworkEquivalents, DefaultsMatchOracle) {
  CircuitParams p;
  const NetworkEquivalents ne = network_equivalents(p, false);
  const Oracle o = oracle(p, false);
  EXPECT_NEAR(ne.z_eq1, std::abs(o.eq1), 1e-12);
  EXPECT_NEAR(ne.theta1, std::arg(o.eq1), 1e-12);
  EXPECT_NEAR(ne.z_eq2, std::abs(o.eq2), 1e-12);
  EXPECT_NEAR(ne.theta2, std::arg(o.eq2), 1e-12);
  EXPECT_NEAR(ne.z_eq1, 0.9768, 1e-4);
  EXPECT_NEAR(ne.theta1, -0.00234, 5e-5);
  EXPECT_NEAR(ne.z_eq2, 0.4772, 1e-4);
  EXPECT_NEAR(ne.theta2, 1.5703, 1e-4);
  EXPECT_FALSE(ne.faulted);
}

TEST(NetworkEquivalents, ZeroGridAndConverterImpedance) {
  CircuitParams p;
  p.r_g = p.x_g = p.r_c = p.x_c = 0.0;
  const NetworkEquivalents ne = network_equivalents(p, false);
  EXPECT_DOUBLE_EQ(ne.z_eq1, 1.0);
  EXPECT_DOUBLE_EQ(ne.theta1, 0.0);
  EXPECT_DOUBLE_EQ(ne.z_eq2, 0.0);
}

TEST(NetworkEquivalents, FaultedOneOhm) {
  CircuitParams p;
  EXPECT_NEAR(p.z_base(), 529.0, 1e-12);
  EXPECT_NEAR(p.r_f_pu(), 0.00189, 1e-5);
  const NetworkEquivalents ne = network_equivalents(p, true);
  const Oracle o = oracle(p, true);
  EXPECT_NEAR(ne.z_eq1, std::abs(o.eq1), 1e-12);
  EXPECT_NEAR(ne.theta1, std::arg(o.eq1), 1e-10);
  EXPECT_NEAR(ne.z_eq2, std::abs(o.eq2), 1e-12);
  EXPECT_LT(ne.z_eq1, 0.02);
  EXPECT_TRUE(ne.faulted);
}

TEST(NetworkEquivalents, FaultWeakensGridPath) {
  CircuitParams p;
  const double base = network_equivalents(p, false).z_eq1;
  for (double rf : {0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
    p.r_f_ohm = rf;
    EXPECT_LT(network_equivalents(p, true).z_eq1, base) << rf;
  }
}

TEST(NetworkEquivalents, HugeFaultResistanceConvergesToUnfaulted) {
  CircuitParams p;
  p.r_f_ohm = 1e9 * p.z_base();
  const NetworkEquivalents f = network_equivalents(p, true);
  const NetworkEquivalents n = network_equivalents(p, false);
  EXPECT_LT(std::abs(f.z_eq1 - n.z_eq1) / n.z_eq1, 1e-6);
  EXPECT_LT(std::abs(f.z_eq2 - n.z_eq2) / n.z_eq2, 1e-6);
  EXPECT_NEAR(f.theta1, n.theta1, 1e-6);
  EXPECT_NEAR(f.theta2, n.theta2, 1e-6);
}

TEST(NetworkEquivalents, SingularNetworkThrows) {
  CircuitParams p;
  p.r_g = 0.0;
  p.x_g = -5.0;
  p.r_l = 0.0;
  p.x_l = 5.0;
  EXPECT_THROW(network_equivalents(p, false), SingularNetworkError);
}

TEST(SwingParams, Defaults) {
  CircuitParams p;
  const SwingParams sp = swing_params(network_equivalents(p, false), p);
  const Oracle o = oracle(p, false);
  EXPECT_NEAR(sp.p_m, p.k_i * std::abs(o.eq2) * p.i_c * std::sin(std::arg(o.eq2)), 1e-9);
  EXPECT_NEAR(sp.p_m, 47.72, 0.01);
  EXPECT_NEAR(sp.p_e, 107.45, 0.01);
  EXPECT_NEAR(sp.d_c, 10.744, 0.001);
}

TEST(SwingParams, ZeroCurrentAndZeroGridVoltage) {
  CircuitParams p;
  p.i_c = 0.0;
  EXPECT_EQ(swing_params(network_equivalents(p, false), p).p_m, 0.0);
  CircuitParams q;
  q.u_g = 0.0;
  const SwingParams sp = swing_params(network_equivalents(q, false), q);
  EXPECT_EQ(sp.p_e, 0.0);
  EXPECT_EQ(sp.d_c, 0.0);
}

TEST(SwingParams, HomogeneousInKi) {
  CircuitParams p;
  const SwingParams a = swing_params(network_equivalents(p, false), p);
  p.k_i *= 2.0;
  const SwingParams b = swing_params(network_equivalents(p, false), p);
  EXPECT_NEAR(b.p_m, 2.0 * a.p_m, 1e-10);
  EXPECT_NEAR(b.p_e, 2.0 * a.p_e, 1e-10);
  EXPECT_NEAR(equilibria(a).delta_sep, equilibria(b).delta_sep, 1e-12);
  EXPECT_NEAR(equilibria(a).delta_uep, equilibria(b).delta_uep, 1e-12);
}

TEST(Equilibria, DefaultsMatchRootFind) {
  CircuitParams p;
  const SwingParams sp = swing_params(network_equivalents(p, false), p);
  const EquilibriumPair eq = equilibria(sp, 0);
  // Bisection oracle on p_m - p_e sin(delta - theta1) over the rising branch.
  auto g = [&](double d) { return sp.p_m - sp.p_e * std::sin(d - sp.theta1); };
  double lo = sp.theta1, hi = sp.theta1 + std::numbers::pi / 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(eq.delta_sep, lo, 1e-12);
  EXPECT_NEAR(eq.delta_sep, 0.4580, 5e-4);
  EXPECT_NEAR(eq.delta_uep, 2.6789, 1e-3);
  EXPECT_LT(std::abs(g(eq.delta_sep)), 1e-10);
  EXPECT_LT(std::abs(g(eq.delta_uep)), 1e-10);
}

TEST(Equilibria, ZeroMechanicalTerm) {
  SwingParams sp{0.0, 10.0, 1.0, 0.3};
  const EquilibriumPair eq = equilibria(sp, 0);
  EXPECT_DOUBLE_EQ(eq.delta_sep, 0.3);
  EXPECT_DOUBLE_EQ(eq.delta_uep, 0.3 + std::numbers::pi);
}

TEST(Equilibria, BranchShift) {
  SwingParams sp{1.0, 10.0, 1.0, 0.0};
  EXPECT_NEAR(equilibria(sp, 2).delta_sep - equilibria(sp, 0).delta_sep,
              4.0 * std::numbers::pi, 1e-12);
}

TEST(Equilibria, NoEquilibriumBeyondUnitRatio) {
  SwingParams sp{101.0, 100.0, 1.0, 0.0};
  EXPECT_THROW(equilibria(sp, 0), NoEquilibriumError);
}

TEST(Scr, ThreeConverterReactances) {
  const double xc[3] = {0.36, 0.24, 0.6};
  const double expect[3] = {2.096, 2.799, 1.394};
  const double paper[3] = {2.1195, 2.8405, 1.4054};
  for (int i = 0; i < 3; ++i) {
    CircuitParams p;
    p.x_c = xc[i];
    const double s = scr(network_equivalents(p, false));
    EXPECT_NEAR(s, 1.0 / std::abs(oracle(p, false).eq2), 1e-12);
    EXPECT_NEAR(s, expect[i], 1e-3);
    EXPECT_LT(std::abs(s - paper[i]) / paper[i], 0.02);
  }
}

TEST(Scr, InfiniteForZeroImpedance) {
  NetworkEquivalents ne;
  EXPECT_TRUE(std::isinf(scr(ne)));
}

TEST(Validate, RejectsBadParameters) {
  CircuitParams p;
  EXPECT_NO_THROW(validate(p, true));
  p.k_i = -1.0;
  EXPECT_THROW(validate(p, false), InvalidParameterError);
  CircuitParams q;
  q.r_f_ohm = 0.0;
  EXPECT_NO_THROW(validate(q, false));
  EXPECT_THROW(validate(q, true), InvalidParameterError);
  CircuitParams r;
  r.r_l = 0.0;
  r.x_l = 0.0;
  EXPECT_THROW(validate(r, false), InvalidParameterError);
}

TEST(WrapAngle, MapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(0.1 + 8.0 * std::numbers::pi), 0.1, 1e-12);
}
