#include "pllstab/lyap_zubov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "pllstab/errors.hpp"

namespace pllstab {

namespace {

Poly2 phi_poly(const ZubovOptions& o, int deg) {
  Poly2 phi(deg);
  phi.coeff(2, 0) = o.phi_delta;
  phi.coeff(0, 2) = o.phi_omega;
  return phi;
}

double exact_vdot(const Poly2& v, const SwingParams& sp, double delta_sep, double d, double w) {
  const auto [gd, gw] = v.grad(d, w);
  const auto [f1, f2] = rhs({d + delta_sep, w}, sp);
  return gd * f1 + gw * f2;
}

}  // namespace

Poly2 zubov_series(const SwingParams& sp, double delta_sep, const ZubovOptions& opts,
                   double* residual) {
  if (opts.m < 2 || opts.m_t < 1) throw InvalidParameterError("Zubov degrees too small");
  if (!(opts.phi_delta > 0.0 && opts.phi_omega > 0.0)) {
    throw InvalidParameterError("phi weights must be positive");
  }
  const auto [f1, f2] = taylor_field(sp, delta_sep, opts.m_t);
  const Matrix2 b{{{f1.coeff(1, 0), f1.coeff(0, 1)}, {f2.coeff(1, 0), f2.coeff(0, 1)}}};
  const double tr = b[0][0] + b[1][1];
  const double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  if (!(tr < 0.0 && det > 0.0)) throw NotHurwitzError("linear part at the SEP is not Hurwitz");

  const Poly2 phi = phi_poly(opts, 2);
  Poly2 v(opts.m);
  for (int m = 2; m <= opts.m; ++m) {
    HomogeneousSlice r{m, std::vector<double>(static_cast<std::size_t>(m + 1), 0.0)};
    if (m == 2) {
      const HomogeneousSlice p2 = phi.homogeneous_slice(2);
      for (int j = 0; j <= 2; ++j) r.c[j] = -p2.c[j];
    } else {
      r = mul_slice(phi, v.homogeneous_part(m - 2), m);
    }
    for (int j = 2; j < m; ++j) {
      const Poly2 vj = v.homogeneous_part(j);
      const int fm = m + 1 - j;
      if (fm > opts.m_t) continue;
      const HomogeneousSlice a = mul_slice(vj.partial(0), f1.homogeneous_part(fm), m);
      const HomogeneousSlice c = mul_slice(vj.partial(1), f2.homogeneous_part(fm), m);
      for (int k = 0; k <= m; ++k) r.c[k] -= a.c[k] + c.c[k];
    }
    v.set_homogeneous_slice(lie_solve_homogeneous(b, m, r));
  }
  if (residual) {
    Poly2 res = lie_derivative(v, f1, f2, opts.m);
    res += phi_poly(opts, opts.m);
    res -= mul(phi, v, opts.m, Overflow::kTruncate);
    double worst = 0.0;
    for (int m = 0; m <= opts.m; ++m) {
      for (int j = 0; j <= m; ++j) worst = std::max(worst, std::abs(res.coeff(m - j, j)));
    }
    *residual = worst;
  }
  return v;
}

double zubov_critical(const Poly2& v, const SwingParams& sp, double delta_sep,
                      const ZubovOptions& opts) {
  const int n = opts.grid;
  const double wd = opts.half_width_delta;
  const double ww = opts.half_width_omega;
  auto xd = [&](int i) { return -wd + 2.0 * wd * i / (n - 1); };
  auto xw = [&](int j) { return -ww + 2.0 * ww * j / (n - 1); };
  std::vector<double> val(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) val[static_cast<std::size_t>(i) * n + j] = v.eval(xd(i), xw(j));
  }
  // Start at the grid node nearest the SEP.
  int i0 = 0, j0 = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(xd(i)) < std::abs(xd(i0))) i0 = i;
    if (std::abs(xw(i)) < std::abs(xw(j0))) j0 = i;
  }
  using Item = std::tuple<double, int, int, int, int>;  // value, i, j, parent i, parent j
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  heap.push({val[static_cast<std::size_t>(i0) * n + j0], i0, j0, i0, j0});
  seen[static_cast<std::size_t>(i0) * n + j0] = 1;
  double level = -std::numeric_limits<double>::infinity();
  while (!heap.empty()) {
    const auto [vv, i, j, pi, pj] = heap.top();
    heap.pop();
    const double d = xd(i), w = xw(j);
    const bool in_ball = std::hypot(d, w) <= opts.exclusion_radius;
    if (!in_ball && exact_vdot(v, sp, delta_sep, d, w) >= 0.0) {
      // Bisect the parent edge for the V-dot sign change.
      double lo = 0.0, hi = 1.0;
      const double pd = xd(pi), pw = xw(pj);
      if (exact_vdot(v, sp, delta_sep, pd, pw) < 0.0) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (exact_vdot(v, sp, delta_sep, pd + mid * (d - pd), pw + mid * (w - pw)) < 0.0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
      }
      const double vc = v.eval(pd + lo * (d - pd), pw + lo * (w - pw));
      return std::max(level, std::min(vc, vv));
    }
    level = std::max(level, vv);
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= n || q[1] >= n) return level;
      const std::size_t idx = static_cast<std::size_t>(q[0]) * n + q[1];
      if (seen[idx]) continue;
      seen[idx] = 1;
      heap.push({val[idx], q[0], q[1], i, j});
    }
  }
  return level;
}

ZubovCertificate build_zubov(const SwingParams& sp, const ZubovOptions& opts) {
  ZubovCertificate c;
  c.sp = sp;
  c.delta_sep = equilibria(sp, 0).delta_sep;
  c.opts = opts;
  c.v = zubov_series(sp, c.delta_sep, opts, &c.residual);
  c.c = zubov_critical(c.v, sp, c.delta_sep, opts);
  return c;
}

bool judge(const ZubovCertificate& c, const ReducedState& x) {
  const double d = x.delta - c.delta_sep;
  const double w = x.omega;
  const int n = std::max(1, c.opts.segment_samples);
  for (int k = n; k >= 1; --k) {
    const double s = static_cast<double>(k) / n;
    if (!(c.v.eval(s * d, s * w) <= c.c)) return false;
  }
  return true;
}

void write_certificate_csv(std::ostream& os, const ZubovCertificate& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# zubov m=%d m_t=%d phi=(%.17g,%.17g) delta_sep=%.17g c=%.17g\n",
                c.opts.m, c.opts.m_t, c.opts.phi_delta, c.opts.phi_omega, c.delta_sep, c.c);
  os << buf;
  write_coefficients_csv(os, c.v);
}

CctResult zubov_cct(const Scenario& tmpl, double rf_ohm, const ZubovOptions& zo,
                    JudgeInstant instant, const CctOptions& opts) {
  Scenario sc = tmpl;
  sc.params.r_f_ohm = rf_ohm;
  const SwingParams sp = swing_params(network_equivalents(sc.params, false), sc.params);
  const ZubovCertificate cert = build_zubov(sp, zo);
  return estimate_cct(sc, [&](const ReducedState& x) { return judge(cert, x); }, instant, opts);
}

}  // namespace pllstab
