#include "pllstab/poly2.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include "pllstab/errors.hpp"

namespace pllstab {

Poly2::Poly2(int max_degree)
    : max_degree_(max_degree), c_(size_for(max_degree), 0.0) {
  if (max_degree < 0) throw InvalidParameterError("negative polynomial degree");
}

double Poly2::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > max_degree_) return 0.0;
  return c_[index(i, j)];
}

double& Poly2::coeff(int i, int j) {
  if (i < 0 || j < 0 || i + j > max_degree_) {
    throw DegreeOverflowError("coefficient (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside degree " +
                              std::to_string(max_degree_));
  }
  return c_[index(i, j)];
}

double Poly2::eval(double d, double w) const {
  // Horner in d over inner Horner polynomials in w.
  double acc = 0.0;
  for (int i = max_degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = max_degree_ - i; j >= 0; --j) inner = inner * w + c_[index(i, j)];
    acc = acc * d + inner;
  }
  return acc;
}

std::pair<double, double> Poly2::grad(double d, double w) const {
  double gd = 0.0;
  double gw = 0.0;
  for (int i = max_degree_; i >= 0; --i) {
    double row = 0.0;    // sum_j c_ij w^j
    double row_w = 0.0;  // sum_j j c_ij w^(j-1)
    for (int j = max_degree_ - i; j >= 0; --j) {
      row = row * w + c_[index(i, j)];
      if (j > 0) row_w = row_w * w + j * c_[index(i, j)];
    }
    if (i > 0) gd = gd * d + i * row;
    gw = gw * d + row_w;
  }
  return {gd, gw};
}

int Poly2::degree() const {
  for (int m = max_degree_; m >= 0; --m) {
    for (int j = 0; j <= m; ++j) {
      if (c_[index(m - j, j)] != 0.0) return m;
    }
  }
  return -1;
}

HomogeneousSlice Poly2::homogeneous_slice(int m) const {
  HomogeneousSlice s{m, std::vector<double>(static_cast<std::size_t>(m + 1), 0.0)};
  if (m > max_degree_) return s;
  for (int j = 0; j <= m; ++j) s.c[j] = c_[index(m - j, j)];
  return s;
}

void Poly2::set_homogeneous_slice(const HomogeneousSlice& s) {
  if (s.m > max_degree_) {
    throw DegreeOverflowError("slice degree exceeds polynomial storage");
  }
  for (int j = 0; j <= s.m; ++j) c_[index(s.m - j, j)] = s.c[j];
}

Poly2 Poly2::homogeneous_part(int m) const {
  Poly2 out(max_degree_);
  if (m <= max_degree_) out.set_homogeneous_slice(homogeneous_slice(m));
  return out;
}

Poly2 Poly2::resized(int new_max_degree, Overflow overflow) const {
  Poly2 out(new_max_degree);
  for (int m = 0; m <= max_degree_; ++m) {
    for (int j = 0; j <= m; ++j) {
      const double v = c_[index(m - j, j)];
      if (m <= new_max_degree) {
        out.c_[index(m - j, j)] = v;
      } else if (v != 0.0 && overflow == Overflow::kFail) {
        throw DegreeOverflowError("resize would drop nonzero terms");
      }
    }
  }
  return out;
}

Poly2 Poly2::partial(int var) const {
  Poly2 out(max_degree_ > 0 ? max_degree_ - 1 : 0);
  for (int m = 1; m <= max_degree_; ++m) {
    for (int j = 0; j <= m; ++j) {
      const int i = m - j;
      const double v = c_[index(i, j)];
      if (var == 0 && i > 0) out.c_[index(i - 1, j)] += i * v;
      if (var == 1 && j > 0) out.c_[index(i, j - 1)] += j * v;
    }
  }
  return out;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  if (o.max_degree_ > max_degree_) *this = resized(o.max_degree_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Poly2& Poly2::operator-=(const Poly2& o) {
  if (o.max_degree_ > max_degree_) *this = resized(o.max_degree_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Poly2& Poly2::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
Poly2 operator*(Poly2 a, double s) { return a *= s; }
Poly2 operator*(double s, Poly2 a) { return a *= s; }

Poly2 mul(const Poly2& a, const Poly2& b, int result_degree, Overflow overflow) {
  if (result_degree < 0) result_degree = a.max_degree() + b.max_degree();
  Poly2 out(result_degree);
  for (int ma = 0; ma <= a.max_degree(); ++ma) {
    for (int ja = 0; ja <= ma; ++ja) {
      const double va = a.coeff(ma - ja, ja);
      if (va == 0.0) continue;
      for (int mb = 0; mb <= b.max_degree(); ++mb) {
        for (int jb = 0; jb <= mb; ++jb) {
          const double vb = b.coeff(mb - jb, jb);
          if (vb == 0.0) continue;
          if (ma + mb > result_degree) {
            if (overflow == Overflow::kFail) {
              throw DegreeOverflowError("product exceeds result degree");
            }
            continue;
          }
          out.coeff(ma - ja + mb - jb, ja + jb) += va * vb;
        }
      }
    }
  }
  return out;
}

HomogeneousSlice mul_slice(const Poly2& a, const Poly2& b, int m) {
  HomogeneousSlice s{m, std::vector<double>(static_cast<std::size_t>(m + 1), 0.0)};
  for (int ma = 0; ma <= std::min(m, a.max_degree()); ++ma) {
    const int mb = m - ma;
    if (mb > b.max_degree()) continue;
    for (int ja = 0; ja <= ma; ++ja) {
      const double va = a.coeff(ma - ja, ja);
      if (va == 0.0) continue;
      for (int jb = 0; jb <= mb; ++jb) {
        s.c[ja + jb] += va * b.coeff(mb - jb, jb);
      }
    }
  }
  return s;
}

Poly2 lie_derivative(const Poly2& p, const Poly2& f1, const Poly2& f2,
                     int max_degree) {
  Poly2 out = mul(p.partial(0), f1, max_degree, Overflow::kTruncate);
  out += mul(p.partial(1), f2, max_degree, Overflow::kTruncate);
  return out;
}

void write_coefficients_csv(std::ostream& os, const Poly2& p) {
  os << "i,j,c\n";
  char buf[64];
  for (int m = 0; m <= p.max_degree(); ++m) {
    for (int j = 0; j <= m; ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", m - j, j, p.coeff(m - j, j));
      os << buf;
    }
  }
}

std::pair<Poly2, Poly2> taylor_field(const SwingParams& sp, double sep, int m_t) {
  if (m_t < 1) throw InvalidParameterError("Taylor degree must be >= 1");
  Poly2 f1(m_t);
  Poly2 f2(m_t);
  f1.coeff(0, 1) = 1.0;
  const double a = sep - sp.theta1;
  const double s = std::sin(a);
  const double c = std::cos(a);
  // k-th derivatives of sin and cos at a.
  const double dsin[4] = {s, c, -s, -c};
  const double dcos[4] = {c, -s, -c, s};
  double fact = 1.0;
  for (int k = 0; k <= m_t; ++k) {
    if (k > 0) fact *= k;
    f2.coeff(k, 0) += -sp.p_e * dsin[k % 4] / fact;
    if (k + 1 <= m_t) f2.coeff(k, 1) += -sp.d_c * dcos[k % 4] / fact;
  }
  f2.coeff(0, 0) += sp.p_m;
  // The constant term is an equilibrium residual; clear rounding noise.
  if (std::abs(f2.coeff(0, 0)) < 1e-9 * std::max(1.0, std::abs(sp.p_m))) {
    f2.coeff(0, 0) = 0.0;
  }
  return {f1, f2};
}

HomogeneousSlice lie_solve_homogeneous(const Matrix2& b, int m,
                                       const HomogeneousSlice& rhs) {
  if (rhs.m != m || static_cast<int>(rhs.c.size()) != m + 1) {
    throw InvalidParameterError("rhs slice degree mismatch");
  }
  // Eigenvalues of b; the operator's spectrum is {m1 l1 + m2 l2 : m1+m2 = m}.
  const double tr = b[0][0] + b[1][1];
  const double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
  const std::complex<double> l1 = 0.5 * (tr + disc);
  const std::complex<double> l2 = 0.5 * (tr - disc);
  for (int m1 = 0; m1 <= m; ++m1) {
    if (std::abs(static_cast<double>(m1) * l1 + static_cast<double>(m - m1) * l2) < 1e-10) {
      throw ResonanceError("resonant linear part at degree " + std::to_string(m));
    }
  }
  const int n = m + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j <= m; ++j) {
    const int i = m - j;  // monomial d^i w^j
    if (i > 0) {
      a(j, j) += i * b[0][0];
      if (j + 1 <= m) a(j + 1, j) += i * b[0][1];
    }
    if (j > 0) {
      a(j - 1, j) += j * b[1][0];
      a(j, j) += j * b[1][1];
    }
  }
  Eigen::VectorXd r(n);
  for (int j = 0; j < n; ++j) r(j) = rhs.c[j];
  const Eigen::VectorXd x = a.fullPivLu().solve(r);
  HomogeneousSlice out{m, std::vector<double>(x.data(), x.data() + n)};
  return out;
}

}  // namespace pllstab
