#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "pllstab/circuit.hpp"

namespace pllstab {

/// Coefficients of one homogeneous degree-m part. c[j] multiplies
/// d^(m-j) * w^j, so the vector always has m + 1 entries.
struct HomogeneousSlice {
  int m = 0;
  std::vector<double> c;
};

enum class Overflow { kTruncate, kFail };

/// Dense bivariate polynomial in (d, w) = SEP-centered (delta, omega),
/// stored as a triangular coefficient array up to `max_degree`.
class Poly2 {
 public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int max_degree);

  int max_degree() const { return max_degree_; }

  /// Coefficient of d^i w^j. Out-of-range reads return zero.
  double coeff(int i, int j) const;
  /// Mutable coefficient of d^i w^j; i + j must not exceed max_degree().
  double& coeff(int i, int j);

  double eval(double d, double w) const;
  /// Gradient (dP/dd, dP/dw) at a point.
  std::pair<double, double> grad(double d, double w) const;

  /// Degree of the highest nonzero slice, -1 for the zero polynomial.
  int degree() const;

  HomogeneousSlice homogeneous_slice(int m) const;
  void set_homogeneous_slice(const HomogeneousSlice& s);
  /// Copy of the degree-m part only.
  Poly2 homogeneous_part(int m) const;

  /// Copy with a different storage degree; dropped terms must be zero unless
  /// `overflow` is kTruncate.
  Poly2 resized(int new_max_degree, Overflow overflow = Overflow::kFail) const;

  /// Partial derivative with respect to d (var = 0) or w (var = 1).
  Poly2 partial(int var) const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator-=(const Poly2& o);
  Poly2& operator*=(double s);

  const std::vector<double>& data() const { return c_; }
  std::vector<double>& data() { return c_; }

  static std::size_t index(int i, int j) {
    const int d = i + j;
    return static_cast<std::size_t>(d * (d + 1) / 2 + j);
  }
  static std::size_t size_for(int max_degree) {
    return static_cast<std::size_t>((max_degree + 1) * (max_degree + 2) / 2);
  }

 private:
  int max_degree_;
  std::vector<double> c_;
};

Poly2 operator+(Poly2 a, const Poly2& b);
Poly2 operator-(Poly2 a, const Poly2& b);
Poly2 operator*(Poly2 a, double s);
Poly2 operator*(double s, Poly2 a);

/// Product with result storage `result_degree` (defaults to the sum of the
/// operand degrees). With kFail, a nonzero term above result_degree throws.
Poly2 mul(const Poly2& a, const Poly2& b, int result_degree = -1,
          Overflow overflow = Overflow::kFail);

/// Product of two polynomials, keeping only the degree-m part.
HomogeneousSlice mul_slice(const Poly2& a, const Poly2& b, int m);

/// Lie derivative grad(P) . (f1, f2) truncated at `max_degree`.
Poly2 lie_derivative(const Poly2& p, const Poly2& f1, const Poly2& f2,
                     int max_degree);

/// Writes "i,j,c" rows for every coefficient (zeros included).
void write_coefficients_csv(std::ostream& os, const Poly2& p);

/// Taylor expansion of the swing vector field about `sep`, in SEP-centered
/// coordinates, truncated at total degree `m_t`.
std::pair<Poly2, Poly2> taylor_field(const SwingParams& sp, double sep,
                                     int m_t);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Solves grad(V_m) . (b x) = rhs for the homogeneous degree-m V_m.
/// Throws ResonanceError when the operator is singular.
HomogeneousSlice lie_solve_homogeneous(const Matrix2& b, int m,
                                       const HomogeneousSlice& rhs);

}  // namespace pllstab
