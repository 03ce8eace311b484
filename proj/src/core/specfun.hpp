#pragma once

#include <vector>

namespace plateau {

// P(Z >= x) for standard normal Z.
double normal_upper_tail(double x);

// P(chi^2_dof >= x), regularized upper incomplete gamma.
double chisq_tail(double dof, double x);

// P(sum_i v_i Z_i^2 >= t) for independent standard normals and positive
// weights v. Evaluated with Ruben's expansion around the smallest weight:
// a series of central chi-square tails with nonnegative coefficients, so
// the result is monotone in t term by term. Equal weights collapse to a
// single exact chi-square tail.
double weighted_chisq_tail(const std::vector<double>& v, double t);

// Nodes and weights for n-point Gauss-Legendre on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n);

// Ordinary least squares y ~ a + b x with coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace plateau
