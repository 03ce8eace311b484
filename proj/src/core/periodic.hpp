#pragma once

#include "core/common.hpp"

#include <complex>
#include <string>
#include <vector>

namespace plateau {

// Exact finite ReLU expansion of a piecewise-linear function on an
// interval: t -> bias + sum_k coeff_k * max(0, t - knot_k). size() counts
// the constant term as a unit.
struct ReluNetwork1D {
  struct Unit {
    double coeff;
    double knot;
  };
  double bias = 0.0;
  std::vector<Unit> units;

  double eval(double t) const {
    double s = bias;
    for (const auto& u : units) {
      const double z = t - u.knot;
      if (z > 0.0) s += u.coeff * z;
    }
    return s;
  }
  int size() const { return static_cast<int>(units.size()) + 1; }
};

// Fourier coefficients a_z for |z| <= z_max of a period-1 function,
// psi(t) = sum_z a_z exp(2 pi i z t).
struct FourierCoeffs {
  int z_max = 0;
  std::vector<std::complex<double>> c;  // index z + z_max

  std::complex<double> a(int z) const {
    if (std::abs(z) > z_max) return {0.0, 0.0};
    return c[z + z_max];
  }
  std::complex<double> eval_series(double t) const;
  double sum_sq_moduli() const;
};

// Period-1 target function with |psi| <= 1 and bounded variation.
class PeriodicFn {
 public:
  enum class Kind { Cosine, Triangle, Square, PiecewiseLinear };

  static PeriodicFn cosine();
  static PeriodicFn triangle();  // peak +1 at t=0, -1 at t=1/2
  static PeriodicFn square();    // +1 on [0,1/2), -1 on [1/2,1)
  // Breakpoints (t ascending in [0,1), value in [-1,1]); the function is
  // the continuous periodic interpolant, closing the wrap segment back to
  // the first point.
  static PeriodicFn piecewise_linear(std::vector<std::pair<double, double>> points);
  static PeriodicFn from_json(const std::string& text);
  std::string to_json() const;

  Kind kind() const { return kind_; }
  bool is_piecewise_linear() const {
    return kind_ == Kind::Triangle || kind_ == Kind::PiecewiseLinear;
  }

  double operator()(double t) const;

  // a_z = integral_0^1 psi(t) exp(-2 pi i z t) dt; closed form for the
  // built-ins, exact per-segment integrals for piecewise-linear.
  FourierCoeffs fourier_coeffs(int z_max) const;
  double a0() const;

  // integral_0^1 psi^2, for Parseval checks.
  double mean_square() const;

  // Exact ReLU realization on [lo, hi]; only piecewise-linear kinds.
  ReluNetwork1D as_relu_network(double lo, double hi) const;

 private:
  PeriodicFn(Kind k, std::vector<std::pair<double, double>> pts);

  double eval_pl(double t) const;
  double slope_after(double t) const;  // slope of the segment right of t

  Kind kind_;
  std::vector<std::pair<double, double>> points_;  // PL breakpoints
};

}  // namespace plateau
