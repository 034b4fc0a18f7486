#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscine/qp_fourier.hpp"

namespace oscine {

/// Complex samples on the uniform grid x_j = x_min + j dx, j = 0..m-1.
/// States are assumed compactly concentrated inside the window; propagators
/// move the window instead of the samples where the motion is a translation
/// or a scaling, so the resolution follows the state.
struct GridState {
  Eigen::VectorXcd v;
  double x_min = 0.0;
  double dx = 0.0;

  int size() const { return static_cast<int>(v.size()); }
  double x(int j) const { return x_min + j * dx; }
  double l2() const { return std::sqrt(dx) * v.norm(); }
  /// max boundary |sample| relative to the max |sample|.
  double boundary_leak() const;

  static GridState uniform(double x_min, double x_max, int m);
  /// Unit-norm Gaussian pi^{-1/4} sigma^{-1/2} e^{-(x-q)^2/(2 sigma^2)} e^{ipx}.
  static GridState gaussian(double q, double p, double sigma, double x_min, double x_max,
                            int m);
  /// Oscillator eigenfunction phi_n sampled on the window.
  static GridState hermite(int n, double x_min, double x_max, int m);

  void save_binary(const std::string& path) const;
  static GridState load_binary(const std::string& path);
};

struct WindowOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spectral d^order/dx^order on the window (periodic extension; valid for
/// compactly concentrated samples).
GridState grid_derivative(const GridState& u, int order = 1);

/// || |x|^s u ||_{L2}
double grid_moment(const GridState& u, double s);

/// ||u||_{H^s} by the Fourier multiplier (1 + |2 pi xi|^2)^{s/2}.
double grid_hs_norm(const GridState& u, int s);

/// s = 0: L2 norm. s >= 1: the equivalent-norm sum ||u||_{H^s} + ||x^s u||.
double grid_sobolev_norm(const GridState& u, int s);

/// Exact <u, H0^s u>^(1/2) with H0 = -d^2/dx^2 + x^2 (integer s >= 0).
double grid_h0_norm(const GridState& u, int s);

/// v(t,x) = e^{i kappa/(6 iota) x^3} e^{-i kappa/(6 iota) (x - iota t)^3}
///          v0(x - iota t), the constant-coefficient reduction of the
/// parabolic class; the window translates by iota*t so samples align exactly.
GridState stark_evolve_closed_form(const GridState& u0, double kappa, double iota,
                                   double t);

/// v(t,x) = e^{-lambda t/2} v0(e^{-lambda t} x) on the scaled window.
GridState dilation_evolve(const GridState& u0, double lambda, double t);

/// v(t,x) = v0(x - iota t) on the translated window.
GridState transport_evolve(const GridState& u0, double iota, double t);

/// || |x|^s e^{-i t S_a} u0 || for the Stark generator S_a = -d^2/dx^2 + a x,
/// evaluated through the frequency-side transported cubic phase: u0 is
/// modulated so the shifted spectrum lands on the grid, the exact phase is
/// applied, and the moment is read off after transforming back.
double stark_weighted_moment(const GridState& u0, double a, double s, double t);

/// Frequency-side evolved transform of u0 under S_a = -d^2 + ax; the returned
/// grid lives on the xi axis. Used to cross-check against the closed form.
GridState stark_fourier_side(const GridState& u0, double a, double t);

/// hat u on the fftshifted frequency grid xi_j = (j - m/2) / (m dx),
/// normalized as hat u(xi) = integral e^{-2 pi i xi x} u(x) dx.
GridState fourier_transform(const GridState& u);

}  // namespace oscine
