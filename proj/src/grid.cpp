#include "oscine/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fftw3.h>

namespace oscine {

namespace {
constexpr double kPi = 3.14159265358979323846;
const Complex kI{0.0, 1.0};

void fft_inplace(Eigen::VectorXcd& v, int sign) {
  const int m = static_cast<int>(v.size());
  fftw_complex* data = reinterpret_cast<fftw_complex*>(v.data());
  fftw_plan plan = fftw_plan_dft_1d(m, data, data, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  if (sign == FFTW_BACKWARD) v /= static_cast<double>(m);
}

/// Physical frequency xi_k for DFT bin k (cycles per unit length).
double bin_freq(int k, int m, double dx) {
  const int kk = k < (m + 1) / 2 ? k : k - m;
  return kk / (m * dx);
}
}  // namespace

double GridState::boundary_leak() const {
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0) return 0;
  return std::max(std::abs(v[0]), std::abs(v[size() - 1])) / peak;
}

GridState GridState::uniform(double x_min, double x_max, int m) {
  GridState g;
  g.v = Eigen::VectorXcd::Zero(m);
  g.x_min = x_min;
  g.dx = (x_max - x_min) / m;
  return g;
}

GridState GridState::gaussian(double q, double p, double sigma, double x_min, double x_max,
                              int m) {
  GridState g = uniform(x_min, x_max, m);
  const double norm = std::pow(kPi, -0.25) / std::sqrt(sigma);
  for (int j = 0; j < m; ++j) {
    const double y = (g.x(j) - q) / sigma;
    g.v[j] = norm * std::exp(-0.5 * y * y) * std::polar(1.0, p * (g.x(j) - q));
  }
  return g;
}

GridState GridState::hermite(int n, double x_min, double x_max, int m) {
  GridState g = uniform(x_min, x_max, m);
  for (int j = 0; j < m; ++j) {
    const double x = g.x(j);
    double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    double h1 = std::sqrt(2.0) * x * h0;
    if (n == 0) {
      g.v[j] = h0;
      continue;
    }
    for (int k = 1; k < n; ++k) {
      const double h2 = std::sqrt(2.0 / (k + 1.0)) * x * h1 - std::sqrt(k / (k + 1.0)) * h0;
      h0 = h1;
      h1 = h2;
    }
    g.v[j] = h1;
  }
  return g;
}

void GridState::save_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  char header[32] = {};
  std::memcpy(header, "OSC1", 4);
  const std::uint32_t m = static_cast<std::uint32_t>(size());
  std::memcpy(header + 4, &m, 4);
  std::memcpy(header + 8, &x_min, 8);
  std::memcpy(header + 16, &dx, 8);
  os.write(header, 32);
  for (int j = 0; j < size(); ++j) {
    const double re = v[j].real(), im = v[j].imag();
    os.write(reinterpret_cast<const char*>(&re), 8);
    os.write(reinterpret_cast<const char*>(&im), 8);
  }
}

GridState GridState::load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char header[32];
  is.read(header, 32);
  if (std::memcmp(header, "OSC1", 4) != 0)
    throw std::runtime_error("bad magic in " + path);
  std::uint32_t m;
  GridState g;
  std::memcpy(&m, header + 4, 4);
  std::memcpy(&g.x_min, header + 8, 8);
  std::memcpy(&g.dx, header + 16, 8);
  g.v.resize(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    double re, im;
    is.read(reinterpret_cast<char*>(&re), 8);
    is.read(reinterpret_cast<char*>(&im), 8);
    g.v[j] = Complex{re, im};
  }
  if (!is) throw std::runtime_error("truncated grid file " + path);
  return g;
}

GridState grid_derivative(const GridState& u, int order) {
  GridState g = u;
  fft_inplace(g.v, FFTW_FORWARD);
  const int m = g.size();
  for (int k = 0; k < m; ++k) {
    const double xi = bin_freq(k, m, u.dx);
    Complex mult = std::pow(Complex{0.0, 2.0 * kPi * xi}, order);
    if (order % 2 == 1 && m % 2 == 0 && k == m / 2) mult = 0.0;  // odd-order Nyquist
    g.v[k] *= mult;
  }
  fft_inplace(g.v, FFTW_BACKWARD);
  return g;
}

double grid_moment(const GridState& u, double s) {
  double acc = 0;
  for (int j = 0; j < u.size(); ++j)
    acc += std::pow(std::abs(u.x(j)), 2.0 * s) * std::norm(u.v[j]);
  return std::sqrt(u.dx * acc);
}

double grid_hs_norm(const GridState& u, int s) {
  Eigen::VectorXcd hat = u.v;
  fft_inplace(hat, FFTW_FORWARD);
  const int m = u.size();
  double acc = 0;
  for (int k = 0; k < m; ++k) {
    const double w = 2.0 * kPi * bin_freq(k, m, u.dx);
    acc += std::pow(1.0 + w * w, s) * std::norm(hat[k]);
  }
  return std::sqrt(acc * u.dx / m);
}

namespace {
void require_contained(const GridState& u) {
  if (u.boundary_leak() > 1e-8)
    throw std::domain_error("grid state carries boundary mass; widen or recenter the window");
}
}  // namespace

double grid_sobolev_norm(const GridState& u, int s) {
  if (s < 0) throw std::invalid_argument("grid_sobolev_norm: s >= 0");
  require_contained(u);
  if (s == 0) return u.l2();
  return grid_hs_norm(u, s) + grid_moment(u, s);
}

double grid_h0_norm(const GridState& u, int s) {
  if (s < 0) throw std::invalid_argument("grid_h0_norm: s >= 0");
  require_contained(u);
  if (s == 0) return u.l2();
  GridState w = u;
  for (int rep = 0; rep < s; ++rep) {
    GridState d2 = grid_derivative(w, 2);
    for (int j = 0; j < w.size(); ++j) w.v[j] = -d2.v[j] + w.x(j) * w.x(j) * w.v[j];
  }
  const Complex ip = u.dx * u.v.dot(w.v);  // dot conjugates the left factor
  return std::sqrt(std::max(0.0, ip.real()));
}

GridState stark_evolve_closed_form(const GridState& u0, double kappa, double iota,
                                   double t) {
  if (kappa == 0.0 || iota == 0.0)
    throw std::invalid_argument("stark closed form needs kappa, iota != 0");
  GridState g = u0;
  g.x_min = u0.x_min + iota * t;  // recenter: new grid points are x_j + iota t
  const double c = kappa / (6.0 * iota);
  for (int j = 0; j < g.size(); ++j) {
    const double xnew = g.x(j);
    const double xold = u0.x(j);  // xnew - iota t, exactly on the original grid
    g.v[j] = std::polar(1.0, c * (xnew * xnew * xnew - xold * xold * xold)) * u0.v[j];
  }
  return g;
}

GridState dilation_evolve(const GridState& u0, double lambda, double t) {
  if (!(lambda > 0)) throw std::invalid_argument("dilation needs lambda > 0");
  const double grow = std::exp(lambda * t);
  GridState g = u0;
  g.x_min = u0.x_min * grow;
  g.dx = u0.dx * grow;
  g.v *= std::exp(-0.5 * lambda * t);
  return g;
}

GridState transport_evolve(const GridState& u0, double iota, double t) {
  GridState g = u0;
  g.x_min = u0.x_min + iota * t;
  return g;
}

namespace {

/// DFT of u modulated so that bin k holds hat{u}(xi_k - shift); throws when
/// the shifted spectrum would wrap past the Nyquist edge. The width check
/// runs on the unshifted spectrum, where wrapping cannot hide aliasing.
Eigen::VectorXcd shifted_spectrum(const GridState& u, double shift) {
  const int m = u.size();
  Eigen::VectorXcd w = u.v;
  fft_inplace(w, FFTW_FORWARD);
  double total = 0;
  for (int k = 0; k < m; ++k) total += std::norm(w[k]);
  double width = 0;
  for (int k = 0; k < m; ++k)
    if (std::norm(w[k]) > 1e-24 * total) width = std::max(width, std::abs(bin_freq(k, m, u.dx)));
  if (width + std::abs(shift) > 0.5 / u.dx)
    throw WindowOverflowError("shifted spectrum would cross the frequency window edge");
  for (int j = 0; j < m; ++j) w[j] = u.v[j] * std::polar(1.0, 2.0 * kPi * shift * u.x(j));
  fft_inplace(w, FFTW_FORWARD);
  return w;
}

double stark_phase(double xi, double a, double t) {
  // frequency-side parameters: kappa_F = -8 pi^2, iota_F = -a/(2 pi)
  const double kappa_f = -8.0 * kPi * kPi;
  const double iota_f = -a / (2.0 * kPi);
  const double c = kappa_f / (6.0 * iota_f);
  const double xi_old = xi - iota_f * t;
  return c * (xi * xi * xi - xi_old * xi_old * xi_old);
}

}  // namespace

double stark_weighted_moment(const GridState& u0, double a, double s, double t) {
  if (a == 0.0) throw std::invalid_argument("stark moment needs a != 0");
  const int m = u0.size();
  const double iota_f = -a / (2.0 * kPi);
  Eigen::VectorXcd hat = shifted_spectrum(u0, iota_f * t);  // bin k: hat u0(xi_k - iota_f t)
  for (int k = 0; k < m; ++k)
    hat[k] *= std::polar(1.0, stark_phase(bin_freq(k, m, u0.dx), a, t));
  fft_inplace(hat, FFTW_BACKWARD);
  GridState ut = u0;
  ut.v = hat;
  return grid_moment(ut, s);
}

GridState stark_fourier_side(const GridState& u0, double a, double t) {
  const int m = u0.size();
  const double iota_f = -a / (2.0 * kPi);
  Eigen::VectorXcd hat = shifted_spectrum(u0, iota_f * t);
  for (int k = 0; k < m; ++k)
    hat[k] *= std::polar(1.0, stark_phase(bin_freq(k, m, u0.dx), a, t));
  // fftshift onto a physical xi-grid, with the x_min phase and dx scale
  GridState g;
  g.dx = 1.0 / (m * u0.dx);
  g.x_min = -0.5 / u0.dx;
  g.v.resize(m);
  for (int j = 0; j < m; ++j) {
    const int k = (j + m / 2) % m;
    const double xi = g.x_min + j * g.dx;
    g.v[j] = u0.dx * std::polar(1.0, -2.0 * kPi * xi * u0.x_min) * hat[k];
  }
  return g;
}

GridState fourier_transform(const GridState& u) {
  const int m = u.size();
  Eigen::VectorXcd hat = u.v;
  fft_inplace(hat, FFTW_FORWARD);
  GridState g;
  g.dx = 1.0 / (m * u.dx);
  g.x_min = -0.5 / u.dx;
  g.v.resize(m);
  for (int j = 0; j < m; ++j) {
    const int k = (j + m / 2) % m;
    const double xi = g.x_min + j * g.dx;
    g.v[j] = u.dx * std::polar(1.0, -2.0 * kPi * xi * u.x_min) * hat[k];
  }
  return g;
}

}  // namespace oscine
