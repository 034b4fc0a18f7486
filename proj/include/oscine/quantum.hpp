#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "oscine/classical.hpp"
#include "oscine/qp_fourier.hpp"

namespace oscine {

/// Frozen degree-2 Weyl symbol
///   1/2 (a20 x^2 + 2 a11 x xi + a02 xi^2) + b1 x + b2 xi + c.
struct Degree2Symbol {
  double a20 = 0, a11 = 0, a02 = 0, b1 = 0, b2 = 0, c = 0;

  Degree2Symbol operator+(const Degree2Symbol& o) const {
    return {a20 + o.a20, a11 + o.a11, a02 + o.a02, b1 + o.b1, b2 + o.b2, c + o.c};
  }
  Degree2Symbol scaled(double s) const {
    return {s * a20, s * a11, s * a02, s * b1, s * b2, s * c};
  }
  static Degree2Symbol oscillator(double nu) { return {nu, 0, nu, 0, 0, 0}; }
};

using SymbolPath = std::function<Degree2Symbol(double)>;

/// State in the oscillator eigenbasis phi_n (eigenvalues 2n+1).
struct HermiteState {
  Eigen::VectorXcd c;

  int size() const { return static_cast<int>(c.size()); }
  double l2() const { return c.norm(); }
  /// (sum (2n+1)^s |c_n|^2)^(1/2)
  double sobolev(double s) const;
  /// Relative mass in the top eighth of the coefficient range.
  double tail_mass() const;

  static HermiteState basis_state(int n, int dim);

  nlohmann::json to_json() const;
  static HermiteState from_json(const nlohmann::json& j);
};

double sobolev_norm(const HermiteState& u, double s);
/// ||u - v||_s / ||v||_s, shorter vector zero-padded.
double relative_sobolev_distance(const HermiteState& u, const HermiteState& v, double s);

/// Hermitian matrix with bandwidth <= 2 in the Hermite index.
class BandedOperator {
 public:
  explicit BandedOperator(int n);

  int size() const { return n_; }
  double& diag(int i) { return diag_[i]; }
  Complex& off1(int i) { return off1_[i]; }  // <i|H|i+1>
  Complex& off2(int i) { return off2_[i]; }  // <i|H|i+2>
  double diag(int i) const { return diag_[i]; }
  Complex off1(int i) const { return off1_[i]; }
  Complex off2(int i) const { return off2_[i]; }

  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  /// y = (H - mu) x / w, fused for the Chebyshev recurrence.
  void apply_scaled(const Eigen::VectorXcd& x, double mu, double w,
                    Eigen::VectorXcd& y) const;
  Eigen::MatrixXcd dense() const;
  /// Enclosing interval for the spectrum (Gershgorin).
  void spectral_bounds(double& lo, double& hi) const;

 private:
  int n_;
  Eigen::VectorXd diag_;
  Eigen::VectorXcd off1_, off2_;
};

/// Ladder-coefficient realization of the Weyl operator of a degree-2 symbol.
BandedOperator weyl_quantize(const Degree2Symbol& sym, int n);

struct TailBudgetError : std::runtime_error {
  double t_fail;
  explicit TailBudgetError(double t);
};

struct PropagateOptions {
  double dt = 1e-2;
  int n0 = 256;
  int n_max = 65536;
  double tail_budget = 1e-12;
  double cheb_tol = 5e-16;
  int order = 2;  // 2: midpoint exponential; 4: two-exponential Gauss stepping
};

struct NormSample {
  double t, l2, hs, tail;
};

struct PropagateResult {
  std::vector<NormSample> norms;                          // at multiples of sample_dt
  std::vector<std::pair<double, HermiteState>> states;    // at multiples of state_dt
  int final_dim = 0;
};

/// Unitary stepping u_{k+1} = exp(-i dt H(t_k + dt/2)) u_k with the banded
/// exponential applied by a Chebyshev series; the basis dimension doubles
/// whenever the tail budget trips, up to n_max.
PropagateResult propagate(const SymbolPath& symbol, const HermiteState& u0, double T,
                          double sample_dt, double norm_s,
                          double state_dt = 0.0,
                          const PropagateOptions& opts = {});

/// Complex Gaussian  psi = N exp(i A/2 (x-q)^2 + i p (x-q)),  Im A > 0,
/// N = (Im A / pi)^(1/4) (unit norm, zero reference phase).
struct GaussianPacket {
  double q = 0.0, p = 0.0;
  Complex A = Complex{0.0, 1.0};
};

/// Degree-2 Hamiltonian whose equations of motion are the given affine
/// system, plus an optional purely time-dependent scalar part.
SymbolPath hamiltonian_symbol(const AffineSystem& sys,
                              std::function<double(double)> scalar = {});

/// Exact evolution of a Gaussian under the degree-2 symbol path: centers
/// follow the affine flow, the width parameter follows the tangent flow, and
/// the scalar phase integrates the action. Expanded over phi_0..phi_{n-1}
/// with certified tail; grows n up to n_max if needed.
HermiteState coherent_oracle(const SymbolPath& symbol, const GaussianPacket& packet,
                             double t, int n = 256, int n_max = 65536,
                             double tail_tol = 1e-10, double ode_tol = 1e-13);

/// Oracle driven directly by the classical system.
HermiteState coherent_oracle(const AffineSystem& sys, const GaussianPacket& packet,
                             double t, int n = 256, int n_max = 65536,
                             double tail_tol = 1e-10, double ode_tol = 1e-13);

/// Hermite expansion of a static Gaussian (the t = 0 oracle).
HermiteState expand_gaussian(const GaussianPacket& packet, int n);

/// J_0..J_kmax for fixed argument via downward recurrence.
std::vector<double> bessel_j_array(double x, int kmax);

/// P_{2a}(t,y) with  d^a/dy^a e^{i phi} = P_{2a} e^{i phi} for the cubic
/// phase  phi = kappa/(6 iota) (3 y^2 iota t + 3 y iota^2 t^2 + iota^3 t^3).
/// coeff(a, j) multiplies t^a y^j.
struct BivariatePoly {
  Eigen::MatrixXcd c;  // rows: powers of t, cols: powers of y
  Complex eval(double t, double y) const;
  int deg_t() const { return static_cast<int>(c.rows()) - 1; }
  int deg_y() const { return static_cast<int>(c.cols()) - 1; }
};

struct DerivativePolynomials {
  BivariatePoly p;                       // P_{2 alpha}
  std::vector<Eigen::VectorXcd> q;       // q[a-1] = coefficients of Q_{alpha,a}(y)
  Complex leading;                       // coefficient of t^{2 alpha}
};

DerivativePolynomials derivative_polynomials(int alpha, double kappa, double iota);

}  // namespace oscine
