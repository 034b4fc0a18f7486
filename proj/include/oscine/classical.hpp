#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "oscine/qp_fourier.hpp"

namespace oscine {

/// Traceless real 2x2 matrix.
class Sl2Matrix {
 public:
  Sl2Matrix() : m_(Eigen::Matrix2d::Zero()) {}
  explicit Sl2Matrix(const Eigen::Matrix2d& m, double trace_tol = 1e-14);

  const Eigen::Matrix2d& matrix() const { return m_; }
  double det() const { return m_.determinant(); }
  double norm() const { return m_.norm(); }

  static Sl2Matrix rotation_generator(double nu);   // [[0, nu], [-nu, 0]]
  static Sl2Matrix hyperbolic(double lambda);       // diag(lambda, -lambda)
  static Sl2Matrix parabolic(double kappa);         // [[0,0],[kappa,0]]

 private:
  Eigen::Matrix2d m_;
};

/// X'(t) = (A + F(omega t)) X(t) + b(omega t) on R^2.
struct AffineSystem {
  FrequencyVector freq;
  Sl2Matrix A;
  MatrixSeries F;
  std::array<QpFourierSeries, 2> b;

  AffineSystem(FrequencyVector f, Sl2Matrix a, MatrixSeries fs,
               std::array<QpFourierSeries, 2> drift);

  Eigen::Matrix2d linear_at_theta(std::span<const double> theta) const;
  Eigen::Vector2d drift_at_theta(std::span<const double> theta) const;
  Eigen::Matrix2d linear_at_time(double t) const;
  Eigen::Vector2d drift_at_time(double t) const;

  nlohmann::json to_json() const;
};

enum class NormalFormClass { elliptic, hyperbolic, parabolic, degenerate };

const char* to_string(NormalFormClass c);

/// Constant reduced system: Y' = B Y + w, plus the scalar Hamiltonian shift.
struct NormalForm {
  Sl2Matrix B;
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  double C = 0.0;
  NormalFormClass cls = NormalFormClass::degenerate;
  double iota = 0.0;

  nlohmann::json to_json() const;
};

/// Scale-aware classification by the sign of det B.
NormalFormClass classify(const Sl2Matrix& B, std::optional<double> tol = std::nullopt);

/// Builds the affine equations of motion of the Hamiltonian
///   nu/2 (x^2 + xi^2) + 1/2 (a20 x^2 + 2 a11 x xi + a02 xi^2) + b1 x + b2 xi:
/// A = [[0, nu], [-nu, 0]], F = [[a11, a02], [-a20, -a11]], drift (b2, -b1).
AffineSystem build_paper_system(double nu, const QpFourierSeries& a20,
                                const QpFourierSeries& a11, const QpFourierSeries& a02,
                                const QpFourierSeries& b1, const QpFourierSeries& b2);

struct TrajectorySample {
  double t;
  Eigen::Vector2d x;
};

/// Adaptive integration sampled at multiples of dt (local error ~1e-13/step).
std::vector<TrajectorySample> flow(const AffineSystem& sys, const Eigen::Vector2d& x0,
                                   double T, double dt, double tol = 1e-13);

/// Fundamental matrix of the linear part at time T.
Eigen::Matrix2d fundamental_matrix(const AffineSystem& sys, double T, double tol = 1e-13);

void write_trajectory_csv(const std::vector<TrajectorySample>& traj,
                          const std::string& path);

struct RotationEstimate {
  double rho;        // averaged over initial directions
  double error_bar;  // half-spread over the directions
};

/// rot(omega, A + F) via the projective angle equation; positive for the
/// unperturbed oscillator A = [[0,nu],[-nu,0]].
RotationEstimate rotation_number(const FrequencyVector& freq, const Sl2Matrix& A,
                                 const MatrixSeries& F, double T, int n_directions = 8,
                                 double tol = 1e-11);

/// Conjugacy data for one homological reduction: the transform
/// X = R Y + (alpha(omega t), beta(omega t)) and the sup-norm defect of the
/// reduced equations on a theta grid.
struct ReductionCertificate {
  QpFourierSeries alpha;
  QpFourierSeries beta;
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  double residual = 0.0;
};

struct HomologicalSolution {
  ReductionCertificate certificate;
  NormalForm normal_form;
};

struct EllipticConfig {
  double dio_constant;   // script-K in the rho-Diophantine lower bound
  double sigma = 2.0;
  double decay_r = 0.5;  // analyticity half-width used in the coefficient bound
  double divisor_floor = kDivisorFloor;
};

/// Certified min over |n|_1 <= n_max of |rho - <n,omega>/2| (1 + |n|_1^sigma).
double certify_dio_varrho(double rho, const FrequencyVector& freq, double sigma,
                          int n_max = 64);

HomologicalSolution solve_hyperbolic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                     double lambda);
HomologicalSolution solve_parabolic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                    double kappa,
                                    double divisor_floor = kDivisorFloor);
HomologicalSolution solve_elliptic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                   double rho, const EllipticConfig& cfg);
HomologicalSolution solve_degenerate(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                     double divisor_floor = kDivisorFloor);

/// Standalone defect evaluation: sup over the grid of
/// |d/dt l - B l - p + R w| with l = (alpha, beta).
double conjugacy_residual(const QpFourierSeries& p1, const QpFourierSeries& p2,
                          const HomologicalSolution& sol, int points_per_dim = 200);

struct PhaseCorrection {
  double C;
  QpFourierSeries eps;
  double residual;  // sup |d/dt eps - (F - C)| on the theta grid
};

/// Scalar correction for conjugating between two affine drifts along the
/// translation l: F = 1/2 <l, J(b1 + b2)>, C its average, eps the
/// zero-average antiderivative of F - C.
PhaseCorrection phase_correction(const std::array<QpFourierSeries, 2>& l,
                                 const std::array<QpFourierSeries, 2>& b1,
                                 const std::array<QpFourierSeries, 2>& b2,
                                 double divisor_floor = kDivisorFloor);

}  // namespace oscine
