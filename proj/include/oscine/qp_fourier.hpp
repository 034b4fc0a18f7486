#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace oscine {

using Complex = std::complex<double>;

constexpr int kMaxDim = 4;
constexpr int kDefaultKMax = 64;          // truncation per dimension
constexpr double kDivisorFloor = 1e-8;    // reject harmonics with smaller divisors
constexpr double kNegligibleCoeff = 1e-13;

/// Multi-index k in Z^d, d <= kMaxDim. Unused slots stay zero so the
/// lexicographic order is well defined across a fixed dimension.
struct HarmonicIndex {
  std::array<std::int16_t, kMaxDim> k{};

  static HarmonicIndex from(std::span<const int> kk);
  HarmonicIndex negated() const;
  int abs1() const;  // |k|_1
  bool is_zero() const;
  auto operator<=>(const HarmonicIndex&) const = default;
};

struct DivisorFloorError : std::runtime_error {
  HarmonicIndex offending;
  double divisor;
  DivisorFloorError(const HarmonicIndex& k, double div);
};

/// Frequency vector omega in R^d together with the Diophantine budget
/// (gamma, tau). Construction verifies |<n,omega>| > gamma/|n|^tau over
/// sampled n with 0 < |n| <= n_check and throws on violation.
class FrequencyVector {
 public:
  FrequencyVector(std::vector<double> omega, double gamma, double tau,
                  int n_check = 10000, std::uint64_t sample_seed = 12345);

  int dim() const { return static_cast<int>(omega_.size()); }
  const std::vector<double>& omega() const { return omega_; }
  double gamma() const { return gamma_; }
  double tau() const { return tau_; }

  double dot(const HarmonicIndex& k) const;  // <k, omega>

  bool operator==(const FrequencyVector& o) const {
    return omega_ == o.omega_;
  }

  /// d=1 periodic driving at rate omega0.
  static FrequencyVector periodic(double omega0 = 1.0);
  /// d=2 default (1, golden mean), certified up to n_check = 1e4.
  static FrequencyVector golden();

 private:
  std::vector<double> omega_;
  double gamma_, tau_;
};

enum class ValueKind { real, cplx };

/// Quasi-periodic function on the doubled torus 2T^d,
///   f(theta) = sum_k c_k exp((i/2) <k, theta>),
/// so each theta component has period 4*pi. Real-kind series keep
/// c_{-k} = conj(c_k).
class QpFourierSeries {
 public:
  explicit QpFourierSeries(FrequencyVector freq, ValueKind kind = ValueKind::real,
                           int k_max = kDefaultKMax);

  const FrequencyVector& freq() const { return freq_; }
  ValueKind kind() const { return kind_; }
  int k_max() const { return k_max_; }
  const std::map<HarmonicIndex, Complex>& coeffs() const { return coeffs_; }

  /// Raw coefficient assignment (drops entries below kNegligibleCoeff*0).
  void set_coeff(std::span<const int> k, Complex value);
  void set_coeff(const HarmonicIndex& k, Complex value);
  /// Adds c at +k and conj(c) at -k; keeps real kind valid.
  void add_real_harmonic(std::span<const int> k, Complex half_amplitude);
  Complex coeff(const HarmonicIndex& k) const;
  Complex coeff(std::span<const int> k) const;

  bool empty() const { return coeffs_.empty(); }
  double l1_mass() const;
  /// sum_k |c_k| e^{|k| r / 2}: certified upper bound for the sup norm on
  /// the analyticity strip of half-width r.
  double strip_bound(double r) const;
  /// True when |c_k| <= bound * e^{-|k| r} for every stored coefficient.
  bool check_decay(double bound, double r) const;
  /// Verifies reality (c_{-k} = conj(c_k)) within tol; complex kind: true.
  bool check_reality(double tol = 1e-14) const;

  static QpFourierSeries constant(const FrequencyVector& f, Complex c,
                                  ValueKind kind = ValueKind::real);
  /// amp * cos(<k, theta>/2)
  static QpFourierSeries cosine(const FrequencyVector& f, std::span<const int> k,
                                double amp = 1.0);
  /// amp * sin(<k, theta>/2)
  static QpFourierSeries sine(const FrequencyVector& f, std::span<const int> k,
                              double amp = 1.0);

  nlohmann::json to_json() const;
  static QpFourierSeries from_json(const nlohmann::json& j);

 private:
  FrequencyVector freq_;
  ValueKind kind_;
  int k_max_;
  std::map<HarmonicIndex, Complex> coeffs_;
};

/// f(theta); real-kind series are checked to have evaluation imaginary
/// part below 1e-12.
Complex evaluate(const QpFourierSeries& f, std::span<const double> theta);

/// d/dt f(omega t): coefficient map c_k -> (i/2)<k,omega> c_k.
QpFourierSeries directional_derivative(const QpFourierSeries& f);

/// Inverse of directional_derivative on zero-average series; the result has
/// zero average. Throws DivisorFloorError per the floor policy.
QpFourierSeries antiderivative(const QpFourierSeries& f,
                               double divisor_floor = kDivisorFloor);

/// k = 0 coefficient.
Complex average(const QpFourierSeries& f);

struct MultiplyReport {
  double discarded_mass = 0.0;  // l1 mass dropped by the K_max truncation
};

QpFourierSeries multiply(const QpFourierSeries& f, const QpFourierSeries& g,
                         MultiplyReport* report = nullptr);

QpFourierSeries add(const QpFourierSeries& f, const QpFourierSeries& g);
QpFourierSeries scale(const QpFourierSeries& f, Complex c);

/// 2x2 quasi-periodic matrix; optionally constrained to trace zero
/// coefficient-wise (within 1e-14).
class MatrixSeries {
 public:
  MatrixSeries(QpFourierSeries m00, QpFourierSeries m01, QpFourierSeries m10,
               QpFourierSeries m11, bool trace_zero = true);

  static MatrixSeries zero(const FrequencyVector& f);

  const QpFourierSeries& entry(int r, int c) const { return e_[r][c]; }
  bool trace_zero() const { return trace_zero_; }
  const FrequencyVector& freq() const { return e_[0][0].freq(); }
  bool empty() const;
  double l1_mass() const;

  /// Real 2x2 value at theta (entries must be real-kind).
  std::array<std::array<double, 2>, 2> value_at(std::span<const double> theta) const;

 private:
  QpFourierSeries e_[2][2];
  bool trace_zero_;
};

/// Tabulated evaluation of a set of series on a tensor-product theta grid
/// (theta_j = 4*pi*j/n per dimension); used by residual certificates.
class ThetaGridEvaluator {
 public:
  ThetaGridEvaluator(const FrequencyVector& freq, int points_per_dim);
  int total_points() const { return total_; }
  /// Values of f at every grid node, flattened row-major over dimensions.
  std::vector<Complex> evaluate(const QpFourierSeries& f) const;

 private:
  int dim_, n_, total_, k_offset_;
};

}  // namespace oscine
