#include "oscine/classical.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "oscine/ode.hpp"

namespace oscine {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> theta_at_time(const FrequencyVector& freq, double t) {
  std::vector<double> th(freq.dim());
  for (int i = 0; i < freq.dim(); ++i) th[i] = freq.omega()[i] * t;
  return th;
}
}  // namespace

Sl2Matrix::Sl2Matrix(const Eigen::Matrix2d& m, double trace_tol) : m_(m) {
  if (std::abs(m.trace()) > trace_tol)
    throw std::invalid_argument("sl(2,R) matrix must be traceless");
}

Sl2Matrix Sl2Matrix::rotation_generator(double nu) {
  Eigen::Matrix2d m;
  m << 0.0, nu, -nu, 0.0;
  return Sl2Matrix(m);
}

Sl2Matrix Sl2Matrix::hyperbolic(double lambda) {
  Eigen::Matrix2d m;
  m << lambda, 0.0, 0.0, -lambda;
  return Sl2Matrix(m);
}

Sl2Matrix Sl2Matrix::parabolic(double kappa) {
  Eigen::Matrix2d m;
  m << 0.0, 0.0, kappa, 0.0;
  return Sl2Matrix(m);
}

AffineSystem::AffineSystem(FrequencyVector f, Sl2Matrix a, MatrixSeries fs,
                           std::array<QpFourierSeries, 2> drift)
    : freq(std::move(f)), A(a), F(std::move(fs)), b(std::move(drift)) {
  if (!(F.freq() == freq) || !(b[0].freq() == freq) || !(b[1].freq() == freq))
    throw std::invalid_argument("affine system parts disagree on frequency");
}

Eigen::Matrix2d AffineSystem::linear_at_theta(std::span<const double> theta) const {
  auto f = F.value_at(theta);
  Eigen::Matrix2d m = A.matrix();
  m(0, 0) += f[0][0];
  m(0, 1) += f[0][1];
  m(1, 0) += f[1][0];
  m(1, 1) += f[1][1];
  return m;
}

Eigen::Vector2d AffineSystem::drift_at_theta(std::span<const double> theta) const {
  return {evaluate(b[0], theta).real(), evaluate(b[1], theta).real()};
}

Eigen::Matrix2d AffineSystem::linear_at_time(double t) const {
  return linear_at_theta(theta_at_time(freq, t));
}

Eigen::Vector2d AffineSystem::drift_at_time(double t) const {
  return drift_at_theta(theta_at_time(freq, t));
}

nlohmann::json AffineSystem::to_json() const {
  nlohmann::json j;
  j["freq"] = freq.omega();
  j["A"] = {{A.matrix()(0, 0), A.matrix()(0, 1)}, {A.matrix()(1, 0), A.matrix()(1, 1)}};
  j["F"] = {{F.entry(0, 0).to_json(), F.entry(0, 1).to_json()},
            {F.entry(1, 0).to_json(), F.entry(1, 1).to_json()}};
  j["b"] = {b[0].to_json(), b[1].to_json()};
  return j;
}

const char* to_string(NormalFormClass c) {
  switch (c) {
    case NormalFormClass::elliptic: return "elliptic";
    case NormalFormClass::hyperbolic: return "hyperbolic";
    case NormalFormClass::parabolic: return "parabolic";
    case NormalFormClass::degenerate: return "degenerate";
  }
  return "?";
}

nlohmann::json NormalForm::to_json() const {
  nlohmann::json j;
  j["B"] = {{B.matrix()(0, 0), B.matrix()(0, 1)}, {B.matrix()(1, 0), B.matrix()(1, 1)}};
  j["w"] = {w[0], w[1]};
  j["C"] = C;
  j["class"] = to_string(cls);
  j["iota"] = iota;
  return j;
}

NormalFormClass classify(const Sl2Matrix& B, std::optional<double> tol_opt) {
  const double tol = tol_opt.value_or(1e-9 * (1.0 + B.norm()));
  if (B.norm() <= tol) return NormalFormClass::degenerate;
  const double d = B.det();
  if (d > tol) return NormalFormClass::elliptic;
  if (d < -tol) return NormalFormClass::hyperbolic;
  return NormalFormClass::parabolic;
}

AffineSystem build_paper_system(double nu, const QpFourierSeries& a20,
                                const QpFourierSeries& a11, const QpFourierSeries& a02,
                                const QpFourierSeries& b1, const QpFourierSeries& b2) {
  const FrequencyVector& f = a20.freq();
  for (const QpFourierSeries* s : {&a11, &a02, &b1, &b2})
    if (!(s->freq() == f)) throw std::invalid_argument("coefficient frequency mismatch");
  for (const QpFourierSeries* s : {&a20, &a11, &a02, &b1, &b2})
    if (!s->check_reality()) throw std::invalid_argument("coefficients must be real series");
  MatrixSeries F(a11, a02, scale(a20, -1.0), scale(a11, -1.0), true);
  return AffineSystem(f, Sl2Matrix::rotation_generator(nu), std::move(F),
                      {b2, scale(b1, -1.0)});
}

std::vector<TrajectorySample> flow(const AffineSystem& sys, const Eigen::Vector2d& x0,
                                   double T, double dt, double tol) {
  if (!(dt > 0)) throw std::invalid_argument("flow requires dt > 0");
  DormandPrince5 ode(
      [&sys](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const auto th = theta_at_time(sys.freq, t);
        const Eigen::Matrix2d m = sys.linear_at_theta(th);
        const Eigen::Vector2d b = sys.drift_at_theta(th);
        dy.resize(2);
        dy[0] = m(0, 0) * y[0] + m(0, 1) * y[1] + b[0];
        dy[1] = m(1, 0) * y[0] + m(1, 1) * y[1] + b[1];
      },
      tol, tol);
  Eigen::VectorXd y(2);
  y << x0[0], x0[1];
  std::vector<TrajectorySample> out;
  const int n = static_cast<int>(std::floor(T / dt + 0.5)) + 1;
  out.reserve(n);
  out.push_back({0.0, x0});
  for (int i = 1; i < n; ++i) {
    const double t0 = (i - 1) * dt, t1 = std::min(i * dt, T);
    ode.integrate(t0, t1, y);
    if (!y.allFinite()) throw std::runtime_error("flow: non-finite state");
    out.push_back({t1, Eigen::Vector2d(y[0], y[1])});
  }
  return out;
}

Eigen::Matrix2d fundamental_matrix(const AffineSystem& sys, double T, double tol) {
  DormandPrince5 ode(
      [&sys](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Eigen::Matrix2d m = sys.linear_at_time(t);
        Eigen::Map<const Eigen::Matrix2d> phi(y.data());
        Eigen::Matrix2d dphi = m * phi;
        dy.resize(4);
        Eigen::Map<Eigen::Matrix2d>(dy.data()) = dphi;
      },
      tol, tol);
  Eigen::VectorXd y(4);
  Eigen::Map<Eigen::Matrix2d>(y.data()) = Eigen::Matrix2d::Identity();
  ode.integrate(0.0, T, y);
  return Eigen::Map<Eigen::Matrix2d>(y.data());
}

void write_trajectory_csv(const std::vector<TrajectorySample>& traj,
                          const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,x,xi\n";
  char line[128];
  for (const auto& s : traj) {
    std::snprintf(line, sizeof(line), "%.12e,%.16e,%.16e\n", s.t, s.x[0], s.x[1]);
    os << line;
  }
}

RotationEstimate rotation_number(const FrequencyVector& freq, const Sl2Matrix& A,
                                 const MatrixSeries& F, double T, int n_directions,
                                 double tol) {
  if (!(T >= 1e3)) throw std::invalid_argument("rotation_number requires T >= 1e3");
  // phi' = M21 cos^2 - M12 sin^2 + (M22 - M11) sin cos; rho = -dphi/dt so the
  // oscillator [[0,nu],[-nu,0]] reports +nu.
  const bool constant = F.empty();
  std::vector<double> rhos;
  rhos.reserve(n_directions);
  for (int j = 0; j < n_directions; ++j) {
    const double phi0 = 2.0 * kPi * j / n_directions;
    DormandPrince5 ode(
        [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
          const Eigen::Matrix2d m =
              constant ? A.matrix() : A.matrix() + [&] {
                auto th = theta_at_time(freq, t);
                auto f = F.value_at(th);
                Eigen::Matrix2d fm;
                fm << f[0][0], f[0][1], f[1][0], f[1][1];
                return fm;
              }();
          const double c = std::cos(y[0]), s = std::sin(y[0]);
          dy.resize(1);
          dy[0] = m(1, 0) * c * c - m(0, 1) * s * s + (m(1, 1) - m(0, 0)) * s * c;
        },
        tol, tol);
    Eigen::VectorXd y(1);
    y << phi0;
    ode.integrate(0.0, T, y);
    rhos.push_back(-(y[0] - phi0) / T);
  }
  double lo = rhos[0], hi = rhos[0], sum = 0;
  for (double r : rhos) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
  }
  return {sum / rhos.size(), 0.5 * (hi - lo)};
}

double certify_dio_varrho(double rho, const FrequencyVector& freq, double sigma,
                          int n_max) {
  double best = std::abs(rho);  // n = 0 term
  const int d = freq.dim();
  std::vector<int> n(d, -n_max);
  while (true) {
    int abs1 = 0;
    double v = 0;
    for (int i = 0; i < d; ++i) {
      abs1 += std::abs(n[i]);
      v += n[i] * freq.omega()[i];
    }
    if (abs1 > 0 && abs1 <= n_max)
      best = std::min(best, std::abs(rho - 0.5 * v) * (1.0 + std::pow(abs1, sigma)));
    int i = 0;
    for (; i < d; ++i) {
      if (n[i] < n_max) {
        ++n[i];
        break;
      }
      n[i] = -n_max;
    }
    if (i == d) break;
  }
  return best;
}

namespace {

/// sup over the grid of |Dl - B l - p + R w|_2. The defect components are
/// assembled coefficient-wise so only two series touch the grid.
double defect_on_grid(const QpFourierSeries& p1, const QpFourierSeries& p2,
                      const ReductionCertificate& cert, const Eigen::Matrix2d& B,
                      const Eigen::Vector2d& w, int points_per_dim) {
  const auto& freq = p1.freq();
  const Eigen::Vector2d rw = cert.rotation * w;
  auto component = [&](int row, const QpFourierSeries& deriv, const QpFourierSeries& p,
                       double shift) {
    QpFourierSeries d = deriv;
    d = add(d, scale(cert.alpha, -B(row, 0)));
    d = add(d, scale(cert.beta, -B(row, 1)));
    d = add(d, scale(p, -1.0));
    QpFourierSeries cst = QpFourierSeries::constant(freq, shift, d.kind());
    return add(d, cst);
  };
  const auto d1 =
      component(0, directional_derivative(cert.alpha), p1, rw[0]);
  const auto d2 =
      component(1, directional_derivative(cert.beta), p2, rw[1]);
  ThetaGridEvaluator grid(freq, points_per_dim);
  const auto v1 = grid.evaluate(d1);
  const auto v2 = grid.evaluate(d2);
  double sup = 0;
  for (int i = 0; i < grid.total_points(); ++i)
    sup = std::max(sup, std::sqrt(std::norm(v1[i]) + std::norm(v2[i])));
  return sup;
}

void require_same_freq(const QpFourierSeries& p1, const QpFourierSeries& p2) {
  if (!(p1.freq() == p2.freq()))
    throw std::invalid_argument("p1/p2 frequency mismatch");
}

}  // namespace

double conjugacy_residual(const QpFourierSeries& p1, const QpFourierSeries& p2,
                          const HomologicalSolution& sol, int points_per_dim) {
  return defect_on_grid(p1, p2, sol.certificate, sol.normal_form.B.matrix(),
                        sol.normal_form.w, points_per_dim);
}

HomologicalSolution solve_hyperbolic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                     double lambda) {
  require_same_freq(p1, p2);
  if (!(lambda > 0)) throw std::invalid_argument("hyperbolic case needs lambda > 0");
  const auto& freq = p1.freq();
  QpFourierSeries alpha(freq, p1.kind()), beta(freq, p2.kind());
  for (const auto& [k, c] : p1.coeffs())
    alpha.set_coeff(k, 2.0 * c / Complex{-2.0 * lambda, freq.dot(k)});
  for (const auto& [k, c] : p2.coeffs())
    beta.set_coeff(k, 2.0 * c / Complex{2.0 * lambda, freq.dot(k)});

  HomologicalSolution sol{ReductionCertificate{alpha, beta}, NormalForm{}};
  sol.normal_form.B = Sl2Matrix::hyperbolic(lambda);
  sol.normal_form.cls = NormalFormClass::hyperbolic;
  sol.certificate.residual = conjugacy_residual(p1, p2, sol);
  return sol;
}

HomologicalSolution solve_parabolic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                    double kappa, double divisor_floor) {
  require_same_freq(p1, p2);
  if (kappa == 0.0) throw std::invalid_argument("parabolic case needs kappa != 0");
  const auto& freq = p1.freq();
  QpFourierSeries alpha(freq, p1.kind()), beta(freq, p2.kind());
  alpha.set_coeff(HarmonicIndex{}, -average(p2) / kappa);
  std::map<HarmonicIndex, bool> support;
  for (const auto& [k, c] : p1.coeffs()) support[k] = true;
  for (const auto& [k, c] : p2.coeffs()) support[k] = true;
  for (const auto& [k, unused] : support) {
    if (k.is_zero()) continue;
    const double kw = freq.dot(k);
    const Complex c1 = p1.coeff(k), c2 = p2.coeff(k);
    if (std::abs(kw) < divisor_floor) {
      if (std::abs(c1) < kNegligibleCoeff && std::abs(c2) < kNegligibleCoeff) continue;
      throw DivisorFloorError(k, kw);
    }
    alpha.set_coeff(k, 2.0 * c1 / Complex{0.0, kw});
    beta.set_coeff(k, -(2.0 * Complex{0.0, kw} * c2 + 4.0 * kappa * c1) / (kw * kw));
  }

  HomologicalSolution sol{ReductionCertificate{alpha, beta}, NormalForm{}};
  const double iota = average(p1).real();
  sol.normal_form.B = Sl2Matrix::parabolic(kappa);
  sol.normal_form.w = Eigen::Vector2d(iota, 0.0);
  sol.normal_form.iota = iota;
  sol.normal_form.cls = NormalFormClass::parabolic;
  sol.certificate.residual = conjugacy_residual(p1, p2, sol);
  return sol;
}

HomologicalSolution solve_elliptic(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                   double rho, const EllipticConfig& cfg) {
  require_same_freq(p1, p2);
  if (rho == 0.0) throw std::invalid_argument("elliptic case needs rho != 0");
  const auto& freq = p1.freq();
  QpFourierSeries alpha(freq, p1.kind()), beta(freq, p2.kind());

  std::map<HarmonicIndex, bool> support;
  for (const auto& [k, c] : p1.coeffs()) support[k] = true;
  for (const auto& [k, c] : p2.coeffs()) support[k] = true;

  const double p1r = p1.strip_bound(cfg.decay_r);
  const double p2r = p2.strip_bound(cfg.decay_r);
  for (const auto& [k, unused] : support) {
    const double kw = freq.dot(k);
    const double denom = 4.0 * rho * rho - kw * kw;
    const Complex c1 = p1.coeff(k), c2 = p2.coeff(k);
    if (std::min(std::abs(rho - 0.5 * kw), std::abs(rho + 0.5 * kw)) < cfg.divisor_floor) {
      if (std::abs(c1) < kNegligibleCoeff && std::abs(c2) < kNegligibleCoeff) continue;
      throw DivisorFloorError(k, denom);
    }
    const Complex ikw{0.0, kw};
    const Complex ak = (2.0 * ikw * c1 + 4.0 * rho * c2) / denom;
    const Complex bk = (2.0 * ikw * c2 - 4.0 * rho * c1) / denom;
    const double bound = (1.0 + std::pow(k.abs1(), cfg.sigma)) / (2.0 * cfg.dio_constant) *
                         std::exp(-0.5 * k.abs1() * cfg.decay_r) * (p1r + p2r);
    if (std::abs(ak) > bound || std::abs(bk) > bound)
      throw std::runtime_error("elliptic coefficient decay bound violated at |k|=" +
                               std::to_string(k.abs1()));
    alpha.set_coeff(k, ak);
    beta.set_coeff(k, bk);
  }

  HomologicalSolution sol{ReductionCertificate{alpha, beta}, NormalForm{}};
  sol.normal_form.B = Sl2Matrix::rotation_generator(rho);
  sol.normal_form.cls = NormalFormClass::elliptic;
  sol.certificate.residual = conjugacy_residual(p1, p2, sol);
  return sol;
}

HomologicalSolution solve_degenerate(const QpFourierSeries& p1, const QpFourierSeries& p2,
                                     double divisor_floor) {
  require_same_freq(p1, p2);
  const auto& freq = p1.freq();
  QpFourierSeries alpha(freq, p1.kind()), beta(freq, p2.kind());
  auto fill = [&](const QpFourierSeries& p, QpFourierSeries& out) {
    for (const auto& [k, c] : p.coeffs()) {
      if (k.is_zero()) continue;
      const double kw = freq.dot(k);
      if (std::abs(kw) < divisor_floor) {
        if (std::abs(c) < kNegligibleCoeff) continue;
        throw DivisorFloorError(k, kw);
      }
      out.set_coeff(k, Complex{0.0, -2.0} * c / kw);
    }
  };
  fill(p1, alpha);
  fill(p2, beta);

  const double m1 = average(p1).real(), m2 = average(p2).real();
  const double iota = std::hypot(m1, m2);
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  if (iota > 0.0) R << m1 / iota, -m2 / iota, m2 / iota, m1 / iota;

  HomologicalSolution sol{ReductionCertificate{alpha, beta}, NormalForm{}};
  sol.certificate.rotation = R;
  sol.normal_form.B = Sl2Matrix();
  sol.normal_form.w = Eigen::Vector2d(iota, 0.0);
  sol.normal_form.iota = iota;
  sol.normal_form.cls = NormalFormClass::degenerate;
  sol.certificate.residual = conjugacy_residual(p1, p2, sol);
  return sol;
}

PhaseCorrection phase_correction(const std::array<QpFourierSeries, 2>& l,
                                 const std::array<QpFourierSeries, 2>& b1,
                                 const std::array<QpFourierSeries, 2>& b2,
                                 double divisor_floor) {
  // F = 1/2 <l, J(b1+b2)> with J = [[0,-1],[1,0]]:
  //   F = 1/2 (-l1 (b1+b2)_2 + l2 (b1+b2)_1)
  const auto s1 = add(b1[0], b2[0]);
  const auto s2 = add(b1[1], b2[1]);
  const auto F = scale(add(multiply(l[1], s1), scale(multiply(l[0], s2), -1.0)), 0.5);
  const double C = average(F).real();

  QpFourierSeries eps(F.freq(), F.kind(), F.k_max());
  for (const auto& [k, c] : F.coeffs()) {
    if (k.is_zero()) continue;
    const double kw = F.freq().dot(k);
    if (std::abs(kw) < divisor_floor) {
      if (std::abs(c) < kNegligibleCoeff) continue;
      throw DivisorFloorError(k, kw);
    }
    eps.set_coeff(k, Complex{0.0, -2.0} * c / kw);
  }

  // residual of d/dt eps = F - C on the grid
  const int pts = F.freq().dim() >= 2 ? 200 : 200;
  ThetaGridEvaluator grid(F.freq(), pts);
  const auto de = grid.evaluate(directional_derivative(eps));
  const auto vf = grid.evaluate(F);
  double sup = 0;
  for (int i = 0; i < grid.total_points(); ++i)
    sup = std::max(sup, std::abs(de[i] - (vf[i] - C)));
  return {C, eps, sup};
}

}  // namespace oscine
