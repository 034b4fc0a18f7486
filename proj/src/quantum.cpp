#include "oscine/quantum.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "oscine/ode.hpp"

namespace oscine {

namespace {
constexpr double kPi = 3.14159265358979323846;
const Complex kI{0.0, 1.0};
}  // namespace

double HermiteState::sobolev(double s) const {
  double acc = 0;
  for (int n = 0; n < size(); ++n) acc += std::pow(2.0 * n + 1.0, s) * std::norm(c[n]);
  return std::sqrt(acc);
}

double HermiteState::tail_mass() const {
  const int n = size();
  const int start = n - n / 8;
  double tail = 0, total = 0;
  for (int i = 0; i < n; ++i) {
    const double m = std::norm(c[i]);
    total += m;
    if (i >= start) tail += m;
  }
  return total > 0 ? tail / total : 0.0;
}

HermiteState HermiteState::basis_state(int n, int dim) {
  HermiteState u;
  u.c = Eigen::VectorXcd::Zero(dim);
  u.c[n] = 1.0;
  return u;
}

nlohmann::json HermiteState::to_json() const {
  nlohmann::json j;
  std::vector<double> re(size()), im(size());
  for (int n = 0; n < size(); ++n) {
    re[n] = c[n].real();
    im[n] = c[n].imag();
  }
  j["n"] = size();
  j["re"] = re;
  j["im"] = im;
  return j;
}

HermiteState HermiteState::from_json(const nlohmann::json& j) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::invalid_argument("re/im length mismatch");
  HermiteState u;
  u.c.resize(re.size());
  for (std::size_t n = 0; n < re.size(); ++n) u.c[n] = Complex{re[n], im[n]};
  return u;
}

double sobolev_norm(const HermiteState& u, double s) { return u.sobolev(s); }

double relative_sobolev_distance(const HermiteState& u, const HermiteState& v, double s) {
  const int n = std::max(u.size(), v.size());
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const Complex a = i < u.size() ? u.c[i] : Complex{0, 0};
    const Complex b = i < v.size() ? v.c[i] : Complex{0, 0};
    acc += std::pow(2.0 * i + 1.0, s) * std::norm(a - b);
  }
  return std::sqrt(acc) / v.sobolev(s);
}

BandedOperator::BandedOperator(int n)
    : n_(n),
      diag_(Eigen::VectorXd::Zero(n)),
      off1_(Eigen::VectorXcd::Zero(std::max(0, n - 1))),
      off2_(Eigen::VectorXcd::Zero(std::max(0, n - 2))) {}

void BandedOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.resize(n_);
  y.array() = x.array() * diag_.array().cast<Complex>();
  if (n_ >= 2) {
    y.head(n_ - 1).array() += off1_.array() * x.tail(n_ - 1).array();
    y.tail(n_ - 1).array() += off1_.conjugate().array() * x.head(n_ - 1).array();
  }
  if (n_ >= 3) {
    y.head(n_ - 2).array() += off2_.array() * x.tail(n_ - 2).array();
    y.tail(n_ - 2).array() += off2_.conjugate().array() * x.head(n_ - 2).array();
  }
}

void BandedOperator::apply_scaled(const Eigen::VectorXcd& x, double mu, double w,
                                  Eigen::VectorXcd& y) const {
  y.resize(n_);
  y.array() = x.array() * ((diag_.array() - mu) / w).cast<Complex>();
  const double iw = 1.0 / w;
  if (n_ >= 2) {
    y.head(n_ - 1).array() += iw * off1_.array() * x.tail(n_ - 1).array();
    y.tail(n_ - 1).array() += iw * off1_.conjugate().array() * x.head(n_ - 1).array();
  }
  if (n_ >= 3) {
    y.head(n_ - 2).array() += iw * off2_.array() * x.tail(n_ - 2).array();
    y.tail(n_ - 2).array() += iw * off2_.conjugate().array() * x.head(n_ - 2).array();
  }
}

Eigen::MatrixXcd BandedOperator::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    m(i, i) = diag_[i];
    if (i + 1 < n_) {
      m(i, i + 1) = off1_[i];
      m(i + 1, i) = std::conj(off1_[i]);
    }
    if (i + 2 < n_) {
      m(i, i + 2) = off2_[i];
      m(i + 2, i) = std::conj(off2_[i]);
    }
  }
  return m;
}

void BandedOperator::spectral_bounds(double& lo, double& hi) const {
  lo = diag_[0];
  hi = diag_[0];
  for (int i = 0; i < n_; ++i) {
    double r = 0;
    if (i + 1 < n_) r += std::abs(off1_[i]);
    if (i >= 1) r += std::abs(off1_[i - 1]);
    if (i + 2 < n_) r += std::abs(off2_[i]);
    if (i >= 2) r += std::abs(off2_[i - 2]);
    lo = std::min(lo, diag_[i] - r);
    hi = std::max(hi, diag_[i] + r);
  }
}

BandedOperator weyl_quantize(const Degree2Symbol& sym, int n) {
  if (n < 4) throw std::invalid_argument("weyl_quantize requires dimension >= 4");
  BandedOperator h(n);
  // x   -> sqrt((n+1)/2) on the first off-diagonal
  // xi  -> -i sqrt((n+1)/2)
  // x^2, xi^2 -> (2n+1)/2 on the diagonal, +-sqrt((n+1)(n+2))/2 on the second
  // (x xi)_W = -(i/2)(a^2 - a+^2)
  for (int i = 0; i < n; ++i)
    h.diag(i) = 0.25 * (sym.a20 + sym.a02) * (2.0 * i + 1.0) + sym.c;
  for (int i = 0; i + 1 < n; ++i)
    h.off1(i) = std::sqrt(0.5 * (i + 1)) * Complex{sym.b1, -sym.b2};
  for (int i = 0; i + 2 < n; ++i)
    h.off2(i) = std::sqrt(static_cast<double>(i + 1) * (i + 2)) *
                Complex{0.25 * (sym.a20 - sym.a02), -0.5 * sym.a11};
  return h;
}

TailBudgetError::TailBudgetError(double t)
    : std::runtime_error("Hermite tail budget exceeded at t = " + std::to_string(t) +
                         " with the dimension cap reached"),
      t_fail(t) {}

std::vector<double> bessel_j_array(double x, int kmax) {
  std::vector<double> j(kmax + 1, 0.0);
  if (std::abs(x) < 1e-300) {
    j[0] = 1.0;
    return j;
  }
  const double ax = std::abs(x);
  const int start = std::max(kmax, static_cast<int>(ax)) + 40 +
                    static_cast<int>(3.0 * std::pow(ax + 1.0, 2.0 / 3.0));
  std::vector<double> tmp(start + 2, 0.0);
  tmp[start + 1] = 0.0;
  tmp[start] = 1e-300;
  for (int k = start; k >= 1; --k) {
    tmp[k - 1] = (2.0 * k / x) * tmp[k] - tmp[k + 1];
    if (std::abs(tmp[k - 1]) > 1e280) {
      for (int m = k - 1; m <= start + 1; ++m) tmp[m] *= 1e-280;
    }
  }
  double norm = tmp[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * tmp[k];
  for (int k = 0; k <= kmax; ++k) j[k] = tmp[k] / norm;
  return j;
}

namespace {

/// y <- exp(-i dt H) y via Chebyshev expansion on the Gershgorin interval.
void apply_exponential(const BandedOperator& h, double dt, Eigen::VectorXcd& y,
                       double tol) {
  double lo, hi;
  h.spectral_bounds(lo, hi);
  const double mu = 0.5 * (hi + lo);
  const double w = std::max(0.5 * (hi - lo), 1e-12);
  const double s = dt * w;

  int kmax = static_cast<int>(std::abs(s) + 10.0 + 4.0 * std::cbrt(std::abs(s) + 1.0) *
                                                      std::pow(std::log(1.0 / tol), 2.0 / 3.0));
  kmax = std::max(kmax, 8);
  const auto bj = bessel_j_array(s, kmax);

  const int n = h.size();
  Eigen::VectorXcd tk_prev = y;                       // T_0(Ht) y
  Eigen::VectorXcd tk(n), tmp(n);
  h.apply_scaled(y, mu, w, tk);                       // T_1
  Eigen::VectorXcd acc = bj[0] * tk_prev;
  Complex ik{0.0, -1.0};
  acc += 2.0 * ik * bj[1] * tk;
  for (int k = 2; k <= kmax; ++k) {
    h.apply_scaled(tk, mu, w, tmp);
    tmp = 2.0 * tmp - tk_prev;
    tk_prev.swap(tk);
    tk.swap(tmp);
    ik *= Complex{0.0, -1.0};
    const double c = 2.0 * bj[k];
    if (std::abs(c) > tol || k < 4) acc += (ik * c) * tk;
    if (k > 8 && std::abs(bj[k]) < tol && std::abs(bj[k - 1]) < tol &&
        std::abs(bj[k - 2]) < tol)
      break;
  }
  y = std::polar(1.0, -dt * mu) * acc;
}

HermiteState embed(const HermiteState& u, int n) {
  HermiteState v;
  v.c = Eigen::VectorXcd::Zero(n);
  v.c.head(u.size()) = u.c;
  return v;
}

}  // namespace

namespace {

double tail_mass_of(const Eigen::VectorXcd& y) {
  const int n = static_cast<int>(y.size());
  const int start = n - n / 8;
  double tail = 0, total = 0;
  for (int i = 0; i < n; ++i) {
    const double m = std::norm(y[i]);
    total += m;
    if (i >= start) tail += m;
  }
  return total > 0 ? tail / total : 0.0;
}

}  // namespace

PropagateResult propagate(const SymbolPath& symbol, const HermiteState& u0, double T,
                          double sample_dt, double norm_s, double state_dt,
                          const PropagateOptions& opts) {
  if (!(opts.dt > 0) || opts.dt > 1e-2 + 1e-15)
    throw std::invalid_argument("propagate: dt must lie in (0, 1e-2]");
  if (opts.order != 2 && opts.order != 4)
    throw std::invalid_argument("propagate: order must be 2 or 4");
  int n = std::max(opts.n0, u0.size());
  Eigen::VectorXcd y = embed(u0, n).c;

  PropagateResult out;
  const long n_steps = std::lround(T / opts.dt);
  const double dt = T / std::max<long>(n_steps, 1);
  const long sample_every = std::max<long>(1, std::lround(sample_dt / dt));
  const long state_every = state_dt > 0 ? std::max<long>(1, std::lround(state_dt / dt)) : 0;

  auto record = [&](double t) {
    HermiteState u{y};
    out.norms.push_back({t, u.l2(), u.sobolev(norm_s), u.tail_mass()});
  };
  record(0.0);
  if (state_every > 0) out.states.push_back({0.0, HermiteState{y}});

  // Gauss-node weights of the fourth-order two-exponential scheme; the
  // exponential weighting the early node more is applied first.
  const double s3 = std::sqrt(3.0);
  const double a_small = (3.0 - 2.0 * s3) / 12.0;
  const double a_big = (3.0 + 2.0 * s3) / 12.0;

  Eigen::VectorXcd y_prev;
  for (long step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    y_prev = y;
    bool accepted = false;
    while (!accepted) {
      if (opts.order == 2) {
        const BandedOperator h = weyl_quantize(symbol(t + 0.5 * dt), n);
        apply_exponential(h, dt, y, opts.cheb_tol);
      } else {
        const Degree2Symbol s1 = symbol(t + (0.5 - s3 / 6.0) * dt);
        const Degree2Symbol s2 = symbol(t + (0.5 + s3 / 6.0) * dt);
        apply_exponential(
            weyl_quantize(s1.scaled(a_big) + s2.scaled(a_small), n), dt, y, opts.cheb_tol);
        apply_exponential(
            weyl_quantize(s1.scaled(a_small) + s2.scaled(a_big), n), dt, y, opts.cheb_tol);
      }
      if (tail_mass_of(y) <= opts.tail_budget) {
        accepted = true;
      } else {
        if (n >= opts.n_max) throw TailBudgetError(t);
        n = std::min(2 * n, opts.n_max);
        Eigen::VectorXcd grown = Eigen::VectorXcd::Zero(n);
        grown.head(y_prev.size()) = y_prev;
        y = grown;
        y_prev = grown;
      }
    }
    const double t1 = (step + 1) * dt;
    if ((step + 1) % sample_every == 0 || step + 1 == n_steps) record(t1);
    if (state_every > 0 && ((step + 1) % state_every == 0 || step + 1 == n_steps))
      out.states.push_back({t1, HermiteState{y}});
  }
  out.final_dim = n;
  return out;
}

namespace {

/// Classical parameters carried by the evolving Gaussian: center (q,p),
/// tangent pair (Q,P), action S, and the continuous branch of log Q.
struct PacketParams {
  double q, p, S;
  Complex Q, P, logQ;
};

PacketParams evolve_packet(const SymbolPath& symbol, const GaussianPacket& g0, double t,
                           double ode_tol) {
  // y = [q, p, ReQ, ImQ, ReP, ImP, S, Re logQ, Im logQ]
  DormandPrince5 ode(
      [&symbol](double tt, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Degree2Symbol s = symbol(tt);
        const double q = y[0], p = y[1];
        const Complex Q{y[2], y[3]}, P{y[4], y[5]};
        const double dq = s.a11 * q + s.a02 * p + s.b2;
        const double dp = -(s.a20 * q + s.a11 * p + s.b1);
        const Complex dQ = s.a11 * Q + s.a02 * P;
        const Complex dP = -(s.a20 * Q + s.a11 * P);
        const double h = 0.5 * (s.a20 * q * q + 2.0 * s.a11 * q * p + s.a02 * p * p) +
                         s.b1 * q + s.b2 * p + s.c;
        const Complex dlogQ = Q == Complex{0, 0} ? Complex{0, 0} : dQ / Q;
        dy.resize(9);
        dy << dq, dp, dQ.real(), dQ.imag(), dP.real(), dP.imag(), p * dq - h,
            dlogQ.real(), dlogQ.imag();
      },
      ode_tol, ode_tol);
  Eigen::VectorXd y(9);
  y << g0.q, g0.p, 1.0, 0.0, g0.A.real(), g0.A.imag(), 0.0, 0.0, 0.0;
  ode.integrate(0.0, t, y);
  return {y[0], y[1], y[6], Complex{y[2], y[3]}, Complex{y[4], y[5]}, Complex{y[7], y[8]}};
}

/// Overlaps J_n = <phi_n, W e^{i A/2 (x-q)^2 + i p (x-q)}> by the three-term
/// recurrence; log_w carries the (possibly tiny) overall scale.
Eigen::VectorXcd gaussian_overlaps(Complex log_w, Complex A, double q, double p, int n) {
  Eigen::VectorXcd out(n);
  const Complex one_miA = 1.0 - kI * A;
  // Gaussian integral against phi_0: exponent -(1-iA)x^2/2 + bx + e0
  const Complex b = kI * (p - A * q);
  const Complex e0 = b * b / (2.0 * one_miA) + kI * A * q * q / 2.0 - kI * p * q;
  Complex log_j0 = log_w - 0.25 * std::log(kPi) + 0.5 * std::log(2.0 * kPi / one_miA) + e0;

  // scaled recursion: keep j in a sane range, fold magnitude into log_j0
  Complex jm1{0.0, 0.0}, j0{1.0, 0.0};
  const Complex up = 1.0 + kI * A;
  const Complex down = one_miA;
  const Complex lin = kI * (p - A * q);
  for (int k = 0; k < n; ++k) {
    out[k] = j0 * std::exp(log_j0);
    const double ss0 = std::sqrt(0.5 * k);
    const double ss1 = std::sqrt(0.5 * (k + 1));
    const Complex next = (ss0 * up * jm1 + lin * j0) / (ss1 * down);
    jm1 = j0;
    j0 = next;
    const double mag = std::abs(j0);
    if (mag > 1e200 || (mag > 0 && mag < 1e-200)) {
      const double shift = std::log(mag);
      const double sc = std::exp(-shift);
      j0 *= sc;
      jm1 *= sc;
      log_j0 += shift;
    }
  }
  return out;
}

}  // namespace

HermiteState expand_gaussian(const GaussianPacket& g, int n) {
  if (!(g.A.imag() > 0)) throw std::invalid_argument("Gaussian needs Im A > 0");
  const Complex log_w = 0.25 * std::log(g.A.imag() / kPi);
  HermiteState u;
  u.c = gaussian_overlaps(log_w, g.A, g.q, g.p, n);
  return u;
}

SymbolPath hamiltonian_symbol(const AffineSystem& sys, std::function<double(double)> scalar) {
  return [sys, scalar](double t) {
    // h = 1/2 <X, J M X> + <X, J b> + c with M = A + F(omega t):
    // the symmetric matrix J M carries (a20, a11; a11, a02) and
    // J b = (-b_2, b_1) carries the linear part.
    const Eigen::Matrix2d m = sys.linear_at_time(t);
    const Eigen::Vector2d b = sys.drift_at_time(t);
    Degree2Symbol sym;
    sym.a20 = -m(1, 0);
    sym.a11 = 0.5 * (m(0, 0) - m(1, 1));
    sym.a02 = m(0, 1);
    sym.b1 = -b[1];
    sym.b2 = b[0];
    sym.c = scalar ? scalar(t) : 0.0;
    return sym;
  };
}

HermiteState coherent_oracle(const AffineSystem& sys, const GaussianPacket& packet,
                             double t, int n, int n_max, double tail_tol, double ode_tol) {
  return coherent_oracle(hamiltonian_symbol(sys), packet, t, n, n_max, tail_tol, ode_tol);
}

HermiteState coherent_oracle(const SymbolPath& symbol, const GaussianPacket& g0, double t,
                             int n, int n_max, double tail_tol, double ode_tol) {
  if (!(g0.A.imag() > 0)) throw std::invalid_argument("Gaussian needs Im A > 0");
  const PacketParams pp = evolve_packet(symbol, g0, t, ode_tol);
  const Complex A = pp.P / pp.Q;
  // W = (Im A0/pi)^(1/4) e^{iS} Q^{-1/2}
  const Complex log_w =
      0.25 * std::log(g0.A.imag() / kPi) + kI * pp.S - 0.5 * pp.logQ;
  while (true) {
    HermiteState u;
    u.c = gaussian_overlaps(log_w, A, pp.q, pp.p, n);
    const double miss = std::abs(1.0 - u.l2() * u.l2());
    if (miss < tail_tol && u.tail_mass() < tail_tol) return u;
    if (n >= n_max)
      throw std::runtime_error("coherent_oracle: expansion tail exceeds budget at n_max");
    n = std::min(2 * n, n_max);
  }
}

Complex BivariatePoly::eval(double t, double y) const {
  // Horner in t, inner Horner in y
  Complex acc{0.0, 0.0};
  for (int a = deg_t(); a >= 0; --a) {
    Complex row{0.0, 0.0};
    for (int j = deg_y(); j >= 0; --j) row = row * y + c(a, j);
    acc = acc * t + row;
  }
  return acc;
}

DerivativePolynomials derivative_polynomials(int alpha, double kappa, double iota) {
  if (alpha < 1 || alpha > 12)
    throw std::invalid_argument("derivative_polynomials: alpha must lie in 1..12");
  const Complex c2 = 0.5 * kI * iota * kappa;  // coefficient of t^2
  const Complex c1 = kI * kappa;               // coefficient of t y
  // P_2 = c2 t^2 + c1 t y;   P_{2(a+1)} = (c2 t^2 + c1 t y) P_{2a} + dP_{2a}/dy
  BivariatePoly p;
  p.c = Eigen::MatrixXcd::Zero(3, 2);
  p.c(2, 0) = c2;
  p.c(1, 1) = c1;
  for (int a = 1; a < alpha; ++a) {
    const int dt = p.deg_t(), dy = p.deg_y();
    BivariatePoly np;
    np.c = Eigen::MatrixXcd::Zero(dt + 3, dy + 2);
    for (int i = 0; i <= dt; ++i)
      for (int j = 0; j <= dy; ++j) {
        const Complex v = p.c(i, j);
        if (v == Complex{0, 0}) continue;
        np.c(i + 2, j) += c2 * v;
        np.c(i + 1, j + 1) += c1 * v;
        if (j >= 1) np.c(i, j - 1) += static_cast<double>(j) * v;
      }
    p = np;
  }
  DerivativePolynomials out;
  out.p = p;
  out.leading = p.c(2 * alpha, 0);
  out.q.resize(2 * alpha - 1);
  for (int a = 1; a <= 2 * alpha - 1; ++a) {
    Eigen::VectorXcd qa = p.c.row(a).transpose();
    out.q[a - 1] = qa;
    for (int j = 0; j < qa.size(); ++j)
      if (qa[j] != Complex{0, 0} && j > 2 * alpha - 1)
        throw std::logic_error("Q degree bound violated");
  }
  return out;
}

}  // namespace oscine
