#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace oscine {

/// Adaptive Dormand-Prince 5(4). State is a VectorXd; the right-hand side is
/// f(t, y, dydt). Steps never pass t_end, so callers can land exactly on
/// sample times.
class DormandPrince5 {
 public:
  using Rhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

  explicit DormandPrince5(Rhs rhs, double rtol = 1e-13, double atol = 1e-13)
      : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

  /// Advances y from t to t_end in place.
  void integrate(double t, double t_end, Eigen::VectorXd& y) {
    if (t_end == t) return;
    const double dir = t_end > t ? 1.0 : -1.0;
    double h = h_init_ > 0 ? dir * h_init_ : dir * 1e-3 * (std::abs(t_end - t) + 1.0);
    const int n = static_cast<int>(y.size());
    Eigen::VectorXd k[7], y5(n), y4(n), ytmp(n);
    for (auto& v : k) v.resize(n);
    rhs_(t, y, k[0]);
    long guard = 0;
    while (dir * (t_end - t) > 0) {
      if (++guard > 200'000'000L) throw std::runtime_error("ode: step limit exceeded");
      h = dir * std::min(std::abs(h), std::abs(t_end - t));
      for (int s = 1; s < 7; ++s) {
        ytmp = y;
        for (int j = 0; j < s; ++j) ytmp += h * a_[s][j] * k[j];
        rhs_(t + c_[s] * h, ytmp, k[s]);
      }
      y5 = y;
      for (int j = 0; j < 7; ++j)
        if (b5_[j] != 0.0) y5 += h * b5_[j] * k[j];
      double err = 0;
      for (int i = 0; i < n; ++i) {
        double e = 0;
        for (int j = 0; j < 7; ++j) e += (b5_[j] - b4_[j]) * k[j][i];
        const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(h * e) / sc);
      }
      if (err <= 1.0) {
        t += h;
        y = y5;
        k[0] = k[6];  // FSAL
        if (!y.allFinite()) throw std::runtime_error("ode: non-finite state");
      } else {
        rhs_(t, y, k[0]);
      }
      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
      if (std::abs(h) < 1e-14 * (std::abs(t) + 1.0))
        throw std::runtime_error("ode: step size underflow");
    }
    h_init_ = std::abs(h);
  }

 private:
  Rhs rhs_;
  double rtol_, atol_;
  double h_init_ = -1.0;

  static constexpr double c_[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a_[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b5_[7] = {35.0 / 384,      0.0,          500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784,  11.0 / 84,    0.0};
  static constexpr double b4_[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

}  // namespace oscine
