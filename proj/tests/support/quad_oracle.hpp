#pragma once

// Gauss-Hermite quadrature oracle for oscillator-basis matrix elements,
// shared by the unit tests and the acceptance suite. Lives in test code only.

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oscine/quantum.hpp"

namespace oscine::testing {

inline Eigen::VectorXd oscillator_eigenfunctions(double x, int nmax) {
  Eigen::VectorXd phi(nmax + 1);
  phi[0] = std::pow(3.14159265358979323846, -0.25) * std::exp(-0.5 * x * x);
  if (nmax >= 1) phi[1] = std::sqrt(2.0) * x * phi[0];
  for (int n = 1; n < nmax; ++n)
    phi[n + 1] =
        std::sqrt(2.0 / (n + 1.0)) * x * phi[n] - std::sqrt(n / (n + 1.0)) * phi[n - 1];
  return phi;
}

/// Gauss-Hermite rule carrying the plain-dx weights w_i e^{x_i^2}. Those are
/// the reciprocal Christoffel sums 1/sum_k phi_k(x_i)^2, which stay O(1)
/// where the raw Golub-Welsch weights underflow past the eigensolver noise.
struct GaussHermiteRule {
  Eigen::VectorXd x, w;  // w already includes the e^{x^2} unweighting
  explicit GaussHermiteRule(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double b = std::sqrt(0.5 * i);
      j(i, i - 1) = b;
      j(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    x = es.eigenvalues();
    w.resize(n);
    for (int i = 0; i < n; ++i)
      w[i] = 1.0 / oscillator_eigenfunctions(x[i], n - 1).squaredNorm();
  }
};

inline Eigen::VectorXd oscillator_eigenfunction_derivs(double x, int nmax) {
  const auto phi = oscillator_eigenfunctions(x, nmax);
  Eigen::VectorXd d(nmax + 1);
  for (int n = 0; n <= nmax; ++n)
    d[n] = (n > 0 ? std::sqrt(2.0 * n) * phi[n - 1] : 0.0) - x * phi[n];
  return d;
}

/// Matrix elements of the Weyl operator of a degree-2 symbol by quadrature.
inline Eigen::MatrixXcd quadrature_matrix(const Degree2Symbol& sym, int dim) {
  const Complex i1{0.0, 1.0};
  GaussHermiteRule gh(2 * dim + 24);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < gh.x.size(); ++q) {
    const double x = gh.x[q];
    const double wt = gh.w[q];
    const auto phi = oscillator_eigenfunctions(x, dim - 1);
    const auto dphi = oscillator_eigenfunction_derivs(x, dim - 1);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        Complex v = (0.5 * sym.a20 * x * x + sym.b1 * x + sym.c) * phi[r] * phi[c];
        v += sym.b2 * (-i1) * phi[r] * dphi[c];
        v += 0.5 * sym.a02 * dphi[r] * dphi[c];
        v += sym.a11 * (-i1) * (x * phi[r] * dphi[c] + 0.5 * phi[r] * phi[c]);
        m(r, c) += wt * v;
      }
  }
  return m;
}

}  // namespace oscine::testing
