#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "oscine/classical.hpp"

using namespace oscine;

namespace {
constexpr double kPi = 3.14159265358979323846;

QpFourierSeries random_real_series(const FrequencyVector& freq, std::mt19937_64& rng,
                                   int k_support = 4, double decay = 0.6,
                                   double amp = 0.5) {
  std::normal_distribution<double> gauss;
  QpFourierSeries p(freq);
  p.set_coeff(HarmonicIndex{}, amp * gauss(rng));
  const int d = freq.dim();
  std::vector<int> k(d, 0);
  auto push = [&]() {
    int abs1 = 0, lead = 0;
    for (int i = 0; i < d; ++i) {
      abs1 += std::abs(k[i]);
      if (lead == 0) lead = k[i];
    }
    if (abs1 == 0 || abs1 > k_support || lead < 0) return;
    p.add_real_harmonic(k, 0.5 * amp * std::exp(-decay * abs1) * Complex{gauss(rng), gauss(rng)});
  };
  if (d == 1) {
    for (k[0] = -k_support; k[0] <= k_support; ++k[0]) push();
  } else {
    for (k[0] = -k_support; k[0] <= k_support; ++k[0])
      for (k[1] = -k_support; k[1] <= k_support; ++k[1]) push();
  }
  return p;
}

/// The time periodic example system: A = [[0,1],[-1,0]],
/// F(t) = kappa [[cs, -s^2],[c^2, -cs]], drift (-2 iota cos t, 0).
AffineSystem example_affine(double kappa, double iota) {
  const auto freq = FrequencyVector::periodic();
  // cos^2 = 1/2 + cos(2t)/2, sin^2 = 1/2 - cos(2t)/2, cs = sin(2t)/2;
  // the symbol coefficients of the displayed system
  auto cos2 = QpFourierSeries::constant(freq, 0.5);
  cos2.add_real_harmonic(std::vector<int>{4}, 0.25);
  auto sin2 = QpFourierSeries::constant(freq, 0.5);
  sin2.add_real_harmonic(std::vector<int>{4}, -0.25);
  auto cs = QpFourierSeries::sine(freq, std::vector<int>{4}, 0.5);
  auto cost = QpFourierSeries::cosine(freq, std::vector<int>{2});
  auto zero = QpFourierSeries(freq);
  return build_paper_system(1.0, scale(cos2, -kappa), scale(cs, kappa),
                            scale(sin2, -kappa), zero, scale(cost, -2.0 * iota));
}
}  // namespace

TEST_CASE("sl(2,R) wrapper rejects nonzero trace") {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, 0.0, -1.0 + 1e-10;
  CHECK_THROWS_AS(Sl2Matrix{m}, std::invalid_argument);
  m(1, 1) = -1.0;
  CHECK_NOTHROW(Sl2Matrix{m});
}

TEST_CASE("classification by the sign of det B") {
  CHECK(classify(Sl2Matrix::rotation_generator(1.0)) == NormalFormClass::elliptic);
  CHECK(classify(Sl2Matrix::parabolic(0.5)) == NormalFormClass::parabolic);
  CHECK(classify(Sl2Matrix()) == NormalFormClass::degenerate);
  CHECK(classify(Sl2Matrix::hyperbolic(0.3)) == NormalFormClass::hyperbolic);
}

TEST_CASE("build_paper_system: unperturbed structure and pure rotation") {
  const auto freq = FrequencyVector::periodic();
  const QpFourierSeries zero(freq);
  const auto sys = build_paper_system(1.0, zero, zero, zero, zero, zero);
  CHECK(sys.F.empty());
  CHECK(sys.A.matrix()(0, 1) == doctest::Approx(1.0));
  CHECK(sys.A.matrix()(1, 0) == doctest::Approx(-1.0));
  const auto traj = flow(sys, {1.0, 0.0}, 2.0 * kPi, 2.0 * kPi / 8.0);
  const auto& last = traj.back().x;
  CHECK((last - Eigen::Vector2d(1.0, 0.0)).norm() < 1e-9);
}

TEST_CASE("build_paper_system: symmetric quadratic slots into F") {
  const auto freq = FrequencyVector::periodic();
  const QpFourierSeries zero(freq);
  const auto c = QpFourierSeries::cosine(freq, std::vector<int>{2}, 0.7);
  const auto sys = build_paper_system(1.0, c, zero, c, zero, zero);
  for (double t : {0.0, 0.4, 1.9}) {
    const double th[1] = {t};
    const double cv = evaluate(c, th).real();
    const auto m = sys.F.value_at(th);
    CHECK(m[0][0] == doctest::Approx(0.0));
    CHECK(m[0][1] == doctest::Approx(cv));
    CHECK(m[1][0] == doctest::Approx(-cv));
    CHECK(m[1][1] == doctest::Approx(0.0));
  }
}

TEST_CASE("the time periodic example matches its displayed matrix form") {
  const double kappa = 0.5, iota = 1.0;
  const auto sys = example_affine(kappa, iota);
  for (double t : {0.0, 0.3, 1.1, 2.9}) {
    const double c = std::cos(t), s = std::sin(t);
    Eigen::Matrix2d expected;
    expected << kappa * c * s, 1.0 - kappa * s * s, -1.0 + kappa * c * c, -kappa * c * s;
    CHECK((sys.linear_at_time(t) - expected).norm() < 1e-12);
    const Eigen::Vector2d drift = sys.drift_at_time(t);
    CHECK(drift[0] == doctest::Approx(-2.0 * iota * c).epsilon(1e-12));
    CHECK(std::abs(drift[1]) < 1e-14);
  }
}

TEST_CASE("flow: constant drift integrates exactly") {
  const auto freq = FrequencyVector::periodic();
  const QpFourierSeries zero(freq);
  AffineSystem sys(freq, Sl2Matrix(), MatrixSeries::zero(freq),
                   {QpFourierSeries::constant(freq, 0.3),
                    QpFourierSeries::constant(freq, -0.2)});
  const Eigen::Vector2d x0(1.0, 2.0);
  const auto traj = flow(sys, x0, 5.0, 0.5);
  for (const auto& s : traj) {
    const Eigen::Vector2d want = x0 + s.t * Eigen::Vector2d(0.3, -0.2);
    CHECK((s.x - want).norm() < 1e-10);
  }
}

TEST_CASE("flow of the example system matches the explicit conjugation chain") {
  const double kappa = 0.5, iota = 1.0;
  const auto sys = example_affine(kappa, iota);
  const Eigen::Vector2d x0(0.7, -0.4);
  const auto traj = flow(sys, x0, 50.0, 0.25, 1e-13);
  double worst = 0;
  for (const auto& smp : traj) {
    const double t = smp.t, c = std::cos(t), s = std::sin(t);
    // reduced motion: xs' = -iota, xis' = kappa xs
    const double xs = x0[0] - iota * t;
    const double xis = x0[1] + kappa * (x0[0] * t - 0.5 * iota * t * t);
    const Eigen::Vector2d shifted(xs - iota * s * c,
                                  xis - (0.5 * kappa * iota + iota) * s * s);
    Eigen::Matrix2d rot;  // e^{-tJ} with J = [[0,-1],[1,0]]
    rot << c, s, -s, c;
    const Eigen::Vector2d want = rot * shifted;
    worst = std::max(worst, (smp.x - want).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("linear flow is volume preserving") {
  const auto sys = example_affine(0.5, 0.0);
  const Eigen::Matrix2d phi = fundamental_matrix(sys, 50.0);
  CHECK(std::abs(phi.determinant() - 1.0) < 1e-9);
}

TEST_CASE("rotation number of the unperturbed oscillator") {
  const auto freq = FrequencyVector::golden();
  const auto est = rotation_number(freq, Sl2Matrix::rotation_generator(0.8),
                                   MatrixSeries::zero(freq), 1e4);
  CHECK(std::abs(est.rho - 0.8) < 1e-6);
  CHECK(est.error_bar < 1e-6);
  CHECK_THROWS_AS(rotation_number(freq, Sl2Matrix::rotation_generator(1.0),
                                  MatrixSeries::zero(freq), 100.0),
                  std::invalid_argument);
}

TEST_CASE("rotation number vanishes for a hyperbolic constant part") {
  const auto freq = FrequencyVector::golden();
  Eigen::Matrix2d m;  // conjugated diag(l, -l): traceless, det < 0, no rotation
  const double l = 0.4, phi = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  m = r * Eigen::DiagonalMatrix<double, 2>(l, -l) * r.transpose();
  const auto est = rotation_number(freq, Sl2Matrix(m), MatrixSeries::zero(freq), 1e4);
  CHECK(std::abs(est.rho) < 1e-3);
}

TEST_CASE("rotation number shifts by O(epsilon) under a small quadratic part") {
  std::mt19937_64 rng(5);
  const auto freq = FrequencyVector::golden();
  auto f11 = random_real_series(freq, rng, 2, 0.5, 1e-3);
  auto f12 = random_real_series(freq, rng, 2, 0.5, 1e-3);
  auto f21 = random_real_series(freq, rng, 2, 0.5, 1e-3);
  MatrixSeries F(f11, f12, f21, scale(f11, -1.0), true);
  const auto base = rotation_number(freq, Sl2Matrix::rotation_generator(1.0), F, 2e3);
  CHECK(std::abs(base.rho - 1.0) < 1e-2);
}

TEST_CASE("hyperbolic solver: trivial input and residual oracle") {
  const auto freq = FrequencyVector::periodic();
  const QpFourierSeries zero(freq);
  const auto trivial = solve_hyperbolic(zero, zero, 1.0);
  CHECK(trivial.certificate.alpha.empty());
  CHECK(trivial.certificate.beta.empty());
  CHECK(trivial.certificate.residual < 1e-15);

  // single harmonic: verify through the ODE residual rather than by hand
  QpFourierSeries p1(freq, ValueKind::cplx);
  p1.set_coeff(std::vector<int>{2}, 0.5);
  const auto single = solve_hyperbolic(p1, QpFourierSeries(freq, ValueKind::cplx), 1.0);
  CHECK(single.certificate.residual < 1e-12);

  std::mt19937_64 rng(17);
  const auto freq2 = FrequencyVector::golden();
  for (double lambda : {0.2, 1.0, 1.7}) {
    const auto p = random_real_series(freq2, rng);
    const auto q = random_real_series(freq2, rng);
    const auto sol = solve_hyperbolic(p, q, lambda);
    CHECK(sol.certificate.residual < 1e-10);
    CHECK(sol.certificate.alpha.check_reality());
  }
  CHECK_THROWS_AS(solve_hyperbolic(zero, zero, -1.0), std::invalid_argument);
}

TEST_CASE("parabolic solver: constants, residual, and the reduced drift") {
  const auto freq = FrequencyVector::periodic();
  const double kappa = 2.0, iota0 = 0.7, q0 = -1.3;
  const auto p1 = QpFourierSeries::constant(freq, iota0);
  const auto p2 = QpFourierSeries::constant(freq, q0);
  const auto sol = solve_parabolic(p1, p2, kappa);
  CHECK(average(sol.certificate.alpha).real() == doctest::Approx(-q0 / kappa));
  CHECK(sol.certificate.beta.l1_mass() < 1e-15);
  CHECK(sol.normal_form.iota == doctest::Approx(iota0));
  CHECK(sol.normal_form.cls == NormalFormClass::parabolic);
  CHECK(sol.certificate.residual < 1e-13);

  QpFourierSeries cosp(freq);
  cosp.add_real_harmonic(std::vector<int>{2}, 0.5);
  const auto sol2 = solve_parabolic(cosp, QpFourierSeries(freq), 1.0);
  CHECK(sol2.certificate.residual < 1e-12);

  std::mt19937_64 rng(19);
  const auto freq2 = FrequencyVector::golden();
  const auto sol3 =
      solve_parabolic(random_real_series(freq2, rng), random_real_series(freq2, rng), 0.8);
  CHECK(sol3.certificate.residual < 1e-10);
}

TEST_CASE("parabolic two-flow comparison") {
  std::mt19937_64 rng(29);
  const auto freq = FrequencyVector::golden();
  const double kappa = 0.7;
  const auto p1 = random_real_series(freq, rng, 3, 0.8, 0.05);
  const auto p2 = random_real_series(freq, rng, 3, 0.8, 0.05);
  const auto sol = solve_parabolic(p1, p2, kappa);
  AffineSystem tilde(freq, Sl2Matrix::parabolic(kappa), MatrixSeries::zero(freq), {p1, p2});
  const Eigen::Vector2d x0(0.3, -0.1);
  const auto traj = flow(tilde, x0, 100.0, 1.0, 1e-14);
  const double th0[2] = {0.0, 0.0};
  const Eigen::Vector2d l0(evaluate(sol.certificate.alpha, th0).real(),
                           evaluate(sol.certificate.beta, th0).real());
  const Eigen::Vector2d y0 = x0 - l0;
  const double iota = sol.normal_form.iota;
  double worst = 0;
  for (const auto& smp : traj) {
    const double t = smp.t;
    const double y1 = y0[0] + iota * t;
    const double y2 = y0[1] + kappa * (y0[0] * t + 0.5 * iota * t * t);
    const double th2[2] = {freq.omega()[0] * t, freq.omega()[1] * t};
    const Eigen::Vector2d l(evaluate(sol.certificate.alpha, th2).real(),
                            evaluate(sol.certificate.beta, th2).real());
    const Eigen::Vector2d want = Eigen::Vector2d(y1, y2) + l;
    worst = std::max(worst, (smp.x - want).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("elliptic solver: constant mode, residual, and the decay bound") {
  const auto freq = FrequencyVector::periodic();
  EllipticConfig cfg;
  cfg.sigma = 2.0;
  cfg.decay_r = 0.6;
  cfg.dio_constant = 0.5 * certify_dio_varrho(1.0, freq, cfg.sigma, 64);
  const auto p1 = QpFourierSeries::constant(freq, 1.0);
  const auto p2 = QpFourierSeries(freq);
  const auto sol = solve_elliptic(p1, p2, 1.0, cfg);
  CHECK(std::abs(average(sol.certificate.alpha)) < 1e-15);
  CHECK(average(sol.certificate.beta).real() == doctest::Approx(-1.0));
  CHECK(sol.certificate.residual < 1e-12);

  std::mt19937_64 rng(37);
  const auto freq2 = FrequencyVector::golden();
  const double rho = 1.0 / std::sqrt(2.0);
  EllipticConfig cfg2;
  cfg2.sigma = 2.0;
  cfg2.decay_r = 0.6;
  cfg2.dio_constant = 0.5 * certify_dio_varrho(rho, freq2, cfg2.sigma, 64);
  CHECK(cfg2.dio_constant > 0);
  for (int i = 0; i < 5; ++i) {
    const auto p = random_real_series(freq2, rng);
    const auto q = random_real_series(freq2, rng);
    const auto sol2 = solve_elliptic(p, q, rho, cfg2);
    CHECK(sol2.certificate.residual < 1e-10);
  }
}

TEST_CASE("degenerate solver: drift rotation and residual") {
  const auto freq = FrequencyVector::periodic();
  {
    const auto sol = solve_degenerate(QpFourierSeries::constant(freq, 2.0),
                                      QpFourierSeries(freq));
    CHECK(sol.certificate.alpha.empty());
    CHECK((sol.certificate.rotation - Eigen::Matrix2d::Identity()).norm() < 1e-15);
    CHECK(sol.normal_form.iota == doctest::Approx(2.0));
  }
  {
    const auto sol = solve_degenerate(QpFourierSeries(freq),
                                      QpFourierSeries::constant(freq, 0.9));
    Eigen::Matrix2d want;
    want << 0.0, -1.0, 1.0, 0.0;
    CHECK((sol.certificate.rotation - want).norm() < 1e-15);
    CHECK(sol.normal_form.iota == doctest::Approx(0.9));
    CHECK(sol.certificate.residual < 1e-13);
  }
  std::mt19937_64 rng(41);
  const auto freq2 = FrequencyVector::golden();
  const auto p1 = random_real_series(freq2, rng, 3, 0.8, 0.1);
  const auto p2 = random_real_series(freq2, rng, 3, 0.8, 0.1);
  const auto sol = solve_degenerate(p1, p2);
  CHECK(sol.certificate.residual < 1e-10);

  // two-flow comparison through the rotation
  AffineSystem tilde(freq2, Sl2Matrix(), MatrixSeries::zero(freq2), {p1, p2});
  const Eigen::Vector2d x0(-0.2, 0.5);
  const auto traj = flow(tilde, x0, 80.0, 1.0, 1e-14);
  const double th0[2] = {0.0, 0.0};
  const Eigen::Vector2d l0(evaluate(sol.certificate.alpha, th0).real(),
                           evaluate(sol.certificate.beta, th0).real());
  const Eigen::Vector2d y0 = sol.certificate.rotation.transpose() * (x0 - l0);
  double worst = 0;
  for (const auto& smp : traj) {
    const double th[2] = {freq2.omega()[0] * smp.t, freq2.omega()[1] * smp.t};
    const Eigen::Vector2d l(evaluate(sol.certificate.alpha, th).real(),
                            evaluate(sol.certificate.beta, th).real());
    const Eigen::Vector2d y = y0 + smp.t * Eigen::Vector2d(sol.normal_form.iota, 0.0);
    const Eigen::Vector2d want = sol.certificate.rotation * y + l;
    worst = std::max(worst, (smp.x - want).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("divisor floor rejects resonant harmonics with a report") {
  // omega = (1, golden): no low harmonic is resonant, so force one by hand
  const auto freq = FrequencyVector::periodic();
  QpFourierSeries p(freq, ValueKind::cplx);
  p.set_coeff(std::vector<int>{0}, 0.0);
  QpFourierSeries q(freq, ValueKind::cplx);
  // degenerate solver divides by <k,omega>; a k=0 harmonic is fine, so use
  // a tiny-frequency vector instead
  const FrequencyVector tiny({1e-9}, 5e-10, 1.0, 10);
  QpFourierSeries bad(tiny);
  bad.add_real_harmonic(std::vector<int>{1}, 0.3);
  CHECK_THROWS_AS(solve_degenerate(bad, QpFourierSeries(tiny)), DivisorFloorError);
  try {
    solve_degenerate(bad, QpFourierSeries(tiny));
  } catch (const DivisorFloorError& e) {
    CHECK(std::abs(e.offending.k[0]) == 1);
    CHECK(std::abs(e.divisor) < 1e-8);
  }
}

TEST_CASE("phase correction: trivial, constant, and residual oracle") {
  const auto freq = FrequencyVector::golden();
  const QpFourierSeries zero(freq);
  {
    const auto pc = phase_correction({zero, zero}, {zero, zero}, {zero, zero});
    CHECK(pc.C == 0.0);
    CHECK(pc.eps.empty());
    CHECK(pc.residual < 1e-15);
  }
  {
    // constants: F = 1/2 (l2 (b1+b2)_1 - l1 (b1+b2)_2)
    const auto l1 = QpFourierSeries::constant(freq, 0.4);
    const auto l2 = QpFourierSeries::constant(freq, -1.1);
    const auto b11 = QpFourierSeries::constant(freq, 2.0);
    const auto b12 = QpFourierSeries::constant(freq, 0.5);
    const auto b21 = QpFourierSeries::constant(freq, -1.0);
    const auto b22 = QpFourierSeries::constant(freq, 1.5);
    const auto pc = phase_correction({l1, l2}, {b11, b12}, {b21, b22});
    const double want = 0.5 * (-1.1 * (2.0 - 1.0) - 0.4 * (0.5 + 1.5));
    CHECK(pc.C == doctest::Approx(want));
    CHECK(pc.eps.empty());
  }
  std::mt19937_64 rng(47);
  for (int i = 0; i < 5; ++i) {
    const auto pc = phase_correction(
        {random_real_series(freq, rng), random_real_series(freq, rng)},
        {random_real_series(freq, rng), random_real_series(freq, rng)},
        {random_real_series(freq, rng), random_real_series(freq, rng)});
    CHECK(pc.residual < 1e-10);
    CHECK(std::abs(average(pc.eps)) < 1e-15);
  }
}

TEST_CASE("trajectory csv and system json") {
  const auto sys = example_affine(0.5, 1.0);
  const auto traj = flow(sys, {1.0, 0.0}, 1.0, 0.25);
  const auto path = std::filesystem::temp_directory_path() / "oscine_traj_test.csv";
  write_trajectory_csv(traj, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x,xi");
  std::filesystem::remove(path);

  const auto j = sys.to_json();
  CHECK(j.contains("A"));
  CHECK(j.contains("F"));
  CHECK(j.contains("b"));

  NormalForm nf;
  nf.B = Sl2Matrix::parabolic(0.5);
  nf.cls = NormalFormClass::parabolic;
  nf.w = {0.7, 0.0};
  nf.iota = 0.7;
  const auto nj = nf.to_json();
  CHECK(nj["class"] == "parabolic");
}
