// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscine/classical.hpp"
#include "oscine/experiments.hpp"
#include "oscine/grid.hpp"
#include "oscine/growth.hpp"
#include "oscine/quantum.hpp"

#include "../support/quad_oracle.hpp"

using namespace oscine;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

fs::path work_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("oscine_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json read_report(const fs::path& dir) {
  nlohmann::json j;
  std::ifstream is(dir / "report.json");
  if (is) is >> j;
  return j;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

QpFourierSeries random_real_series(const FrequencyVector& freq, std::mt19937_64& rng,
                                   int k_support, double decay, double amp) {
  std::normal_distribution<double> gauss;
  QpFourierSeries p(freq);
  p.set_coeff(HarmonicIndex{}, amp * gauss(rng));
  std::vector<int> k(freq.dim(), 0);
  const int d = freq.dim();
  auto push = [&]() {
    int abs1 = 0, lead = 0;
    for (int i = 0; i < d; ++i) {
      abs1 += std::abs(k[i]);
      if (lead == 0) lead = k[i];
    }
    if (abs1 == 0 || abs1 > k_support || lead < 0) return;
    p.add_real_harmonic(k,
                        0.5 * amp * std::exp(-decay * abs1) * Complex{gauss(rng), gauss(rng)});
  };
  if (d == 1)
    for (k[0] = -k_support; k[0] <= k_support; ++k[0]) push();
  else
    for (k[0] = -k_support; k[0] <= k_support; ++k[0])
      for (k[1] = -k_support; k[1] <= k_support; ++k[1]) push();
  return p;
}

// ---------------------------------------------------------------- criteria

void criterion_1_stark_limit() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.name = "stark-limit";
  cfg.a = 2.0;
  cfg.s = 1.0;
  const auto dir = work_dir("stark_limit");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double ratio = rep.value("ratio_to_limit", 0.0);
  const double elapsed = timer.seconds();
  const bool pass = outcome.exit_code == 0 && std::abs(ratio - 1.0) < 0.02 && elapsed < 10.0;
  report(1, "Stark super-ballistic weighted-moment limit",
         pass, fmt("|ratio-1| = %.2e < 0.02, runtime %.1fs < 10s", std::abs(ratio - 1.0),
                   elapsed));
}

double criterion_2_example5() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.name = "example5";
  cfg.kappa = 0.5;
  cfg.iota = 1.0;
  cfg.s = 1.0;
  const auto dir = work_dir("example5");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double expo = rep.contains("growth") ? rep["growth"].value("exponent", 0.0) : 0.0;
  const double ratio = rep.value("ratio_t40", 0.0);
  const double dev = rep.value("oracle_h1_rel_dev_max", 1.0);
  const double elapsed = timer.seconds();
  const bool pass = outcome.exit_code == 0 && std::abs(expo - 2.0) <= 0.05 &&
                    ratio > 0.95 && ratio < 1.05 && dev < 1e-4 && elapsed < 60.0;
  report(2, "example quadratic-plus-linear drive grows like t^2 in H^1", pass,
         fmt("exponent %.3f, ratio(t=40) %.4f, oracle dev %.2e", expo, ratio, dev) +
             fmt(", runtime %.1fs < 60s", elapsed));
  return rep.value("l2_drift_per_unit_time", 1.0);
}

void criterion_3_dilation() {
  ExperimentConfig cfg;
  cfg.name = "dilation";
  cfg.lambda = 0.3;
  cfg.s = 1.0;
  const auto dir = work_dir("dilation");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double rate = rep.contains("growth") ? rep["growth"].value("exponent", 0.0) : 0.0;
  const bool pass = outcome.exit_code == 0 && std::abs(rate - 0.3) <= 0.01;
  report(3, "exponential class: log-norm slope matches lambda*s", pass,
         fmt("slope %.4f within 0.30 +- 0.01", rate));
}

void criterion_4_transport() {
  ExperimentConfig cfg;
  cfg.name = "transport";
  cfg.iota = 1.0;
  cfg.s = 1.0;
  const auto dir = work_dir("transport");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double ratio = rep.value("moment_ratio_final", 0.0);
  const double drift = rep.value("hs_drift", 1.0);
  const bool pass =
      outcome.exit_code == 0 && std::abs(ratio - 1.0) < 0.05 && drift < 1e-8;
  report(4, "transport class: ballistic moment and frozen H^1 norm", pass,
         fmt("moment ratio %.4f, H^1 drift %.2e", ratio, drift));
}

void criterion_5_homological() {
  ExperimentConfig cfg;
  cfg.name = "homological-suite";
  const auto dir = work_dir("homological");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double worst = rep.value("worst_residual", 1.0);
  const bool decay = rep.value("elliptic_decay_bound_ok", false);
  const bool pass = outcome.exit_code == 0 && worst < 1e-10 && decay;
  report(5, "homological solvers: 50 randomized certificates per case", pass,
         fmt("worst residual %.2e < 1e-10, decay bound ", worst) +
             (decay ? "holds" : "violated"));
}

void criterion_6_phase_correction() {
  std::mt19937_64 rng(987654321);
  const auto freq = FrequencyVector::golden();
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto pc = phase_correction(
        {random_real_series(freq, rng, 4, 0.6, 0.5),
         random_real_series(freq, rng, 4, 0.6, 0.5)},
        {random_real_series(freq, rng, 4, 0.6, 0.5),
         random_real_series(freq, rng, 4, 0.6, 0.5)},
        {random_real_series(freq, rng, 4, 0.6, 0.5),
         random_real_series(freq, rng, 4, 0.6, 0.5)});
    worst = std::max(worst, pc.residual);
  }
  report(6, "scalar phase correction closes the conjugation", worst < 1e-10,
         fmt("worst residual %.2e < 1e-10 over 50 draws", worst));
}

void criterion_7_derivative_polynomials() {
  const double kappa = 0.7, iota = 1.1;
  auto phase2 = [&](double t, double y) {
    const double arg = kappa / (6.0 * iota) *
                       (3.0 * y * y * iota * t + 3.0 * y * iota * iota * t * t +
                        iota * iota * iota * t * t * t);
    return std::polar(1.0, arg);
  };
  const double h = 0.02;
  const double w[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> td(0.5, 2.0), yd(-1.0, 1.0);
  double worst_rel = 0;
  for (int alpha = 1; alpha <= 4; ++alpha) {
    const auto dp = derivative_polynomials(alpha, kappa, iota);
    for (int trial = 0; trial < 20; ++trial) {
      const double t = td(rng), y = yd(rng);
      const int span = 3 * alpha;
      std::vector<Complex> cur(2 * span + 1);
      for (int i = -span; i <= span; ++i) cur[i + span] = phase2(t, y + i * h);
      for (int rep = 0; rep < alpha; ++rep) {
        std::vector<Complex> next(cur.size(), Complex{0, 0});
        for (int i = 3; i + 3 < static_cast<int>(cur.size()); ++i) {
          Complex acc{0, 0};
          for (int m = -3; m <= 3; ++m) acc += w[m + 3] * cur[i + m];
          next[i] = acc / h;
        }
        cur = next;
      }
      const Complex an = dp.p.eval(t, y) * phase2(t, y);
      worst_rel = std::max(worst_rel, std::abs(cur[span] - an) / (1.0 + std::abs(an)));
    }
  }
  bool leading_exact = true;
  Complex lead{1.0, 0.0};
  const Complex i1{0.0, 1.0};
  for (int alpha = 1; alpha <= 12; ++alpha) {
    lead *= 0.5 * i1 * iota * kappa;
    if (derivative_polynomials(alpha, kappa, iota).leading != lead) leading_exact = false;
  }
  const bool pass = worst_rel < 1e-6 && leading_exact;
  report(7, "derivative-polynomial recursion vs finite differences", pass,
         fmt("worst rel err %.2e < 1e-6 (alpha<=4), leading coefficient exact to 12: ",
             worst_rel) +
             (leading_exact ? "yes" : "no"));
}

void criterion_8_quantization() {
  const int dim = 66;
  const Degree2Symbol monomials[6] = {
      {0, 0, 0, 0, 0, 1}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0},
      {2, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 2, 0, 0, 0}};
  double worst = 0;
  for (const auto& sym : monomials) {
    const Eigen::MatrixXcd banded = weyl_quantize(sym, dim).dense();
    const Eigen::MatrixXcd quad = testing::quadrature_matrix(sym, dim);
    worst = std::max(worst, (banded - quad).cwiseAbs().maxCoeff());
  }
  report(8, "ladder quantization vs Gauss-Hermite quadrature (n,m <= 64)", worst < 1e-10,
         fmt("worst abs err %.2e < 1e-10 over six monomials", worst));
}

void criterion_9_unitarity(double hermite_drift) {
  // grid propagators
  const auto v0 = GridState::gaussian(0.0, 0.0, 1.0, -15.0, 15.0, 8192);
  double worst = 0;
  for (double t : {7.0, 23.0, 41.0}) {
    worst = std::max(worst,
                     std::abs(stark_evolve_closed_form(v0, 0.5, 1.0, t).l2() - v0.l2()) / t);
    worst = std::max(worst, std::abs(dilation_evolve(v0, 0.3, t).l2() - v0.l2()) / t);
    worst = std::max(worst, std::abs(transport_evolve(v0, 1.0, t).l2() - v0.l2()) / t);
  }
  const bool pass = worst < 1e-9 && hermite_drift < 1e-9;
  report(9, "all propagators preserve the L2 norm", pass,
         fmt("grid drift %.2e, spectral drift %.2e, both < 1e-9 per unit time", worst,
             hermite_drift));
}

void criterion_10_rotation() {
  ExperimentConfig cfg;
  cfg.name = "rotation-sweep";
  const auto dir = work_dir("rotation");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  const auto rep = read_report(dir);
  const double err = rep.value("unperturbed_err", 1.0);
  const double drop = rep.value("worst_drop_beyond_error_bar", 1.0);
  const bool pass = outcome.exit_code == 0 && err < 1e-6 && drop <= 0.0;
  report(10, "rotation number: unperturbed value and monotone sweep", pass,
         fmt("|rho - nu| = %.2e < 1e-6, worst drop beyond error bar %.2e", err, drop));
}

void criterion_11_determinism() {
  ExperimentConfig cfg;
  cfg.name = "example5";
  cfg.kappa = 0.5;
  cfg.iota = 1.0;
  cfg.s = 1.0;
  const auto d1 = work_dir("det1");
  const auto d2 = work_dir("det2");
  cfg.out_dir = d1.string();
  const int e1 = run_experiment(cfg).exit_code;
  cfg.out_dir = d2.string();
  const int e2 = run_experiment(cfg).exit_code;
  bool same = e1 == 0 && e2 == 0;
  for (const char* f : {"reduced_norms.csv", "quantum_norms.csv"}) {
    if (!fs::exists(d1 / f) || !fs::exists(d2 / f)) {
      same = false;
      continue;
    }
    if (fnv1a64_file((d1 / f).string()) != fnv1a64_file((d2 / f).string())) same = false;
  }
  report(11, "re-running the example run reproduces the CSVs byte for byte", same,
         same ? "checksums agree" : "checksums differ");
}

}  // namespace

int main() {
  std::printf("oscine acceptance suite\n");
  criterion_1_stark_limit();
  const double hermite_drift = criterion_2_example5();
  criterion_3_dilation();
  criterion_4_transport();
  criterion_5_homological();
  criterion_6_phase_correction();
  criterion_7_derivative_polynomials();
  criterion_8_quantization();
  criterion_9_unitarity(hermite_drift);
  criterion_10_rotation();
  criterion_11_determinism();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
