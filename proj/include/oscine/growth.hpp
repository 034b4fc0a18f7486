#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace oscine {

/// Positive norm samples along strictly increasing times.
struct NormSeries {
  std::vector<std::pair<double, double>> samples;  // (t, value)
  double s = 0.0;                                  // Sobolev index of the measurement
  std::string meta;

  void validate() const;
};

enum class GrowthClass { bounded, polynomial, exponential, inconclusive };

const char* to_string(GrowthClass c);

struct GrowthReport {
  GrowthClass cls = GrowthClass::inconclusive;
  double exponent = 0.0;   // p for t^p, rate for e^{rate t}
  double prefactor = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  double residual = 0.0;   // RMS of the winning fit in log coordinates

  nlohmann::json to_json() const;
};

/// Least squares of log v against {1, log t} and {1, t}; the smaller-residual
/// model wins, |slope| < 0.05 in both models reports bounded, residual >=
/// 0.05 reports inconclusive. Needs >= 50 samples inside the window and
/// window_lo > 0.
GrowthReport fit_growth(const NormSeries& series, double window_lo, double window_hi);

/// Default window: drop the first 20% of samples.
GrowthReport fit_growth(const NormSeries& series);

/// Envelope amp * t^power, or 1 + amp * t^power.
struct Envelope {
  double amp = 1.0;
  double power = 0.0;
  bool plus_one = false;

  double operator()(double t) const;
};

struct SandwichResult {
  bool pass = false;
  double c_best = 0.0;   // largest c with c*lower <= v on the window
  double C_best = 0.0;   // smallest C with v <= C*upper
  double ratio = 0.0;    // C_best / c_best
};

/// Fits the tightest constants into  c*lower(t) <= v(t) <= C*upper(t)  and
/// passes iff C/c stays below the slack.
SandwichResult sandwich_check(const NormSeries& series, const Envelope& lower,
                              const Envelope& upper, double slack = 100.0);

}  // namespace oscine
