#include "oscine/growth.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscine {

void NormSeries::validate() const {
  double prev = -1.0;
  for (const auto& [t, v] : samples) {
    if (!(t >= 0) || !(t > prev)) throw std::invalid_argument("times must increase from >= 0");
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("values must be finite and positive");
    prev = t;
  }
}

const char* to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::polynomial: return "polynomial";
    case GrowthClass::exponential: return "exponential";
    case GrowthClass::inconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json j;
  j["class"] = to_string(cls);
  j["exponent"] = exponent;
  j["prefactor"] = prefactor;
  j["window"] = {window_lo, window_hi};
  j["residual"] = residual;
  return j;
}

namespace {

struct LineFit {
  double slope, intercept, rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

}  // namespace

GrowthReport fit_growth(const NormSeries& series, double window_lo, double window_hi) {
  series.validate();
  if (!(window_lo > 0)) throw std::invalid_argument("fit window must start at t > 0");
  std::vector<double> t, logt, logv;
  for (const auto& [tt, vv] : series.samples) {
    if (tt < window_lo || tt > window_hi) continue;
    t.push_back(tt);
    logt.push_back(std::log(tt));
    logv.push_back(std::log(vv));
  }
  if (t.size() < 50) throw std::invalid_argument("fit window holds fewer than 50 samples");

  const LineFit poly = least_squares(logt, logv);
  const LineFit expo = least_squares(t, logv);

  GrowthReport r;
  r.window_lo = window_lo;
  r.window_hi = window_hi;
  if (std::abs(poly.slope) < 0.05 && std::abs(expo.slope) < 0.05) {
    r.cls = GrowthClass::bounded;
    r.exponent = 0.0;
    r.prefactor = std::exp(poly.intercept);
    r.residual = std::min(poly.rms, expo.rms);
  } else if (poly.rms <= expo.rms) {
    r.cls = GrowthClass::polynomial;
    r.exponent = poly.slope;
    r.prefactor = std::exp(poly.intercept);
    r.residual = poly.rms;
  } else {
    r.cls = GrowthClass::exponential;
    r.exponent = expo.slope;
    r.prefactor = std::exp(expo.intercept);
    r.residual = expo.rms;
  }
  if (r.residual >= 0.05) r.cls = GrowthClass::inconclusive;
  return r;
}

GrowthReport fit_growth(const NormSeries& series) {
  series.validate();
  if (series.samples.empty()) throw std::invalid_argument("empty series");
  const std::size_t skip = series.samples.size() / 5;
  const double lo = series.samples[skip].first;
  const double hi = series.samples.back().first;
  return fit_growth(series, std::max(lo, 1e-12), hi);
}

double Envelope::operator()(double t) const {
  const double g = amp * std::pow(t, power);
  return plus_one ? 1.0 + g : g;
}

SandwichResult sandwich_check(const NormSeries& series, const Envelope& lower,
                              const Envelope& upper, double slack) {
  series.validate();
  SandwichResult r;
  double c = std::numeric_limits<double>::infinity();
  double C = 0.0;
  for (const auto& [t, v] : series.samples) {
    const double lo = lower(t), hi = upper(t);
    if (lo > 0) c = std::min(c, v / lo);
    if (hi > 0) C = std::max(C, v / hi);
  }
  r.c_best = c;
  r.C_best = C;
  r.ratio = (c > 0 && std::isfinite(c)) ? C / c : std::numeric_limits<double>::infinity();
  r.pass = r.ratio < slack;
  return r;
}

}  // namespace oscine
