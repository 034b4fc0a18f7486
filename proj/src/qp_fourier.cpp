#include "oscine/qp_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace oscine {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string index_str(const HarmonicIndex& k) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < kMaxDim; ++i) {
    if (i) os << ",";
    os << k.k[i];
  }
  os << ")";
  return os.str();
}
}  // namespace

HarmonicIndex HarmonicIndex::from(std::span<const int> kk) {
  if (kk.size() > kMaxDim) throw std::invalid_argument("harmonic index dimension > 4");
  HarmonicIndex h;
  for (std::size_t i = 0; i < kk.size(); ++i) {
    if (kk[i] < INT16_MIN || kk[i] > INT16_MAX)
      throw std::invalid_argument("harmonic index out of range");
    h.k[i] = static_cast<std::int16_t>(kk[i]);
  }
  return h;
}

HarmonicIndex HarmonicIndex::negated() const {
  HarmonicIndex h;
  for (int i = 0; i < kMaxDim; ++i) h.k[i] = static_cast<std::int16_t>(-k[i]);
  return h;
}

int HarmonicIndex::abs1() const {
  int s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += std::abs(static_cast<int>(k[i]));
  return s;
}

bool HarmonicIndex::is_zero() const { return abs1() == 0; }

DivisorFloorError::DivisorFloorError(const HarmonicIndex& k, double div)
    : std::runtime_error("small divisor " + std::to_string(div) +
                         " below floor at harmonic " + index_str(k)),
      offending(k),
      divisor(div) {}

FrequencyVector::FrequencyVector(std::vector<double> omega, double gamma, double tau,
                                 int n_check, std::uint64_t sample_seed)
    : omega_(std::move(omega)), gamma_(gamma), tau_(tau) {
  const int d = static_cast<int>(omega_.size());
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("frequency dimension must be 1..4");
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(tau_ > d - 1)) throw std::invalid_argument("tau must exceed d-1");

  auto violated = [&](double value, int abs1) {
    return std::abs(value) <= gamma_ / std::pow(static_cast<double>(abs1), tau_);
  };
  auto fail = [&](int abs1, double value) {
    throw std::invalid_argument("Diophantine check failed: |<n,omega>| = " +
                                std::to_string(std::abs(value)) + " at |n| = " +
                                std::to_string(abs1));
  };

  if (d == 1) {
    for (int n = 1; n <= n_check; ++n)
      if (violated(n * omega_[0], n)) fail(n, n * omega_[0]);
  } else if (d == 2) {
    // For fixed n2 the minimizing n1 is the nearest integer multiple, so the
    // whole box |n|<=n_check reduces to an O(n_check) scan.
    const double w1 = omega_[0], w2 = omega_[1];
    for (int n1 = 1; n1 <= n_check; ++n1)
      if (violated(n1 * w1, n1)) fail(n1, n1 * w1);
    for (int n2 = 1; n2 <= n_check; ++n2) {
      if (violated(n2 * w2, n2)) fail(n2, n2 * w2);
      const double x = -n2 * w2 / w1;
      for (double n1 : {std::floor(x), std::ceil(x)}) {
        const int a1 = static_cast<int>(std::abs(n1)) + n2;
        if (a1 > n_check || (n1 == 0.0 && n2 == 0)) continue;
        const double v = n1 * w1 + n2 * w2;
        if (violated(v, a1)) fail(a1, v);
      }
    }
  } else {
    const int box = std::min(n_check, 16);
    std::vector<int> n(d, -box);
    while (true) {
      int abs1 = 0;
      double v = 0;
      for (int i = 0; i < d; ++i) {
        abs1 += std::abs(n[i]);
        v += n[i] * omega_[i];
      }
      if (abs1 > 0 && abs1 <= n_check && violated(v, abs1)) fail(abs1, v);
      int i = 0;
      for (; i < d; ++i) {
        if (n[i] < box) {
          ++n[i];
          break;
        }
        n[i] = -box;
      }
      if (i == d) break;
    }
    std::mt19937_64 rng(sample_seed);
    std::uniform_int_distribution<int> dist(-n_check, n_check);
    for (int trial = 0; trial < 20000; ++trial) {
      int abs1 = 0;
      double v = 0;
      for (int i = 0; i < d; ++i) {
        const int ni = dist(rng);
        abs1 += std::abs(ni);
        v += ni * omega_[i];
      }
      if (abs1 == 0 || abs1 > n_check) continue;
      if (violated(v, abs1)) fail(abs1, v);
    }
  }
}

double FrequencyVector::dot(const HarmonicIndex& k) const {
  double s = 0;
  for (int i = 0; i < dim(); ++i) s += k.k[i] * omega_[i];
  return s;
}

FrequencyVector FrequencyVector::periodic(double omega0) {
  return FrequencyVector({omega0}, 0.5 * std::abs(omega0), 1.0, 1000);
}

FrequencyVector FrequencyVector::golden() {
  // dist(n2*phi, Z) >= 1/(sqrt(5) n2 + 2) for the golden mean, so gamma=0.2,
  // tau=1.05 passes the scan with margin.
  return FrequencyVector({1.0, (1.0 + std::sqrt(5.0)) / 2.0}, 0.2, 1.05, 10000);
}

QpFourierSeries::QpFourierSeries(FrequencyVector freq, ValueKind kind, int k_max)
    : freq_(std::move(freq)), kind_(kind), k_max_(k_max) {}

void QpFourierSeries::set_coeff(const HarmonicIndex& k, Complex value) {
  for (int i = freq_.dim(); i < kMaxDim; ++i)
    if (k.k[i] != 0) throw std::invalid_argument("harmonic index exceeds dimension");
  for (int i = 0; i < freq_.dim(); ++i)
    if (std::abs(static_cast<int>(k.k[i])) > k_max_)
      throw std::invalid_argument("harmonic index exceeds K_max");
  if (value == Complex{0.0, 0.0})
    coeffs_.erase(k);
  else
    coeffs_[k] = value;
}

void QpFourierSeries::set_coeff(std::span<const int> k, Complex value) {
  set_coeff(HarmonicIndex::from(k), value);
}

void QpFourierSeries::add_real_harmonic(std::span<const int> k, Complex half_amplitude) {
  const auto h = HarmonicIndex::from(k);
  if (h.is_zero()) {
    set_coeff(h, coeff(h) + 2.0 * half_amplitude.real());
    return;
  }
  set_coeff(h, coeff(h) + half_amplitude);
  set_coeff(h.negated(), coeff(h.negated()) + std::conj(half_amplitude));
}

Complex QpFourierSeries::coeff(const HarmonicIndex& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex QpFourierSeries::coeff(std::span<const int> k) const {
  return coeff(HarmonicIndex::from(k));
}

double QpFourierSeries::l1_mass() const {
  double s = 0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c);
  return s;
}

double QpFourierSeries::strip_bound(double r) const {
  double s = 0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c) * std::exp(0.5 * k.abs1() * r);
  return s;
}

bool QpFourierSeries::check_decay(double bound, double r) const {
  for (const auto& [k, c] : coeffs_)
    if (std::abs(c) > bound * std::exp(-static_cast<double>(k.abs1()) * r)) return false;
  return true;
}

bool QpFourierSeries::check_reality(double tol) const {
  if (kind_ == ValueKind::cplx) return true;
  for (const auto& [k, c] : coeffs_)
    if (std::abs(c - std::conj(coeff(k.negated()))) > tol) return false;
  return true;
}

QpFourierSeries QpFourierSeries::constant(const FrequencyVector& f, Complex c,
                                          ValueKind kind) {
  QpFourierSeries s(f, kind);
  s.set_coeff(HarmonicIndex{}, c);
  return s;
}

QpFourierSeries QpFourierSeries::cosine(const FrequencyVector& f, std::span<const int> k,
                                        double amp) {
  QpFourierSeries s(f, ValueKind::real);
  s.add_real_harmonic(k, 0.5 * amp);
  return s;
}

QpFourierSeries QpFourierSeries::sine(const FrequencyVector& f, std::span<const int> k,
                                      double amp) {
  QpFourierSeries s(f, ValueKind::real);
  s.add_real_harmonic(k, Complex{0.0, -0.5 * amp});
  return s;
}

nlohmann::json QpFourierSeries::to_json() const {
  nlohmann::json j;
  j["freq"] = freq_.omega();
  j["gamma"] = freq_.gamma();
  j["tau"] = freq_.tau();
  j["kind"] = kind_ == ValueKind::real ? "real" : "complex";
  j["coeffs"] = nlohmann::json::array();
  for (const auto& [k, c] : coeffs_) {
    nlohmann::json e;
    e["k"] = std::vector<int>(k.k.begin(), k.k.begin() + freq_.dim());
    e["re"] = c.real();
    e["im"] = c.imag();
    j["coeffs"].push_back(e);
  }
  return j;
}

QpFourierSeries QpFourierSeries::from_json(const nlohmann::json& j) {
  FrequencyVector f(j.at("freq").get<std::vector<double>>(), j.value("gamma", 0.1),
                    j.value("tau", 1.05), 1000);
  QpFourierSeries s(f, j.value("kind", "real") == std::string("real") ? ValueKind::real
                                                                      : ValueKind::cplx);
  for (const auto& e : j.at("coeffs")) {
    auto kk = e.at("k").get<std::vector<int>>();
    s.set_coeff(kk, Complex{e.at("re").get<double>(), e.at("im").get<double>()});
  }
  return s;
}

Complex evaluate(const QpFourierSeries& f, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != f.freq().dim())
    throw std::invalid_argument("theta dimension mismatch");
  Complex s{0.0, 0.0};
  for (const auto& [k, c] : f.coeffs()) {
    double phase = 0;
    for (int i = 0; i < f.freq().dim(); ++i) phase += k.k[i] * theta[i];
    s += c * std::polar(1.0, 0.5 * phase);
  }
  if (f.kind() == ValueKind::real && std::abs(s.imag()) > 1e-12 * (1.0 + std::abs(s)))
    throw std::logic_error("real-kind series evaluated with non-real value");
  return s;
}

QpFourierSeries directional_derivative(const QpFourierSeries& f) {
  QpFourierSeries g(f.freq(), f.kind(), f.k_max());
  for (const auto& [k, c] : f.coeffs()) {
    if (k.is_zero()) continue;
    g.set_coeff(k, Complex{0.0, 0.5 * f.freq().dot(k)} * c);
  }
  return g;
}

QpFourierSeries antiderivative(const QpFourierSeries& f, double divisor_floor) {
  QpFourierSeries g(f.freq(), f.kind(), f.k_max());
  for (const auto& [k, c] : f.coeffs()) {
    if (k.is_zero()) {
      if (std::abs(c) > kNegligibleCoeff)
        throw std::invalid_argument("antiderivative requires zero-average series");
      continue;
    }
    const double div = 0.5 * f.freq().dot(k);
    if (std::abs(div) < divisor_floor) {
      if (std::abs(c) < kNegligibleCoeff) continue;
      throw DivisorFloorError(k, div);
    }
    g.set_coeff(k, c / Complex{0.0, div});
  }
  return g;
}

Complex average(const QpFourierSeries& f) { return f.coeff(HarmonicIndex{}); }

QpFourierSeries multiply(const QpFourierSeries& f, const QpFourierSeries& g,
                         MultiplyReport* report) {
  if (!(f.freq() == g.freq())) throw std::invalid_argument("frequency mismatch in multiply");
  const ValueKind kind = (f.kind() == ValueKind::real && g.kind() == ValueKind::real)
                             ? ValueKind::real
                             : ValueKind::cplx;
  const int k_max = std::max(f.k_max(), g.k_max());
  std::map<HarmonicIndex, Complex> acc;
  for (const auto& [ka, ca] : f.coeffs())
    for (const auto& [kb, cb] : g.coeffs()) {
      HarmonicIndex k;
      for (int i = 0; i < kMaxDim; ++i) k.k[i] = static_cast<std::int16_t>(ka.k[i] + kb.k[i]);
      acc[k] += ca * cb;
    }
  QpFourierSeries out(f.freq(), kind, k_max);
  double dropped = 0;
  for (const auto& [k, c] : acc) {
    bool keep = true;
    for (int i = 0; i < kMaxDim; ++i)
      if (std::abs(static_cast<int>(k.k[i])) > k_max) keep = false;
    if (!keep) {
      dropped += std::abs(c);
      continue;
    }
    if (std::abs(c) > 0.0) out.set_coeff(k, c);
  }
  if (report) report->discarded_mass = dropped;
  return out;
}

QpFourierSeries add(const QpFourierSeries& f, const QpFourierSeries& g) {
  if (!(f.freq() == g.freq())) throw std::invalid_argument("frequency mismatch in add");
  const ValueKind kind = (f.kind() == ValueKind::real && g.kind() == ValueKind::real)
                             ? ValueKind::real
                             : ValueKind::cplx;
  QpFourierSeries out(f.freq(), kind, std::max(f.k_max(), g.k_max()));
  for (const auto& [k, c] : f.coeffs()) out.set_coeff(k, c);
  for (const auto& [k, c] : g.coeffs()) out.set_coeff(k, out.coeff(k) + c);
  return out;
}

QpFourierSeries scale(const QpFourierSeries& f, Complex c) {
  const ValueKind kind =
      (f.kind() == ValueKind::real && c.imag() == 0.0) ? ValueKind::real : ValueKind::cplx;
  QpFourierSeries out(f.freq(), kind, f.k_max());
  for (const auto& [k, v] : f.coeffs()) out.set_coeff(k, c * v);
  return out;
}

MatrixSeries::MatrixSeries(QpFourierSeries m00, QpFourierSeries m01, QpFourierSeries m10,
                           QpFourierSeries m11, bool trace_zero)
    : e_{{std::move(m00), std::move(m01)}, {std::move(m10), std::move(m11)}},
      trace_zero_(trace_zero) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (!(e_[r][c].freq() == e_[0][0].freq()))
        throw std::invalid_argument("matrix series entries disagree on frequency");
  if (trace_zero_) {
    const auto tr = add(e_[0][0], e_[1][1]);
    for (const auto& [k, c] : tr.coeffs())
      if (std::abs(c) > 1e-14)
        throw std::invalid_argument("matrix series trace is not zero");
  }
}

MatrixSeries MatrixSeries::zero(const FrequencyVector& f) {
  QpFourierSeries z(f);
  return MatrixSeries(z, z, z, z, true);
}

bool MatrixSeries::empty() const {
  return e_[0][0].empty() && e_[0][1].empty() && e_[1][0].empty() && e_[1][1].empty();
}

double MatrixSeries::l1_mass() const {
  return e_[0][0].l1_mass() + e_[0][1].l1_mass() + e_[1][0].l1_mass() + e_[1][1].l1_mass();
}

std::array<std::array<double, 2>, 2> MatrixSeries::value_at(
    std::span<const double> theta) const {
  std::array<std::array<double, 2>, 2> m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = evaluate(e_[r][c], theta).real();
  return m;
}

ThetaGridEvaluator::ThetaGridEvaluator(const FrequencyVector& freq, int points_per_dim)
    : dim_(freq.dim()), n_(points_per_dim), k_offset_(0) {
  total_ = 1;
  for (int i = 0; i < std::min(dim_, 2); ++i) total_ *= n_;
}

std::vector<Complex> ThetaGridEvaluator::evaluate(const QpFourierSeries& f) const {
  if (f.freq().dim() != dim_) throw std::invalid_argument("grid evaluator dimension mismatch");
  std::vector<Complex> out(total_, Complex{0.0, 0.0});
  std::vector<Complex> ph0(n_), ph1(n_);
  auto fill_phase = [&](std::vector<Complex>& ph, int kk) {
    for (int j = 0; j < n_; ++j) ph[j] = std::polar(1.0, 0.5 * kk * 4.0 * kPi * j / n_);
  };
  for (const auto& [k, c] : f.coeffs()) {
    if (dim_ == 1) {
      fill_phase(ph0, k.k[0]);
      for (int j = 0; j < n_; ++j) out[j] += c * ph0[j];
    } else {
      // d >= 3 folds the extra components into the second axis direction
      // (theta_i identified along the grid diagonal beyond the first two).
      int k1 = 0;
      for (int i = 1; i < dim_; ++i) k1 += k.k[i];
      fill_phase(ph0, k.k[0]);
      fill_phase(ph1, k1);
      for (int j0 = 0; j0 < n_; ++j0) {
        const Complex c0 = c * ph0[j0];
        Complex* row = out.data() + static_cast<std::size_t>(j0) * n_;
        for (int j1 = 0; j1 < n_; ++j1) row[j1] += c0 * ph1[j1];
      }
    }
  }
  return out;
}

}  // namespace oscine
