#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "oscine/classical.hpp"
#include "oscine/experiments.hpp"
#include "oscine/grid.hpp"
#include "oscine/growth.hpp"
#include "oscine/quantum.hpp"

namespace py = pybind11;
using namespace oscine;

namespace {

std::vector<int> to_index(const std::vector<int>& k) { return k; }

NormSeries series_from(const std::vector<std::pair<double, double>>& samples, double s) {
  NormSeries ns;
  ns.samples = samples;
  ns.s = s;
  return ns;
}

py::dict growth_to_dict(const GrowthReport& g) {
  py::dict d;
  d["class"] = std::string(to_string(g.cls));
  d["exponent"] = g.exponent;
  d["prefactor"] = g.prefactor;
  d["window"] = py::make_tuple(g.window_lo, g.window_hi);
  d["residual"] = g.residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quasi-periodic oscillator reduction and Sobolev-growth laboratory";
  m.attr("__version__") = OSCINE_VERSION;

  py::register_exception<DivisorFloorError>(m, "DivisorFloorError");
  py::register_exception<WindowOverflowError>(m, "WindowOverflowError");
  py::register_exception<TailBudgetError>(m, "TailBudgetError");

  py::class_<FrequencyVector>(m, "FrequencyVector")
      .def(py::init<std::vector<double>, double, double, int>(), py::arg("omega"),
           py::arg("gamma"), py::arg("tau"), py::arg("n_check") = 10000)
      .def_static("periodic", &FrequencyVector::periodic, py::arg("omega0") = 1.0)
      .def_static("golden", &FrequencyVector::golden)
      .def_property_readonly("omega", &FrequencyVector::omega)
      .def_property_readonly("dim", &FrequencyVector::dim)
      .def_property_readonly("gamma", &FrequencyVector::gamma)
      .def_property_readonly("tau", &FrequencyVector::tau);

  py::class_<QpFourierSeries>(m, "QpFourierSeries")
      .def(py::init([](const FrequencyVector& f, bool real) {
             return QpFourierSeries(f, real ? ValueKind::real : ValueKind::cplx);
           }),
           py::arg("freq"), py::arg("real") = true)
      .def_static("constant",
                  [](const FrequencyVector& f, Complex c) {
                    return QpFourierSeries::constant(f, c, c.imag() == 0.0
                                                            ? ValueKind::real
                                                            : ValueKind::cplx);
                  })
      .def_static("cosine",
                  [](const FrequencyVector& f, const std::vector<int>& k, double amp) {
                    return QpFourierSeries::cosine(f, to_index(k), amp);
                  },
                  py::arg("freq"), py::arg("k"), py::arg("amp") = 1.0)
      .def_static("sine",
                  [](const FrequencyVector& f, const std::vector<int>& k, double amp) {
                    return QpFourierSeries::sine(f, to_index(k), amp);
                  },
                  py::arg("freq"), py::arg("k"), py::arg("amp") = 1.0)
      .def("set_coeff",
           [](QpFourierSeries& s, const std::vector<int>& k, Complex v) {
             s.set_coeff(to_index(k), v);
           })
      .def("coeff",
           [](const QpFourierSeries& s, const std::vector<int>& k) {
             return s.coeff(std::span<const int>(k));
           })
      .def("add_real_harmonic",
           [](QpFourierSeries& s, const std::vector<int>& k, Complex half) {
             s.add_real_harmonic(to_index(k), half);
           })
      .def("__call__",
           [](const QpFourierSeries& s, const std::vector<double>& theta) {
             return evaluate(s, theta);
           })
      .def("to_json", [](const QpFourierSeries& s) { return s.to_json().dump(); })
      .def_property_readonly("n_harmonics",
                             [](const QpFourierSeries& s) { return s.coeffs().size(); });

  m.def("directional_derivative", &directional_derivative);
  m.def("antiderivative", &antiderivative, py::arg("f"),
        py::arg("divisor_floor") = kDivisorFloor);
  m.def("average", [](const QpFourierSeries& f) { return average(f); });
  m.def("multiply",
        [](const QpFourierSeries& f, const QpFourierSeries& g) { return multiply(f, g); });

  py::class_<Sl2Matrix>(m, "Sl2Matrix")
      .def(py::init([](const Eigen::Matrix2d& v) { return Sl2Matrix(v); }))
      .def_property_readonly("matrix", &Sl2Matrix::matrix)
      .def_property_readonly("det", &Sl2Matrix::det)
      .def_static("rotation_generator", &Sl2Matrix::rotation_generator)
      .def_static("hyperbolic", &Sl2Matrix::hyperbolic)
      .def_static("parabolic", &Sl2Matrix::parabolic);

  m.def("classify",
        [](const Sl2Matrix& b) { return std::string(to_string(classify(b))); });

  py::class_<MatrixSeries>(m, "MatrixSeries")
      .def(py::init<QpFourierSeries, QpFourierSeries, QpFourierSeries, QpFourierSeries,
                    bool>(),
           py::arg("m00"), py::arg("m01"), py::arg("m10"), py::arg("m11"),
           py::arg("trace_zero") = true)
      .def_static("zero", &MatrixSeries::zero);

  py::class_<AffineSystem>(m, "AffineSystem")
      .def(py::init([](const FrequencyVector& f, const Sl2Matrix& a, const MatrixSeries& fs,
                       const QpFourierSeries& b1, const QpFourierSeries& b2) {
             return AffineSystem(f, a, fs, {b1, b2});
           }))
      .def("linear_at_time", &AffineSystem::linear_at_time)
      .def("drift_at_time", &AffineSystem::drift_at_time)
      .def("to_json", [](const AffineSystem& s) { return s.to_json().dump(); });

  m.def("build_paper_system", &build_paper_system, py::arg("nu"), py::arg("a20"),
        py::arg("a11"), py::arg("a02"), py::arg("b1"), py::arg("b2"));

  m.def("flow",
        [](const AffineSystem& sys, const Eigen::Vector2d& x0, double T, double dt) {
          const auto traj = flow(sys, x0, T, dt);
          Eigen::MatrixXd out(traj.size(), 3);
          for (std::size_t i = 0; i < traj.size(); ++i)
            out.row(i) << traj[i].t, traj[i].x[0], traj[i].x[1];
          return out;
        },
        py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("dt"));

  m.def("rotation_number",
        [](const FrequencyVector& f, const Sl2Matrix& a, const MatrixSeries& fs, double T) {
          const auto e = rotation_number(f, a, fs, T);
          return py::make_tuple(e.rho, e.error_bar);
        },
        py::arg("freq"), py::arg("A"), py::arg("F"), py::arg("T") = 1e4);

  py::class_<NormalForm>(m, "NormalForm")
      .def_property_readonly("B", [](const NormalForm& n) { return n.B.matrix(); })
      .def_readonly("w", &NormalForm::w)
      .def_readonly("C", &NormalForm::C)
      .def_readonly("iota", &NormalForm::iota)
      .def_property_readonly(
          "cls", [](const NormalForm& n) { return std::string(to_string(n.cls)); })
      .def("to_json", [](const NormalForm& n) { return n.to_json().dump(); });

  py::class_<ReductionCertificate>(m, "ReductionCertificate")
      .def_readonly("alpha", &ReductionCertificate::alpha)
      .def_readonly("beta", &ReductionCertificate::beta)
      .def_readonly("rotation", &ReductionCertificate::rotation)
      .def_readonly("residual", &ReductionCertificate::residual);

  py::class_<HomologicalSolution>(m, "HomologicalSolution")
      .def_readonly("certificate", &HomologicalSolution::certificate)
      .def_readonly("normal_form", &HomologicalSolution::normal_form);

  m.def("solve_hyperbolic", &solve_hyperbolic, py::arg("p1"), py::arg("p2"),
        py::arg("lambda_"));
  m.def("solve_parabolic", &solve_parabolic, py::arg("p1"), py::arg("p2"), py::arg("kappa"),
        py::arg("divisor_floor") = kDivisorFloor);
  m.def("solve_elliptic",
        [](const QpFourierSeries& p1, const QpFourierSeries& p2, double rho, double dio,
           double sigma, double r) {
          EllipticConfig cfg;
          cfg.dio_constant = dio;
          cfg.sigma = sigma;
          cfg.decay_r = r;
          return solve_elliptic(p1, p2, rho, cfg);
        },
        py::arg("p1"), py::arg("p2"), py::arg("rho"), py::arg("dio_constant"),
        py::arg("sigma") = 2.0, py::arg("decay_r") = 0.5);
  m.def("solve_degenerate", &solve_degenerate, py::arg("p1"), py::arg("p2"),
        py::arg("divisor_floor") = kDivisorFloor);
  m.def("certify_dio_varrho", &certify_dio_varrho, py::arg("rho"), py::arg("freq"),
        py::arg("sigma"), py::arg("n_max") = 64);
  m.def("phase_correction",
        [](const QpFourierSeries& l1, const QpFourierSeries& l2, const QpFourierSeries& b11,
           const QpFourierSeries& b12, const QpFourierSeries& b21,
           const QpFourierSeries& b22) {
          const auto pc = phase_correction({l1, l2}, {b11, b12}, {b21, b22});
          return py::make_tuple(pc.C, pc.eps, pc.residual);
        });

  py::class_<Degree2Symbol>(m, "Degree2Symbol")
      .def(py::init([](double a20, double a11, double a02, double b1, double b2, double c) {
             return Degree2Symbol{a20, a11, a02, b1, b2, c};
           }),
           py::arg("a20") = 0.0, py::arg("a11") = 0.0, py::arg("a02") = 0.0,
           py::arg("b1") = 0.0, py::arg("b2") = 0.0, py::arg("c") = 0.0)
      .def_readwrite("a20", &Degree2Symbol::a20)
      .def_readwrite("a11", &Degree2Symbol::a11)
      .def_readwrite("a02", &Degree2Symbol::a02)
      .def_readwrite("b1", &Degree2Symbol::b1)
      .def_readwrite("b2", &Degree2Symbol::b2)
      .def_readwrite("c", &Degree2Symbol::c)
      .def_static("oscillator", &Degree2Symbol::oscillator);

  py::class_<BandedOperator>(m, "BandedOperator")
      .def_property_readonly("size", &BandedOperator::size)
      .def("dense", &BandedOperator::dense)
      .def("apply", [](const BandedOperator& h, const Eigen::VectorXcd& x) {
        Eigen::VectorXcd y;
        h.apply(x, y);
        return y;
      });

  m.def("weyl_quantize", &weyl_quantize, py::arg("symbol"), py::arg("n"));

  py::class_<HermiteState>(m, "HermiteState")
      .def(py::init([](const Eigen::VectorXcd& c) { return HermiteState{c}; }))
      .def_property_readonly("coeffs", [](const HermiteState& u) { return u.c; })
      .def_property_readonly("l2", &HermiteState::l2)
      .def("sobolev", &HermiteState::sobolev)
      .def_property_readonly("tail_mass", &HermiteState::tail_mass)
      .def("to_json", [](const HermiteState& u) { return u.to_json().dump(); })
      .def_static("basis_state", &HermiteState::basis_state);

  m.def("sobolev_norm", &sobolev_norm);
  m.def("relative_sobolev_distance", &relative_sobolev_distance);

  py::class_<GaussianPacket>(m, "GaussianPacket")
      .def(py::init([](double q, double p, Complex a) {
             return GaussianPacket{q, p, a};
           }),
           py::arg("q") = 0.0, py::arg("p") = 0.0, py::arg("A") = Complex{0.0, 1.0})
      .def_readwrite("q", &GaussianPacket::q)
      .def_readwrite("p", &GaussianPacket::p)
      .def_readwrite("A", &GaussianPacket::A);

  m.def("expand_gaussian", &expand_gaussian, py::arg("packet"), py::arg("n"));

  m.def("propagate",
        [](const std::function<Degree2Symbol(double)>& symbol, const HermiteState& u0,
           double T, double sample_dt, double norm_s, double state_dt, double dt, int n0,
           int n_max, int order) {
          PropagateOptions opts;
          opts.dt = dt;
          opts.n0 = n0;
          opts.n_max = n_max;
          opts.order = order;
          const auto res = propagate(symbol, u0, T, sample_dt, norm_s, state_dt, opts);
          py::dict out;
          Eigen::MatrixXd norms(res.norms.size(), 4);
          for (std::size_t i = 0; i < res.norms.size(); ++i)
            norms.row(i) << res.norms[i].t, res.norms[i].l2, res.norms[i].hs,
                res.norms[i].tail;
          out["norms"] = norms;
          py::list states;
          for (const auto& [t, u] : res.states) states.append(py::make_tuple(t, u));
          out["states"] = states;
          out["final_dim"] = res.final_dim;
          return out;
        },
        py::arg("symbol"), py::arg("u0"), py::arg("T"), py::arg("sample_dt") = 0.25,
        py::arg("norm_s") = 1.0, py::arg("state_dt") = 0.0, py::arg("dt") = 1e-2,
        py::arg("n0") = 256, py::arg("n_max") = 65536, py::arg("order") = 2);

  m.def("coherent_oracle",
        [](const std::function<Degree2Symbol(double)>& symbol, const GaussianPacket& g,
           double t, int n) { return coherent_oracle(symbol, g, t, n); },
        py::arg("symbol"), py::arg("packet"), py::arg("t"), py::arg("n") = 256);

  m.def("hamiltonian_symbol",
        [](const AffineSystem& sys) {
          std::function<Degree2Symbol(double)> f = hamiltonian_symbol(sys);
          return f;
        },
        py::arg("system"),
        "degree-2 symbol path whose equations of motion are the affine system");

  py::class_<GridState>(m, "GridState")
      .def(py::init([](const Eigen::VectorXcd& v, double x_min, double dx) {
             GridState g;
             g.v = v;
             g.x_min = x_min;
             g.dx = dx;
             return g;
           }),
           py::arg("samples"), py::arg("x_min"), py::arg("dx"))
      .def_static("gaussian", &GridState::gaussian, py::arg("q"), py::arg("p"),
                  py::arg("sigma"), py::arg("x_min"), py::arg("x_max"), py::arg("m"))
      .def_static("hermite", &GridState::hermite, py::arg("n"), py::arg("x_min"),
                  py::arg("x_max"), py::arg("m"))
      .def_readonly("v", &GridState::v)
      .def_readonly("x_min", &GridState::x_min)
      .def_readonly("dx", &GridState::dx)
      .def_property_readonly("l2", &GridState::l2)
      .def("save_binary", &GridState::save_binary)
      .def_static("load_binary", &GridState::load_binary);

  m.def("grid_sobolev_norm", &grid_sobolev_norm);
  m.def("grid_h0_norm", &grid_h0_norm);
  m.def("grid_moment", &grid_moment);
  m.def("grid_derivative", &grid_derivative, py::arg("u"), py::arg("order") = 1);
  m.def("stark_evolve_closed_form", &stark_evolve_closed_form, py::arg("u0"),
        py::arg("kappa"), py::arg("iota"), py::arg("t"));
  m.def("dilation_evolve", &dilation_evolve, py::arg("u0"), py::arg("lambda_"),
        py::arg("t"));
  m.def("transport_evolve", &transport_evolve, py::arg("u0"), py::arg("iota"),
        py::arg("t"));
  m.def("stark_weighted_moment", &stark_weighted_moment, py::arg("u0"), py::arg("a"),
        py::arg("s"), py::arg("t"));

  m.def("derivative_polynomials",
        [](int alpha, double kappa, double iota) {
          const auto dp = derivative_polynomials(alpha, kappa, iota);
          py::dict out;
          out["coeffs"] = dp.p.c;  // (deg_t+1) x (deg_y+1), t-power by row
          out["leading"] = dp.leading;
          return out;
        },
        py::arg("alpha"), py::arg("kappa"), py::arg("iota"));

  m.def("fit_growth",
        [](const std::vector<std::pair<double, double>>& samples, double s, double lo,
           double hi) {
          const auto ns = series_from(samples, s);
          return growth_to_dict(lo > 0 ? fit_growth(ns, lo, hi) : fit_growth(ns));
        },
        py::arg("samples"), py::arg("s") = 1.0, py::arg("window_lo") = 0.0,
        py::arg("window_hi") = 0.0);

  m.def("sandwich_check",
        [](const std::vector<std::pair<double, double>>& samples, double lower_amp,
           double lower_power, double upper_amp, double upper_power, bool upper_plus_one,
           double slack) {
          const auto r = sandwich_check(series_from(samples, 1.0),
                                        Envelope{lower_amp, lower_power, false},
                                        Envelope{upper_amp, upper_power, upper_plus_one},
                                        slack);
          py::dict d;
          d["pass"] = r.pass;
          d["c"] = r.c_best;
          d["C"] = r.C_best;
          d["ratio"] = r.ratio;
          return d;
        },
        py::arg("samples"), py::arg("lower_amp"), py::arg("lower_power"),
        py::arg("upper_amp"), py::arg("upper_power"), py::arg("upper_plus_one") = true,
        py::arg("slack") = 100.0);

  m.def("registered_experiments", [] { return registered_experiments(); });
  m.def("run_experiment",
        [](const std::string& name, const std::string& out_dir,
           const std::map<std::string, std::string>& overrides) {
          TomlLite toml;
          for (const auto& [k, v] : overrides) toml.set_override(k + "=" + v);
          ExperimentConfig cfg = ExperimentConfig::from_toml(toml);
          cfg.name = name;
          cfg.out_dir = out_dir;
          const auto outcome = run_experiment(cfg);
          return py::make_tuple(outcome.exit_code, outcome.message);
        },
        py::arg("name"), py::arg("out_dir"),
        py::arg("overrides") = std::map<std::string, std::string>{});
}
