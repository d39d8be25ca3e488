// Python bindings for the main operations: scenario validation, the batch
// subcommands, flatness-model fitting, and the fast closed-form checks.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsl/asymptotics.hpp"
#include "qsl/borel.hpp"
#include "qsl/cli.hpp"
#include "qsl/scenario.hpp"
#include "qsl/transforms.hpp"

namespace py = pybind11;
using namespace qsl;

namespace {

py::dict validate_scenario(const std::string& path) {
    Scenario sc = load_scenario(path);
    py::dict out;
    for (auto [key, rep] :
         {std::pair{"problem_q", validate_spec_q(sc.q)}, {"problem_b", validate_spec_b(sc.b)}}) {
        py::list items;
        for (const auto& it : rep.items) {
            py::dict d;
            d["name"] = it.name;
            d["pass"] = it.pass;
            d["margin"] = it.margin;
            d["detail"] = it.detail;
            items.append(d);
        }
        py::dict sec;
        sec["all_pass"] = rep.all_pass();
        sec["items"] = items;
        out[key] = sec;
    }
    return out;
}

py::dict fit_flatness_py(const std::vector<double>& eps, const std::vector<double>& delta,
                         double q, int k_max) {
    if (eps.size() != delta.size())
        throw std::invalid_argument("eps and delta must have the same length");
    CocycleSample s;
    for (size_t i = 0; i < eps.size(); ++i) {
        s.eps.push_back(cplx(eps[i], 0.0));
        s.delta.push_back(delta[i]);
        s.route_gap.push_back(0.0);
        s.sup_direct.push_back(delta[i]);
    }
    FlatnessReport r = fit_flatness(s, q, k_max);
    py::dict out;
    out["model"] = r.model;
    out["exponent"] = r.exponent;
    out["rate"] = r.rate;
    out["power_K"] = r.power_K;
    out["log_prefactor"] = r.log_prefactor;
    out["rms"] = r.rms;
    out["rms_other"] = r.rms_other;
    out["margin"] = r.margin;
    out["n_samples"] = r.n_samples;
    return out;
}

std::vector<std::string> euler_coeffs(int delta, int k) {
    std::vector<std::string> out;
    for (const Rational& r : expand_euler_operators(delta, k)) out.push_back(r.str());
    return out;
}

double laplace_monomial_defect(int n, int k) {
    RaySpec ray{0.0, 40.0, 0.2, 8, 1.35};
    const cplx T = std::polar(0.3, 0.1);
    RadialFun w = [n](cplx u) { return std::pow(u, n); };
    LaplaceResult r = mk_laplace(w, k, ray, T);
    cplx exact = std::tgamma((double)n / k) * std::pow(T, n);
    return std::abs(r.value - exact) / std::abs(exact);
}

}  // namespace

PYBIND11_MODULE(qsl_py, m) {
    m.doc() = "Borel-Laplace-Fourier summation laboratory (python front end)";

    m.def("validate_scenario", &validate_scenario, py::arg("scenario_path"),
          "Run both validation batteries on a scenario file; returns a dict per problem.");
    m.def("fit_flatness", &fit_flatness_py, py::arg("eps"), py::arg("delta"), py::arg("q"),
          py::arg("k_max") = 4,
          "Fit the Gevrey and q-Gevrey decay models to samples of |eps| -> delta.");
    m.def("dirichlet_sum_value", &dirichlet_sum_value, py::arg("del1"), py::arg("del2"),
          py::arg("del3"), py::arg("del4"), py::arg("q"), py::arg("eps"));
    m.def("euler_coeffs", &euler_coeffs, py::arg("delta"), py::arg("k"),
          "Exact expansion coefficients as rational-number strings.");
    m.def("laplace_monomial_defect", &laplace_monomial_defect, py::arg("n"), py::arg("k"),
          "Relative defect of the order-k Laplace transform on the monomial u^n.");

    // batch subcommands, usable in-process (return the CLI exit code)
    auto wrap_overrides = [](double tol, int j_max, int n_max, long seed) {
        CliOverrides ov;
        ov.tol = tol;
        ov.j_max = j_max;
        ov.n_max = n_max;
        ov.seed = seed;
        return ov;
    };
    m.def(
        "cmd_validate",
        [](const std::string& sc, const std::string& out) { return cmd_validate(sc, out); },
        py::arg("scenario_path"), py::arg("out_dir"));
    m.def(
        "cmd_solve",
        [wrap_overrides](const std::string& sc, const std::string& stage, const std::string& out,
                         double tol, int j_max, int n_max, long seed) {
            return cmd_solve(sc, stage, out, wrap_overrides(tol, j_max, n_max, seed));
        },
        py::arg("scenario_path"), py::arg("stage"), py::arg("out_dir"), py::arg("tol") = -1.0,
        py::arg("j_max") = -1, py::arg("n_max") = -1, py::arg("seed") = -1);
    m.def(
        "cmd_flatness",
        [wrap_overrides](const std::string& sc, const std::string& pair, const std::string& out,
                         double tol, int j_max, int n_max, long seed) {
            return cmd_flatness(sc, pair, out, wrap_overrides(tol, j_max, n_max, seed));
        },
        py::arg("scenario_path"), py::arg("pair"), py::arg("out_dir"), py::arg("tol") = -1.0,
        py::arg("j_max") = -1, py::arg("n_max") = -1, py::arg("seed") = -1);
    m.def(
        "cmd_formal",
        [wrap_overrides](const std::string& sc, const std::string& out, double tol, int j_max,
                         int n_max, long seed) {
            return cmd_formal(sc, out, wrap_overrides(tol, j_max, n_max, seed));
        },
        py::arg("scenario_path"), py::arg("out_dir"), py::arg("tol") = -1.0,
        py::arg("j_max") = -1, py::arg("n_max") = -1, py::arg("seed") = -1);
    m.def(
        "cmd_report",
        [wrap_overrides](const std::string& sc, const std::string& out, double tol, int j_max,
                         int n_max, long seed) {
            return cmd_report(sc, out, wrap_overrides(tol, j_max, n_max, seed));
        },
        py::arg("scenario_path"), py::arg("out_dir"), py::arg("tol") = -1.0,
        py::arg("j_max") = -1, py::arg("n_max") = -1, py::arg("seed") = -1);
}
