#include "qsl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qsl/asymptotics.hpp"
#include "qsl/scenario.hpp"
#include "qsl/summation.hpp"
#include "qsl/transforms.hpp"

namespace qsl {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// All artifacts are written atomically: temp file in the same directory,
// then rename.
void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + path.string());
    }
    fs::rename(tmp, path);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ojson validation_json(const ValidationReport& rep) {
    ojson out = ojson::array();
    for (const auto& it : rep.items) {
        ojson o;
        o["name"] = it.name;
        o["pass"] = it.pass;
        o["margin"] = it.margin;
        if (!it.detail.empty()) o["detail"] = it.detail;
        out.push_back(std::move(o));
    }
    return out;
}

void print_validation(const char* which, const ValidationReport& rep) {
    for (const auto& it : rep.items)
        std::cout << which << " " << it.name << ": " << (it.pass ? "pass" : "FAIL")
                  << " (margin " << fmt(it.margin) << ")\n";
}

struct LoadedScenario {
    Scenario sc;
    int error = 0;  // 0 ok, 2 parse
};

LoadedScenario load_or_report(const std::string& path) {
    LoadedScenario L;
    try {
        L.sc = load_scenario(path);
    } catch (const ScenarioParseError& e) {
        std::cerr << e.what() << "\n";
        L.error = 2;
    }
    return L;
}

// Runs both validations; returns true when every check passes.
bool validate_all(const Scenario& sc, ValidationReport& vq, ValidationReport& vb) {
    vq = validate_spec_q(sc.q);
    vb = validate_spec_b(sc.b);
    return vq.all_pass() && vb.all_pass();
}

void apply_overrides(Scenario& sc, const CliOverrides& ov) {
    if (ov.tol > 0) sc.run.tol = ov.tol;
    if (ov.j_max > 0) sc.run.j_max = ov.j_max;
    if (ov.n_max >= 0) sc.run.n_max = ov.n_max;
    if (ov.seed >= 0) sc.seed = ov.seed;
}

cplx eps_reference(const Scenario& sc) {
    return std::polar(sc.q.eps0 / sc.run.eps_div_lo, sc.run.eps_arg);
}

void write_norm_table_q(const NeumannSeriesQ& wq, const fs::path& path) {
    std::ostringstream ss;
    ss << "j,norm_theta,norm_disc\n";
    for (size_t j = 0; j < wq.norm_theta.size(); ++j)
        ss << j << "," << fmt(wq.norm_theta[j]) << "," << fmt(wq.norm_disc[j]) << "\n";
    write_atomic(path, ss.str());
}

void write_norm_table_b(const NeumannSeriesB& S, const fs::path& path) {
    std::ostringstream ss;
    ss << "j,norm_sector,norm_disc\n";
    for (size_t j = 0; j < S.norm_sector.size(); ++j)
        ss << j << "," << fmt(S.norm_sector[j]) << "," << fmt(S.norm_disc[j]) << "\n";
    write_atomic(path, ss.str());
}

ojson flatness_json(const FlatnessReport& f) {
    ojson o;
    o["model"] = f.model;
    o["exponent"] = f.exponent;
    o["rate"] = f.rate;
    o["power_K"] = f.power_K;
    o["log_prefactor"] = f.log_prefactor;
    o["rms"] = f.rms;
    o["rms_other"] = f.rms_other;
    o["margin"] = f.margin;
    o["n_samples"] = f.n_samples;
    return o;
}

// Shared direction set for the Borel-stage lattice: every Laplace ray used
// downstream (the e directions and the arc quadrature angles of both cocycle
// families) must exist as a lattice direction.
std::vector<double> borel_extra_dirs(const Scenario& sc) {
    std::vector<double> extra;
    for (const auto& row : sc.b.e_dirs)
        for (double e : row) extra.push_back(e);
    const auto& ed = sc.b.e_dirs;
    for (double a : arc_directions(ed[0][0], ed[0][2], 16)) extra.push_back(a);
    for (double a : arc_directions(ed[0][2], ed[1][0], 16)) extra.push_back(a);
    return extra;
}

}  // namespace

int cmd_validate(const std::string& scenario_path, const std::string& out_dir) {
    LoadedScenario L = load_or_report(scenario_path);
    if (L.error) return L.error;
    ValidationReport vq, vb;
    bool ok = validate_all(L.sc, vq, vb);
    print_validation("problem_q", vq);
    print_validation("problem_b", vb);
    ojson out;
    out["scenario"] = scenario_path;
    out["problem_q"] = validation_json(vq);
    out["problem_b"] = validation_json(vb);
    out["all_pass"] = ok;
    write_atomic(fs::path(out_dir) / "validate.json", out.dump(2) + "\n");
    std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
    return ok ? 0 : 1;
}

int cmd_solve(const std::string& scenario_path, const std::string& stage,
              const std::string& out_dir, const CliOverrides& ov) {
    LoadedScenario L = load_or_report(scenario_path);
    if (L.error) return L.error;
    Scenario& sc = L.sc;
    apply_overrides(sc, ov);
    ValidationReport vq, vb;
    if (!validate_all(sc, vq, vb)) {
        std::cerr << "scenario fails validation; run the validate subcommand\n";
        return 1;
    }
    const cplx eps = eps_reference(sc);
    const fs::path out(out_dir);

    if (stage == "q") {
        SolveOptionsQ oq = sc.solve_opts_q();
        NeumannSeriesQ wq;
        try {
            wq = solve_wk(sc.q, eps, 0, oq);
        } catch (const std::runtime_error& e) {
            std::cerr << e.what() << "\n";
            return 3;
        }
        dump_grid_csv(wq.wk, (out / "wk_grid.csv").string());
        write_norm_table_q(wq, out / "norms_q.csv");
        DecayReportQ dec = measure_decay_q(wq, sc.q, 0);
        ojson o;
        o["eps"] = {eps.real(), eps.imag()};
        o["converged"] = wq.converged;
        o["contraction_max"] = wq.contraction_max;
        o["residual"] = wq.residual;
        o["n_terms"] = (int)wq.terms.size();
        o["K1_emp"] = dec.K1_emp;
        o["K2_emp"] = dec.K2_emp;
        o["disc_quad_emp"] = dec.disc_quad_emp;
        o["disc_quad_model"] = dec.disc_quad_model;
        o["frame_quad_emp"] = dec.frame_quad_emp;
        o["upper_bounds_ok"] = dec.upper_bounds_ok;
        write_atomic(out / "decay_q.json", o.dump(2) + "\n");
        std::cout << "stage q: residual " << fmt(wq.residual) << ", contraction "
                  << fmt(wq.contraction_max) << "\n";
        return 0;
    }
    if (stage == "borel") {
        if (!fs::exists(out / "decay_q.json")) {
            std::cerr << "stage borel requires the stage q artifacts in " << out_dir << "\n";
            return 4;
        }
        SolveOptionsQ oq = sc.solve_opts_q();
        oq.extra_dirs = borel_extra_dirs(sc);
        NeumannSeriesQ wq;
        NeumannSeriesB S;
        try {
            wq = solve_wk(sc.q, eps, 0, oq);
            S = solve_vk(sc.b, sc.q, wq, 1, 0, sc.solve_opts_b());
        } catch (const std::runtime_error& e) {
            std::cerr << e.what() << "\n";
            return 3;
        }
        dump_grid_csv(S.vk, (out / "vk_grid.csv").string());
        write_norm_table_b(S, out / "norms_b.csv");
        DecayReportB dec = measure_decay_b(S, sc.q);
        ojson o;
        o["eps"] = {eps.real(), eps.imag()};
        o["converged"] = S.log_full.converged;
        o["picard_iterations"] = S.log_full.iterations;
        o["picard_ratio_max"] = S.log_full.ratio_max;
        o["residual"] = S.residual;
        o["K5_emp"] = dec.K5_emp;
        o["K6_emp"] = dec.K6_emp;
        o["disc_quad_emp"] = dec.disc_quad_emp;
        o["disc_quad_model"] = dec.disc_quad_model;
        o["nested_quad_emp"] = dec.nested_quad_emp;
        o["upper_bounds_ok"] = dec.upper_bounds_ok;
        write_atomic(out / "decay_b.json", o.dump(2) + "\n");
        std::cout << "stage borel: residual " << fmt(S.residual) << ", picard ratio "
                  << fmt(S.log_full.ratio_max) << "\n";
        return 0;
    }
    std::cerr << "unknown stage '" << stage << "' (expected q or borel)\n";
    return 2;
}

int cmd_flatness(const std::string& scenario_path, const std::string& pair,
                 const std::string& out_dir, const CliOverrides& ov) {
    LoadedScenario L = load_or_report(scenario_path);
    if (L.error) return L.error;
    Scenario& sc = L.sc;
    apply_overrides(sc, ov);
    ValidationReport vq, vb;
    if (!validate_all(sc, vq, vb)) {
        std::cerr << "scenario fails validation; run the validate subcommand\n";
        return 1;
    }
    const bool want_q = pair == "all" || pair == "q-cross-p";
    const bool want_same = pair == "all" || pair == "same-p";
    const bool want_cross = pair == "all" || pair == "cross-p";
    if (!want_q && !want_same && !want_cross) {
        std::cerr << "unknown pair '" << pair << "' (expected q-cross-p, same-p, cross-p, all)\n";
        return 2;
    }
    const cplx eps_ref = eps_reference(sc);
    const std::vector<cplx> eps_list = sc.eps_plan();
    const ProbeGrid probes = make_probes(sc.run.t_radius, sc.run.t_arg, 0.5 * sc.q.beta,
                                         sc.run.n_t, sc.run.n_z);
    const fs::path out(out_dir);
    std::vector<CocycleSample> samples;
    ojson fits;

    // Pair-specific measurement designs. Same-p: larger |t| probes keep the
    // Gevrey rate M = r cos(...)/|t| inside double range across the sweep,
    // the measurement window r <= 2 excludes the echo of the dilated root at
    // q^delta * tau_root, and the arc radius 0.9 keeps every piece of the
    // decomposition exponentially small (no cancellation floor). Cross-p:
    // |eps| samples in geometric ratio q^(2 delta) = ratio of consecutive
    // ladder-rung radii, so the sweep is phase-locked to the rung ladder and
    // the fitted envelope is not aliased by the log-periodic scalloping.
    const ProbeGrid probes_same = make_probes(3.0, sc.run.t_arg, 0.5 * sc.q.beta, 1, 3);
    std::vector<cplx> eps_same, eps_cross;
    for (int i = 0; i < sc.run.eps_samples; ++i) {
        double f = (sc.run.eps_samples == 1) ? 0.0 : (double)i / (sc.run.eps_samples - 1);
        eps_same.push_back(std::polar(1.6 * sc.q.eps0 * std::pow(0.102 / 1.6, f), -0.9));
        eps_cross.push_back(std::polar(sc.q.eps0 * std::pow(sc.q.qd() * sc.q.qd(), -(i + 1)),
                                       sc.run.eps_arg));
    }

    try {
        if (want_q) {
            WkEvaluator wk{&sc.q, eps_ref, sc.run.j_terms,
                           MGrid{sc.grids.M_max, sc.grids.m_nodes}};
            CocycleSample cq = cocycle_difference_q(wk, sc.q, sc.q.dirs[0], sc.q.dirs[1], probes,
                                                    eps_list, sc.run.j_terms, true, sc.grids.R_tr);
            cq.tag = "q-cross-p";
            fits["q-cross-p"] = flatness_json(fit_flatness(cq, sc.q.q));
            samples.push_back(std::move(cq));
        }
        if (want_same || want_cross) {
            SolveOptionsQ oq = sc.solve_opts_q();
            oq.extra_dirs = borel_extra_dirs(sc);
            NeumannSeriesQ wq = solve_wk(sc.q, eps_ref, 0, oq);
            NeumannSeriesB S = solve_vk(sc.b, sc.q, wq, 0, 1, sc.solve_opts_b());
            if (want_same) {
                CocycleSample cs = cocycle_difference_b(S, sc.b, sc.q, sc.b.e_dirs[0][0],
                                                        sc.b.e_dirs[0][2], probes_same, eps_same,
                                                        "same-p", 0.9, true, 2.0, 16);
                fits["same-p"] = flatness_json(fit_flatness(cs, sc.q.q));
                samples.push_back(std::move(cs));
            }
            if (want_cross) {
                CocycleSample cc = cocycle_difference_b(S, sc.b, sc.q, sc.b.e_dirs[0][2],
                                                        sc.b.e_dirs[1][0], probes, eps_cross,
                                                        "cross-p", 0.0, true, sc.grids.R_tr, 16);
                fits["cross-p"] = flatness_json(fit_flatness(cc, sc.q.q));
                samples.push_back(std::move(cc));
            }
        }
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    write_cocycle_csv(samples, (out / "flatness_samples.csv").string());
    write_atomic(out / "flatness.json", fits.dump(2) + "\n");
    for (auto& [key, val] : fits.items())
        std::cout << key << ": model " << val["model"].get<std::string>() << ", exponent "
                  << fmt(val["exponent"].get<double>()) << ", margin "
                  << fmt(val["margin"].get<double>()) << "\n";
    return 0;
}

int cmd_formal(const std::string& scenario_path, const std::string& out_dir,
               const CliOverrides& ov) {
    LoadedScenario L = load_or_report(scenario_path);
    if (L.error) return L.error;
    Scenario& sc = L.sc;
    apply_overrides(sc, ov);
    const MGrid g{sc.grids.M_max, sc.grids.m_nodes};
    FormalSeriesF fq = formal_coeffs_q(sc.q, g, sc.run.n_max);
    FormalSeriesF fb = formal_coeffs_b(sc.b, fq, sc.run.n_max);
    auto dump = [&](const FormalSeriesF& f, const fs::path& path) {
        std::ostringstream ss;
        ss << "m,m_node,t_power,re,im\n";
        for (size_t m = 0; m < f.h.size(); ++m)
            for (size_t i = 0; i < f.h[m].size(); ++i)
                for (size_t p = 0; p < f.h[m][i].size(); ++p) {
                    const cplx c = f.h[m][i][p];
                    if (c == cplx(0.0)) continue;
                    ss << m << "," << fmt(f.g.node((int)i)) << "," << p << "," << fmt(c.real())
                       << "," << fmt(c.imag()) << "\n";
                }
        write_atomic(path, ss.str());
    };
    dump(fq, fs::path(out_dir) / "formal_q.csv");
    dump(fb, fs::path(out_dir) / "formal_b.csv");
    std::cout << "formal coefficients written to order " << sc.run.n_max << "\n";
    return 0;
}

namespace {

// Fast deterministic self-checks aggregated by cmd_report: transform
// identities, the Euler-operator expansion, Euler-Maclaurin, the Dirichlet
// sum bound and planted-model recovery. The heavy pipelines (solve,
// flatness) have their own artifacts.
ojson report_checks(const Scenario& sc) {
    ojson checks = ojson::array();
    auto add = [&](const std::string& name, bool pass, double value) {
        ojson o;
        o["name"] = name;
        o["pass"] = pass;
        o["value"] = value;
        checks.push_back(std::move(o));
    };

    // m_k-Laplace of monomials against Gamma(n/k) T^n.
    {
        double worst = 0.0;
        const cplx T = std::polar(0.3, 0.05);
        for (int k = 1; k <= 3; ++k) {
            RaySpec ray{0.0, 40.0, 0.2, 8, 1.35};
            for (int n = 1; n <= 6; ++n) {
                RadialFun w = [n](cplx u) { return std::pow(u, n); };
                LaplaceResult r = mk_laplace(w, k, ray, T);
                cplx exact = std::tgamma((double)n / k) * std::pow(T, n);
                worst = std::max(worst, std::abs(r.value - exact) / std::abs(exact));
            }
        }
        add("laplace_monomial_maxrel", worst < 1e-6, worst);
    }
    {
        RadialFun w = [](cplx u) { return u * std::exp(-0.2 * u); };
        RaySpec ray{0.0, 40.0, 0.2, 8, 1.35};
        double d = check_laplace_dilation(w, sc.q.k, sc.q.qd(), ray, std::polar(0.3, 0.05));
        add("laplace_dilation_defect", d < 1e-8, d);
        double e = check_laplace_euler(w, sc.q.k, ray, std::polar(0.3, 0.05));
        add("laplace_euler_defect", e < 1e-5, e);
    }

    // Euler-operator expansion on monomials, double-precision residual.
    {
        double worst = 0.0;
        for (int k = 1; k <= 3; ++k)
            for (int dl = 1; dl <= 4; ++dl) {
                std::vector<Rational> A = expand_euler_operators(dl, k);
                for (int n = 0; n <= 10; ++n) {
                    double lhs = 1.0, rhs = 1.0;
                    for (int i = 0; i < dl; ++i) lhs *= n - i;
                    for (int i = 0; i < dl; ++i) rhs *= n + i * k;
                    for (int p = 1; p < dl; ++p) {
                        double pr = (double)A[p - 1].num / (double)A[p - 1].den;
                        for (int i = 0; i < p; ++i) pr *= n + i * k;
                        rhs += pr;
                    }
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
        add("euler_operator_residual", worst == 0.0, worst);
    }

    // Euler-Maclaurin identity.
    {
        double worst = 0.0;
        worst = std::max(worst, euler_maclaurin_check([](double t) { return t; },
                                                      [](double) { return 1.0; }, 20));
        worst = std::max(worst, euler_maclaurin_check([](double t) { return t * t; },
                                                      [](double t) { return 2.0 * t; }, 20));
        worst = std::max(worst, euler_maclaurin_check([](double t) { return std::exp(-t); },
                                                      [](double t) { return -std::exp(-t); }, 20));
        add("euler_maclaurin_residual", worst < 1e-10, worst);
    }

    // Dirichlet-sum bound, calibrated and tested on disjoint eps ranges.
    {
        std::vector<double> cal, test;
        for (int i = 0; i < 10; ++i) {
            cal.push_back(1e-2 * std::pow(10.0, i / 9.0));
            test.push_back(1e-4 * std::pow(50.0, i / 9.0));
        }
        DirichletReport dr = dirichlet_sum(0.9, 1.0, 1.0, 0.5, sc.q.q, 0.5, cal, test);
        add("dirichlet_bound_frac", dr.bound_holds, dr.frac_holding);
    }

    // Planted-model recovery for the flatness fitter.
    {
        const double q = sc.q.q;
        const double kap = 0.5, K = 1.5, b0 = 0.3;
        CocycleSample plant;
        plant.tag = "planted-q";
        for (int i = 0; i < 12; ++i) {
            double e = 0.05 * std::pow(1e-4 / 0.05, i / 11.0);
            double le = std::log(e);
            plant.eps.push_back(e);
            plant.delta.push_back(std::exp(b0 + K * le - kap / (2.0 * std::log(q)) * le * le));
            plant.route_gap.push_back(0.0);
        }
        FlatnessReport fq = fit_flatness(plant, q);
        double errq = std::abs(fq.exponent - kap) / kap;
        add("planted_qgevrey_recovery", fq.model == "q-gevrey" && errq < 1e-6, errq);

        const double M = 5e-5;
        const int kk = 2;
        CocycleSample plant2;
        plant2.tag = "planted-gevrey";
        for (int i = 0; i < 12; ++i) {
            double e = 0.05 * std::pow(3.5e-4 / 0.05, i / 11.0);
            plant2.eps.push_back(e);
            plant2.delta.push_back(std::exp(b0 - M * std::pow(e, -kk)));
            plant2.route_gap.push_back(0.0);
        }
        FlatnessReport fg = fit_flatness(plant2, q);
        double errg = std::abs(fg.rate - M) / M;
        add("planted_gevrey_recovery",
            fg.model == "gevrey" && fg.exponent == (double)kk && errg < 1e-6, errg);
    }
    return checks;
}

}  // namespace

int cmd_report(const std::string& scenario_path, const std::string& out_dir,
               const CliOverrides& ov) {
    LoadedScenario L = load_or_report(scenario_path);
    if (L.error) return L.error;
    Scenario& sc = L.sc;
    apply_overrides(sc, ov);
    ValidationReport vq = validate_spec_q(sc.q);
    ValidationReport vb = validate_spec_b(sc.b);

    ojson rep;
    rep["scenario"] = fs::path(scenario_path).filename().string();
    rep["seed"] = sc.seed;
    rep["problem_q"] = validation_json(vq);
    rep["problem_b"] = validation_json(vb);
    ojson checks = report_checks(sc);
    rep["checks"] = checks;
    bool all = vq.all_pass() && vb.all_pass();
    for (const auto& c : checks) all = all && c["pass"].get<bool>();
    rep["all_pass"] = all;

    std::ostringstream csv;
    csv << "section,name,value,pass\n";
    auto emit = [&](const char* sec, const std::string& name, double value, bool pass) {
        csv << sec << "," << name << "," << fmt(value) << "," << (pass ? 1 : 0) << "\n";
    };
    for (const auto& it : vq.items) emit("problem_q", it.name, it.margin, it.pass);
    for (const auto& it : vb.items) emit("problem_b", it.name, it.margin, it.pass);
    for (const auto& c : checks)
        emit("checks", c["name"].get<std::string>(), c["value"].get<double>(),
             c["pass"].get<bool>());

    const fs::path out(out_dir);
    write_atomic(out / "report.json", rep.dump(2) + "\n");
    write_atomic(out / "report.csv", csv.str());
    std::cout << (all ? "report: all checks passed" : "report: some checks FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace qsl
