#include "qsl/qconv.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <stdexcept>

namespace qsl {

FrameFamily ProblemSpecQ::frames() const {
    FrameFamily ff;
    ff.mu0 = mu0;
    ff.mu1 = mu1;
    ff.Qhat = Qhat;
    ff.Qcheck = Qcheck;
    ff.q = q;
    ff.delta = delta;
    ff.directions = dirs;
    return ff;
}

std::vector<double> make_directions(const ProblemSpecQ& spec, int n_uniform,
                                    const std::vector<double>& extra) {
    std::vector<double> out;
    for (int i = 0; i < n_uniform; ++i) out.push_back(2.0 * PI * i / n_uniform);
    const double w = FrameFamily{}.strip_half_aperture;
    for (size_t p = 0; p < spec.dirs.size(); ++p) {
        double a = spec.dirs[p];
        double b = spec.dirs[(p + 1) % spec.dirs.size()];
        out.push_back(norm_angle(a));
        out.push_back(norm_angle(a - 0.5 * w));
        out.push_back(norm_angle(a + 0.5 * w));
        // midline of the gap [a, b] (cyclic)
        double gap = norm_angle(b - a);
        out.push_back(norm_angle(a + 0.5 * gap));
    }
    for (double e : extra) out.push_back(norm_angle(e));
    std::sort(out.begin(), out.end());
    std::vector<double> ded;
    for (double a : out)
        if (ded.empty() || a - ded.back() > 1e-9) ded.push_back(a);
    return ded;
}

ValidationReport validate_spec_q(const ProblemSpecQ& spec) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool pass, double margin, const std::string& detail = "") {
        rep.items.push_back({name, pass, margin, detail});
    };

    const int k = spec.k, D = spec.D, dD = spec.dD();
    // exponent balance
    double worst = INF;
    bool ok = true;
    for (int l = 0; l + 1 < D; ++l) {
        double m1 = (double)(k * dD - 1) - (spec.k1 * spec.delta + k * spec.d[l]);
        double m2 = (double)(spec.Delta[l] - k * spec.d[l]);
        worst = std::min({worst, m1, m2});
        ok = ok && m1 >= 0 && m2 >= 0;
    }
    add("exponent_balance", ok, worst);

    // degrees and non-vanishing symbols on the m-grid
    const Poly& RD = spec.R.back();
    bool deg_ok = poly_deg(spec.Q) >= poly_deg(RD);
    for (int l = 0; l + 1 < D; ++l) deg_ok = deg_ok && poly_deg(RD) >= poly_deg(spec.R[l]);
    add("degree_chain", deg_ok, (double)(poly_deg(spec.Q) - poly_deg(RD)));

    MGrid mg{16.0, 257};
    double minQ = INF, minRD = INF;
    bool ann_ok = true;
    double ann_margin = INF;
    for (int i = 0; i < mg.n; ++i) {
        double m = mg.node(i);
        cplx Qv = poly_eval_im(spec.Q, m), Rv = poly_eval_im(RD, m);
        minQ = std::min(minQ, std::abs(Qv));
        minRD = std::min(minRD, std::abs(Rv));
        cplx quot = Qv / Rv;
        if (!spec.ann.contains(quot)) ann_ok = false;
        ann_margin = std::min(ann_margin, std::abs(quot) - spec.ann.r);
    }
    add("symbols_nonvanishing", minQ > 0 && minRD > 0, std::min(minQ, minRD));
    add("quotient_in_annulus", ann_ok, ann_margin);
    add("mu_exceeds_degree", spec.mu > poly_deg(RD) + 1, spec.mu - (poly_deg(RD) + 1));
    add("frame_constraint", spec.frames().constraint_ok(1e-9),
        std::abs(spec.Qhat * spec.mu1 - spec.qd() * spec.Qcheck * spec.mu0));

    // roots: covering condition + separation on the working domains
    std::vector<double> m_samples;
    for (int i = 0; i < 33; ++i) m_samples.push_back(-16.0 + i);
    std::vector<std::vector<cplx>> roots_by_m;
    double root_rad_lo = INF, root_rad_hi = 0.0;
    for (double m : m_samples) {
        auto roots = compute_roots_q(poly_eval_im(spec.Q, m), poly_eval_im(RD, m), k, dD);
        for (cplx r : roots) {
            root_rad_lo = std::min(root_rad_lo, std::abs(r));
            root_rad_hi = std::max(root_rad_hi, std::abs(r));
        }
        roots_by_m.push_back(std::move(roots));
    }
    add("roots_cover_gaps", check_covering_root_condition(spec.dirs, roots_by_m),
        (double)(k * dD - (int)spec.dirs.size()));
    add("roots_in_annulus",
        root_rad_lo > spec.mu0 + spec.rho && root_rad_hi < spec.mu1 - spec.rho,
        std::min(root_rad_lo - (spec.mu0 + spec.rho), (spec.mu1 - spec.rho) - root_rad_hi));

    const double strip = FrameFamily{}.strip_half_aperture;
    double M1 = INF, M2 = INF;
    bool sep_ok = true;
    for (size_t p = 0; p < spec.dirs.size(); ++p) {
        SectorDomain dom = SectorDomain::unite(
            {SectorDomain::sector(spec.dirs[p], strip, 0.0, INF), SectorDomain::disc(spec.mu0),
             SectorDomain::annulus(spec.mu1, INF)});
        SeparationReport sr = root_separation(dom, roots_by_m[m_samples.size() / 2]);
        for (const auto& rm : roots_by_m) {
            SeparationReport s2 = root_separation(dom, rm);
            sr.M1 = std::min(sr.M1, s2.M1);
            sr.M2 = std::min(sr.M2, s2.M2);
            sr.violation = sr.violation || s2.violation;
        }
        sep_ok = sep_ok && !sr.violation && sr.M1 > 0 && sr.M2 > 0;
        M1 = std::min(M1, sr.M1);
        M2 = std::min(M2, sr.M2);
    }
    add("root_separation", sep_ok, std::min(M1, M2));

    // empirical lower-bound constant for P_m
    std::vector<cplx> tau_samples;
    for (int ia = 0; ia < 48; ++ia)
        for (int ir = 0; ir < 24; ++ir) {
            double ang = 2.0 * PI * ia / 48;
            bool near_root_strip = false;
            for (double dd : spec.dirs)
                if (std::abs(angle_diff(ang, dd)) < strip) near_root_strip = true;
            double r = 0.02 * std::pow(100.0 / 0.02, ir / 23.0);
            if (!near_root_strip && r > spec.mu0 && r < spec.mu1) continue;  // root annulus
            tau_samples.push_back(std::polar(r, ang));
        }
    LowerBoundReport lb = pm_lower_bound_check(spec.Q, RD, k, dD, m_samples, tau_samples);
    add("pm_lower_bound", !lb.violation && lb.c_emp > 0, lb.c_emp);

    // smallness budgets for the coupling profiles
    NormEWeights we{spec.beta, spec.mu};
    for (int l = 0; l + 1 < D; ++l) {
        std::vector<cplx> cv(mg.n);
        for (int i = 0; i < mg.n; ++i) cv[i] = spec.C[l].eval(mg.node(i), spec.eps0);
        double n = norm_E(cv, mg, we);
        add("coupling_budget_l" + std::to_string(l + 1), n <= spec.gamma_budget[l],
            spec.gamma_budget[l] - n);
    }
    return rep;
}

RayGridFunction apply_H(const RayGridFunction& w, const ProblemSpecQ& spec, cplx eps) {
    if (!w.dilation_compatible())
        throw std::invalid_argument("apply_H: lattice ratio is not an s-th root of q^delta");
    const int s = w.radial.s;
    if (w.radial.n_rings <= s)
        throw std::invalid_argument("apply_H: input needs more than s rings");
    const MGrid& g = w.mgrid;
    const int n = g.n, nd = (int)w.directions.size();
    const int n_out = w.radial.n_rings - s;

    RayGridFunction out = w;
    out.radial.n_rings = n_out;
    out.allocate();

    // Per-term tabulations: C_l on the difference grid, R_l(i m) on the grid.
    const int L = spec.D - 1;
    std::vector<std::vector<cplx>> Cdiff(L, std::vector<cplx>(2 * n - 1));
    std::vector<std::vector<cplx>> Rv(L, std::vector<cplx>(n));
    for (int l = 0; l < L; ++l) {
        for (int t = 0; t < 2 * n - 1; ++t)
            Cdiff[l][t] = spec.C[l].eval(-2.0 * g.m_max + t * g.step(), eps);
        for (int j = 0; j < n; ++j) Rv[l][j] = poly_eval_im(spec.R[l], g.node(j));
    }
    std::vector<cplx> eps_pow(L);
    for (int l = 0; l < L; ++l) {
        int e = spec.Delta[l] - spec.k * spec.d[l];
        eps_pow[l] = (e == 0) ? cplx(1.0) : std::pow(eps, e);
    }
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * PI);

    std::atomic<bool> singular{false};
    parallel_for(nd * n_out, [&](int idx) {
        const int d = idx / n_out, i = idx % n_out;
        const cplx tau = out.tau(d, i);
        std::vector<cplx> rw(n), conv(n);
        for (int l = 0; l < L; ++l) {
            const cplx base =
                eps_pow[l] * std::pow((double)spec.k * std::pow(tau, spec.k), spec.d[l]);
            if (base == cplx(0.0)) continue;
            for (int j = 0; j < n; ++j) rw[j] = Rv[l][j] * w.at(d, i + s, j) * g.weight(j);
            const auto& Cl = Cdiff[l];
            for (int j = 0; j < n; ++j) {
                cplx acc(0.0);
                const cplx* row = &Cl[j];  // Cl[j - j1 + (n-1)] = row[n-1-j1]
                for (int j1 = 0; j1 < n; ++j1) acc += row[n - 1 - j1] * rw[j1];
                conv[j] = acc;
            }
            for (int j = 0; j < n; ++j) {
                const cplx P = spec.Pm(g.node(j), tau);
                if (std::abs(P) < 1e-300) {
                    singular = true;
                    return;
                }
                out.at(d, i, j) += base * inv_sqrt2pi * conv[j] / P;
            }
        }
    });
    if (singular) throw std::runtime_error("apply_H: symbol P_m vanishes at a grid node");
    return out;
}

namespace {

RayGridFunction truncate_rings(const RayGridFunction& w, int n_rings) {
    RayGridFunction out = w;
    out.radial.n_rings = n_rings;
    out.allocate();
    for (int d = 0; d < (int)w.directions.size(); ++d)
        for (int i = 0; i < n_rings; ++i)
            for (int j = 0; j < w.mgrid.n; ++j) out.at(d, i, j) = w.at(d, i, j);
    return out;
}

}  // namespace

NeumannSeriesQ solve_wk(const ProblemSpecQ& spec, cplx eps, int p, const SolveOptionsQ& opt) {
    if (std::abs(eps) > spec.eps0 + 1e-12)
        throw std::invalid_argument("solve_wk: |eps| exceeds eps0");
    NeumannSeriesQ S;
    S.p = p;
    S.eps = eps;

    RayGridFunction proto;
    proto.directions = make_directions(spec, opt.n_uniform_dirs, opt.extra_dirs);
    proto.q = spec.q;
    proto.delta = spec.delta;
    proto.radial = RadialLattice::make(opt.r_min, spec.q, spec.delta, opt.s, opt.r_top);
    proto.mgrid = MGrid{opt.m_max, opt.m_nodes};
    const int base_rings = proto.radial.n_rings;

    NormQExpWeights wq{spec.beta, spec.mu, spec.k1, spec.q, spec.alpha, spec.tau0};
    Frames fr = build_frames(spec.frames(), p, opt.j_max, opt.j_max,
                             FrameFamily{}.strip_half_aperture);
    const SectorDomain& theta = fr.triangle;

    // w_{k,0} = psi_k / P_m on the extended lattice (closed form everywhere).
    RayGridFunction cur = proto;
    cur.radial.n_rings = base_rings + opt.s * opt.j_max;
    cur.allocate();
    for (int d = 0; d < (int)cur.directions.size(); ++d)
        for (int i = 0; i < cur.radial.n_rings; ++i) {
            const cplx tau = cur.tau(d, i);
            for (int j = 0; j < cur.mgrid.n; ++j) {
                const double m = cur.mgrid.node(j);
                cur.at(d, i, j) = spec.psi.eval(tau, m, eps) / spec.Pm(m, tau);
            }
        }

    RayGridFunction sum_ext = truncate_rings(cur, base_rings + opt.s);
    S.wk = truncate_rings(cur, base_rings);
    const double n0 = norm_qexp(S.wk, wq, theta);

    int bad_streak = 0;
    for (int j = 0;; ++j) {
        RayGridFunction term = truncate_rings(cur, base_rings);
        S.terms.push_back(term);
        S.norm_theta.push_back(norm_qexp(term, wq, theta));
        S.norm_disc.push_back(
            norm_qexp(term, wq, SectorDomain::disc(spec.Qcheck * spec.mu0 *
                                                   std::pow(1.0 / spec.qd(), j))));
        std::vector<double> fn;
        for (int h = 0; h <= j && h < (int)fr.square.size(); ++h)
            fn.push_back(norm_qexp(term, wq, fr.square[h]));
        S.norm_frames.push_back(std::move(fn));

        if (j > 0) {
            for (int d = 0; d < (int)sum_ext.directions.size(); ++d)
                for (int i = 0; i < sum_ext.radial.n_rings; ++i)
                    for (int jm = 0; jm < sum_ext.mgrid.n; ++jm)
                        sum_ext.at(d, i, jm) += cur.at(d, i, jm);
            for (size_t t = 0; t < S.wk.values.size(); ++t)
                S.wk.values[t] += term.values[t];
            const double ratio = S.norm_theta[j] / std::max(S.norm_theta[j - 1], 1e-300);
            S.contraction_max = std::max(S.contraction_max, ratio);
            bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
            if (bad_streak >= 3)
                throw std::runtime_error(
                    "solve_wk: no contraction (3 consecutive non-decreasing terms)");
        }
        if (S.norm_theta[j] < opt.tol * n0 || j == opt.j_max) {
            S.converged = S.norm_theta[j] < opt.tol * n0;
            break;
        }
        cur = apply_H(cur, spec, eps);
    }
    S.wk_ext = sum_ext;

    // Residual by direct substitution: w_k - H(w_k) - psi/P on the base rings.
    RayGridFunction Hw = apply_H(sum_ext, spec, eps);
    RayGridFunction res = S.wk;
    for (int d = 0; d < (int)res.directions.size(); ++d)
        for (int i = 0; i < base_rings; ++i) {
            const cplx tau = res.tau(d, i);
            for (int j = 0; j < res.mgrid.n; ++j) {
                const double m = res.mgrid.node(j);
                res.at(d, i, j) = S.wk.at(d, i, j) - Hw.at(d, i, j) -
                                  spec.psi.eval(tau, m, eps) / spec.Pm(m, tau);
            }
        }
    S.residual = norm_qexp(res, wq, theta) / std::max(n0, 1e-300);
    return S;
}

DecayReportQ measure_decay_q(const NeumannSeriesQ& series, const ProblemSpecQ& spec, int /*p*/) {
    if (series.norm_theta.size() < 4)
        throw std::invalid_argument("measure_decay_q: need at least 4 Neumann terms");
    DecayReportQ rep;
    rep.disc_quad_model = spec.delta * std::log(spec.q) * spec.k * spec.min_dl() / 2.0;

    bool degenerate = true;
    for (size_t j = 1; j < series.norm_theta.size(); ++j)
        if (series.norm_theta[j] > 0) degenerate = false;
    rep.degenerate = degenerate;
    if (degenerate) {
        rep.upper_bounds_ok = true;
        return rep;
    }

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (size_t j = 0; j < series.norm_theta.size(); ++j)
        if (series.norm_theta[j] > 0) {
            X.push_back({1.0, (double)j});
            y.push_back(std::log(series.norm_theta[j]));
        }
    auto b = least_squares(X, y);
    rep.K1_emp = std::exp(b[1]);

    X.clear();
    y.clear();
    for (size_t j = 0; j < series.norm_disc.size(); ++j)
        if (series.norm_disc[j] > 0) {
            X.push_back({1.0, (double)j, (double)j * (j + 1)});
            y.push_back(std::log(series.norm_disc[j]));
        }
    rep.n_disc_points = (int)X.size();
    if (X.size() >= 4) {
        b = least_squares(X, y);
        rep.K2_emp = std::exp(b[1]);
        rep.disc_quad_emp = -b[2];
    }

    X.clear();
    y.clear();
    for (size_t j = 0; j < series.norm_frames.size(); ++j)
        for (size_t h = 0; h < series.norm_frames[j].size(); ++h)
            if (series.norm_frames[j][h] > 0) {
                X.push_back({1.0, (double)j, (double)h, (double)h * (h + 1)});
                y.push_back(std::log(series.norm_frames[j][h]));
            }
    if (X.size() >= 5) {
        b = least_squares(X, y);
        rep.K3_emp = std::exp(b[1]);
        rep.K4_emp = std::exp(b[2]);
        rep.frame_quad_emp = -b[3];
    }

    rep.upper_bounds_ok = rep.K1_emp < 1.0 &&
                          (rep.n_disc_points < 4 || (rep.K2_emp < 1.0 && rep.disc_quad_emp > 0));
    return rep;
}

std::vector<cplx> WkEvaluator::eval_term(cplx tau, int j) const {
    // Ladder: w_j(tau) depends on w_{j-1}(q^delta tau), ..., w_0(q^{delta j} tau).
    const ProblemSpecQ& sp = *spec;
    const int n = mgrid.n;
    std::vector<cplx> col(n);
    const double qd = sp.qd();
    cplx t_top = tau * std::pow(qd, j);
    for (int jm = 0; jm < n; ++jm)
        col[jm] = sp.psi.eval(t_top, mgrid.node(jm), eps) / sp.Pm(mgrid.node(jm), t_top);
    for (int step = j; step >= 1; --step) {
        const cplx t = tau * std::pow(qd, step - 1);
        std::vector<cplx> nxt(n, cplx(0.0));
        for (int l = 0; l + 1 < sp.D; ++l) {
            int e = sp.Delta[l] - sp.k * sp.d[l];
            cplx base = ((e == 0) ? cplx(1.0) : std::pow(eps, e)) *
                        std::pow((double)sp.k * std::pow(t, sp.k), sp.d[l]);
            for (int jm = 0; jm < n; ++jm) {
                cplx acc(0.0);
                for (int j1 = 0; j1 < n; ++j1)
                    acc += sp.C[l].eval(mgrid.node(jm) - mgrid.node(j1), eps) *
                           poly_eval_im(sp.R[l], mgrid.node(j1)) * col[j1] * mgrid.weight(j1);
                nxt[jm] += base * acc / (std::sqrt(2.0 * PI) * sp.Pm(mgrid.node(jm), t));
            }
        }
        col.swap(nxt);
    }
    return col;
}

std::vector<cplx> WkEvaluator::eval(cplx tau) const {
    const ProblemSpecQ& sp = *spec;
    const int n = mgrid.n;
    const double qd = sp.qd();
    const int J = n_terms;
    // levels[r] = w_i(q^{delta r} tau), updated in place as i grows.
    std::vector<std::vector<cplx>> levels(J);
    for (int r = 0; r < J; ++r) {
        levels[r].resize(n);
        cplx t = tau * std::pow(qd, r);
        for (int jm = 0; jm < n; ++jm)
            levels[r][jm] = sp.psi.eval(t, mgrid.node(jm), eps) / sp.Pm(mgrid.node(jm), t);
    }
    std::vector<cplx> total = levels[0];

    // Tabulate R_l(i m) and C_l on the difference grid once.
    std::vector<std::vector<cplx>> Rv(sp.D - 1, std::vector<cplx>(n));
    std::vector<std::vector<cplx>> Cdiff(sp.D - 1, std::vector<cplx>(2 * n - 1));
    for (int l = 0; l + 1 < sp.D; ++l) {
        for (int jm = 0; jm < n; ++jm) Rv[l][jm] = poly_eval_im(sp.R[l], mgrid.node(jm));
        for (int t = 0; t < 2 * n - 1; ++t)
            Cdiff[l][t] = sp.C[l].eval(-2.0 * mgrid.m_max + t * mgrid.step(), eps);
    }

    for (int i = 1; i < J; ++i) {
        for (int r = 0; r + i < J; ++r) {
            const cplx t = tau * std::pow(qd, r);
            std::vector<cplx> nxt(n, cplx(0.0));
            for (int l = 0; l + 1 < sp.D; ++l) {
                int e = sp.Delta[l] - sp.k * sp.d[l];
                cplx base = ((e == 0) ? cplx(1.0) : std::pow(eps, e)) *
                            std::pow((double)sp.k * std::pow(t, sp.k), sp.d[l]);
                const auto& Cl = Cdiff[l];
                for (int jm = 0; jm < n; ++jm) {
                    cplx acc(0.0);
                    const cplx* row = &Cl[jm];  // Cl[jm - j1 + (n-1)] = row[n-1-j1]
                    for (int j1 = 0; j1 < n; ++j1)
                        acc += row[n - 1 - j1] * Rv[l][j1] * levels[r + 1][j1] * mgrid.weight(j1);
                    nxt[jm] += base * acc / (std::sqrt(2.0 * PI) * sp.Pm(mgrid.node(jm), t));
                }
            }
            levels[r].swap(nxt);
        }
        for (int jm = 0; jm < n; ++jm) total[jm] += levels[0][jm];
    }
    return total;
}

void dump_grid_csv(const RayGridFunction& w, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("dump_grid_csv: cannot open " + path);
    std::fprintf(f, "direction_idx,r,m,re,im\n");
    for (int d = 0; d < (int)w.directions.size(); ++d)
        for (int i = 0; i < w.radial.n_rings; ++i)
            for (int j = 0; j < w.mgrid.n; ++j)
                std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", d, w.radial.r(i),
                             w.mgrid.node(j), w.at(d, i, j).real(), w.at(d, i, j).imag());
    std::fclose(f);
}

}  // namespace qsl
