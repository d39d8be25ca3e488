#include "qsl/borel.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include "qsl/norms.hpp"
#include "qsl/transforms.hpp"

namespace qsl {

int d_lk(int d_l, int delta_l, int k) {
    int v = d_l + k + 1 - delta_l * (k + 1);
    if (v < 0) throw std::invalid_argument("d_lk: negative kernel exponent (invariant violated)");
    return v;
}

std::vector<Rational> expand_euler_operators(int delta, int k) {
    if (delta < 1) throw std::invalid_argument("expand_euler_operators: delta >= 1 required");
    if (delta == 1) return {};
    const int n_unk = delta - 1;
    // Acting on T^n: LHS gives n(n-1)...(n-delta+1), the leading RHS term
    // gives prod_{i<delta}(n+ik), and the p-th correction gives
    // A_{delta,p} prod_{i<p}(n+ik). Match at n = 1..delta-1.
    auto prod_chain = [&](long long n, int p) {
        Rational r(1);
        for (int i = 0; i < p; ++i) r = r * Rational(n + (long long)i * k);
        return r;
    };
    auto falling = [&](long long n, int p) {
        Rational r(1);
        for (int i = 0; i < p; ++i) r = r * Rational(n - i);
        return r;
    };
    // Rational Gaussian elimination on the (delta-1) x (delta-1) system.
    std::vector<std::vector<Rational>> M(n_unk, std::vector<Rational>(n_unk + 1));
    for (int row = 0; row < n_unk; ++row) {
        long long n = row + 1;
        for (int p = 1; p <= n_unk; ++p) M[row][p - 1] = prod_chain(n, p);
        M[row][n_unk] = falling(n, delta) - prod_chain(n, delta);
    }
    for (int c = 0; c < n_unk; ++c) {
        int piv = -1;
        for (int r = c; r < n_unk; ++r)
            if (!M[r][c].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::runtime_error("expand_euler_operators: singular system");
        std::swap(M[c], M[piv]);
        for (int r = 0; r < n_unk; ++r) {
            if (r == c || M[r][c].is_zero()) continue;
            Rational f = M[r][c] / M[c][c];
            for (int t = c; t <= n_unk; ++t) M[r][t] = M[r][t] - f * M[c][t];
        }
    }
    std::vector<Rational> A(n_unk);
    for (int p = 0; p < n_unk; ++p) A[p] = M[p][n_unk] / M[p][p];

    // Verify on monomials T^n, n = 0..2 delta + 2, exactly.
    for (long long n = 0; n <= 2LL * delta + 2; ++n) {
        Rational rhs = prod_chain(n, delta);
        for (int p = 1; p <= n_unk; ++p) rhs = rhs + A[p - 1] * prod_chain(n, p);
        if (!(rhs == falling(n, delta)))
            throw std::runtime_error("expand_euler_operators: monomial verification failed");
    }
    return A;
}

ValidationReport validate_spec_b(const ProblemSpecB& spec) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool pass, double margin, const std::string& det = "") {
        rep.items.push_back({name, pass, margin, det});
    };
    const int k = spec.k, D = spec.D;

    bool mono = spec.deltav[0] == 1;
    for (int l = 0; l + 1 < D; ++l) mono = mono && spec.deltav[l] < spec.deltav[l + 1];
    add("delta_chain", mono, spec.deltav[0] == 1 ? 1.0 : 0.0);

    bool expo = spec.d.back() == (spec.deltaD() - 1) * (k + 1) &&
                spec.Delta.back() == spec.d.back() - spec.deltaD() + 1;
    double worst = INF;
    for (int l = 0; l + 1 < D; ++l) {
        double m1 = spec.d[l] - (spec.deltav[l] - 1) * (k + 1);  // strict > 0
        double m2 = spec.Delta[l] - spec.d[l] + spec.deltav[l] - 1;
        double m3 = spec.deltaD() - (spec.deltav[l] + 1.0 / k);
        expo = expo && m1 > 0 && m2 >= 0 && m3 >= 0;
        worst = std::min({worst, m1, m2, m3});
    }
    add("exponent_relations", expo, worst);

    bool dlk_ok = true;
    for (int l = 0; l < D; ++l) {
        int v = spec.d[l] + k + 1 - spec.deltav[l] * (k + 1);
        dlk_ok = dlk_ok && v >= 0;
    }
    add("kernel_exponents_nonneg", dlk_ok, 0.0);

    const Poly& RD = spec.R.back();
    bool deg_ok = poly_deg(spec.Q) >= poly_deg(RD);
    for (int l = 0; l < D; ++l) deg_ok = deg_ok && poly_deg(RD) >= poly_deg(spec.R[l]);
    add("degree_chain", deg_ok, (double)(poly_deg(spec.Q) - poly_deg(RD)));

    MGrid mg{16.0, 257};
    double minQ = INF, minRD = INF, sec_margin = INF;
    bool sec_ok = true;
    for (int i = 0; i < mg.n; ++i) {
        double m = mg.node(i);
        cplx Qv = poly_eval_im(spec.Q, m), Rv = poly_eval_im(RD, m);
        minQ = std::min(minQ, std::abs(Qv));
        minRD = std::min(minRD, std::abs(Rv));
        cplx quot = Qv / Rv;
        if (!spec.SQRD.contains(quot)) sec_ok = false;
        sec_margin = std::min(sec_margin, std::abs(quot) - spec.SQRD.r);
    }
    add("symbols_nonvanishing", minQ > 0 && minRD > 0, std::min(minQ, minRD));
    add("quotient_in_sector", sec_ok, sec_margin);
    add("mu_exceeds_degree", spec.mu > poly_deg(RD) + 1, spec.mu - (poly_deg(RD) + 1));

    // sector containment S_{e_{p',p}} subset U_{d_p}
    bool cont = true;
    double cont_margin = INF;
    for (size_t p = 0; p < spec.e_dirs.size(); ++p)
        for (double e : spec.e_dirs[p]) {
            double mrg = spec.U_half_aperture -
                         (std::abs(angle_diff(e, spec.dirs_frak[p])) + spec.sector_half_aperture);
            cont = cont && mrg >= 0;
            cont_margin = std::min(cont_margin, mrg);
        }
    add("sector_containment", cont, cont_margin);

    // root separation from the working domains, and empirical C_P
    const int n_roots = (spec.deltaD() - 1) * k;
    double M1 = INF, M2 = INF, CP = INF;
    bool sep_ok = n_roots > 0;
    std::vector<double> m_samples;
    for (int i = 0; i < 33; ++i) m_samples.push_back(-16.0 + i);
    for (size_t p = 0; p < spec.e_dirs.size(); ++p)
        for (double e : spec.e_dirs[p]) {
            SectorDomain dom = SectorDomain::unite(
                {SectorDomain::sector(e, spec.sector_half_aperture, 0.0, INF),
                 SectorDomain::disc(spec.rho)});
            auto samples = dom.sample(48, 48, 100.0);
            for (double m : m_samples) {
                auto roots =
                    compute_roots_b(poly_eval_im(spec.Q, m), poly_eval_im(RD, m), k, spec.deltaD());
                SeparationReport sr = root_separation(dom, roots);
                sep_ok = sep_ok && !sr.violation && sr.M1 > 0 && sr.M2 > 0;
                M1 = std::min(M1, sr.M1);
                M2 = std::min(M2, sr.M2);
                double aRD = std::abs(poly_eval_im(RD, m));
                for (cplx tau : samples) {
                    double denom = aRD * std::pow(1.0 + std::pow(std::abs(tau), k),
                                                  (spec.deltaD() - 1) - 1.0 / k);
                    CP = std::min(CP, std::abs(spec.Pm(m, tau)) / denom);
                }
            }
        }
    add("root_separation", sep_ok, std::min(M1, M2));
    add("pm_lower_bound", CP > 0, CP);

    // smallness budgets
    NormEWeights we{spec.beta, spec.mu};
    std::vector<cplx> cv(mg.n);
    for (int i = 0; i < mg.n; ++i) cv[i] = spec.C00.eval(mg.node(i), spec.eps0);
    double nC = norm_E(cv, mg, we);
    add("budget_C00", nC <= spec.varsigma0, spec.varsigma0 - nC);
    double s00 = std::abs(spec.c00.over_eps(spec.eps0));
    add("budget_c00", s00 <= spec.varsigma00, spec.varsigma00 - s00);
    double sF = std::abs(spec.cF.over_eps(spec.eps0));
    add("budget_cF", sF <= spec.varsigmaF, spec.varsigmaF - sF);
    return rep;
}

// ---------------------------------------------------------------------------

CumulativeIntegrator::CumulativeIntegrator(std::vector<double> r) : radii(std::move(r)) {
    const int N = (int)radii.size();
    const int S = std::min(stencil, N);
    w.resize(std::max(0, N - 1));
    first.resize(std::max(0, N - 1));
    const GaussLegendre& gl = gauss_legendre(8);
    for (int t = 0; t + 1 < N; ++t) {
        // Right-aligned stencil ending at ring t+1: the prefix integral stays
        // causal (never reads the integrand beyond its own radius), which
        // keeps divergent behaviour past a symbol root from propagating
        // inward through the Volterra iteration.
        int f = std::clamp(t + 2 - S, 0, N - S);
        first[t] = f;
        w[t].assign(S, 0.0);
        const double a = radii[t], b = radii[t + 1];
        for (int qn = 0; qn < 8; ++qn) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[qn];
            const double wq = 0.5 * (b - a) * gl.w[qn];
            for (int j = 0; j < S; ++j) {
                double L = 1.0;
                for (int i = 0; i < S; ++i) {
                    if (i == j) continue;
                    L *= (x - radii[f + i]) / (radii[f + j] - radii[f + i]);
                }
                w[t][j] += wq * L;
            }
        }
    }
}

std::vector<cplx> CumulativeIntegrator::integrate(const std::vector<cplx>& g,
                                                  double power_hint) const {
    const int N = (int)radii.size();
    std::vector<cplx> G(N);
    // [0, r_0]: g ~ g(r_0) (r/r_0)^p.
    G[0] = g[0] * radii[0] / (power_hint + 1.0);
    const int S = std::min(stencil, N);
    for (int t = 0; t + 1 < N; ++t) {
        cplx acc(0.0);
        for (int j = 0; j < S; ++j) acc += w[t][j] * g[first[t] + j];
        G[t + 1] = G[t] + acc;
    }
    return G;
}

namespace {

double binom(int n, int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// 6-point Lagrange interpolation in log-radius of a sampled ray column.
cplx interp_ray(const std::vector<double>& radii, const std::vector<cplx>& vals, double rho) {
    const int N = (int)radii.size();
    if (rho <= radii[0]) return vals[0] * (rho / radii[0]);  // vanishing at the origin
    int hi = (int)(std::lower_bound(radii.begin(), radii.end(), rho) - radii.begin());
    int f = std::clamp(hi - 3, 0, std::max(0, N - 6));
    int S = std::min(6, N);
    const double x = std::log(rho);
    cplx acc(0.0);
    for (int j = 0; j < S; ++j) {
        double L = 1.0;
        for (int i = 0; i < S; ++i) {
            if (i == j) continue;
            L *= (x - std::log(radii[f + i])) / (std::log(radii[f + j]) - std::log(radii[f + i]));
        }
        acc += L * vals[f + j];
    }
    return acc;
}

double tgamma_pos(double x) { return std::tgamma(x); }

}  // namespace

RayGridFunction apply_G(const RayGridFunction& v, const ProblemSpecB& spec, cplx eps,
                        const RayGridFunction& w_kj) {
    if (std::abs(eps) == 0.0) throw std::invalid_argument("apply_G: eps must be nonzero");
    if (v.values.size() != w_kj.values.size())
        throw std::invalid_argument("apply_G: grids of v and w_kj are not aligned");
    const int k = spec.k, D = spec.D;
    const MGrid& g = v.mgrid;
    const int n = g.n, nd = (int)v.directions.size(), nr = v.radial.n_rings;

    std::vector<double> radii(nr);
    for (int i = 0; i < nr; ++i) radii[i] = v.radial.r(i);
    CumulativeIntegrator ci(radii);

    // Euler-expansion coefficients for each delta_l.
    std::vector<std::vector<double>> A(D);
    for (int l = 0; l < D; ++l) {
        auto Ar = expand_euler_operators(spec.deltav[l], k);
        A[l].resize(Ar.size());
        for (size_t t = 0; t < Ar.size(); ++t) A[l][t] = Ar[t].to_double();
    }
    std::vector<int> dlk(D);
    for (int l = 0; l < D; ++l) dlk[l] = d_lk(spec.d[l], spec.deltav[l], k);

    // Kernel descriptors: coefficient(m) x eps-power x
    //   int_0^{tau^k} (tau^k - s)^e s^h (field)(s^{1/k}, m) ds / s.
    struct Block {
        double e;        // kernel exponent (may be fractional)
        int h;           // inner power of s
        cplx scalar;     // constant prefactor (A-coefficient, Gamma, k powers, eps)
        int R_index;     // index into spec.R for the m-dependent factor
        bool conv;       // field = m-convolution of v against C00 R0
        bool forcing;    // field = w_kj instead of v
    };
    std::vector<Block> blocks;
    const int dD = spec.deltaD();
    for (int h = 1; h <= dD - 1; ++h)
        blocks.push_back({(double)(dD - h - 1), h,
                          A[D - 1][h - 1] / tgamma_pos((double)(dD - h)) * std::pow((double)k, h),
                          D, false, false});
    for (int l = 0; l + 1 < D; ++l) {
        int e_eps = spec.Delta[l] - spec.d[l] + spec.deltav[l] - 1;
        cplx epow = (e_eps == 0) ? cplx(1.0) : std::pow(eps, e_eps);
        blocks.push_back({(double)dlk[l] / k - 1.0, spec.deltav[l],
                          epow / tgamma_pos((double)dlk[l] / k) *
                              std::pow((double)k, spec.deltav[l]),
                          l + 1, false, false});
        for (int h = 1; h <= spec.deltav[l] - 1; ++h)
            blocks.push_back({(double)dlk[l] / k + spec.deltav[l] - h - 1.0, h,
                              A[l][h - 1] * epow /
                                  tgamma_pos((double)dlk[l] / k + spec.deltav[l] - h) *
                                  std::pow((double)k, h),
                              l + 1, false, false});
    }
    const cplx inv_g1k = 1.0 / tgamma_pos(1.0 + 1.0 / k);
    blocks.push_back({1.0 / k, 0, spec.c00.over_eps(eps) * inv_g1k / std::sqrt(2.0 * PI), -1,
                      true, false});
    blocks.push_back({1.0 / k, 0, spec.cF.over_eps(eps) * inv_g1k, -1, false, true});

    // m-convolution field conv(d,i,m) = int C00(m-m1) R0(i m1) v(tau_{d,i}, m1) dm1.
    std::vector<cplx> convfield((size_t)nd * nr * n, cplx(0.0));
    {
        std::vector<cplx> Cdiff(2 * n - 1), R0v(n);
        for (int t = 0; t < 2 * n - 1; ++t)
            Cdiff[t] = spec.C00.eval(-2.0 * g.m_max + t * g.step(), eps);
        for (int j = 0; j < n; ++j) R0v[j] = poly_eval_im(spec.R[0], g.node(j));
        parallel_for(nd * nr, [&](int idx) {
            const int d = idx / nr, i = idx % nr;
            std::vector<cplx> col(n);
            for (int j = 0; j < n; ++j) col[j] = R0v[j] * v.at(d, i, j) * g.weight(j);
            for (int j = 0; j < n; ++j) {
                cplx acc(0.0);
                const cplx* row = &Cdiff[j];
                for (int j1 = 0; j1 < n; ++j1) acc += row[n - 1 - j1] * col[j1];
                convfield[(size_t)(d * nr + i) * n + j] = acc;
            }
        });
    }

    RayGridFunction out = v;
    out.allocate();
    std::atomic<bool> singular{false};

    parallel_for(nd * n, [&](int idx) {
        const int d = idx / n, jm = idx % n;
        const double m = g.node(jm);
        const double gamma = v.directions[d];
        std::vector<cplx> Pinv(nr);
        for (int i = 0; i < nr; ++i) {
            cplx P = spec.Pm(m, v.tau(d, i));
            if (std::abs(P) < 1e-300) {
                singular = true;
                return;
            }
            Pinv[i] = 1.0 / P;
        }
        // Column extraction helpers.
        auto field_col = [&](const Block& b, std::vector<cplx>& col) {
            for (int i = 0; i < nr; ++i)
                col[i] = b.forcing ? w_kj.at(d, i, jm)
                                   : (b.conv ? convfield[(size_t)(d * nr + i) * n + jm]
                                             : v.at(d, i, jm));
        };
        std::vector<cplx> col(nr), gg(nr), acc(nr);
        for (const auto& b : blocks) {
            if (b.scalar == cplx(0.0)) continue;
            const cplx Rm = (b.R_index >= 0) ? poly_eval_im(spec.R[b.R_index], m) : cplx(1.0);
            if (Rm == cplx(0.0)) continue;
            field_col(b, col);
            std::fill(acc.begin(), acc.end(), cplx(0.0));
            const bool integer_e = std::abs(b.e - std::round(b.e)) < 1e-12 && b.e >= -1e-12;
            if (integer_e) {
                // Binomial expansion: the integral becomes
                // k * sum_i C(e,i)(-1)^i tau^{k(e-i)} I_{k(h+i)} with the
                // prefix moments I_a = int_0^r (rho e^{i gamma})^a f d rho/rho.
                const int e = (int)std::round(b.e);
                for (int i = 0; i <= e; ++i) {
                    const int a = k * (b.h + i);
                    for (int t = 0; t < nr; ++t)
                        gg[t] = (a == 0 ? cplx(1.0) : std::pow(radii[t], a)) * col[t] / radii[t];
                    auto I = ci.integrate(gg, (double)a);  // f ~ rho near 0
                    const cplx phase = std::polar(1.0, gamma * a);
                    const double c = binom(e, i) * ((i % 2) ? -1.0 : 1.0);
                    for (int t = 0; t < nr; ++t) {
                        const cplx tau_pow =
                            (e == i) ? cplx(1.0) : std::pow(v.tau(d, t), k * (e - i));
                        acc[t] += c * tau_pow * phase * I[t];
                    }
                }
                for (int t = 0; t < nr; ++t) acc[t] *= (double)k;
            } else {
                // Fractional kernel: direct graded quadrature against the
                // log-radius interpolant of the column (slow path).
                for (int t = 0; t < nr; ++t) {
                    const cplx tau = v.tau(d, t);
                    RadialFun f = [&](cplx sig) {
                        return interp_ray(radii, col, std::abs(sig)) / sig;
                    };
                    acc[t] = fractional_conv(f, k, b.e, b.h - 1.0 + 1.0 / k, tau);
                }
            }
            for (int t = 0; t < nr; ++t) out.at(d, t, jm) += b.scalar * Rm * Pinv[t] * acc[t];
        }
    });
    if (singular) throw std::runtime_error("apply_G: symbol P_m vanishes at a grid node");
    return out;
}

namespace {

PicardLog picard_solve(RayGridFunction& vout, const ProblemSpecB& spec, cplx eps,
                       const RayGridFunction& w_force, const SectorDomain& dom,
                       const NormFWeights& wf, double tol, int max_iter, double ball_radius) {
    PicardLog log;
    RayGridFunction v = w_force;  // layout prototype
    v.allocate();
    double prev_update = 0.0, scale = 0.0;
    int growing = 0;
    for (int it = 0; it < max_iter; ++it) {
        RayGridFunction nxt = apply_G(v, spec, eps, w_force);
        RayGridFunction diff = nxt;
        for (size_t t = 0; t < diff.values.size(); ++t) diff.values[t] -= v.values[t];
        const double upd = norm_F(diff, wf, dom);
        if (it == 0) scale = std::max(upd, 1e-300);
        log.iterations = it + 1;
        log.last_update = upd;
        if (it > 0 && prev_update > 0.0) {
            const double ratio = upd / prev_update;
            log.ratio_max = std::max(log.ratio_max, ratio);
            growing = ratio >= 1.0 ? growing + 1 : 0;
        }
        prev_update = upd;
        v = std::move(nxt);
        if (ball_radius > 0.0 && norm_F(v, wf, dom) > ball_radius) log.ball_warning = true;
        if (upd < tol * scale) {
            log.converged = true;
            break;
        }
        // A short burst of growing updates is a normal Volterra transient
        // (the outward-marching prefix integrals fill in before the geometric
        // decay takes over); abort only on a sustained runaway.
        if (growing >= 5 && upd > 100.0 * scale)
            throw std::runtime_error("solve_vk: Picard iteration is not contracting");
    }
    vout = std::move(v);
    return log;
}

}  // namespace

NeumannSeriesB solve_vk(const ProblemSpecB& spec, const ProblemSpecQ& specQ,
                        const NeumannSeriesQ& wq, int p_prime, int p, const SolveOptionsB& opt) {
    NeumannSeriesB S;
    S.p = p;
    S.p_prime = p_prime;
    S.eps = wq.eps;
    const cplx eps = wq.eps;
    if (std::abs(eps) == 0.0) throw std::invalid_argument("solve_vk: eps must be nonzero");

    const double e_dir = spec.e_dirs[p][p_prime];
    SectorDomain sector = SectorDomain::sector(e_dir, spec.sector_half_aperture, 0.0, INF);
    SectorDomain dom = SectorDomain::unite({sector, SectorDomain::disc(spec.rho)});
    NormFWeights wf{spec.beta, spec.mu, spec.nu, spec.k};

    // Ball radius from the F-norm of the forcing series (calibrated multiplier).
    const double omega = norm_F(wq.wk, wf, dom);
    const double ball = opt.upsilon * std::max(omega, 1e-300);

    // Full solution: one solve with the summed forcing w_k.
    S.log_full = picard_solve(S.vk, spec, eps, wq.wk, dom, wf, opt.tol / 10.0, opt.max_picard,
                              ball);
    S.lipschitz_max = S.log_full.ratio_max;

    // Residual of the full equation by substitution.
    {
        RayGridFunction Gv = apply_G(S.vk, spec, eps, wq.wk);
        for (size_t t = 0; t < Gv.values.size(); ++t) Gv.values[t] -= S.vk.values[t];
        S.residual = norm_F(Gv, wf, dom) / std::max(norm_F(S.vk, wf, dom), 1e-300);
    }

    if (opt.per_term) {
        const int JT = std::min<int>(opt.j_terms, (int)wq.terms.size());
        S.terms.resize(JT);
        S.logs.resize(JT);
        S.norm_sector.resize(JT);
        S.norm_disc.resize(JT);
        S.norm_nested.resize(JT);
        parallel_for(JT, [&](int j) {
            PicardLog lg = picard_solve(S.terms[j], spec, eps, wq.terms[j], dom, wf,
                                        opt.tol / 10.0, opt.max_picard, 0.0);
            S.logs[j] = lg;
        });
        for (int j = 0; j < JT; ++j) {
            S.lipschitz_max = std::max(S.lipschitz_max, S.logs[j].ratio_max);
            S.norm_sector[j] = norm_F(S.terms[j], wf, sector);
            S.norm_disc[j] = norm_F(
                S.terms[j], wf,
                SectorDomain::disc(specQ.Qcheck * specQ.mu0 * std::pow(1.0 / specQ.qd(), j)));
            for (int h = 0; h <= j; ++h) {
                double rad = specQ.Qhat * specQ.mu1 * std::pow(1.0 / specQ.qd(), h);
                S.norm_nested[j].push_back(norm_F(
                    S.terms[j], wf,
                    SectorDomain::sector(e_dir, spec.sector_half_aperture, 0.0, rad)));
            }
        }
    }
    return S;
}

DecayReportB measure_decay_b(const NeumannSeriesB& series, const ProblemSpecQ& specQ) {
    if (series.norm_sector.size() < 4)
        throw std::invalid_argument("measure_decay_b: need at least 4 Neumann terms");
    DecayReportB rep;
    rep.disc_quad_model =
        specQ.delta * std::log(specQ.q) * specQ.k * specQ.min_dl() / 2.0;

    bool degenerate = true;
    for (size_t j = 1; j < series.norm_sector.size(); ++j)
        if (series.norm_sector[j] > 0) degenerate = false;
    rep.degenerate = degenerate;
    if (degenerate) {
        rep.upper_bounds_ok = true;
        return rep;
    }

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (size_t j = 0; j < series.norm_sector.size(); ++j)
        if (series.norm_sector[j] > 0) {
            X.push_back({1.0, (double)j});
            y.push_back(std::log(series.norm_sector[j]));
        }
    auto b = least_squares(X, y);
    rep.K5_emp = std::exp(b[1]);

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
        rep.K6_emp = std::exp(b[1]);
        rep.disc_quad_emp = -b[2];
    }

    X.clear();
    y.clear();
    for (size_t j = 0; j < series.norm_nested.size(); ++j)
        for (size_t h = 0; h < series.norm_nested[j].size(); ++h)
            if (series.norm_nested[j][h] > 0) {
                X.push_back({1.0, (double)j, (double)h, (double)h * (h + 1)});
                y.push_back(std::log(series.norm_nested[j][h]));
            }
    if (X.size() >= 5) {
        b = least_squares(X, y);
        rep.K7_emp = std::exp(b[1]);
        rep.nested_quad_emp = -b[3];
    }

    rep.upper_bounds_ok = rep.K5_emp < 1.0 &&
                          (rep.n_disc_points < 4 || (rep.K6_emp < 1.0 && rep.disc_quad_emp > 0));
    return rep;
}

}  // namespace qsl
