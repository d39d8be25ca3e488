#include "qsl/summation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qsl/transforms.hpp"

namespace qsl {

namespace {

cplx ipow(cplx z, int n) {
    cplx r(1.0);
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

// exp(-(u/T)^k) with an overflow guard (a growing kernel means the contour
// is not admissible for this T).
cplx laplace_kernel(cplx u, cplx T, int k) {
    cplx e = ipow(u / T, k);
    if (e.real() < -700.0)
        throw std::runtime_error("laplace kernel grows along the contour: inadmissible path");
    if (e.real() > 745.0) return cplx(0.0);
    return std::exp(-e);
}

}  // namespace

ProbeGrid make_probes(double r_t, double t_arg, double beta_prime, int nt, int nz) {
    ProbeGrid pg;
    for (int i = 0; i < nt; ++i) {
        double r = nt == 1 ? r_t : r_t / 3.0 + (r_t - r_t / 3.0) * i / (nt - 1);
        pg.t.push_back(std::polar(r, t_arg));
    }
    for (int j = 0; j < nz; ++j) {
        double x = nz == 1 ? 0.0 : -1.5 + 3.0 * j / (nz - 1);
        pg.z.push_back(cplx(x, 0.25 * beta_prime));
    }
    return pg;
}

void CachedContour::tabulate(const FieldFun& f) {
    field.resize(u.size());
    parallel_for((int)u.size(), [&](int i) { field[i] = f(u[i]); });
}

std::vector<cplx> CachedContour::value(cplx T) const {
    if (field.empty()) throw std::logic_error("CachedContour: field not tabulated");
    const int n_m = (int)field[0].size();
    std::vector<cplx> out(n_m, cplx(0.0));
    for (size_t i = 0; i < u.size(); ++i) {
        cplx c = (double)k * laplace_kernel(u[i], T, k) * qw[i];
        if (c == cplx(0.0)) continue;
        const std::vector<cplx>& col = field[i];
        for (int j = 0; j < n_m; ++j) out[j] += c * col[j];
    }
    return out;
}

CachedContour CachedContour::ray(int k, double gamma, double a, double b, int nodes_per_panel,
                                 double panel_ratio) {
    if (!(b > a) || a < 0) throw std::invalid_argument("contour ray: need 0 <= a < b");
    CachedContour c;
    c.k = k;
    const GaussLegendre& gl = gauss_legendre(nodes_per_panel);
    const cplx dir = std::polar(1.0, gamma);
    double lo = a;
    if (a == 0.0) lo = 1e-7 * b;  // leading panel [0, lo] closes the origin gap
    std::vector<std::pair<double, double>> panels;
    if (a == 0.0) panels.push_back({0.0, lo});
    int np = std::max(1, (int)std::ceil(std::log(b / lo) / std::log(panel_ratio)));
    double ratio = std::pow(b / lo, 1.0 / np);
    double r0 = lo;
    for (int p = 0; p < np; ++p) {
        double r1 = (p == np - 1) ? b : r0 * ratio;
        panels.push_back({r0, r1});
        r0 = r1;
    }
    for (auto [pa, pb] : panels)
        for (int i = 0; i < nodes_per_panel; ++i) {
            double r = 0.5 * (pa + pb) + 0.5 * (pb - pa) * gl.x[i];
            double w = 0.5 * (pb - pa) * gl.w[i];
            c.u.push_back(r * dir);
            c.qw.push_back(cplx(w / r));  // du/u = dr/r along a ray
        }
    return c;
}

CachedContour CachedContour::arc(int k, double r, double gamma0, double gamma1, int n_nodes) {
    CachedContour c;
    c.k = k;
    const GaussLegendre& gl = gauss_legendre(std::min(n_nodes, 64));
    for (int i = 0; i < (int)gl.x.size(); ++i) {
        double th = 0.5 * (gamma0 + gamma1) + 0.5 * (gamma1 - gamma0) * gl.x[i];
        double w = 0.5 * (gamma1 - gamma0) * gl.w[i];
        c.u.push_back(std::polar(r, th));
        c.qw.push_back(cplx(0.0, 1.0) * w);  // du/u = i dtheta along an arc
    }
    return c;
}

std::vector<double> arc_directions(double gamma0, double gamma1, int n_nodes) {
    const GaussLegendre& gl = gauss_legendre(std::min(n_nodes, 64));
    std::vector<double> out;
    for (double x : gl.x) out.push_back(0.5 * (gamma0 + gamma1) + 0.5 * (gamma1 - gamma0) * x);
    return out;
}

double choose_ray(double center, double half_aperture, int k, cplx T, double delta1) {
    double best = -2.0, best_g = center;
    const int N = 400;
    for (int i = 0; i <= N; ++i) {
        double g = center - half_aperture + 2.0 * half_aperture * i / N;
        double c = std::cos(k * (g - std::arg(T)));
        if (c > best) {
            best = c;
            best_g = g;
        }
    }
    if (best < delta1)
        throw std::runtime_error("choose_ray: no admissible direction for this T");
    return best_g;
}

std::vector<cplx> forcing_column(const ProblemSpecQ& spec, cplx T, cplx eps, const MGrid& g) {
    if (!spec.psi.a.empty() && spec.psi.a[0] != cplx(0.0))
        throw std::invalid_argument("forcing_column: psi must vanish at tau = 0");
    cplx s(0.0);
    for (size_t n = 1; n < spec.psi.a.size(); ++n)
        s += spec.psi.a[n] * std::tgamma((double)n / spec.k) * ipow(T, (int)n);
    std::vector<cplx> col(g.n);
    for (int j = 0; j < g.n; ++j) col[j] = s * spec.psi.mprof.eval(g.node(j), eps);
    return col;
}

cplx assemble_forcing(const ProblemSpecQ& spec, const EvaluationPoint& pt, const MGrid& g) {
    return inverse_fourier(forcing_column(spec, pt.eps * pt.t, pt.eps, g), g, pt.z);
}

UpEvaluator::UpEvaluator(const WkEvaluator& wk, double gamma_, double r_end,
                         int nodes_per_panel, int j_term)
    : g(wk.mgrid), k(wk.spec->k), gamma(gamma_) {
    contour = CachedContour::ray(k, gamma, 0.0, r_end, nodes_per_panel);
    if (j_term < 0)
        contour.tabulate([&](cplx u) { return wk.eval(u); });
    else
        contour.tabulate([&](cplx u) { return wk.eval_term(u, j_term); });
}

std::vector<cplx> UpEvaluator::column(cplx T) const {
    if (std::cos(k * (gamma - std::arg(T))) < delta1)
        throw std::runtime_error("UpEvaluator: ray outside the admissible cone for T");
    return contour.value(T);
}

cplx UpEvaluator::eval(const EvaluationPoint& pt) const {
    return inverse_fourier(column(pt.eps * pt.t), g, pt.z);
}

int dir_index(const RayGridFunction& f, double gamma, double tol) {
    for (size_t d = 0; d < f.directions.size(); ++d)
        if (std::abs(angle_diff(f.directions[d], gamma)) <= tol) return (int)d;
    throw std::runtime_error("dir_index: direction not present in the lattice");
}

std::vector<cplx> lattice_column(const RayGridFunction& f, int dir, double r) {
    const int nr = f.radial.n_rings, n = f.mgrid.n;
    std::vector<cplx> col(n);
    if (r <= f.radial.r(0)) {
        double fac = r / f.radial.r(0);  // fields vanish linearly at the origin
        for (int j = 0; j < n; ++j) col[j] = fac * f.at(dir, 0, j);
        return col;
    }
    if (r > f.radial.r(nr - 1) * (1.0 + 1e-12))
        throw std::out_of_range("lattice_column: radius beyond the lattice");
    int hi = 0;
    while (hi < nr && f.radial.r(hi) < r) ++hi;
    const int S = std::min(12, nr);
    int first = std::clamp(hi - S / 2, 0, nr - S);
    const double x = std::log(r);
    double L[12];
    for (int a = 0; a < S; ++a) {
        L[a] = 1.0;
        for (int b = 0; b < S; ++b) {
            if (a == b) continue;
            L[a] *= (x - std::log(f.radial.r(first + b))) /
                    (std::log(f.radial.r(first + a)) - std::log(f.radial.r(first + b)));
        }
    }
    for (int j = 0; j < n; ++j) {
        cplx acc(0.0);
        for (int a = 0; a < S; ++a) acc += L[a] * f.at(dir, first + a, j);
        col[j] = acc;
    }
    return col;
}

YEvaluator::YEvaluator(const RayGridFunction& v, int k_, double gamma_, double r_end,
                       int nodes_per_panel)
    : g(v.mgrid), k(k_), gamma(gamma_) {
    int dir = dir_index(v, gamma_);
    double top = v.radial.r(v.radial.n_rings - 1);
    contour = CachedContour::ray(k, gamma_, 0.0, std::min(r_end, top), nodes_per_panel);
    contour.tabulate([&v, dir](cplx u) { return lattice_column(v, dir, std::abs(u)); });
}

std::vector<cplx> YEvaluator::column(cplx T) const {
    if (std::cos(k * (gamma - std::arg(T))) < delta1)
        throw std::runtime_error("YEvaluator: ray outside the admissible cone for T");
    return contour.value(T);
}

cplx YEvaluator::eval(const EvaluationPoint& pt) const {
    return inverse_fourier(column(pt.eps * pt.t), g, pt.z);
}

namespace {

// (t^{k+1} d_t)^d (or plain d_t^d when k+1 power is disabled) by iterated
// centered differences on the stencil columns; returns the center column.
std::vector<cplx> iterate_fd(std::vector<std::vector<cplx>> cols, std::vector<cplx> ts, int d,
                             double h, int t_power) {
    for (int s = 0; s < d; ++s) {
        std::vector<std::vector<cplx>> nxt(cols.size() - 2);
        std::vector<cplx> nts(ts.size() - 2);
        for (size_t i = 1; i + 1 < cols.size(); ++i) {
            const size_t n_m = cols[i].size();
            std::vector<cplx> c(n_m);
            cplx fac = t_power > 0 ? ipow(ts[i], t_power) : cplx(1.0);
            for (size_t j = 0; j < n_m; ++j)
                c[j] = fac * (cols[i + 1][j] - cols[i - 1][j]) / (2.0 * h);
            nxt[i - 1] = std::move(c);
            nts[i - 1] = ts[i];
        }
        cols = std::move(nxt);
        ts = std::move(nts);
    }
    return cols[cols.size() / 2];
}

double fourier_mag(const std::vector<cplx>& col, const MGrid& g, cplx z) {
    return std::abs(inverse_fourier(col, g, z));
}

}  // namespace

ResidualReport residual_q(const UpEvaluator& up, const ProblemSpecQ& spec,
                          const EvaluationPoint& pt, double fd_step) {
    const MGrid& g = up.g;
    const int n = g.n, k = spec.k, D = spec.D;
    int J = spec.dD();
    for (int l = 0; l + 1 < D; ++l) J = std::max(J, spec.d[l]);
    const double h = fd_step;
    std::vector<cplx> ts(2 * J + 1);
    std::vector<std::vector<cplx>> U(2 * J + 1);
    std::vector<std::vector<std::vector<cplx>>> V(D - 1,
                                                  std::vector<std::vector<cplx>>(2 * J + 1));
    std::vector<std::vector<cplx>> Ctab(D - 1, std::vector<cplx>(n));
    std::vector<std::vector<cplx>> Rtab(D - 1, std::vector<cplx>(n));
    for (int l = 0; l + 1 < D; ++l)
        for (int j = 0; j < n; ++j) {
            Ctab[l][j] = spec.C[l].eval(g.node(j), pt.eps);
            Rtab[l][j] = poly_eval_im(spec.R[l], g.node(j));
        }
    for (int i = 0; i <= 2 * J; ++i) {
        ts[i] = pt.t + (double)(i - J) * h;
        U[i] = up.column(pt.eps * ts[i]);
        std::vector<cplx> Ud = up.column(pt.eps * spec.qd() * ts[i]);
        for (int l = 0; l + 1 < D; ++l) {
            std::vector<cplx> W(n);
            for (int j = 0; j < n; ++j) W[j] = Rtab[l][j] * Ud[j];
            V[l][i] = convolve_E(Ctab[l], W, g);
        }
    }

    std::vector<cplx> lhs(n), termD(n);
    const std::vector<cplx>& U0 = U[J];
    std::vector<cplx> DD = iterate_fd(U, ts, spec.dD(), h, k + 1);
    cplx epsD = ipow(pt.eps, k * spec.dD());
    for (int j = 0; j < n; ++j) {
        lhs[j] = poly_eval_im(spec.Q, g.node(j)) * U0[j];
        termD[j] = epsD * poly_eval_im(spec.R.back(), g.node(j)) * DD[j];
    }
    std::vector<std::vector<cplx>> terml(D - 1);
    for (int l = 0; l + 1 < D; ++l) {
        terml[l] = iterate_fd(V[l], ts, spec.d[l], h, k + 1);
        cplx el = ipow(pt.eps, spec.Delta[l]);
        for (int j = 0; j < n; ++j) terml[l][j] *= el;
    }
    std::vector<cplx> F = forcing_column(spec, pt.eps * pt.t, pt.eps, g);

    std::vector<cplx> R(n);
    for (int j = 0; j < n; ++j) {
        R[j] = lhs[j] - termD[j] - F[j];
        for (int l = 0; l + 1 < D; ++l) R[j] -= terml[l][j];
    }
    ResidualReport rep;
    rep.abs = fourier_mag(R, g, pt.z);
    rep.scale = std::max({fourier_mag(lhs, g, pt.z), fourier_mag(termD, g, pt.z),
                          fourier_mag(F, g, pt.z)});
    for (int l = 0; l + 1 < D; ++l) rep.scale = std::max(rep.scale, fourier_mag(terml[l], g, pt.z));
    rep.rel = rep.abs / std::max(rep.scale, 1e-300);
    return rep;
}

ResidualReport residual_b(const YEvaluator& yev, const UpEvaluator& up, const ProblemSpecB& spec,
                          const EvaluationPoint& pt, double fd_step) {
    const MGrid& g = yev.g;
    const int n = g.n, D = spec.D;
    int J = 1;
    for (int l = 0; l < D; ++l) J = std::max(J, spec.deltav[l]);
    const double h = fd_step;
    std::vector<cplx> ts(2 * J + 1);
    std::vector<std::vector<cplx>> Y(2 * J + 1);
    for (int i = 0; i <= 2 * J; ++i) {
        ts[i] = pt.t + (double)(i - J) * h;
        Y[i] = yev.column(pt.eps * ts[i]);
    }
    const std::vector<cplx>& Y0 = Y[J];

    std::vector<cplx> lhs = iterate_fd(Y, ts, 1, h, 0);
    for (int j = 0; j < n; ++j) lhs[j] *= poly_eval_im(spec.Q, g.node(j));

    std::vector<std::vector<cplx>> terml(D);
    for (int l = 0; l < D; ++l) {
        terml[l] = iterate_fd(Y, ts, spec.deltav[l], h, 0);
        cplx fac = ipow(pt.eps, spec.Delta[l]) * ipow(pt.t, spec.d[l]);
        for (int j = 0; j < n; ++j)
            terml[l][j] *= fac * poly_eval_im(spec.R[l + 1], g.node(j));
    }

    std::vector<cplx> C00tab(n), W(n);
    for (int j = 0; j < n; ++j) {
        C00tab[j] = spec.C00.eval(g.node(j), pt.eps);
        W[j] = poly_eval_im(spec.R[0], g.node(j)) * Y0[j];
    }
    std::vector<cplx> term0 = convolve_E(C00tab, W, g);
    cplx c00 = spec.c00.eval(pt.eps);
    for (int j = 0; j < n; ++j) term0[j] *= c00;

    std::vector<cplx> termF = up.column(pt.eps * pt.t);
    cplx cF = spec.cF.eval(pt.eps);
    for (int j = 0; j < n; ++j) termF[j] *= cF;

    std::vector<cplx> R(n);
    for (int j = 0; j < n; ++j) {
        R[j] = lhs[j] - term0[j] - termF[j];
        for (int l = 0; l < D; ++l) R[j] -= terml[l][j];
    }
    ResidualReport rep;
    rep.abs = fourier_mag(R, g, pt.z);
    rep.scale = std::max({fourier_mag(lhs, g, pt.z), fourier_mag(term0, g, pt.z),
                          fourier_mag(termF, g, pt.z)});
    for (int l = 0; l < D; ++l) rep.scale = std::max(rep.scale, fourier_mag(terml[l], g, pt.z));
    rep.rel = rep.abs / std::max(rep.scale, 1e-300);
    return rep;
}

namespace {

CocycleSample measure_sample(
    const std::function<std::vector<cplx>(cplx)>& col_decomposed,
    const std::function<std::vector<cplx>(cplx)>& col_direct, bool check_direct, const MGrid& g,
    const ProbeGrid& probes, const std::vector<cplx>& eps_list, const std::string& tag) {
    CocycleSample out;
    out.tag = tag;
    for (cplx eps : eps_list) {
        double sup_b = 0.0, sup_a = 0.0, gap = 0.0;
        for (cplx t : probes.t) {
            cplx T = eps * t;
            std::vector<cplx> cb = col_decomposed(T);
            std::vector<cplx> ca;
            if (check_direct) ca = col_direct(T);
            for (cplx z : probes.z) {
                cplx vb = inverse_fourier(cb, g, z);
                sup_b = std::max(sup_b, std::abs(vb));
                if (check_direct) {
                    cplx va = inverse_fourier(ca, g, z);
                    sup_a = std::max(sup_a, std::abs(va));
                    gap = std::max(gap, std::abs(va - vb));
                }
            }
        }
        out.eps.push_back(eps);
        out.delta.push_back(sup_b);
        out.route_gap.push_back(check_direct ? gap / std::max({sup_a, sup_b, 1e-300}) : 0.0);
        out.sup_direct.push_back(sup_a);
    }
    return out;
}

}  // namespace

CocycleSample cocycle_difference_q(const WkEvaluator& wk, const ProblemSpecQ& spec,
                                   double gamma_a, double gamma_b, const ProbeGrid& probes,
                                   const std::vector<cplx>& eps_list, int j_terms,
                                   bool check_direct, double r_end) {
    const MGrid& g = wk.mgrid;
    const double qd = spec.qd();
    const double r_arc0 = spec.Qcheck * spec.mu0;
    const double seg_lo0 = spec.Qcheck * spec.mu0, seg_hi0 = spec.Qhat * spec.mu1;

    // Per-term contours: arc at the shrinking radius, the concatenated
    // segment ladder on both rays, and the two tails.
    struct TermPieces {
        CachedContour arc;
        std::vector<CachedContour> seg_a, seg_b;
        CachedContour tail_a, tail_b;
    };
    std::vector<TermPieces> pieces(j_terms);
    for (int j = 0; j < j_terms; ++j) {
        TermPieces& P = pieces[j];
        P.arc = CachedContour::arc(spec.k, r_arc0 * std::pow(1.0 / qd, j), gamma_a, gamma_b);
        for (int hh = 0; hh <= j; ++hh) {
            double lo = seg_lo0 * std::pow(1.0 / qd, hh), hi = seg_hi0 * std::pow(1.0 / qd, hh);
            P.seg_a.push_back(CachedContour::ray(spec.k, gamma_a, lo, hi));
            P.seg_b.push_back(CachedContour::ray(spec.k, gamma_b, lo, hi));
        }
        P.tail_a = CachedContour::ray(spec.k, gamma_a, seg_hi0, r_end);
        P.tail_b = CachedContour::ray(spec.k, gamma_b, seg_hi0, r_end);
        FieldFun fj = [&wk, j](cplx u) { return wk.eval_term(u, j); };
        P.arc.tabulate(fj);
        for (auto& s : P.seg_a) s.tabulate(fj);
        for (auto& s : P.seg_b) s.tabulate(fj);
        P.tail_a.tabulate(fj);
        P.tail_b.tabulate(fj);
    }
    CachedContour ray_a, ray_b;
    if (check_direct) {
        ray_a = CachedContour::ray(spec.k, gamma_a, 0.0, r_end);
        ray_b = CachedContour::ray(spec.k, gamma_b, 0.0, r_end);
        FieldFun f = [&wk](cplx u) { return wk.eval(u); };
        ray_a.tabulate(f);
        ray_b.tabulate(f);
    }

    auto col_b = [&](cplx T) {
        std::vector<cplx> acc(g.n, cplx(0.0));
        auto add = [&](const std::vector<cplx>& v, double sgn) {
            for (int m = 0; m < g.n; ++m) acc[m] += sgn * v[m];
        };
        for (const TermPieces& P : pieces) {
            add(P.arc.value(T), 1.0);
            for (size_t hh = 0; hh < P.seg_a.size(); ++hh) {
                add(P.seg_b[hh].value(T), 1.0);
                add(P.seg_a[hh].value(T), -1.0);
            }
            add(P.tail_b.value(T), 1.0);
            add(P.tail_a.value(T), -1.0);
        }
        return acc;
    };
    auto col_a = [&](cplx T) {
        std::vector<cplx> va = ray_b.value(T), wa = ray_a.value(T);
        for (int m = 0; m < g.n; ++m) va[m] -= wa[m];
        return va;
    };
    return measure_sample(col_b, col_a, check_direct, g, probes, eps_list, "cross-p");
}

CocycleSample cocycle_difference_b(const NeumannSeriesB& S, const ProblemSpecB& spec,
                                   const ProblemSpecQ& specQ, double gamma_a, double gamma_b,
                                   const ProbeGrid& probes, const std::vector<cplx>& eps_list,
                                   const std::string& tag, double same_p_arc_radius,
                                   bool check_direct, double r_end, int arc_nodes) {
    const MGrid& g = S.vk.mgrid;
    const int k = spec.k;
    const double top = S.vk.radial.r(S.vk.radial.n_rings - 1);
    r_end = std::min(r_end, top);
    auto field_of = [](const RayGridFunction& grid) -> FieldFun {
        return [&grid](cplx u) {
            return lattice_column(grid, dir_index(grid, std::arg(u)), std::abs(u));
        };
    };

    if (tag == "same-p") {
        CachedContour arc = CachedContour::arc(k, same_p_arc_radius, gamma_a, gamma_b, arc_nodes);
        CachedContour tail_a = CachedContour::ray(k, gamma_a, same_p_arc_radius, r_end);
        CachedContour tail_b = CachedContour::ray(k, gamma_b, same_p_arc_radius, r_end);
        CachedContour ray_a, ray_b;
        FieldFun f = field_of(S.vk);
        arc.tabulate(f);
        tail_a.tabulate(f);
        tail_b.tabulate(f);
        if (check_direct) {
            ray_a = CachedContour::ray(k, gamma_a, 0.0, r_end);
            ray_b = CachedContour::ray(k, gamma_b, 0.0, r_end);
            ray_a.tabulate(f);
            ray_b.tabulate(f);
        }
        auto col_b = [&](cplx T) {
            std::vector<cplx> acc = arc.value(T);
            std::vector<cplx> tb = tail_b.value(T), ta = tail_a.value(T);
            for (int m = 0; m < g.n; ++m) acc[m] += tb[m] - ta[m];
            return acc;
        };
        auto col_a = [&](cplx T) {
            std::vector<cplx> va = ray_b.value(T), wa = ray_a.value(T);
            for (int m = 0; m < g.n; ++m) va[m] -= wa[m];
            return va;
        };
        return measure_sample(col_b, col_a, check_direct, g, probes, eps_list, tag);
    }
    if (tag != "cross-p")
        throw std::invalid_argument("cocycle_difference_b: tag must be same-p or cross-p");

    const int j_terms = (int)S.terms.size();
    if (j_terms == 0)
        throw std::invalid_argument("cocycle_difference_b: cross-p needs per-term solves");
    const double qd = specQ.qd();
    const double r_arc0 = specQ.Qcheck * specQ.mu0;
    const double seg_hi0 = specQ.Qhat * specQ.mu1;
    struct TermPieces {
        CachedContour arc;
        std::vector<CachedContour> seg_a, seg_b;
        CachedContour tail_a, tail_b;
    };
    std::vector<TermPieces> pieces(j_terms);
    for (int j = 0; j < j_terms; ++j) {
        TermPieces& P = pieces[j];
        P.arc = CachedContour::arc(k, r_arc0 * std::pow(1.0 / qd, j), gamma_a, gamma_b, arc_nodes);
        for (int hh = 0; hh <= j; ++hh) {
            double lo = r_arc0 * std::pow(1.0 / qd, hh), hi = seg_hi0 * std::pow(1.0 / qd, hh);
            P.seg_a.push_back(CachedContour::ray(k, gamma_a, lo, hi));
            P.seg_b.push_back(CachedContour::ray(k, gamma_b, lo, hi));
        }
        P.tail_a = CachedContour::ray(k, gamma_a, seg_hi0, r_end);
        P.tail_b = CachedContour::ray(k, gamma_b, seg_hi0, r_end);
        FieldFun fj = field_of(S.terms[j]);
        P.arc.tabulate(fj);
        for (auto& s : P.seg_a) s.tabulate(fj);
        for (auto& s : P.seg_b) s.tabulate(fj);
        P.tail_a.tabulate(fj);
        P.tail_b.tabulate(fj);
    }
    // direct route: difference of full rays, field summed over the same terms
    RayGridFunction summed = S.terms[0];
    for (int j = 1; j < j_terms; ++j)
        for (size_t i = 0; i < summed.values.size(); ++i) summed.values[i] += S.terms[j].values[i];
    CachedContour ray_a, ray_b;
    if (check_direct) {
        FieldFun f = field_of(summed);
        ray_a = CachedContour::ray(k, gamma_a, 0.0, r_end);
        ray_b = CachedContour::ray(k, gamma_b, 0.0, r_end);
        ray_a.tabulate(f);
        ray_b.tabulate(f);
    }
    auto col_b = [&](cplx T) {
        std::vector<cplx> acc(g.n, cplx(0.0));
        auto add = [&](const std::vector<cplx>& v, double sgn) {
            for (int m = 0; m < g.n; ++m) acc[m] += sgn * v[m];
        };
        for (const TermPieces& P : pieces) {
            add(P.arc.value(T), 1.0);
            for (size_t hh = 0; hh < P.seg_a.size(); ++hh) {
                add(P.seg_b[hh].value(T), 1.0);
                add(P.seg_a[hh].value(T), -1.0);
            }
            add(P.tail_b.value(T), 1.0);
            add(P.tail_a.value(T), -1.0);
        }
        return acc;
    };
    auto col_a = [&](cplx T) {
        std::vector<cplx> va = ray_b.value(T), wa = ray_a.value(T);
        for (int m = 0; m < g.n; ++m) va[m] -= wa[m];
        return va;
    };
    return measure_sample(col_b, col_a, check_direct, g, probes, eps_list, tag);
}

void write_cocycle_csv(const std::vector<CocycleSample>& samples, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_cocycle_csv: cannot open " + path);
    std::fprintf(f, "eps_mod,eps_arg,delta_sup,route_gap,tag\n");
    for (const auto& s : samples)
        for (size_t i = 0; i < s.eps.size(); ++i)
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%s\n", std::abs(s.eps[i]),
                         std::arg(s.eps[i]), s.delta[i], s.route_gap[i], s.tag.c_str());
    std::fclose(f);
}

}  // namespace qsl
