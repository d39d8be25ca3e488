#include "qsl/norms.hpp"

#include <cmath>

#include "qsl/transforms.hpp"

namespace qsl {

double norm_E(const std::vector<cplx>& f, const MGrid& g, const NormEWeights& w) {
    double best = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double m = g.node(i);
        const double wt = std::pow(1.0 + std::abs(m), w.mu) * std::exp(w.beta * std::abs(m));
        best = std::max(best, wt * std::abs(f[i]));
    }
    return best;
}

double qexp_radial_weight(double r, const NormQExpWeights& w) {
    const double lg = std::log(r + w.tau0);
    return (1.0 / r) * std::exp(-0.5 * w.k1 * lg * lg / std::log(w.q) - w.alpha * lg);
}

double fnorm_radial_weight(double r, const NormFWeights& w) {
    const double rk = std::pow(r, w.k);
    return (1.0 + rk * rk) / r * std::exp(-w.nu * rk);
}

namespace {

template <class RadialWeight>
double sup_norm_on(const RayGridFunction& h, double beta, double mu, const RadialWeight& rw,
                   const SectorDomain& dom) {
    double best = 0.0;
    for (int d = 0; d < (int)h.directions.size(); ++d)
        for (int i = 0; i < h.radial.n_rings; ++i) {
            const cplx tau = h.tau(d, i);
            if (std::abs(tau) == 0.0 || !dom.contains(tau)) continue;
            const double wr = rw(std::abs(tau));
            for (int j = 0; j < h.mgrid.n; ++j) {
                const double m = h.mgrid.node(j);
                const double wm = std::pow(1.0 + std::abs(m), mu) * std::exp(beta * std::abs(m));
                best = std::max(best, wr * wm * std::abs(h.at(d, i, j)));
            }
        }
    return best;
}

}  // namespace

double norm_qexp(const RayGridFunction& h, const NormQExpWeights& w, const SectorDomain& dom) {
    return sup_norm_on(h, w.beta, w.mu, [&](double r) { return qexp_radial_weight(r, w); }, dom);
}

double norm_F(const RayGridFunction& h, const NormFWeights& w, const SectorDomain& dom) {
    return sup_norm_on(h, w.beta, w.mu, [&](double r) { return fnorm_radial_weight(r, w); }, dom);
}

BoundReport verify_prop_qconv(const TauMFun& f, const MFun& c, const Poly& R1, const Poly& R2,
                              double gamma1, double gamma2, double delta,
                              const NormQExpWeights& w, const SectorDomain& dom,
                              const RayGridFunction& layout) {
    BoundReport rep;
    const MGrid& g = layout.mgrid;
    if (poly_deg(R1) > poly_deg(R2) || w.mu < poly_deg(R1) + 1 ||
        gamma1 < w.k1 * delta + gamma2 - 1e-12) {
        rep.preconditions_ok = false;
        rep.note = "precondition violated (degrees / mu / gamma balance)";
        return rep;
    }
    const double qd = std::pow(w.q, delta);

    // LHS: tau^{gamma2} (1+|tau|)^{-gamma1} b(m) * int c(m-m1) R1(i m1) f(qd tau, m1) dm1,
    // with b(m) = 1/R2(i m) (the extremal admissible choice).
    RayGridFunction lhs = layout;
    lhs.allocate();
    std::vector<cplx> fvec(g.n);
    for (int d = 0; d < (int)lhs.directions.size(); ++d)
        for (int i = 0; i < lhs.radial.n_rings; ++i) {
            const cplx tau = lhs.tau(d, i);
            if (std::abs(tau) == 0.0 || !dom.contains(tau)) continue;
            for (int j = 0; j < g.n; ++j) fvec[j] = f(qd * tau, g.node(j));
            const cplx pref =
                std::pow(tau, gamma2) / std::pow(1.0 + std::abs(tau), gamma1);
            for (int j = 0; j < g.n; ++j) {
                const double m = g.node(j);
                cplx acc(0.0);
                for (int j1 = 0; j1 < g.n; ++j1) {
                    const double m1 = g.node(j1);
                    acc += c(m - m1) * poly_eval_im(R1, m1) * fvec[j1] * g.weight(j1);
                }
                lhs.at(d, i, j) = pref * acc / poly_eval_im(R2, m);
            }
        }
    rep.lhs = norm_qexp(lhs, w, dom);

    // Input norms: ||c||_{(beta,mu)} and ||f||_{qexp} over the dilated domain.
    std::vector<cplx> cvec(g.n);
    for (int j = 0; j < g.n; ++j) cvec[j] = c(g.node(j));
    const double nc = norm_E(cvec, g, NormEWeights{w.beta, w.mu});

    RayGridFunction fd = layout;
    fd.allocate();
    const SectorDomain domd = dom.scaled(qd);
    for (int d = 0; d < (int)fd.directions.size(); ++d)
        for (int i = 0; i < fd.radial.n_rings; ++i) {
            const cplx tau = fd.tau(d, i);
            if (std::abs(tau) == 0.0 || !domd.contains(tau)) continue;
            for (int j = 0; j < g.n; ++j) fd.at(d, i, j) = f(tau, g.node(j));
        }
    const double nf = norm_qexp(fd, w, domd);
    rep.input_norms = nc * nf;

    // Structural factor: sup over the domain of
    // |tau|^{gamma2} (1+|tau|)^{-gamma1} ((qd |tau| + tau0)(|tau| + tau0))^{k1 delta / 2}.
    double sup_factor = 0.0;
    for (int d = 0; d < (int)lhs.directions.size(); ++d)
        for (int i = 0; i < lhs.radial.n_rings; ++i) {
            const cplx tau = lhs.tau(d, i);
            const double r = std::abs(tau);
            if (r == 0.0 || !dom.contains(tau)) continue;
            const double v = std::pow(r, gamma2) / std::pow(1.0 + r, gamma1) *
                             std::pow((qd * r + w.tau0) * (r + w.tau0), 0.5 * w.k1 * delta);
            sup_factor = std::max(sup_factor, v);
        }
    rep.rhs_factor = sup_factor;
    rep.ratio = (rep.rhs_factor * rep.input_norms > 0.0)
                    ? rep.lhs / (rep.rhs_factor * rep.input_norms)
                    : 0.0;
    return rep;
}

BoundReport verify_prop_frac(const TauMFun& f, double gamma1, double chi, double nu2,
                             const NormFWeights& w, const SectorDomain& dom,
                             const RayGridFunction& layout) {
    BoundReport rep;
    if (!(1.0 + chi + nu2 >= -1e-12) || gamma1 < nu2 - 1e-12 || nu2 < -1.0 ||
        std::abs(nu2 - std::round(nu2)) > 1e-12 || chi <= -1.0) {
        rep.preconditions_ok = false;
        rep.note = "precondition violated (chi / nu2 / gamma1)";
        return rep;
    }
    const MGrid& g = layout.mgrid;
    const int k = w.k;

    RayGridFunction lhs = layout;
    lhs.allocate();
    for (int d = 0; d < (int)lhs.directions.size(); ++d)
        for (int i = 0; i < lhs.radial.n_rings; ++i) {
            const cplx tau = lhs.tau(d, i);
            const double r = std::abs(tau);
            if (r == 0.0 || !dom.contains(tau)) continue;
            const double pref = 1.0 / std::pow(1.0 + std::pow(r, k), gamma1);
            for (int j = 0; j < g.n; ++j) {
                const double m = g.node(j);
                RadialFun fm = [&](cplx t) { return f(t, m); };
                lhs.at(d, i, j) = pref * fractional_conv(fm, k, chi, nu2, tau);
            }
        }
    rep.lhs = norm_F(lhs, w, dom);

    RayGridFunction fs = layout;
    fs.allocate();
    for (int d = 0; d < (int)fs.directions.size(); ++d)
        for (int i = 0; i < fs.radial.n_rings; ++i) {
            const cplx tau = fs.tau(d, i);
            if (std::abs(tau) == 0.0 || !dom.contains(tau)) continue;
            for (int j = 0; j < g.n; ++j) fs.at(d, i, j) = f(tau, g.node(j));
        }
    rep.input_norms = norm_F(fs, w, dom);
    rep.rhs_factor = 1.0;
    rep.ratio = rep.input_norms > 0.0 ? rep.lhs / rep.input_norms : 0.0;
    return rep;
}

BoundReport verify_prop_mconv(const MFun& f, const TauMFun& g, const Poly& Qp, const Poly& Rp,
                              const NormFWeights& w, const NormEWeights& we,
                              const SectorDomain& dom, const RayGridFunction& layout) {
    BoundReport rep;
    if (poly_deg(Rp) < poly_deg(Qp) || we.mu <= poly_deg(Qp) + 1) {
        rep.preconditions_ok = false;
        rep.note = "precondition violated (deg R >= deg Q, mu > deg Q + 1)";
        return rep;
    }
    const MGrid& mg = layout.mgrid;
    const int k = w.k;

    // Kernel integral with s = tau^k u:
    //   int_0^{tau^k} (tau^k - s)^{1/k} G(s^{1/k}, m) ds / s
    //   = tau * int_0^1 (1 - u)^{1/k} G(tau u^{1/k}, m) du / u,
    // with the smoothstep substitution u = S(v) as in fractional_conv. The
    // inner m-convolution G is computed once per quadrature node for all m.
    const int panels = 8, per_panel = 8;
    const GaussLegendre& gl = gauss_legendre(per_panel);

    RayGridFunction lhs = layout;
    lhs.allocate();
    std::vector<cplx> gvec(mg.n), G(mg.n), acc(mg.n);
    for (int d = 0; d < (int)lhs.directions.size(); ++d)
        for (int i = 0; i < lhs.radial.n_rings; ++i) {
            const cplx tau = lhs.tau(d, i);
            if (std::abs(tau) == 0.0 || !dom.contains(tau)) continue;
            std::fill(acc.begin(), acc.end(), cplx(0.0));
            for (int p = 0; p < panels; ++p)
                for (int qn = 0; qn < per_panel; ++qn) {
                    const double v =
                        ((double)p + 0.5 * (gl.x[qn] + 1.0)) / panels;
                    const double wq = 0.5 * gl.w[qn] / panels;
                    const double u = v * v * v * (10.0 - 15.0 * v + 6.0 * v * v);
                    const double du = 30.0 * v * v * (1.0 - v) * (1.0 - v);
                    if (u <= 0.0 || u >= 1.0) continue;
                    const cplx s13 = tau * std::pow(u, 1.0 / (double)k);
                    for (int j = 0; j < mg.n; ++j) gvec[j] = g(s13, mg.node(j));
                    for (int j = 0; j < mg.n; ++j) {
                        const double m = mg.node(j);
                        cplx a(0.0);
                        for (int j1 = 0; j1 < mg.n; ++j1) {
                            const double m1 = mg.node(j1);
                            a += f(m - m1) * poly_eval_im(Qp, m1) * gvec[j1] * mg.weight(j1);
                        }
                        G[j] = a;
                    }
                    const double ker = std::pow(1.0 - u, 1.0 / (double)k) / u * du * wq;
                    for (int j = 0; j < mg.n; ++j) acc[j] += ker * G[j];
                }
            for (int j = 0; j < mg.n; ++j)
                lhs.at(d, i, j) = tau * acc[j] / poly_eval_im(Rp, mg.node(j));
        }
    rep.lhs = norm_F(lhs, w, dom);

    std::vector<cplx> fvec(mg.n);
    for (int j = 0; j < mg.n; ++j) fvec[j] = f(mg.node(j));
    const double nf = norm_E(fvec, mg, we);

    RayGridFunction gs = layout;
    gs.allocate();
    for (int d = 0; d < (int)gs.directions.size(); ++d)
        for (int i = 0; i < gs.radial.n_rings; ++i) {
            const cplx tau = gs.tau(d, i);
            if (std::abs(tau) == 0.0 || !dom.contains(tau)) continue;
            for (int j = 0; j < mg.n; ++j) gs.at(d, i, j) = g(tau, mg.node(j));
        }
    const double ng = norm_F(gs, w, dom);
    rep.input_norms = nf * ng;
    rep.rhs_factor = 1.0;
    rep.ratio = rep.input_norms > 0.0 ? rep.lhs / rep.input_norms : 0.0;
    return rep;
}

}  // namespace qsl
