#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qsl/norms.hpp"

using namespace qsl;

namespace {

RayGridFunction small_layout() {
    RayGridFunction f;
    f.directions = {0.0, PI / 3, 2 * PI / 3, PI, 4 * PI / 3, 5 * PI / 3};
    f.radial = RadialLattice::make(1e-3, 2.0, 1.0, 4, 4.0);
    f.mgrid = MGrid{8.0, 33};
    f.q = 2.0;
    f.delta = 1.0;
    f.allocate();
    return f;
}

}  // namespace

TEST_CASE("weighted m-line norm") {
    MGrid g{8.0, 33};
    NormEWeights w{1.0, 2.5};
    // a single spike at node i0 gives exactly its weight
    std::vector<cplx> f(g.n, cplx(0.0));
    int i0 = 5;
    f[i0] = cplx(0.0, 2.0);
    double m = g.node(i0);
    double expect = 2.0 * std::pow(1.0 + std::abs(m), w.mu) * std::exp(w.beta * std::abs(m));
    CHECK(norm_E(f, g, w) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("radial weight formulas") {
    NormQExpWeights wq{1.0, 2.5, 0.5, 2.0, 1.0, 1.0};
    double r = 1.7;
    double lg = std::log(r + wq.tau0);
    double expect = std::exp(-0.5 * wq.k1 * lg * lg / std::log(wq.q) - wq.alpha * lg) / r;
    CHECK(qexp_radial_weight(r, wq) == doctest::Approx(expect).epsilon(1e-14));

    NormFWeights wf{1.0, 2.5, 4.0, 2};
    double rk = r * r;
    double expectf = (1.0 + rk * rk) / r * std::exp(-wf.nu * rk);
    CHECK(fnorm_radial_weight(r, wf) == doctest::Approx(expectf).epsilon(1e-14));
}

TEST_CASE("lattice sup norms against a direct scan") {
    RayGridFunction f = small_layout();
    // f(tau, m) = 1/(1+|tau|) * exp(-2|m|): smooth, everywhere nonzero
    for (int d = 0; d < (int)f.directions.size(); ++d)
        for (int i = 0; i < f.radial.n_rings; ++i)
            for (int j = 0; j < f.mgrid.n; ++j) {
                double r = f.radial.r(i);
                double m = f.mgrid.node(j);
                f.at(d, i, j) = std::exp(-2.0 * std::abs(m)) / (1.0 + r);
            }
    NormQExpWeights wq{1.0, 2.5, 0.5, 2.0, 1.0, 1.0};
    NormFWeights wf{1.0, 2.5, 4.0, 1};
    SectorDomain dom = SectorDomain::annulus(0.01, 2.0);
    double direct_q = 0.0, direct_f = 0.0;
    for (int d = 0; d < (int)f.directions.size(); ++d)
        for (int i = 0; i < f.radial.n_rings; ++i) {
            double r = f.radial.r(i);
            if (!dom.contains(f.tau(d, i))) continue;
            for (int j = 0; j < f.mgrid.n; ++j) {
                double m = f.mgrid.node(j);
                double wm = std::pow(1.0 + std::abs(m), 2.5) * std::exp(std::abs(m));
                double v = std::abs(f.at(d, i, j)) * wm;
                direct_q = std::max(direct_q, v * qexp_radial_weight(r, wq));
                direct_f = std::max(direct_f, v * fnorm_radial_weight(r, wf));
            }
        }
    CHECK(norm_qexp(f, wq, dom) == doctest::Approx(direct_q).epsilon(1e-14));
    CHECK(norm_F(f, wf, dom) == doctest::Approx(direct_f).epsilon(1e-14));
}

TEST_CASE("q-dilated convolution bound") {
    RayGridFunction layout = small_layout();
    NormQExpWeights w{1.0, 2.5, 0.5, 2.0, 1.0, 1.0};
    SectorDomain dom = SectorDomain::annulus(1e-3, 2.0);
    TauMFun f = [](cplx tau, double m) {
        return std::exp(-std::abs(m)) / (1.0 + std::abs(tau));
    };
    MFun c = [](double m) { return 0.3 * std::exp(-0.5 * m * m); };
    Poly R1 = {cplx(1.0, 0.0), cplx(0.5, 0.0)};            // degree 1
    Poly R2 = {cplx(2.0, 0.0), cplx(0.0), cplx(1.0, 0.0)}; // degree 2
    BoundReport rep = verify_prop_qconv(f, c, R1, R2, 2.0, 1.0, 2.0, w, dom, layout);
    CHECK(rep.preconditions_ok);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.ratio > 0.0);
    CHECK(rep.ratio <= 1.0 + 1e-9);

    // violated gamma balance is flagged, not silently computed
    BoundReport bad = verify_prop_qconv(f, c, R1, R2, 0.5, 1.0, 2.0, w, dom, layout);
    CHECK(!bad.preconditions_ok);
}

TEST_CASE("fractional Volterra kernel bound") {
    RayGridFunction layout = small_layout();
    NormFWeights w{1.0, 2.5, 4.0, 1};
    SectorDomain dom = SectorDomain::annulus(1e-3, 2.0);
    TauMFun f = [](cplx tau, double m) {
        return std::exp(-std::abs(m)) * tau / (1.0 + std::abs(tau));
    };
    BoundReport rep = verify_prop_frac(f, 1.0, 1.0, 1.0, w, dom, layout);
    CHECK(rep.preconditions_ok);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.ratio <= 1.0 + 1e-9);

    BoundReport bad = verify_prop_frac(f, 1.0, -1.5, 1.0, w, dom, layout);
    CHECK(!bad.preconditions_ok);
}

TEST_CASE("m-convolution Volterra kernel bound") {
    RayGridFunction layout = small_layout();
    NormFWeights w{1.0, 2.5, 4.0, 1};
    NormEWeights we{1.0, 2.5};
    SectorDomain dom = SectorDomain::annulus(1e-3, 2.0);
    MFun c = [](double m) { return 0.2 * std::exp(-0.5 * m * m); };
    TauMFun g = [](cplx tau, double m) {
        return std::exp(-std::abs(m)) * tau / (1.0 + std::abs(tau));
    };
    Poly Qp = {cplx(1.0, 0.0), cplx(0.3, 0.0)};
    Poly Rp = {cplx(2.0, 0.0), cplx(0.0), cplx(1.0, 0.0)};
    BoundReport rep = verify_prop_mconv(c, g, Qp, Rp, w, we, dom, layout);
    CHECK(rep.preconditions_ok);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.ratio <= 1.0 + 1e-9);

    // mu too small for the degree of Qp
    NormEWeights tight{1.0, 1.5};
    BoundReport bad = verify_prop_mconv(c, g, Qp, Rp, w, tight, dom, layout);
    CHECK(!bad.preconditions_ok);
}
