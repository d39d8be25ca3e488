#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qsl/borel.hpp"
#include "qsl/scenario.hpp"

using namespace qsl;

namespace {

Scenario ref() { return load_scenario("scenarios/reference.json"); }

SolveOptionsQ trimmed_q() {
    SolveOptionsQ o;
    o.j_max = 6;
    o.tol = 1e-7;
    o.n_uniform_dirs = 4;
    o.m_nodes = 33;
    o.m_max = 8.0;
    o.s = 4;
    o.r_min = 1e-4;
    o.r_top = 10.0;
    return o;
}

}  // namespace

TEST_CASE("kernel exponent arithmetic") {
    // d_lk = d_l + k + 1 - delta_l (k + 1)
    CHECK(d_lk(3, 1, 1) == 3 + 1 + 1 - 1 * 2);
    CHECK(d_lk(5, 2, 2) == 5 + 2 + 1 - 2 * 3);
    CHECK_THROWS_AS(d_lk(1, 3, 1), std::invalid_argument);
}

TEST_CASE("Euler-operator expansion is exact on monomials") {
    // T^{delta(k+1)} d_T^delta T^n = n(n-1)...(n-delta+1) T^{n+delta k}
    // (T^{k+1} d_T)^p      T^n = n(n+k)...(n+(p-1)k) T^{n+pk}
    // so the expansion coefficients must satisfy, for every n,
    //   falling(n,delta) = prod_{i<delta}(n+ik) + sum_p A_{delta,p} prod_{i<p}(n+ik).
    for (int k = 1; k <= 3; ++k)
        for (int delta = 1; delta <= 4; ++delta) {
            std::vector<Rational> A = expand_euler_operators(delta, k);
            CHECK((int)A.size() == delta - 1);
            for (int n = 0; n <= 10; ++n) {
                Rational lhs(1), rhs(1);
                for (int i = 0; i < delta; ++i) lhs = lhs * Rational(n - i);
                for (int i = 0; i < delta; ++i) rhs = rhs * Rational(n + i * k);
                for (int p = 1; p < delta; ++p) {
                    Rational pr = A[p - 1];
                    for (int i = 0; i < p; ++i) pr = pr * Rational(n + i * k);
                    rhs = rhs + pr;
                }
                CHECK((lhs - rhs).is_zero());
            }
        }
    // hand value: (T^2 d)^2 = T^4 d^2 + (k+1) T^3 d at k=1 gives A_{2,1} = -(k+1)
    auto A21 = expand_euler_operators(2, 1);
    CHECK(A21[0] == Rational(-2));
    auto A21k3 = expand_euler_operators(2, 3);
    CHECK(A21k3[0] == Rational(-4));
}

TEST_CASE("cumulative integrator against closed-form antiderivatives") {
    RadialLattice L = RadialLattice::make(1e-4, 2.0, 2.0, 8, 5.0);
    std::vector<double> radii;
    for (int i = 0; i < L.n_rings; ++i) radii.push_back(L.r(i));
    CumulativeIntegrator ci(radii);
    for (double p : {1.0, 2.0, 3.5}) {
        std::vector<cplx> gv;
        for (double r : radii) gv.push_back(std::pow(r, p));
        auto G = ci.integrate(gv, p);
        for (size_t i = 4; i < radii.size(); i += 9) {
            double exact = std::pow(radii[i], p + 1.0) / (p + 1.0);
            CHECK(std::abs(G[i] - exact) <= 1e-9 * exact);
        }
    }
    // a non-monomial integrand: g = r e^{-r}, G = 1 - (1+r)e^{-r}
    std::vector<cplx> gv;
    for (double r : radii) gv.push_back(r * std::exp(-r));
    auto G = ci.integrate(gv, 1.0);
    for (size_t i = 8; i < radii.size(); i += 11) {
        double r = radii[i];
        double exact = 1.0 - (1.0 + r) * std::exp(-r);
        CHECK(std::abs(G[i] - exact) <= 1e-8 * std::max(exact, 1e-6));
    }
}

TEST_CASE("reference scenario passes the Borel-side validation") {
    Scenario sc = ref();
    ValidationReport rep = validate_spec_b(sc.b);
    for (const auto& it : rep.items) {
        INFO(it.name, ": ", it.detail);
        CHECK(it.pass);
    }
    CHECK(rep.all_pass());
}

TEST_CASE("G application is Volterra: inner rings ignore outer data") {
    Scenario sc = ref();
    SolveOptionsQ oq = trimmed_q();
    NeumannSeriesQ wq = solve_wk(sc.q, cplx(0.05, 0.0), 0, oq);

    RayGridFunction v = wq.wk;  // any finite field with the right layout
    RayGridFunction Gv = apply_G(v, sc.b, cplx(0.05, 0.0), wq.wk);
    CHECK(Gv.all_finite());

    // perturb v on the outer half of the rings only
    RayGridFunction v2 = v;
    const int cut = v.radial.n_rings / 2;
    for (int d = 0; d < (int)v.directions.size(); ++d)
        for (int i = cut; i < v.radial.n_rings; ++i)
            for (int j = 0; j < v.mgrid.n; ++j) v2.at(d, i, j) += cplx(0.3, 0.1);
    RayGridFunction Gv2 = apply_G(v2, sc.b, cplx(0.05, 0.0), wq.wk);
    double inner_diff = 0.0, outer_diff = 0.0;
    for (int d = 0; d < (int)v.directions.size(); ++d)
        for (int i = 0; i < v.radial.n_rings; ++i)
            for (int j = 0; j < v.mgrid.n; ++j) {
                double dv = std::abs(Gv2.at(d, i, j) - Gv.at(d, i, j));
                (i < cut ? inner_diff : outer_diff) = std::max(i < cut ? inner_diff : outer_diff, dv);
            }
    CHECK(inner_diff <= 1e-14);
    CHECK(outer_diff > 0.0);
}

TEST_CASE("trimmed Borel solve: Picard convergence and residual") {
    Scenario sc = ref();
    NeumannSeriesQ wq = solve_wk(sc.q, cplx(0.05, 0.0), 0, trimmed_q());
    SolveOptionsB ob;
    ob.tol = 1e-8;
    ob.j_terms = 2;
    NeumannSeriesB S = solve_vk(sc.b, sc.q, wq, 0, 1, ob);
    CHECK(S.log_full.converged);
    CHECK(S.log_full.ratio_max < 1.0);
    CHECK(S.residual < 1e-6);
    CHECK(S.vk.all_finite());
    CHECK((int)S.terms.size() == 2);
    for (const auto& lg : S.logs) CHECK(lg.converged);
    // term norms present and finite
    CHECK(S.norm_sector.size() == S.terms.size());
    for (double n : S.norm_sector) CHECK(std::isfinite(n));

    DecayReportB rep = measure_decay_b(S, sc.q);
    double model = sc.q.delta * std::log(sc.q.q) * sc.q.k * sc.q.min_dl() / 2.0;
    CHECK(rep.disc_quad_model == doctest::Approx(model).epsilon(1e-12));
}

TEST_CASE("scalar descriptors evaluate c(eps) and c(eps)/eps analytically") {
    ScalarDescriptor c{cplx(0.4, 0.1), 2};
    cplx eps(0.05, 0.02);
    CHECK(std::abs(c.eval(eps) - cplx(0.4, 0.1) * eps * eps) < 1e-16);
    CHECK(std::abs(c.over_eps(eps) - cplx(0.4, 0.1) * eps) < 1e-16);
    ScalarDescriptor c1{cplx(0.4, 0.1), 1};
    CHECK(std::abs(c1.over_eps(cplx(0.0, 0.0)) - cplx(0.4, 0.1)) == 0.0);
}
