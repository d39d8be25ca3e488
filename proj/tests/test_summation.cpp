#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "qsl/scenario.hpp"
#include "qsl/summation.hpp"
#include "qsl/transforms.hpp"

using namespace qsl;

namespace {

Scenario ref() { return load_scenario("scenarios/reference.json"); }

SolveOptionsQ trimmed_q() {
    SolveOptionsQ o;
    o.j_max = 8;
    o.tol = 1e-8;
    o.n_uniform_dirs = 4;
    o.m_nodes = 33;
    o.m_max = 8.0;
    o.s = 4;
    o.r_min = 1e-4;
    o.r_top = 10.0;
    return o;
}

}  // namespace

TEST_CASE("probe grid layout") {
    ProbeGrid pg = make_probes(0.9, 0.4, 0.5, 5, 4);
    CHECK(pg.t.size() == 5);
    CHECK(pg.z.size() == 4);
    for (cplx t : pg.t) {
        CHECK(std::abs(t) >= 0.9 / 3.0 - 1e-12);
        CHECK(std::abs(t) <= 0.9 + 1e-12);
        CHECK(std::arg(t) == doctest::Approx(0.4).epsilon(1e-12));
    }
    for (cplx z : pg.z) CHECK(std::abs(z.imag()) < 0.5);
}

TEST_CASE("steepest-descent ray choice") {
    // unconstrained: the maximizer of cos(k(gamma - arg T)) is arg T itself
    cplx T = std::polar(0.3, 0.7);
    CHECK(choose_ray(0.7, 0.5, 1, T) == doctest::Approx(0.7).epsilon(1e-12));
    // constrained: clips to the admissible edge
    double g = choose_ray(1.5, 0.3, 1, T);
    CHECK(g == doctest::Approx(1.2).epsilon(1e-12));
    // no admissible direction in the aperture
    CHECK_THROWS_AS(choose_ray(0.7 + PI, 0.1, 1, T, 0.5), std::runtime_error);
}

TEST_CASE("arc directions bracket the arc") {
    auto dirs = arc_directions(0.2, 1.1, 16);
    CHECK(dirs.size() == 16);
    for (double d : dirs) {
        CHECK(d > 0.2);
        CHECK(d < 1.1);
    }
    CHECK(std::is_sorted(dirs.begin(), dirs.end()));
}

TEST_CASE("cached ray contour reproduces the monomial Laplace transform") {
    for (int k : {1, 2}) {
        CachedContour c = CachedContour::ray(k, 0.0, 0.0, 40.0, 12);
        c.k = k;
        MGrid g{4.0, 3};
        const int n = 3;
        c.tabulate([&](cplx u) { return std::vector<cplx>(g.n, std::pow(u, n)); });
        cplx T = std::polar(0.3, 0.1);
        auto col = c.value(T);
        cplx exact = std::tgamma((double)n / k) * std::pow(T, n);
        for (cplx v : col) CHECK(std::abs(v - exact) <= 1e-6 * std::abs(exact));
    }
}

TEST_CASE("lattice interpolation is exact-grade on smooth radial data") {
    RayGridFunction f;
    f.directions = {0.0, 0.5};
    f.radial = RadialLattice::make(1e-3, 2.0, 1.0, 8, 4.0);
    f.mgrid = MGrid{4.0, 5};
    f.q = 2.0;
    f.delta = 1.0;
    f.allocate();
    auto fun = [](double r) { return std::pow(r, 1.5) * std::exp(-0.3 * r); };
    for (int d = 0; d < 2; ++d)
        for (int i = 0; i < f.radial.n_rings; ++i)
            for (int j = 0; j < f.mgrid.n; ++j) f.at(d, i, j) = fun(f.radial.r(i));
    for (double r : {0.01, 0.2, 1.3, 3.1}) {
        auto col = lattice_column(f, 1, r);
        CHECK(std::abs(col[2] - fun(r)) <= 1e-9 * std::abs(fun(r)));
    }
    CHECK(dir_index(f, 0.5) == 1);
    CHECK_THROWS_AS(dir_index(f, 0.77), std::runtime_error);
}

TEST_CASE("forcing assembly is the inverse Fourier of the forcing column") {
    Scenario sc = ref();
    MGrid g{8.0, 65};
    EvaluationPoint pt{std::polar(0.4, 0.3), cplx(0.2, 0.1), cplx(0.05, 0.0)};
    cplx T = pt.t;  // forcing_column takes the Laplace variable directly
    auto col = forcing_column(sc.q, T, pt.eps, g);
    cplx direct = inverse_fourier(col, g, pt.z);
    cplx assembled = assemble_forcing(sc.q, pt, g);
    CHECK(std::abs(assembled - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("summed solution satisfies the first equation at probe points") {
    Scenario sc = ref();
    SolveOptionsQ o = trimmed_q();
    NeumannSeriesQ wq = solve_wk(sc.q, cplx(0.05, 0.0), 0, o);
    WkEvaluator wk{&sc.q, cplx(0.05, 0.0), (int)wq.terms.size(), MGrid{o.m_max, o.m_nodes}};
    UpEvaluator up(wk, sc.q.dirs[0], o.r_top, 12);
    EvaluationPoint pt{std::polar(0.5, sc.run.t_arg), cplx(0.3, 0.1), cplx(0.05, 0.0)};
    ResidualReport rr = residual_q(up, sc.q, pt, 1e-4);
    CHECK(rr.scale > 0.0);
    CHECK(rr.rel < 1e-4);
}

TEST_CASE("q-side cocycle: decomposed route equals the direct route") {
    Scenario sc = ref();
    SolveOptionsQ o = trimmed_q();
    NeumannSeriesQ wq = solve_wk(sc.q, cplx(0.05, 0.0), 0, o);
    WkEvaluator wk{&sc.q, cplx(0.05, 0.0), (int)wq.terms.size(), MGrid{o.m_max, o.m_nodes}};
    ProbeGrid pg = make_probes(sc.run.t_radius, sc.run.t_arg, 0.5 * sc.q.beta, 2, 3);
    std::vector<cplx> eps = {cplx(0.05, 0.0), cplx(0.02, 0.0)};
    CocycleSample cs = cocycle_difference_q(wk, sc.q, sc.q.dirs[0], sc.q.dirs[1], pg, eps,
                                            (int)wq.terms.size(), true, o.r_top);
    CHECK(cs.eps.size() == 2);
    CHECK(cs.tag == "q-cross-p");
    for (size_t i = 0; i < cs.eps.size(); ++i) {
        CHECK(cs.delta[i] > 0.0);
        CHECK(cs.route_gap[i] < 1e-6);
    }
}

TEST_CASE("cocycle CSV emission") {
    CocycleSample s;
    s.tag = "same-p";
    s.eps = {std::polar(0.05, -0.9), std::polar(0.01, -0.9)};
    s.delta = {1.5e-3, 2.5e-7};
    s.route_gap = {1e-9, 2e-9};
    s.sup_direct = {1.5e-3, 2.5e-7};
    const std::string path = "/tmp/qsl_test_cocycle.csv";
    write_cocycle_csv({s}, path);
    std::ifstream in(path);
    std::string header, line1, line2;
    std::getline(in, header);
    CHECK(header == "eps_mod,eps_arg,delta_sup,route_gap,tag");
    std::getline(in, line1);
    std::getline(in, line2);
    CHECK(line1.find("same-p") != std::string::npos);
    CHECK(line2.find("same-p") != std::string::npos);
    CHECK(line1.find("0.05") != std::string::npos);
    std::remove(path.c_str());
}
