#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qsl/transforms.hpp"

using namespace qsl;

namespace {
double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
}  // namespace

TEST_CASE("order-k Laplace transform of monomials") {
    // L_k(u^n)(T) = Gamma(n/k) T^n on any admissible ray.
    for (int k : {1, 2, 3}) {
        RaySpec ray{0.0, 40.0, 0.2, 8, 1.35};
        for (cplx T : {cplx(0.3, 0.0), std::polar(0.25, 0.4), std::polar(0.35, -0.3)}) {
            for (int n = 1; n <= 6; ++n) {
                RadialFun w = [n](cplx u) { return std::pow(u, n); };
                LaplaceResult r = mk_laplace(w, k, ray, T);
                CHECK(r.direction_ok);
                cplx exact = std::tgamma((double)n / k) * std::pow(T, n);
                CHECK(std::abs(r.value - exact) <= 1e-6 * std::abs(exact));
            }
        }
    }
}

TEST_CASE("ray direction admissibility") {
    RaySpec ray{0.0, 40.0, 0.5, 8, 1.35};
    // k=1, arg T = 2.0: cos(0 - 2.0) < 0.5, kernel does not decay on the ray
    RadialFun w = [](cplx u) { return u; };
    LaplaceResult r = mk_laplace(w, 1, ray, std::polar(0.3, 2.0));
    CHECK(!r.direction_ok);
}

TEST_CASE("Laplace dilation and Euler-operator identities") {
    RaySpec ray{0.0, 40.0, 0.2, 8, 1.35};
    RadialFun w = [](cplx u) { return u * std::exp(-0.2 * u); };
    for (int k : {1, 2}) {
        double d = check_laplace_dilation(w, k, 4.0, ray, std::polar(0.3, 0.05));
        CHECK(d < 1e-8);
        double e = check_laplace_euler(w, k, ray, std::polar(0.3, 0.05));
        CHECK(e < 1e-5);  // limited by the centered finite difference
    }
}

TEST_CASE("inverse Fourier transform of a Gaussian") {
    // (2 pi)^{-1/2} int exp(-m^2/2) e^{izm} dm = exp(-z^2/2)
    MGrid g{16.0, 257};
    std::vector<cplx> F(g.n);
    for (int i = 0; i < g.n; ++i) F[i] = std::exp(-0.5 * g.node(i) * g.node(i));
    for (cplx z : {cplx(0.0, 0.0), cplx(1.3, 0.0), cplx(-0.7, 0.4), cplx(2.0, -0.5)}) {
        cplx got = inverse_fourier(F, g, z);
        cplx exact = std::exp(-0.5 * z * z);
        CHECK(std::abs(got - exact) < 1e-10);
    }
}

TEST_CASE("m-convolution of Gaussians") {
    // (2 pi)^{-1/2} (e^{-m^2/2a^2} * e^{-m^2/2b^2})(m)
    //   = (ab/sqrt(a^2+b^2)) e^{-m^2/2(a^2+b^2)}
    MGrid g{16.0, 257};
    const double a = 1.0, b = 1.5;
    std::vector<cplx> f(g.n), h(g.n);
    for (int i = 0; i < g.n; ++i) {
        double m = g.node(i);
        f[i] = std::exp(-0.5 * m * m / (a * a));
        h[i] = std::exp(-0.5 * m * m / (b * b));
    }
    auto psi = convolve_E(f, h, g);
    const double s2 = a * a + b * b;
    for (int i = 0; i < g.n; i += 16) {
        double m = g.node(i);
        double exact = a * b / std::sqrt(s2) * std::exp(-0.5 * m * m / s2);
        CHECK(std::abs(psi[i] - exact) < 1e-10);
    }
}

TEST_CASE("fractional kernel integral against the Beta function") {
    // f = 1: int_0^{A} (A-s)^chi s^nu ds = A^{chi+nu+1} B(chi+1, nu+1), A = tau^k.
    RadialFun one = [](cplx) { return cplx(1.0); };
    for (int k : {1, 2}) {
        for (double chi : {-0.5, 0.25, 1.0}) {
            for (double nu : {-0.3, 0.0, 1.5}) {
                cplx tau = std::polar(0.8, 0.3);
                cplx A = std::pow(tau, k);
                cplx exact = std::pow(A, chi + nu + 1.0) * std::exp(lbeta(chi + 1.0, nu + 1.0));
                cplx got = fractional_conv(one, k, chi, nu, tau);
                CHECK(std::abs(got - exact) <= 1e-9 * std::abs(exact));
            }
        }
    }
}

TEST_CASE("fractional kernel integral with a power-law integrand") {
    // f(x) = x^{2k}, i.e. f(s^{1/k}) = s^2: shifts nu by 2.
    const int k = 2;
    RadialFun f = [&](cplx x) { return std::pow(x, 2 * k); };
    const double chi = -0.4, nu = 0.2;
    cplx tau = std::polar(1.1, -0.2);
    cplx A = std::pow(tau, k);
    cplx exact = std::pow(A, chi + nu + 3.0) * std::exp(lbeta(chi + 1.0, nu + 3.0));
    cplx got = fractional_conv(f, k, chi, nu, tau);
    CHECK(std::abs(got - exact) <= 1e-9 * std::abs(exact));

    // ds/s variant: nu -> nu - 1
    cplx gs = fractional_conv_ds_over_s(f, k, chi, nu + 1.0, tau);
    CHECK(std::abs(gs - got) <= 1e-12 * std::abs(got));
}
