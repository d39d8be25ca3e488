#include "qsl/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace qsl {

LaplaceResult mk_laplace(const RadialFun& w, int k, const RaySpec& ray, cplx T) {
    LaplaceResult res;
    const double argT = std::arg(T);
    const double c = std::cos(k * (ray.gamma - argT));
    res.direction_ok = (c >= ray.delta1 - 1e-12);
    if (!res.direction_ok) return res;

    const cplx eig = std::polar(1.0, ray.gamma);
    const double aT = std::abs(T);
    // Kernel magnitude along the ray: exp(-c (r/|T|)^k); cut it off once the
    // exponent underflows double precision.
    const double r_kernel_end = aT * std::pow(745.0 / c, 1.0 / k);
    const double r_end = std::min(ray.R_tr, r_kernel_end);
    // First panel [0, r0], then geometric panels up to r_end.
    const double r0 = std::min(r_end, 1e-6 * aT);

    auto integrand = [&](double r) -> cplx {
        if (r <= 0.0) return cplx(0.0);
        const cplx u = r * eig;
        const cplx ker = std::exp(-std::pow(u / T, k));
        return w(u) * ker / r;
    };

    cplx acc(0.0);
    acc += gl_integrate(integrand, 0.0, r0, ray.nodes_per_panel);
    double a = r0;
    while (a < r_end) {
        double b = std::min(a * ray.panel_ratio, r_end);
        acc += gl_integrate(integrand, a, b, ray.nodes_per_panel);
        a = b;
    }
    res.value = (double)k * eig * acc;

    // Tail estimate: |w| at the cutoff times the remaining kernel mass.
    const double xk = std::pow(r_end / aT, k);
    const double tail_kernel = std::exp(-c * xk) / std::max(c * k * xk, 1.0);
    res.truncation = (double)k * std::abs(w(r_end * eig)) * tail_kernel;
    return res;
}

double check_laplace_dilation(const RadialFun& w, int k, double qd, const RaySpec& ray, cplx T) {
    LaplaceResult lhs = mk_laplace(w, k, ray, qd * T);
    RadialFun wd = [&](cplx u) { return w(qd * u); };
    RaySpec ray2 = ray;
    ray2.R_tr = ray.R_tr / qd;  // same physical truncation point after dilation
    LaplaceResult rhs = mk_laplace(wd, k, ray2, T);
    if (!lhs.direction_ok || !rhs.direction_ok)
        throw std::runtime_error("mk_laplace: ray outside the admissible cone for T");
    double scale = std::max(std::abs(lhs.value), std::abs(rhs.value));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs.value - rhs.value) / scale;
}

double check_laplace_euler(const RadialFun& w, int k, const RaySpec& ray, cplx T, double h) {
    RadialFun wk = [&](cplx u) { return (double)k * std::pow(u, k) * w(u); };
    LaplaceResult lhs = mk_laplace(wk, k, ray, T);
    LaplaceResult fp = mk_laplace(w, k, ray, T * (1.0 + h));
    LaplaceResult fm = mk_laplace(w, k, ray, T * (1.0 - h));
    if (!lhs.direction_ok || !fp.direction_ok || !fm.direction_ok)
        throw std::runtime_error("mk_laplace: ray outside the admissible cone for T");
    cplx dT = (fp.value - fm.value) / (2.0 * h * T);
    cplx rhs = std::pow(T, k + 1) * dT;
    double scale = std::max(std::abs(lhs.value), std::abs(rhs));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs.value - rhs) / scale;
}

cplx inverse_fourier(const std::vector<cplx>& F, const MGrid& g, cplx z) {
    cplx acc(0.0);
    for (int i = 0; i < g.n; ++i) {
        const double m = g.node(i);
        acc += F[i] * std::exp(cplx(0.0, 1.0) * z * m) * g.weight(i);
    }
    return acc / std::sqrt(2.0 * PI);
}

std::vector<cplx> convolve_E(const std::vector<cplx>& f, const std::vector<cplx>& g, const MGrid& gm) {
    std::vector<cplx> out(gm.n, cplx(0.0));
    // m and m1 both on the grid => m - m1 lands on the (extended) grid, so
    // the shifted index is exact; out-of-range shifts contribute 0.
    for (int i = 0; i < gm.n; ++i) {
        cplx acc(0.0);
        for (int j = 0; j < gm.n; ++j) {
            const int sh = i - j + (gm.n - 1) / 2;  // index of m - m1
            if (sh < 0 || sh >= gm.n) continue;
            acc += f[sh] * g[j] * gm.weight(j);
        }
        out[i] = acc / std::sqrt(2.0 * PI);
    }
    return out;
}

cplx fractional_conv(const RadialFun& f, int k, double chi, double nu, cplx tau, int n_nodes) {
    if (chi <= -1.0 || nu <= -1.0)
        throw std::invalid_argument("fractional_conv: need chi > -1 and nu > -1");
    if (std::abs(tau) == 0.0) return cplx(0.0);
    // s = tau^k u, u = S(v) quintic smoothstep: S' ~ v^2 near 0 and
    // ~ (1-v)^2 near 1, so (1-u)^chi u^nu S'(v) stays integrable-smooth.
    auto integrand = [&](double v) -> cplx {
        const double u = v * v * v * (10.0 - 15.0 * v + 6.0 * v * v);
        const double du = 30.0 * v * v * (1.0 - v) * (1.0 - v);
        if (u <= 0.0 || u >= 1.0) return cplx(0.0);
        // s^{1/k} = tau u^{1/k} along the branch following tau's ray.
        const cplx val = f(tau * std::pow(u, 1.0 / (double)k));
        return std::pow(1.0 - u, chi) * std::pow(u, nu) * val * du;
    };
    // Composite Gauss-Legendre in v.
    const int panels = std::max(1, n_nodes / 8);
    cplx acc(0.0);
    for (int p = 0; p < panels; ++p)
        acc += gl_integrate(integrand, (double)p / panels, (double)(p + 1) / panels, 8);
    return std::pow(tau, (double)k * (chi + nu + 1.0)) * acc;
}

}  // namespace qsl
