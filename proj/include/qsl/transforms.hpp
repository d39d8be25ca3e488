// Integral transforms: the m_k-Laplace transform along a ray with its
// algebraic identities (dilation commutation, Euler-operator law), the
// inverse Fourier transform on a horizontal strip, the m-convolution of
// exponentially decaying profiles, and the fractional kernel integral
// int_0^{tau^k} (tau^k - s)^chi s^nu f(s^{1/k}) ds used by the Volterra blocks.
#pragma once

#include <functional>
#include <vector>

#include "qsl/grid.hpp"
#include "qsl/util.hpp"

namespace qsl {

// Integration ray L_gamma = [0, R_tr * e^{i gamma}], with the sector
// condition cos(k (gamma - arg T)) >= delta1 required for kernel decay.
struct RaySpec {
    double gamma = 0.0;
    double R_tr = 40.0;       // truncation radius
    double delta1 = 0.5;      // lower bound on cos(k(gamma - arg T))
    int nodes_per_panel = 8;  // Gauss-Legendre nodes per radial panel
    double panel_ratio = 1.35;
};

using RadialFun = std::function<cplx(cplx)>;

struct LaplaceResult {
    cplx value{0.0, 0.0};
    double truncation = 0.0;  // magnitude estimate of the discarded tail
    bool direction_ok = true; // cos(k(gamma - arg T)) >= delta1 held
};

// L_k(w)(T) = k * int_{L_gamma} w(u) exp(-(u/T)^k) du / u.
LaplaceResult mk_laplace(const RadialFun& w, int k, const RaySpec& ray, cplx T);

// Relative defect of L(w)(q^delta T) = L(w(q^delta .))(T).
double check_laplace_dilation(const RadialFun& w, int k, double qd, const RaySpec& ray, cplx T);

// Relative defect of L(k tau^k w)(T) = T^{k+1} d/dT L(w)(T), derivative by
// centered differences with relative step h.
double check_laplace_euler(const RadialFun& w, int k, const RaySpec& ray, cplx T, double h = 1e-5);

// (2 pi)^{-1/2} int F(m) e^{i z m} dm by the trapezoid rule on the m-grid.
// Valid for |Im z| < beta when F carries e^{-beta|m|} decay.
cplx inverse_fourier(const std::vector<cplx>& F, const MGrid& g, cplx z);

// psi(m) = (2 pi)^{-1/2} int f(m - m1) g(m1) dm1 on the common m-grid,
// with f taken as 0 outside [-m_max, m_max].
std::vector<cplx> convolve_E(const std::vector<cplx>& f, const std::vector<cplx>& g, const MGrid& g_m);

// int_0^{tau^k} (tau^k - s)^chi s^nu f(s^{1/k}) ds, chi > -1, nu > -1.
// Substitution s = tau^k u with a quintic-smoothstep grading (cubic
// clustering at both endpoints) absorbs the endpoint singularities.
cplx fractional_conv(const RadialFun& f, int k, double chi, double nu, cplx tau, int n_nodes = 48);

// Same integral with measure ds / s (requires nu > 0).
inline cplx fractional_conv_ds_over_s(const RadialFun& f, int k, double chi, double nu, cplx tau,
                                      int n_nodes = 48) {
    return fractional_conv(f, k, chi, nu - 1.0, tau, n_nodes);
}

}  // namespace qsl
