// Weighted sup-norms on the m-line and on ray-grid functions over a sector
// domain, plus empirical verifiers for the three operator-continuity bounds
// (q-dilated convolution, fractional Volterra kernel, m-convolution Volterra
// kernel) that drive the two fixed-point solvers.
#pragma once

#include <functional>
#include <vector>

#include "qsl/geometry.hpp"
#include "qsl/grid.hpp"
#include "qsl/util.hpp"

namespace qsl {

struct NormEWeights {
    double beta = 1.0;
    double mu = 2.5;
};

struct NormQExpWeights {
    double beta = 1.0;
    double mu = 2.5;
    double k1 = 0.5;
    double q = 2.0;
    double alpha = 1.0;
    double tau0 = 1.0;
};

struct NormFWeights {
    double beta = 1.0;
    double mu = 2.5;
    double nu = 1.0;
    int k = 1;
};

// sup_m (1 + |m|)^mu e^{beta |m|} |f(m)| over the m-grid.
double norm_E(const std::vector<cplx>& f, const MGrid& g, const NormEWeights& w);

// Weight multiplying |h(tau, m)| in the q-exponential norm:
// (1/r) exp( -(k1/2) log^2(r + tau0) / log q - alpha log(r + tau0) ).
double qexp_radial_weight(double r, const NormQExpWeights& w);

// Weight multiplying |h(tau, m)| in the F-norm:
// ((1 + r^{2k}) / r) exp( -nu r^k ).
double fnorm_radial_weight(double r, const NormFWeights& w);

// Sup over lattice points (tau, m) with tau inside dom (tau = 0 excluded).
double norm_qexp(const RayGridFunction& h, const NormQExpWeights& w, const SectorDomain& dom);
double norm_F(const RayGridFunction& h, const NormFWeights& w, const SectorDomain& dom);

// Callable test functions for the bound verifiers.
using TauMFun = std::function<cplx(cplx, double)>;  // f(tau, m)
using MFun = std::function<cplx(double)>;           // c(m), b(m)

struct BoundReport {
    double lhs = 0.0;        // norm of the assembled operator output
    double rhs_factor = 0.0; // the structural factor multiplying input norms
    double input_norms = 1.0;
    double ratio = 0.0;      // lhs / (rhs_factor * input_norms)
    bool preconditions_ok = true;
    std::string note;
};

// ||tau^{gamma2} a_{g1}(tau) b(m) int c(m - m1) R1(i m1) f(q^delta tau, m1) dm1||
// over dom, against the dilated-domain norm of f. a_{g1} = 1/(1+|tau|)^{gamma1},
// |b(m)| <= 1/|R2(i m)|. Preconditions: deg R1 <= deg R2, mu >= deg R1 + 1,
// gamma1 >= k1 * delta + gamma2.
BoundReport verify_prop_qconv(const TauMFun& f, const MFun& c, const Poly& R1, const Poly& R2,
                              double gamma1, double gamma2, double delta,
                              const NormQExpWeights& w, const SectorDomain& dom,
                              const RayGridFunction& layout);

// ||a_{g1,k}(tau) int_0^{tau^k} (tau^k - s)^chi s^{nu2} f(s^{1/k}, m) ds||_F
// with a_{g1,k} = 1/(1+|tau|^k)^{gamma1}. Preconditions: 1 + chi + nu2 >= 0,
// gamma1 >= nu2, nu2 >= -1 integer, chi > -1.
BoundReport verify_prop_frac(const TauMFun& f, double gamma1, double chi, double nu2,
                             const NormFWeights& w, const SectorDomain& dom,
                             const RayGridFunction& layout);

// ||b(m) int_0^{tau^k} (tau^k - s)^{1/k} [int f(m - m1) Qp(i m1) g(s^{1/k}, m1) dm1] ds/s||_F
// with |b(m)| <= 1/|Rp(i m)|. Preconditions: deg Rp >= deg Qp, mu > deg Qp + 1.
BoundReport verify_prop_mconv(const MFun& f, const TauMFun& g, const Poly& Qp, const Poly& Rp,
                              const NormFWeights& w, const NormEWeights& we,
                              const SectorDomain& dom, const RayGridFunction& layout);

}  // namespace qsl
