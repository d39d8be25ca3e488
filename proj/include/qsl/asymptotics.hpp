// Formal-series machinery and asymptotic model fitting: the Fourier-side
// coefficient recursions of the two formal solutions (t-dependence kept as
// exact polynomial coefficient lists), divergent-remainder verification
// against the q-Gevrey bound, flatness-model fitting (Gevrey vs q-Gevrey)
// for cocycle samples, the Dirichlet-sum estimate, and the Euler-Maclaurin
// identity check.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsl/summation.hpp"

namespace qsl {

// Coefficients h_m(t, m-node) of a formal series sum_m h_m(t,z) eps^m / m!,
// stored Fourier-side with the t-dependence as polynomial coefficients, so
// t^{k+1} d_t, t -> q^delta t and t-integration are exact operations.
struct FormalSeriesF {
    MGrid g;
    std::vector<std::vector<std::vector<cplx>>> h;  // [m][m_node][t_power]
    int order() const { return (int)h.size() - 1; }
    // m-grid column of h_m at a fixed t
    std::vector<cplx> column(int m, cplx t) const;
    // column of the partial sum sum_{m <= n} h_m(t, .) eps^m / m!
    std::vector<cplx> partial_column(cplx t, cplx eps, int n) const;
    // physical-space value of the partial sum
    cplx eval_partial(cplx t, cplx z, cplx eps, int n) const;
};

FormalSeriesF formal_coeffs_q(const ProblemSpecQ& spec, const MGrid& g, int n_max);
FormalSeriesF formal_coeffs_b(const ProblemSpecB& spec, const FormalSeriesF& formal_q,
                              int n_max);

struct RemainderReport {
    double kappa = 0.0;
    double C_p = 0.0, A_p = 0.0;  // fitted (envelope intercept, 5% inflated)
    bool bound_holds = false;
    double fit_rms = 0.0;
    int valley_n = -1;  // n minimizing R_n at the smallest eps sample
    std::vector<std::vector<double>> Rn;  // [n][eps sample]
};

// R_n(eps) = sup over probes of |u - partial sum|, checked against
// C A^{n+1} q^{n(n+1)/(2 kappa)} |eps|^{n+1}. The check is repeated on a
// three-point kappa grid {0.8, 1.0, 1.2} * kappa; the returned report is for
// the supplied kappa, with companions in `grid`.
struct RemainderGridReport {
    RemainderReport main;
    std::vector<RemainderReport> grid;
};
RemainderGridReport remainder_check(const std::function<cplx(const EvaluationPoint&)>& u,
                                    const FormalSeriesF& formal, double kappa, double q,
                                    const std::vector<cplx>& eps_samples, int n_max,
                                    const ProbeGrid& probes);

struct FlatnessReport {
    std::string model;          // "gevrey" | "q-gevrey" | "degenerate"
    double exponent = 0.0;      // kappa_hat (q-Gevrey) or k_hat (Gevrey)
    double rate = 0.0;          // M_hat for the Gevrey model
    double power_K = 0.0;       // fitted power of |eps| (q-Gevrey model)
    double log_prefactor = 0.0;
    double rms = 0.0;           // RMS of the winning model
    double rms_other = 0.0;     // RMS of the losing model
    double margin = 0.0;        // rms_other / rms
    int n_samples = 0;
};

// Fits both decay models to log Delta(|eps|) and reports the winner.
// q-Gevrey: log D = b0 + b1 log|eps| + b2 log^2|eps|, kappa_hat = -2 log(q) b2.
// Gevrey:   log D = b0 + K log|eps| - M |eps|^{-k}, best k in 1..k_max.
FlatnessReport fit_flatness(const CocycleSample& sample, double q, int k_max = 4);

// S(eps) = sum_j del1^j q^{-del2 j^2} exp(-del3 del4^j / eps), tail < 1e-18.
double dirichlet_sum_value(double del1, double del2, double del3, double del4, double q,
                           double eps);

struct DirichletReport {
    double D1 = 0.0, D2 = 0.0;      // fitted on the calibration range
    double frac_holding = 0.0;      // fraction of test samples within the bound
    bool bound_holds = false;       // frac_holding >= 0.95
    double kappa = 0.0;
};
// Calibrates S(eps) <= D2 exp(-kappa/(2 log q) log^2 eps) eps^{D1} on one
// eps range and tests it on a disjoint one. Requires
// kappa < 2 del2 log^2(q) / log^2(del4).
DirichletReport dirichlet_sum(double del1, double del2, double del3, double del4, double q,
                              double kappa, const std::vector<double>& eps_calibration,
                              const std::vector<double>& eps_test);

// | sum_{j=0}^n f(j) - [ (f(0)+f(n))/2 + int_0^n f + int_0^n B1(t-floor t) f'(t) dt ] |
// with B1(x) = x - 1/2, per-interval Gauss-Legendre quadrature.
double euler_maclaurin_check(const std::function<double(double)>& f,
                             const std::function<double(double)>& fp, int n);

}  // namespace qsl
