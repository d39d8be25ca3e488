// Solver for the Borel-plane Volterra / m-convolution fixed point: per
// Neumann index j, v_{k,j} is the fixed point of the linear map G_{eps,j}
// whose blocks are fractional Volterra integrals int_0^{tau^k} (tau^k-s)^e
// s^h v(s^{1/k}, m) ds/s (driven by the symbol quotient R_l / P), one block
// with an inner m-convolution against C_{0,0} R_0, and a forcing block fed
// by the q-side Neumann term w_{k,j}. Includes the Euler-operator expansion
// producing the A_{delta,h} coefficients and the kernel-exponent arithmetic.
#pragma once

#include <string>
#include <vector>

#include "qsl/qconv.hpp"

namespace qsl {

// c(eps) = coef * eps^pow with pow >= 1 (vanishes at the origin); the
// quotient c(eps)/eps is evaluated analytically, never by literal division.
struct ScalarDescriptor {
    cplx coef = 0.0;
    int pow = 1;
    cplx eval(cplx eps) const { return coef * std::pow(eps, pow); }
    cplx over_eps(cplx eps) const {
        return (pow == 1) ? coef : coef * std::pow(eps, pow - 1);
    }
};

// Unbounded sector |z| >= r, |arg z - d| <= eta.
struct USectorSpec {
    double r = 1.0, d = 0.0, eta = PI;
    bool contains(cplx z, double tol = 1e-9) const {
        return std::abs(z) >= r - tol && std::abs(angle_diff(std::arg(z), d)) <= eta + tol;
    }
};

// d_l + k + 1 - delta_l (k + 1); throws if negative.
int d_lk(int d_l, int delta_l, int k);

// Coefficients A_{delta,p}, p = 1..delta-1, such that
//   T^{delta(k+1)} d_T^delta = (T^{k+1} d_T)^delta
//                              + sum_p A_{delta,p} T^{k(delta-p)} (T^{k+1} d_T)^p
// as operators on monomials. Exact rational arithmetic.
std::vector<Rational> expand_euler_operators(int delta, int k);

struct ProblemSpecB {
    int D = 2;
    std::vector<int> d;       // d[l-1] = bold d_l, l = 1..D
    std::vector<int> deltav;  // deltav[l-1] = bold delta_l
    std::vector<int> Delta;   // Delta[l-1] = bold Delta_l
    Poly Q;
    std::vector<Poly> R;      // R[0] = bold R_0, R[l] = bold R_l, R[D] = bold R_D
    ScalarDescriptor c00, cF;
    double varsigma00 = 0.0, varsigma0 = 0.0, varsigmaF = 0.0;  // smallness budgets
    Profile C00;
    double nu = 4.0;
    std::vector<std::vector<double>> e_dirs;  // e_dirs[p][p'] = direction e_{p',p}
    double sector_half_aperture = PI / 24.0;  // half aperture of S_{e_{p',p}}
    double rho = 1.0;                         // radius of the companion disc
    USectorSpec SQRD;                         // target sector for Q(im)/R_D(im)
    // shared with the q-side problem
    int k = 1;
    double beta = 1.0, mu = 2.5, eps0 = 0.1;
    std::vector<double> dirs_frak;            // the covering directions d_p
    double U_half_aperture = PI / 8.0;        // half aperture of U_{d_p}

    int deltaD() const { return deltav.back(); }
    // P_m(tau) = Q(im) k - R_D(im) k^{delta_D} tau^{(delta_D - 1) k}.
    cplx Pm(double m, cplx tau) const {
        return poly_eval_im(Q, m) * (double)k -
               poly_eval_im(R.back(), m) * std::pow((double)k, deltaD()) *
                   std::pow(tau, (deltaD() - 1) * k);
    }
};

ValidationReport validate_spec_b(const ProblemSpecB& spec);

// One application of G_{eps,j}: the four v-blocks plus the w-forcing block.
// Volterra structure: output rings never read v beyond their own radius.
RayGridFunction apply_G(const RayGridFunction& v, const ProblemSpecB& spec, cplx eps,
                        const RayGridFunction& w_kj);

struct PicardLog {
    int iterations = 0;
    double last_update = 0.0;    // ||v_{n+1} - v_n|| at exit
    double ratio_max = 0.0;      // max update ratio (empirical Lipschitz bound)
    bool converged = false;
    bool ball_warning = false;   // iterate left the calibrated ball
};

struct NeumannSeriesB {
    std::vector<RayGridFunction> terms;  // v_{k,j}
    RayGridFunction vk;                  // full solution (single solve, summed forcing)
    std::vector<double> norm_sector;     // F-norm of v_{k,j} on S_e
    std::vector<double> norm_disc;       // on D(0, Qcheck mu_{0,j})
    std::vector<std::vector<double>> norm_nested;  // [j][h] on S_e cap D(0, Qhat mu_{1,h})
    std::vector<PicardLog> logs;         // per-term Picard diagnostics
    PicardLog log_full;                  // diagnostics of the single full solve
    double residual = 0.0;               // substitution residual of the full equation
    double lipschitz_max = 0.0;
    int p = 0, p_prime = 0;
    cplx eps;
};

struct SolveOptionsB {
    double tol = 1e-10;
    int j_terms = 14;        // number of per-term solves (decay measurement)
    int max_picard = 200;
    double upsilon = 4.0;    // calibrated ball-radius multiplier
    bool per_term = true;    // also solve the individual v_{k,j}
};

// Solves the full fixed point with forcing w_k = sum_j w_{k,j}, and (when
// per_term is set) the first j_terms members of the Neumann decomposition.
NeumannSeriesB solve_vk(const ProblemSpecB& spec, const ProblemSpecQ& specQ,
                        const NeumannSeriesQ& wq, int p_prime, int p,
                        const SolveOptionsB& opt = {});

struct DecayReportB {
    double K5_emp = 0.0;
    double K6_emp = 0.0;
    double disc_quad_emp = 0.0;
    double disc_quad_model = 0.0;  // (delta log q) * k * min d_l / 2  (q-side d_l)
    double K7_emp = 0.0;
    double nested_quad_emp = 0.0;
    bool degenerate = false;
    bool upper_bounds_ok = false;
    int n_disc_points = 0;
};

DecayReportB measure_decay_b(const NeumannSeriesB& series, const ProblemSpecQ& specQ);

// Banded high-order cumulative quadrature on a fixed radial lattice:
// G[i] = int_0^{r_i} g(r) dr for sampled g, degree-5 local interpolation.
// `power_hint` is the leading exponent of g at 0 (closes the [0, r_0] gap).
struct CumulativeIntegrator {
    std::vector<double> radii;
    int stencil = 6;
    std::vector<std::vector<double>> w;  // per-interval stencil weights
    std::vector<int> first;              // stencil start index per interval
    explicit CumulativeIntegrator(std::vector<double> r);
    std::vector<cplx> integrate(const std::vector<cplx>& g, double power_hint) const;
};

}  // namespace qsl
