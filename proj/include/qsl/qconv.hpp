// Solver for the q-difference / m-convolution fixed point
//   w_k(tau,m) = sum_l eps^{Delta_l - k d_l} (k tau^k)^{d_l} / P_m(tau)
//                * (2 pi)^{-1/2} int C_l(m - m1) R_l(i m1) w_k(q^delta tau, m1) dm1
//                + psi_k(tau,m) / P_m(tau),     w_k(0,m) = 0,
// by its Neumann series w_k = sum_j w_{k,j}, w_{k,0} = psi_k / P_m,
// w_{k,j+1} = H_eps(w_{k,j}). The radial lattice ratio is an exact s-th root
// of q^delta, so the dilation tau -> q^delta tau is an s-ring index shift and
// each Neumann term is computed on a lattice extended by s rings relative to
// its successor: no extrapolation is ever needed.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsl/geometry.hpp"
#include "qsl/grid.hpp"
#include "qsl/norms.hpp"
#include "qsl/util.hpp"

namespace qsl {

// Closed-form m-profile: amp * eps^{eps_pow} * exp(-m^2 / (2 sigma^2)).
struct Profile {
    double amp = 0.0;
    double sigma = 1.0;
    int eps_pow = 0;
    cplx eval(double m, cplx eps) const {
        if (amp == 0.0) return cplx(0.0);
        cplx e = (eps_pow == 0) ? cplx(1.0) : std::pow(eps, eps_pow);
        return amp * e * std::exp(-0.5 * m * m / (sigma * sigma));
    }
    bool is_zero() const { return amp == 0.0; }
};

// Forcing psi_k(tau,m) = (sum_n a_n tau^n) * profile(m).
struct ForcingQ {
    std::vector<cplx> a;  // Taylor coefficients a_0, a_1, ...
    Profile mprof;
    cplx eval(cplx tau, double m, cplx eps) const {
        return poly_eval(a, tau) * mprof.eval(m, eps);
    }
};

// Annulus r <= |z| <= r1 intersected with |arg(z) - d| <= eta.
struct AnnulusSpec {
    double r = 1.0, r1 = 50.0, d = 0.0, eta = PI;
    bool contains(cplx z, double tol = 1e-9) const {
        double a = std::abs(z);
        if (a < r - tol || a > r1 + tol) return false;
        return std::abs(angle_diff(std::arg(z), d)) <= eta + tol;
    }
};

struct ProblemSpecQ {
    int k = 1;
    int D = 2;
    double delta = 1.0, k1 = 0.5, q = 2.0, alpha = 1.0;
    std::vector<int> d;      // d[l-1] = d_l, l = 1..D
    std::vector<int> Delta;  // Delta[l-1] = Delta_l
    Poly Q;
    std::vector<Poly> R;     // R[l-1] = R_l, l = 1..D
    std::vector<Profile> C;  // C[l-1] = C_l, l = 1..D-1
    std::vector<double> gamma_budget;  // smallness budgets for ||C_l||
    ForcingQ psi;
    double eps0 = 0.1, beta = 1.0, mu = 2.5, tau0 = 1.0;
    // Geometry of the tau-plane covering.
    double mu0 = 0.8, mu1 = 1.8, rho = 0.2, Qcheck = 0.9, Qhat = 1.6;
    std::vector<double> dirs;  // the covering directions (varsigma of them)
    AnnulusSpec ann;           // target annulus for Q(im)/R_D(im)

    int dD() const { return d.back(); }
    int min_dl() const {
        int m = d[0];
        for (int l = 0; l + 1 < D; ++l) m = std::min(m, d[l]);
        return m;
    }
    double qd() const { return std::pow(q, delta); }
    // P_m(tau) = Q(im) - R_D(im) (k tau^k)^{d_D}.
    cplx Pm(double m, cplx tau) const {
        return poly_eval_im(Q, m) -
               poly_eval_im(R.back(), m) * std::pow((double)k * std::pow(tau, k), dD());
    }
    FrameFamily frames() const;
};

struct CheckItem {
    std::string name;
    bool pass = true;
    double margin = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckItem> items;
    bool all_pass() const {
        for (const auto& c : items)
            if (!c.pass) return false;
        return true;
    }
};

ValidationReport validate_spec_q(const ProblemSpecQ& spec);

// Build the shared direction set: uniform base plus the covering directions,
// their strip edges, sector midlines, and any extra directions requested.
std::vector<double> make_directions(const ProblemSpecQ& spec, int n_uniform,
                                    const std::vector<double>& extra = {});

// One application of H_eps. Input must extend at least s rings beyond the
// requested output; the result has w.radial.n_rings - s rings.
RayGridFunction apply_H(const RayGridFunction& w, const ProblemSpecQ& spec, cplx eps);

struct NeumannSeriesQ {
    std::vector<RayGridFunction> terms;  // w_{k,j} on the base lattice
    RayGridFunction wk;                  // partial sum on the base lattice
    RayGridFunction wk_ext;              // partial sum with >= s extra rings
    std::vector<double> norm_theta;      // ||w_{k,j}|| on Theta^p
    std::vector<double> norm_disc;       // ||w_{k,j}|| on D(0, Qcheck mu_{0,j})
    std::vector<std::vector<double>> norm_frames;  // [j][h] on POmega_h^p
    double residual = 0.0;     // ||w_k - H(w_k) - psi/P|| / ||w_{k,0}||
    double contraction_max = 0.0;
    bool converged = false;
    int p = 0;
    cplx eps;
};

struct SolveOptionsQ {
    int j_max = 40;
    double tol = 1e-10;
    int n_uniform_dirs = 16;
    int m_nodes = 257;
    double m_max = 16.0;
    int s = 8;
    double r_min = 1e-8;
    double r_top = 25.0;
    std::vector<double> extra_dirs;
};

// Neumann series on sector index p. Throws on three consecutive
// non-contracting term ratios.
NeumannSeriesQ solve_wk(const ProblemSpecQ& spec, cplx eps, int p, const SolveOptionsQ& opt = {});

struct DecayReportQ {
    double K1_emp = 0.0;          // fitted geometric ratio on Theta^p
    double K2_emp = 0.0;          // linear part of the disc fit
    double disc_quad_emp = 0.0;   // fitted coefficient of j(j+1) (disc norms)
    double disc_quad_model = 0.0; // (delta log q) * k * min d_l / 2
    double K3_emp = 0.0, K4_emp = 0.0;
    double frame_quad_emp = 0.0;  // fitted coefficient of h(h+1) (frame norms)
    bool degenerate = false;      // all norms beyond j = 0 vanish
    bool upper_bounds_ok = false; // envelope constants make the bounds hold
    int n_disc_points = 0;
};

DecayReportQ measure_decay_q(const NeumannSeriesQ& series, const ProblemSpecQ& spec, int p);

// Off-lattice evaluation: w_{k,j}(tau, .) for arbitrary tau by unrolling the
// dilation ladder tau, q^delta tau, ..., q^{delta j} tau. Returns the m-grid
// column of the partial sum w_k = sum_{j <= n_terms-1} w_{k,j}.
struct WkEvaluator {
    const ProblemSpecQ* spec = nullptr;
    cplx eps;
    int n_terms = 1;
    MGrid mgrid;
    std::vector<cplx> eval(cplx tau) const;          // column of w_k over m
    std::vector<cplx> eval_term(cplx tau, int j) const;  // column of w_{k,j}
};

// CSV dump (columns: direction_idx, r, m, re, im) for cross-checking.
void dump_grid_csv(const RayGridFunction& w, const std::string& path);

}  // namespace qsl
