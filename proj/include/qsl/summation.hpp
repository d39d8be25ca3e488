// Physical-space assembly: the forcing f(t,z,eps), the solutions
// u_p(t,z,eps) and y_{p',p}(t,z,eps) obtained by m_k-Laplace transform along
// admissible rays followed by inverse Fourier transform, residual checks of
// the two governing equations under spectral d_z / finite-difference d_t,
// and the path-deformation cocycle differences (direct ray difference vs
// arc + segment-ladder + tail decomposition).
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsl/borel.hpp"
#include "qsl/qconv.hpp"

namespace qsl {

struct EvaluationPoint {
    cplx t{0.0};
    cplx z{0.0};
    cplx eps{0.0};
};

struct ProbeGrid {
    std::vector<cplx> t;
    std::vector<cplx> z;
};
// t moduli linearly spaced in [r_t/3, r_t] at fixed argument, z on a
// horizontal line inside the strip |Im z| < beta'.
ProbeGrid make_probes(double r_t, double t_arg, double beta_prime, int nt = 5, int nz = 5);

struct CocycleSample {
    std::vector<cplx> eps;
    std::vector<double> delta;      // sup over the probe grid (decomposed route)
    std::vector<double> route_gap;  // relative direct-vs-decomposed disagreement
    std::vector<double> sup_direct; // sup over the probe grid (direct route)
    std::string tag;                // "same-p" | "cross-p"
};

// m-grid column of a (tau, m) field at a point of the Borel plane.
using FieldFun = std::function<std::vector<cplx>(cplx)>;

// A contour with T-independent nodes and the field tabulated once; the
// m_k-Laplace value k * int field(u) exp(-(u/T)^k) du/u is then a weighted
// sum reusable across every (T, z) evaluation.
struct CachedContour {
    std::vector<cplx> u;
    std::vector<cplx> qw;  // quadrature weight including the du/u jacobian
    std::vector<std::vector<cplx>> field;  // [node][m]
    int k = 1;
    void tabulate(const FieldFun& f);
    std::vector<cplx> value(cplx T) const;
    // contour builders (nodes only; call tabulate before value)
    static CachedContour ray(int k, double gamma, double a, double b,
                             int nodes_per_panel = 12, double panel_ratio = 1.35);
    static CachedContour arc(int k, double r, double gamma0, double gamma1, int n_nodes = 32);
};

// The angular quadrature nodes used by CachedContour::arc; Borel-plane arc
// evaluation requires these angles to be present as lattice directions.
std::vector<double> arc_directions(double gamma0, double gamma1, int n_nodes = 32);

// Direction of steepest kernel decay: maximizes cos(k(gamma - arg T)) over
// [center - half_aperture, center + half_aperture]; throws if the maximum
// stays below delta1.
double choose_ray(double center, double half_aperture, int k, cplx T, double delta1 = 0.2);

// Forcing F(T, m) = sum_n Gamma(n/k) a_n T^n * profile(m) (exact series form
// of the m_k-Laplace transform of psi_k), and its inverse Fourier transform.
std::vector<cplx> forcing_column(const ProblemSpecQ& spec, cplx T, cplx eps, const MGrid& g);
cplx assemble_forcing(const ProblemSpecQ& spec, const EvaluationPoint& pt, const MGrid& g);

// u_p(t,z,eps): Laplace of the q-side solution along a fixed ray gamma, then
// inverse Fourier. The ray field is tabulated at construction.
struct UpEvaluator {
    MGrid g;
    int k = 1;
    double gamma = 0.0;
    double delta1 = 0.2;
    CachedContour contour;
    UpEvaluator(const WkEvaluator& wk, double gamma, double r_end,
                int nodes_per_panel = 12, int j_term = -1);
    std::vector<cplx> column(cplx T) const;  // U_p(T, m) over the m-grid
    cplx eval(const EvaluationPoint& pt) const;
};

// y_{p',p}(t,z,eps): Laplace of a Borel-plane lattice field along one of its
// grid directions (radial interpolation between rings), then inverse Fourier.
struct YEvaluator {
    MGrid g;
    int k = 1;
    double gamma = 0.0;
    double delta1 = 0.2;
    CachedContour contour;
    YEvaluator(const RayGridFunction& v, int k, double gamma, double r_end,
               int nodes_per_panel = 12);
    std::vector<cplx> column(cplx T) const;  // Y(T, m) over the m-grid
    cplx eval(const EvaluationPoint& pt) const;
};

// m-grid column of a lattice field at radius r along grid direction `dir`
// (12-point Lagrange in log radius).
std::vector<cplx> lattice_column(const RayGridFunction& f, int dir, double r);
int dir_index(const RayGridFunction& f, double gamma, double tol = 1e-9);

struct ResidualReport {
    double abs = 0.0;    // |equation defect| at the point
    double rel = 0.0;    // defect / largest participating term
    double scale = 0.0;  // largest participating term magnitude
};

// Defect of the first Cauchy problem at one point: d_z spectral (Fourier
// multiplier), the q-dilation exact, (t^{k+1} d_t)^d by centered differences
// of step fd_step iterated d times.
ResidualReport residual_q(const UpEvaluator& up, const ProblemSpecQ& spec,
                          const EvaluationPoint& pt, double fd_step);

// Defect of the second Cauchy problem: d_t^delta by centered stencils,
// the zero-order coupling and the u_p forcing assembled spectrally.
ResidualReport residual_b(const YEvaluator& yev, const UpEvaluator& up,
                          const ProblemSpecB& spec, const EvaluationPoint& pt, double fd_step);

// Difference u_{p+1} - u_p over the probe grid for each eps, computed by the
// arc + segment-ladder + tail decomposition per Neumann term (and, when
// check_direct, also as the direct difference of full-ray integrals).
CocycleSample cocycle_difference_q(const WkEvaluator& wk, const ProblemSpecQ& spec,
                                   double gamma_a, double gamma_b, const ProbeGrid& probes,
                                   const std::vector<cplx>& eps_list, int j_terms,
                                   bool check_direct = true, double r_end = 25.0);

// Borel-side cocycle difference between two Laplace rays of the lattice
// solution. tag "same-p": single arc of fixed radius plus the two tails; tag
// "cross-p": per-term ladder decomposition as on the q side.
CocycleSample cocycle_difference_b(const NeumannSeriesB& S, const ProblemSpecB& spec,
                                   const ProblemSpecQ& specQ, double gamma_a, double gamma_b,
                                   const ProbeGrid& probes, const std::vector<cplx>& eps_list,
                                   const std::string& tag, double same_p_arc_radius,
                                   bool check_direct = true, double r_end = 25.0,
                                   int arc_nodes = 32);

// CSV emission (columns: eps_mod, eps_arg, delta_sup, route_gap, tag).
void write_cocycle_csv(const std::vector<CocycleSample>& samples, const std::string& path);

}  // namespace qsl
