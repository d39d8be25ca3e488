// Scenario files: a single JSON document describing both Cauchy problems,
// the shared grids, the covering geometry and the run plan. Complex numbers
// are encoded as [re, im] pairs; polynomials as coefficient arrays (constant
// term first). Syntax and schema problems raise ScenarioParseError; semantic
// violations are reported by the validate_* routines, not here.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qsl/borel.hpp"
#include "qsl/qconv.hpp"

namespace qsl {

struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSettings {
    int s = 8;              // lattice rings per dilation step
    int N_r = 12;           // quadrature nodes per contour panel
    double M_max = 16.0;    // half width of the m grid
    int m_nodes = 257;
    double r_min = 1e-8;    // innermost lattice radius
    double R_tr = 25.0;     // lattice top / Laplace truncation radius
};

struct RunSettings {
    double tol = 1e-10;
    int j_max = 40;           // Neumann terms, q side
    int j_terms = 14;         // per-term Borel solves
    int n_t = 5, n_z = 5;     // probe counts
    int eps_samples = 10;
    double eps_div_lo = 2.0;  // |eps| plan: eps0/div_lo .. eps0/div_hi
    double eps_div_hi = 200.0;
    double eps_arg = 0.0;
    double t_radius = 0.8;    // largest probe |t|
    double t_arg = 0.0;
    int n_max = 5;            // formal-series order
};

struct Scenario {
    ProblemSpecQ q;
    ProblemSpecB b;
    GridSettings grids;
    RunSettings run;
    long seed = 0;

    SolveOptionsQ solve_opts_q() const;
    SolveOptionsB solve_opts_b() const;
    // Log-spaced |eps| between eps0/div_lo and eps0/div_hi at run.eps_arg.
    std::vector<cplx> eps_plan() const;
};

// Throws ScenarioParseError on malformed JSON or schema violations.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

}  // namespace qsl
