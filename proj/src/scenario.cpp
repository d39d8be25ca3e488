#include "qsl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qsl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ScenarioParseError("scenario: " + where + ": " + what);
}

cplx as_cplx(const json& j, const std::string& where) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    fail(where, "expected a number or [re, im] pair");
}

Poly as_poly(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected a coefficient array");
    Poly p;
    for (size_t i = 0; i < j.size(); ++i) p.push_back(as_cplx(j[i], where));
    if (p.empty()) fail(where, "empty polynomial");
    return p;
}

const json& member(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, "missing key '" + key + "'");
    return *it;
}

double num(const json& j, const std::string& key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, double def, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_number()) fail(where + "." + key, "expected a number");
    return it->get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
    return v.get<int>();
}

std::vector<int> int_list(const json& j, const std::string& key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_array()) fail(where + "." + key, "expected an integer array");
    std::vector<int> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) fail(where + "." + key, "expected an integer array");
        out.push_back(e.get<int>());
    }
    return out;
}

std::vector<double> double_list(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected a number array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(where, "expected a number array");
        out.push_back(e.get<double>());
    }
    return out;
}

Profile as_profile(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a profile object");
    Profile p;
    p.amp = num(j, "amp", where);
    p.sigma = num_or(j, "sigma", 1.0, where);
    p.eps_pow = (int)num_or(j, "eps_pow", 0.0, where);
    if (p.sigma <= 0) fail(where, "sigma must be positive");
    return p;
}

ScalarDescriptor as_scalar(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected {coef, pow}");
    ScalarDescriptor s;
    s.coef = as_cplx(member(j, "coef", where), where + ".coef");
    s.pow = integer(j, "pow", where);
    if (s.pow < 1) fail(where, "pow must be >= 1");
    return s;
}

void parse_problem_q(const json& j, ProblemSpecQ& q) {
    const std::string w = "problem_q";
    q.k = integer(j, "k", w);
    q.D = integer(j, "D", w);
    q.delta = num(j, "delta", w);
    q.k1 = num(j, "k1", w);
    q.q = num(j, "q", w);
    q.alpha = num_or(j, "alpha", 1.0, w);
    q.d = int_list(j, "d", w);
    q.Delta = int_list(j, "Delta", w);
    q.Q = as_poly(member(j, "Q", w), w + ".Q");
    q.R.clear();
    const json& R = member(j, "R", w);
    if (!R.is_array()) fail(w + ".R", "expected an array of polynomials");
    for (size_t l = 0; l < R.size(); ++l) q.R.push_back(as_poly(R[l], w + ".R"));
    q.C.clear();
    const json& C = member(j, "C", w);
    if (!C.is_array()) fail(w + ".C", "expected an array of profiles");
    for (size_t l = 0; l < C.size(); ++l) q.C.push_back(as_profile(C[l], w + ".C"));
    q.gamma_budget.clear();
    if (auto it = j.find("gamma_budget"); it != j.end())
        q.gamma_budget = double_list(*it, w + ".gamma_budget");
    const json& psi = member(j, "psi", w);
    q.psi.a.clear();
    for (const auto& e : member(psi, "a", w + ".psi"))
        q.psi.a.push_back(as_cplx(e, w + ".psi.a"));
    q.psi.mprof = as_profile(member(psi, "mprof", w + ".psi"), w + ".psi.mprof");
    q.beta = num(j, "beta", w);
    q.mu = num(j, "mu", w);
    q.tau0 = num_or(j, "tau0", 1.0, w);
    q.mu0 = num(j, "mu0", w);
    q.mu1 = num(j, "mu1", w);
    q.rho = num(j, "rho", w);
    q.Qcheck = num(j, "Qcheck", w);
    q.Qhat = num(j, "Qhat", w);
    const json& ann = member(j, "annulus", w);
    q.ann.r = num(ann, "r", w + ".annulus");
    q.ann.r1 = num(ann, "r1", w + ".annulus");
    q.ann.d = num(ann, "d", w + ".annulus");
    q.ann.eta = num(ann, "eta", w + ".annulus");

    if (q.D < 1) fail(w, "D must be >= 1");
    if ((int)q.d.size() != q.D) fail(w + ".d", "expected D entries");
    if ((int)q.Delta.size() != q.D - 1) fail(w + ".Delta", "expected D-1 entries");
    if ((int)q.R.size() != q.D) fail(w + ".R", "expected D polynomials");
    if ((int)q.C.size() != q.D - 1) fail(w + ".C", "expected D-1 profiles");
    if (q.q <= 1.0) fail(w, "q must exceed 1");
    if (q.delta <= 0) fail(w, "delta must be positive");
    if (q.k < 1) fail(w, "k must be >= 1");
}

void parse_problem_b(const json& j, ProblemSpecB& b) {
    const std::string w = "problem_b";
    b.D = integer(j, "D", w);
    b.d = int_list(j, "d", w);
    b.deltav = int_list(j, "delta", w);
    b.Delta = int_list(j, "Delta", w);
    b.Q = as_poly(member(j, "Q", w), w + ".Q");
    b.R.clear();
    const json& R = member(j, "R", w);
    if (!R.is_array()) fail(w + ".R", "expected an array of polynomials");
    for (size_t l = 0; l < R.size(); ++l) b.R.push_back(as_poly(R[l], w + ".R"));
    b.c00 = as_scalar(member(j, "c00", w), w + ".c00");
    b.cF = as_scalar(member(j, "cF", w), w + ".cF");
    b.varsigma00 = num_or(j, "varsigma00", 0.0, w);
    b.varsigma0 = num_or(j, "varsigma0", 0.0, w);
    b.varsigmaF = num_or(j, "varsigmaF", 0.0, w);
    b.C00 = as_profile(member(j, "C00", w), w + ".C00");
    b.nu = num(j, "nu", w);
    b.rho = num(j, "rho", w);
    const json& sq = member(j, "symbol_sector", w);
    b.SQRD.r = num(sq, "r", w + ".symbol_sector");
    b.SQRD.d = num(sq, "d", w + ".symbol_sector");
    b.SQRD.eta = num(sq, "eta", w + ".symbol_sector");
    b.sector_half_aperture = num(j, "sector_half_aperture", w);

    if (b.D < 1) fail(w, "D must be >= 1");
    if ((int)b.d.size() != b.D) fail(w + ".d", "expected D entries");
    if ((int)b.deltav.size() != b.D) fail(w + ".delta", "expected D entries");
    if ((int)b.Delta.size() != b.D) fail(w + ".Delta", "expected D entries");
    if ((int)b.R.size() != b.D + 1) fail(w + ".R", "expected D+1 polynomials (R_0 .. R_D)");
}

void parse_coverings(const json& j, Scenario& sc) {
    const std::string w = "coverings";
    std::vector<double> dirs = double_list(member(j, "directions", w), w + ".directions");
    if (dirs.size() < 2) fail(w + ".directions", "need at least two directions");
    sc.q.dirs = dirs;
    sc.b.dirs_frak = dirs;
    sc.q.eps0 = num(j, "eps0", w);
    sc.b.eps0 = sc.q.eps0;
    sc.b.U_half_aperture = num(j, "U_half_aperture", w);
    const int P = (int)dirs.size();
    // entries not named under "overlaps" default to the sector midline d_p
    sc.b.e_dirs.assign(P, std::vector<double>(P, 0.0));
    for (int p = 0; p < P; ++p)
        for (int pp = 0; pp < P; ++pp) sc.b.e_dirs[p][pp] = dirs[p];
    const json& ov = member(j, "overlaps", w);
    if (!ov.is_array()) fail(w + ".overlaps", "expected an array");
    for (const auto& o : ov) {
        int p = integer(o, "p", w + ".overlaps");
        int pp = integer(o, "p_prime", w + ".overlaps");
        if (p < 0 || p >= P || pp < 0 || pp >= P)
            fail(w + ".overlaps", "p / p_prime out of range");
        sc.b.e_dirs[p][pp] = num(o, "e", w + ".overlaps");
    }
}

}  // namespace

SolveOptionsQ Scenario::solve_opts_q() const {
    SolveOptionsQ o;
    o.j_max = run.j_max;
    o.tol = run.tol;
    o.m_nodes = grids.m_nodes;
    o.m_max = grids.M_max;
    o.s = grids.s;
    o.r_min = grids.r_min;
    o.r_top = grids.R_tr;
    return o;
}

SolveOptionsB Scenario::solve_opts_b() const {
    SolveOptionsB o;
    o.tol = run.tol;
    o.j_terms = run.j_terms;
    return o;
}

std::vector<cplx> Scenario::eps_plan() const {
    std::vector<cplx> out;
    const int n = run.eps_samples;
    const double hi = q.eps0 / run.eps_div_lo, lo = q.eps0 / run.eps_div_hi;
    const cplx phase = std::polar(1.0, run.eps_arg);
    for (int i = 0; i < n; ++i) {
        double f = (n == 1) ? 0.0 : (double)i / (n - 1);
        out.push_back(hi * std::pow(lo / hi, f) * phase);
    }
    return out;
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioParseError(std::string("scenario: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("top level", "expected a JSON object");
    Scenario sc;
    parse_problem_q(member(j, "problem_q", "top level"), sc.q);
    parse_problem_b(member(j, "problem_b", "top level"), sc.b);
    sc.b.k = sc.q.k;
    sc.b.beta = sc.q.beta;
    sc.b.mu = sc.q.mu;

    const json& g = member(j, "grids", "top level");
    sc.grids.s = integer(g, "s", "grids");
    sc.grids.N_r = integer(g, "N_r", "grids");
    sc.grids.M_max = num(g, "M_max", "grids");
    sc.grids.m_nodes = integer(g, "m_nodes", "grids");
    sc.grids.r_min = num(g, "r_min", "grids");
    sc.grids.R_tr = num(g, "R_tr", "grids");
    if (sc.grids.s < 1 || sc.grids.m_nodes < 3 || sc.grids.r_min <= 0 ||
        sc.grids.R_tr <= sc.grids.r_min)
        fail("grids", "inconsistent grid settings");

    parse_coverings(member(j, "coverings", "top level"), sc);

    const json& r = member(j, "run", "top level");
    sc.run.tol = num(r, "tol", "run");
    sc.run.j_max = integer(r, "j_max", "run");
    sc.run.j_terms = (int)num_or(r, "j_terms", 14, "run");
    sc.run.n_t = (int)num_or(r, "n_t", 5, "run");
    sc.run.n_z = (int)num_or(r, "n_z", 5, "run");
    sc.run.eps_samples = (int)num_or(r, "eps_samples", 10, "run");
    sc.run.eps_div_lo = num_or(r, "eps_div_lo", 2.0, "run");
    sc.run.eps_div_hi = num_or(r, "eps_div_hi", 200.0, "run");
    sc.run.eps_arg = num_or(r, "eps_arg", 0.0, "run");
    sc.run.t_radius = num_or(r, "t_radius", 0.8, "run");
    sc.run.t_arg = num_or(r, "t_arg", 0.0, "run");
    sc.run.n_max = (int)num_or(r, "n_max", 5, "run");
    if (sc.run.eps_samples < 1 || sc.run.eps_div_hi <= sc.run.eps_div_lo)
        fail("run", "inconsistent eps sample plan");

    const json& seed = member(j, "seed", "top level");
    if (!seed.is_number_integer()) fail("seed", "expected an integer");
    sc.seed = seed.get<long>();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("scenario: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace qsl
