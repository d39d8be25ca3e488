// Discrete carriers: the uniform m-grid, the geometric radial lattice whose
// ratio is an exact s-th root of q^delta (so the dilation tau -> q^delta*tau
// is an index shift by s), and sampled functions on (direction, ring, m).
#pragma once

#include <memory>
#include <vector>

#include "qsl/util.hpp"

namespace qsl {

// Uniform grid on [-m_max, m_max] with n nodes (n odd keeps 0 on the grid).
struct MGrid {
    double m_max = 16.0;
    int n = 257;
    double step() const { return 2.0 * m_max / (n - 1); }
    double node(int i) const { return -m_max + step() * i; }
    // Trapezoid weights (endpoints halved).
    double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * step() : step(); }
};

// Geometric radial lattice r_i = r_min * ratio^i, i = 0 .. n_rings-1, where
// ratio^s = q^delta exactly. Ring indices beyond n_rings-1 are still
// meaningful lattice points (used by the dilation shift).
struct RadialLattice {
    double r_min = 1e-5;
    double ratio = 0.0;
    int n_rings = 0;
    int s = 8;  // dilation shift in rings
    double r(int i) const { return r_min * std::pow(ratio, i); }
    static RadialLattice make(double r_min, double q, double delta, int s, double r_top) {
        RadialLattice L;
        L.r_min = r_min;
        L.s = s;
        L.ratio = std::pow(std::pow(q, delta), 1.0 / s);
        L.n_rings = (int)std::ceil(std::log(r_top / r_min) / std::log(L.ratio)) + 1;
        return L;
    }
};

// Sampled complex function on (direction x ring x m-node).
struct RayGridFunction {
    std::vector<double> directions;
    RadialLattice radial;
    MGrid mgrid;
    double q = 2.0, delta = 1.0;
    std::vector<cplx> values;  // [dir][ring][m]

    void allocate() { values.assign((size_t)directions.size() * radial.n_rings * mgrid.n, cplx(0)); }
    size_t idx(int d, int i, int j) const {
        return ((size_t)d * radial.n_rings + i) * mgrid.n + j;
    }
    cplx& at(int d, int i, int j) { return values[idx(d, i, j)]; }
    cplx at(int d, int i, int j) const { return values[idx(d, i, j)]; }
    cplx tau(int d, int i) const { return std::polar(radial.r(i), directions[d]); }

    bool all_finite() const {
        for (cplx v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
    // The lattice ratio must satisfy ratio^s = q^delta (exact dilation shift).
    bool dilation_compatible(double tol = 1e-12) const {
        return std::abs(std::pow(radial.ratio, radial.s) - std::pow(q, delta)) <= tol * std::pow(q, delta);
    }
};

}  // namespace qsl
