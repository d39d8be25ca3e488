// Geometric objects of the Borel plane: sectors, discs, annuli and their
// unions; good coverings of a punctured neighborhood of the origin; the
// scaled frame families, root computations for the two symbols, and the
// empirical root-separation / lower-bound measurements.
#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "qsl/util.hpp"

namespace qsl {

inline constexpr double INF = std::numeric_limits<double>::infinity();

// A closed region of the complex plane assembled from sector/disc/annulus
// atoms and finite unions. Membership is closed (boundary points belong),
// with absolute slack `tol` on radii and angles.
struct SectorDomain {
    enum class Kind { Sector, Disc, Annulus, Union };
    Kind kind = Kind::Disc;

    // sector atom
    double direction = 0.0;      // bisecting direction (radians)
    double half_aperture = 0.0;  // half opening angle
    // sector/annulus radii; disc uses r_max as the radius with r_min = 0
    double r_min = 0.0;
    double r_max = 0.0;  // may be INF

    std::vector<SectorDomain> parts;  // union members

    static SectorDomain sector(double dir, double half_ap, double rmin, double rmax) {
        SectorDomain d;
        d.kind = Kind::Sector;
        d.direction = dir;
        d.half_aperture = half_ap;
        d.r_min = rmin;
        d.r_max = rmax;
        if (rmin > rmax) throw std::invalid_argument("sector: r_min > r_max");
        return d;
    }
    static SectorDomain disc(double radius) {
        SectorDomain d;
        d.kind = Kind::Disc;
        d.r_min = 0.0;
        d.r_max = radius;
        if (radius < 0) throw std::invalid_argument("disc: negative radius");
        return d;
    }
    static SectorDomain annulus(double rmin, double rmax) {
        SectorDomain d;
        d.kind = Kind::Annulus;
        d.r_min = rmin;
        d.r_max = rmax;
        if (rmin > rmax) throw std::invalid_argument("annulus: r_min > r_max");
        return d;
    }
    static SectorDomain unite(std::vector<SectorDomain> parts) {
        SectorDomain d;
        d.kind = Kind::Union;
        d.parts = std::move(parts);
        return d;
    }

    // Rescale every radius by a factor (maps the domain under tau -> c*tau).
    SectorDomain scaled(double c) const {
        SectorDomain d = *this;
        d.r_min *= c;
        if (std::isfinite(d.r_max)) d.r_max *= c;
        for (auto& p : d.parts) p = p.scaled(c);
        return d;
    }

    bool contains(cplx tau, double tol = 1e-12) const {
        double r = std::abs(tau);
        switch (kind) {
            case Kind::Disc:
                return r <= r_max + tol;
            case Kind::Annulus:
                return r >= r_min - tol && r <= r_max + tol;
            case Kind::Sector: {
                if (r < r_min - tol || r > r_max + tol) return false;
                if (r <= tol) return r_min <= tol;  // origin: only if r_min = 0
                double d = std::abs(angle_diff(std::arg(tau), direction));
                return d <= half_aperture + tol;
            }
            case Kind::Union:
                for (const auto& p : parts)
                    if (p.contains(tau, tol)) return true;
                return false;
        }
        return false;
    }

    bool empty() const {
        if (kind == Kind::Union) {
            for (const auto& p : parts)
                if (!p.empty()) return false;
            return !parts.empty() ? true : true;
        }
        return false;
    }

    // Deterministic sample of the domain: per atom, a polar grid of
    // n_ang x n_rad points (unbounded radii capped at r_cap).
    std::vector<cplx> sample(int n_ang, int n_rad, double r_cap = 100.0) const {
        std::vector<cplx> out;
        sample_into(out, n_ang, n_rad, r_cap);
        return out;
    }

  private:
    void sample_into(std::vector<cplx>& out, int n_ang, int n_rad, double r_cap) const {
        if (kind == Kind::Union) {
            for (const auto& p : parts) p.sample_into(out, n_ang, n_rad, r_cap);
            return;
        }
        double lo = r_min, hi = std::isfinite(r_max) ? r_max : r_cap;
        double a0, a1;
        if (kind == Kind::Sector) {
            a0 = direction - half_aperture;
            a1 = direction + half_aperture;
        } else {
            a0 = 0.0;
            a1 = 2.0 * PI * (1.0 - 1.0 / std::max(1, n_ang));
        }
        for (int ia = 0; ia < n_ang; ++ia) {
            double ang = n_ang == 1 ? 0.5 * (a0 + a1) : a0 + (a1 - a0) * ia / (n_ang - 1);
            for (int ir = 0; ir < n_rad; ++ir) {
                double r = n_rad == 1 ? hi : lo + (hi - lo) * ir / (n_rad - 1);
                out.push_back(std::polar(r, ang));
            }
        }
    }
};

// A cyclic family of sectors with common outer radius covering a punctured
// neighborhood of the origin; consecutive members overlap, no three share
// a point.
struct GoodCovering {
    std::vector<SectorDomain> sectors;  // sector atoms, cyclic order
    struct CheckReport {
        bool consecutive_overlap = false;
        bool no_triple_overlap = false;
        bool covers = false;
        bool ok() const { return consecutive_overlap && no_triple_overlap && covers; }
    };
    CheckReport check(int n_angular_samples = 720) const {
        CheckReport rep;
        size_t n = sectors.size();
        if (n < 2) return rep;
        rep.consecutive_overlap = true;
        double rprobe = 0.5 * probe_radius();
        for (size_t p = 0; p < n; ++p) {
            const auto& a = sectors[p];
            const auto& b = sectors[(p + 1) % n];
            bool overlap = false;
            for (int i = 0; i < n_angular_samples && !overlap; ++i) {
                double ang = 2.0 * PI * i / n_angular_samples;
                cplx z = std::polar(rprobe, ang);
                overlap = a.contains(z) && b.contains(z);
            }
            if (!overlap) rep.consecutive_overlap = false;
        }
        rep.no_triple_overlap = true;
        rep.covers = true;
        for (int i = 0; i < n_angular_samples; ++i) {
            double ang = 2.0 * PI * i / n_angular_samples;
            cplx z = std::polar(rprobe, ang);
            int hits = 0;
            for (const auto& s : sectors) hits += s.contains(z) ? 1 : 0;
            if (hits == 0) rep.covers = false;
            if (hits >= 3) rep.no_triple_overlap = false;
        }
        return rep;
    }
    double probe_radius() const {
        double r = INF;
        for (const auto& s : sectors) r = std::min(r, s.r_max);
        return std::isfinite(r) ? r : 1.0;
    }
};

// Frame family: geometric data producing the scaled square frames, the
// triangle frame and the nested disc+frame regions.
struct FrameFamily {
    double mu0 = 0.0, mu1 = 0.0;  // inner/outer radii, 0 < mu0 < mu1
    double Qhat = 0.0;            // > 1
    double Qcheck = 0.0;          // in (0,1)
    double q = 0.0, delta = 0.0;  // q > 1, delta > 0
    std::vector<double> directions;  // frame directions, sorted cyclically
    double strip_half_aperture = PI / 36.0;  // angular width of radial strips

    double qd() const { return std::pow(q, delta); }
    double mu0_h(int h) const { return mu0 * std::pow(1.0 / qd(), h); }
    double mu1_h(int h) const { return mu1 * std::pow(1.0 / qd(), h); }

    // Constraint Qhat*mu1 = q^delta * Qcheck * mu0, to a declared tolerance.
    bool constraint_ok(double tol = 1e-12) const {
        return std::abs(Qhat * mu1 - qd() * Qcheck * mu0) <= tol * std::max(1.0, Qhat * mu1) &&
               Qhat > 1.0 && Qcheck > 0.0 && Qcheck < 1.0 && q > 1.0 && delta > 0.0 && mu0 > 0 &&
               mu0 < mu1;
    }
};

// --- operations -------------------------------------------------------------

// Roots of Q - R_D * (k tau^k)^{dD}: the k*dD complex solutions.
std::vector<cplx> compute_roots_q(cplx Q_val, cplx RD_val, int k, int dD);

// Roots of Qb*k - RDb * k^{deltaD} * tau^{(deltaD-1)k}: (deltaD-1)*k solutions.
std::vector<cplx> compute_roots_b(cplx Qb_val, cplx RDb_val, int k, int deltaD);

struct SeparationReport {
    double M1 = 0.0;        // inf |tau - q_l| / (1 + |tau|)
    double M2 = 0.0;        // max_l inf |tau - q_l| / |q_l|
    int n_samples = 0;      // sampling resolution used
    bool violation = false; // a root inside the domain
};
SeparationReport root_separation(const SectorDomain& domain, const std::vector<cplx>& roots,
                                 int n_ang = 64, int n_rad = 64, double r_cap = 100.0);

struct LowerBoundReport {
    double c_emp = 0.0;     // min |P_m(tau)| / (|R_D(im)| (1+|tau|)^{k dD - 1})
    bool violation = false; // zero hit
    int n_samples = 0;
};
// P_m(tau) = Q(im) - R_D(im) (k tau^k)^{dD}.
LowerBoundReport pm_lower_bound_check(const Poly& Q, const Poly& RD, int k, int dD,
                                      const std::vector<double>& m_samples,
                                      const std::vector<cplx>& tau_samples);

struct Frames {
    std::vector<SectorDomain> square;   // square frames, index h
    SectorDomain triangle;              // unbounded triangle frame
    std::vector<SectorDomain> nested;   // frames-union + central disc, index j
};
// Builds the frame family objects between directions[p] and directions[p+1].
Frames build_frames(const FrameFamily& ff, int p, int h_max, int j_max,
                    double sector_half_aperture);

// True iff every cyclic direction gap [d_p, d_{p+1}] contains the argument of
// at least one root, for every supplied root set (one set per m sample).
bool check_covering_root_condition(const std::vector<double>& directions,
                                   const std::vector<std::vector<cplx>>& roots_by_m);

}  // namespace qsl
