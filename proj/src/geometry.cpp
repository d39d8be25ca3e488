#include "qsl/geometry.hpp"

#include <algorithm>

namespace qsl {

std::vector<cplx> compute_roots_q(cplx Q_val, cplx RD_val, int k, int dD) {
    if (std::abs(Q_val) == 0.0 || std::abs(RD_val) == 0.0)
        throw std::invalid_argument("compute_roots_q: zero symbol value");
    if (k < 1 || dD < 1) throw std::invalid_argument("compute_roots_q: k, dD must be positive");
    // Q = R_D k^{dD} tau^{k dD}  =>  tau^{k dD} = Q / (R_D k^{dD}).
    int n = k * dD;
    cplx w = Q_val / (RD_val * std::pow((double)k, dD));
    double rho = std::pow(std::abs(w), 1.0 / n);
    double phi = std::arg(w) / n;
    std::vector<cplx> roots(n);
    for (int l = 0; l < n; ++l) roots[l] = std::polar(rho, phi + 2.0 * PI * l / n);
    return roots;
}

std::vector<cplx> compute_roots_b(cplx Qb_val, cplx RDb_val, int k, int deltaD) {
    if (std::abs(RDb_val) == 0.0 || std::abs(Qb_val) == 0.0)
        throw std::invalid_argument("compute_roots_b: zero symbol value");
    if (deltaD < 2) throw std::invalid_argument("compute_roots_b: symbol constant in tau (deltaD < 2)");
    // Qb k = RDb k^{deltaD} tau^{(deltaD-1)k}.
    int n = (deltaD - 1) * k;
    cplx w = Qb_val / (RDb_val * std::pow((double)k, deltaD - 1));
    double rho = std::pow(std::abs(w), 1.0 / n);
    double phi = std::arg(w) / n;
    std::vector<cplx> roots(n);
    for (int l = 0; l < n; ++l) roots[l] = std::polar(rho, phi + 2.0 * PI * l / n);
    return roots;
}

SeparationReport root_separation(const SectorDomain& domain, const std::vector<cplx>& roots,
                                 int n_ang, int n_rad, double r_cap) {
    if (roots.empty()) throw std::invalid_argument("root_separation: no roots");
    auto pts = domain.sample(n_ang, n_rad, r_cap);
    if (pts.empty()) throw std::invalid_argument("root_separation: empty domain");
    SeparationReport rep;
    rep.n_samples = (int)pts.size();
    rep.M1 = INF;
    for (const auto& root : roots)
        if (domain.contains(root)) rep.violation = true;
    for (cplx tau : pts)
        for (cplx root : roots) rep.M1 = std::min(rep.M1, std::abs(tau - root) / (1.0 + std::abs(tau)));
    rep.M2 = 0.0;
    for (cplx root : roots) {
        double inf_l = INF;
        for (cplx tau : pts) inf_l = std::min(inf_l, std::abs(tau - root) / std::abs(root));
        rep.M2 = std::max(rep.M2, inf_l);
    }
    if (rep.violation) {
        rep.M1 = 0.0;
        rep.M2 = 0.0;
    }
    return rep;
}

LowerBoundReport pm_lower_bound_check(const Poly& Q, const Poly& RD, int k, int dD,
                                      const std::vector<double>& m_samples,
                                      const std::vector<cplx>& tau_samples) {
    if (m_samples.empty() || tau_samples.empty())
        throw std::invalid_argument("pm_lower_bound_check: empty sample list");
    LowerBoundReport rep;
    rep.c_emp = INF;
    rep.n_samples = (int)(m_samples.size() * tau_samples.size());
    for (double m : m_samples) {
        cplx qv = poly_eval_im(Q, m), rv = poly_eval_im(RD, m);
        for (cplx tau : tau_samples) {
            cplx pm = qv - rv * std::pow(double(k) * std::pow(tau, k), dD);
            double denom = std::abs(rv) * std::pow(1.0 + std::abs(tau), k * dD - 1);
            rep.c_emp = std::min(rep.c_emp, std::abs(pm) / denom);
        }
    }
    if (rep.c_emp <= 0.0) rep.violation = true;
    return rep;
}

Frames build_frames(const FrameFamily& ff, int p, int h_max, int j_max,
                    double sector_half_aperture) {
    if (!ff.constraint_ok()) throw std::invalid_argument("build_frames: frame constraint violated");
    size_t n = ff.directions.size();
    if (n < 2) throw std::invalid_argument("build_frames: need at least two directions");
    double dp = ff.directions[p % n];
    double dp1 = ff.directions[(p + 1) % n];
    // Angular span of the frame between the two directions (cyclic).
    double span = norm_angle(dp1 - dp);
    if (span == 0.0) span = 2.0 * PI;
    double mid = dp + 0.5 * span;
    double half = 0.5 * span;

    Frames out;
    for (int h = 0; h <= h_max; ++h) {
        double m0 = ff.mu0_h(h), m1 = ff.mu1_h(h);
        double qc = ff.Qcheck * m0, qh = ff.Qhat * m1;
        // Four pieces: outer sectorial annulus, inner sectorial annulus, and
        // two radial strips along the bounding directions.
        std::vector<SectorDomain> parts;
        parts.push_back(SectorDomain::sector(mid, half, m1, qh));   // outer arc band
        parts.push_back(SectorDomain::sector(mid, half, qc, m0));   // inner arc band
        parts.push_back(SectorDomain::sector(dp, ff.strip_half_aperture, qc, qh));
        parts.push_back(SectorDomain::sector(dp1, ff.strip_half_aperture, qc, qh));
        out.square.push_back(SectorDomain::unite(std::move(parts)));
    }
    out.triangle = SectorDomain::unite({
        SectorDomain::sector(dp, sector_half_aperture, 0.0, INF),
        SectorDomain::sector(dp1, sector_half_aperture, 0.0, INF),
        SectorDomain::annulus(ff.Qhat * ff.mu1, INF),
    });
    for (int j = 0; j <= j_max; ++j) {
        std::vector<SectorDomain> parts;
        for (int h = 0; h <= j; ++h) parts.push_back(out.square[std::min(h, h_max)]);
        parts.push_back(SectorDomain::disc(ff.Qcheck * ff.mu0_h(j)));
        out.nested.push_back(SectorDomain::unite(std::move(parts)));
    }
    return out;
}

bool check_covering_root_condition(const std::vector<double>& directions,
                                   const std::vector<std::vector<cplx>>& roots_by_m) {
    size_t n = directions.size();
    if (n < 2) throw std::invalid_argument("check_covering_root_condition: need >= 2 directions");
    for (const auto& roots : roots_by_m) {
        for (size_t p = 0; p < n; ++p) {
            double a = norm_angle(directions[p]);
            double b = norm_angle(directions[(p + 1) % n]);
            double span = norm_angle(b - a);
            if (span == 0.0) span = 2.0 * PI;
            bool found = false;
            for (cplx root : roots) {
                double t = norm_angle(std::arg(root) - a);
                // Ties on either bounding direction count for both sectors.
                if (t <= span + 1e-12 || std::abs(t - 2.0 * PI) <= 1e-12) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    return true;
}

}  // namespace qsl
