// Small numeric utilities shared across the library: Gauss-Legendre rules,
// least-squares helpers, exact rational arithmetic for operator expansions.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qsl {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;

// Normalize an angle to [0, 2*pi).
inline double norm_angle(double a) {
    double t = std::fmod(a, 2.0 * PI);
    if (t < 0) t += 2.0 * PI;
    return t;
}

// Signed angular distance in (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(a - b, 2.0 * PI);
    if (d <= -PI) d += 2.0 * PI;
    if (d > PI) d -= 2.0 * PI;
    return d;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// Legendre polynomials. Cached per order.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double t = std::cos(PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            x[i] = t;
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::vector<GaussLegendre*> cache(65, nullptr);
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    if (!cache[n]) cache[n] = new GaussLegendre(n);
    return *cache[n];
}

// Integrate f over [a, b] (real interval) with an n-point Gauss rule.
template <typename F>
auto gl_integrate(F&& f, double a, double b, int n) -> decltype(f(a)) {
    const auto& g = gauss_legendre(n);
    decltype(f(a)) acc{};
    double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int i = 0; i < (int)g.x.size(); ++i) acc += g.w[i] * f(mid + hw * g.x[i]);
    return acc * hw;
}

// ---------------------------------------------------------------------------
// Static-partition parallel loop. Thread count from QGEVREY_THREADS
// (default: 1, i.e. serial); results are deterministic either way.
int worker_count();

template <typename F>
void parallel_for(int n, F&& body) {
    int nt = std::min(worker_count(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += nt) body(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Ordinary least squares: fit y ~ X * beta, X given as rows of basis values.
// Solves the normal equations by Gaussian elimination (tiny systems only).
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                         const std::vector<double>& y) {
    size_t n = X.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("least_squares: bad shapes");
    size_t p = X[0].size();
    std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t a = 0; a < p; ++a) {
            for (size_t b = 0; b < p; ++b) A[a][b] += X[i][a] * X[i][b];
            A[a][p] += X[i][a] * y[i];
        }
    for (size_t c = 0; c < p; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < p; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        if (std::abs(A[c][c]) < 1e-300) throw std::runtime_error("least_squares: singular system");
        for (size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            double fac = A[r][c] / A[c][c];
            for (size_t k = c; k <= p; ++k) A[r][k] -= fac * A[c][k];
        }
    }
    std::vector<double> beta(p);
    for (size_t c = 0; c < p; ++c) beta[c] = A[c][p] / A[c][c];
    return beta;
}

inline double fit_rms(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                      const std::vector<double>& beta) {
    double s = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        double pred = 0;
        for (size_t a = 0; a < beta.size(); ++a) pred += X[i][a] * beta[a];
        s += (y[i] - pred) * (y[i] - pred);
    }
    return std::sqrt(s / X.size());
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic over 128-bit integers (plenty for the operator
// expansion coefficients, which are products of small integers).
struct Rational {
    __int128 num = 0, den = 1;
    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(__int128 n, __int128 d) : num(n), den(d) { reduce(); }
    static __int128 gcd(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    void reduce() {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 g = gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Rational operator+(const Rational& o) const { return Rational(num * o.den + o.num * den, den * o.den); }
    Rational operator-(const Rational& o) const { return Rational(num * o.den - o.num * den, den * o.den); }
    Rational operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
    Rational operator/(const Rational& o) const { return Rational(num * o.den, den * o.num); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool is_zero() const { return num == 0; }
    double to_double() const { return (double)num / (double)den; }
    std::string str() const {
        auto s128 = [](__int128 v) {
            if (v == 0) return std::string("0");
            bool neg = v < 0;
            if (neg) v = -v;
            std::string s;
            while (v) {
                s.push_back(char('0' + int(v % 10)));
                v /= 10;
            }
            if (neg) s.push_back('-');
            std::reverse(s.begin(), s.end());
            return s;
        };
        return den == 1 ? s128(num) : s128(num) + "/" + s128(den);
    }
};

// ---------------------------------------------------------------------------
// Complex polynomial helpers: coefficient list c0 + c1 X + c2 X^2 + ...
using Poly = std::vector<cplx>;

inline cplx poly_eval(const Poly& p, cplx x) {
    cplx acc = 0;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline int poly_deg(const Poly& p) {
    for (size_t i = p.size(); i-- > 0;)
        if (std::abs(p[i]) != 0.0) return (int)i;
    return -1;  // zero polynomial
}

// Evaluate P(i*m) for real m (Fourier multiplier of P(d/dz)).
inline cplx poly_eval_im(const Poly& p, double m) { return poly_eval(p, cplx(0.0, m)); }

}  // namespace qsl
