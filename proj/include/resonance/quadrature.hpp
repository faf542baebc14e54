#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

#include "resonance/types.hpp"

namespace resonance::quad {

struct Options {
    double abs_tol = 1e-15;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = true;
};

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * wgk[7];
    double gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        kron += wgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
    }
    const double err = std::abs((kron - gauss) * h);
    return {a, b, kron * h, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) on [a,b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {})
{
    Result r;
    if (a == b) return r;
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    heap.push(first);
    double total = first.value, err = first.error;
    int count = 1;
    const double min_width = 1e-14 * std::max(std::abs(a), std::abs(b)) + 1e-300;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && count < opt.max_intervals) {
        auto s = heap.top();
        if (s.b - s.a <= min_width) break;  // roundoff floor
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        auto l = detail::gk15(f, s.a, m);
        auto rr = detail::gk15(f, m, s.b);
        total += l.value + rr.value - s.value;
        err += l.error + rr.error - s.error;
        heap.push(l);
        heap.push(rr);
        ++count;
    }
    // recompute sums to shed accumulated cancellation in the running totals
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.error = err;
    r.intervals = count;
    r.converged = err <= 100.0 * std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return r;
}

// Integrate over consecutive breakpoints, sharing the absolute tolerance.
template <class F>
Result integrate(F&& f, const std::vector<double>& points, const Options& opt = {})
{
    Result total;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] <= points[i]) continue;
        auto r = integrate(f, points[i], points[i + 1], opt);
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
        total.converged = total.converged && r.converged;
    }
    return total;
}

template <class F>
double integrate_or_throw(F&& f, const std::vector<double>& points, const Options& opt, const char* what)
{
    auto r = integrate(f, points, opt);
    if (!r.converged || !std::isfinite(r.value))
        throw QuadratureError(std::string("quadrature did not converge: ") + what, r.error);
    return r.value;
}

// Gauss-Legendre rule on [-1,1] by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> x, w;
};

inline GaussLegendre gauss_legendre(int n)
{
    GaussLegendre g{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        g.x[i] = -z;
        g.x[n - 1 - i] = z;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

inline const GaussLegendre& cached_gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

namespace detail {

// j_0..j_{n-1} at x >= 0; upward recurrence is stable once x >= n.
inline std::vector<double> sph_bessel_table(int n, double x)
{
    std::vector<double> out(n, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x < n) {
        for (int k = 0; k < n; ++k) out[k] = std::sph_bessel(static_cast<unsigned>(k), x);
        return out;
    }
    out[0] = std::sin(x) / x;
    if (n > 1) out[1] = std::sin(x) / (x * x) - std::cos(x) / x;
    for (int k = 2; k < n; ++k) out[k] = (2.0 * k - 1.0) / x * out[k - 1] - out[k - 2];
    return out;
}

}  // namespace detail

// Oscillatory panel rule: integral of F(r) e^{i w r} over [a,b] via a Legendre
// expansion of F and the exact moments 2 i^k j_k(w h) of P_k against e^{i w h x}.
template <class F>
std::complex<double> fourier_panel(F& f, double a, double b, double w, int order = 32)
{
    const auto& gl = cached_gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::vector<double> fv(order);
    for (int j = 0; j < order; ++j) fv[j] = f(c + h * gl.x[j]);
    const double arg = w * h;
    const auto jtab = detail::sph_bessel_table(order, std::abs(arg));
    std::complex<double> sum = 0.0;
    std::complex<double> ik = 1.0;
    std::vector<double> p0(order, 1.0), p1(gl.x);
    for (int k = 0; k < order; ++k) {
        const std::vector<double>& pk = (k == 0) ? p0 : p1;
        double ak = 0.0;
        for (int j = 0; j < order; ++j) ak += gl.w[j] * fv[j] * pk[j];
        ak *= (2.0 * k + 1.0) / 2.0;
        const double jk = jtab[k];
        // j_k is even/odd with k; i^k j_k(-x) = conj(i^k j_k(x)) for real x
        std::complex<double> mom = 2.0 * ik * jk;
        if (arg < 0) mom = std::conj(mom);
        sum += ak * mom;
        ik *= std::complex<double>(0.0, 1.0);
        if (k >= 1) {
            for (int j = 0; j < order; ++j) {
                const double x = gl.x[j];
                const double next = ((2.0 * k + 1.0) * x * p1[j] - k * p0[j]) / (k + 1.0);
                p0[j] = p1[j];
                p1[j] = next;
            }
        }
    }
    return h * std::exp(std::complex<double>(0.0, w * c)) * sum;
}

}  // namespace resonance::quad
