#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "resonance/dynamics.hpp"
#include "resonance/model.hpp"
#include "resonance/parallel.hpp"
#include "resonance/quadrature.hpp"
#include "resonance/spectral.hpp"
#include "resonance/types.hpp"

namespace resonance {

// Energy-conserving model: G = diag(gammas).
struct DephasingModel {
    std::vector<double> gammas;
    std::vector<double> energies;
    FormFactor g;
    double beta = 1.0;
    double lambda = 0.0;

    SystemSpec system() const
    {
        if (gammas.size() != energies.size())
            throw Error(ErrorKind::validation, "gammas and energies must have equal length", "system.gammas");
        std::vector<double> d(gammas);
        CMatrix G(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) G(i, i) = d[i];
        return SystemSpec(energies, G);
    }

    // Gamma(t) -> infinity iff int r^{d-3}|g|^2 diverges at 0, i.e. infrared exponent <= 1;
    // for d = 1, 3 and p = -1/2 + n this is p <= (2 - d)/2; d = 2, p = 1/2 grows logarithmically.
    bool full_decoherence() const { return g.infrared_exponent() <= 1.0 + detail::infrared_tol; }
};

namespace detail {

inline constexpr double direct_phase_limit = 200.0;  // t * R below which plain adaptive quadrature is used

// Panel edges on [r0, R]: doubling widths from r0, then widths of at most 0.25.
inline std::vector<double> oscillatory_edges(double r0, double R)
{
    std::vector<double> e{r0};
    double x = r0;
    while (x < R) {
        const double w = std::min(x, 0.25);
        x = std::min(x + w, R);
        e.push_back(x);
    }
    return e;
}

inline std::vector<double> wave_points(const FormFactor& g, double t)
{
    const double R = g.cutoff();
    std::vector<double> extra;
    if (t > 0.0) {
        const double step = pi / t;
        for (double x = step; x < R && extra.size() < 20000; x += step) extra.push_back(x);
    }
    return radial_points(g, extra);
}

}  // namespace detail

// Gamma(t) = area int r^{d-1} |g|^2 coth(beta r / 2) sin^2(r t / 2) / r^2 dr.
// direct = true forces plain adaptive quadrature over half-wave panels.
inline double gamma_decoherence(const FormFactor& g, double beta, double t, const quad::Options& opt = {},
                                bool direct = false)
{
    if (t < 0.0) throw Error(ErrorKind::validation, "time must be nonnegative");
    if (t == 0.0) return 0.0;
    const double R = g.cutoff();
    auto f = [&](double r) { return coth_density(g, beta, r); };
    auto full = [&](double r) {
        const double s = std::sin(0.5 * r * t);
        return f(r) * s * s / (r * r);
    };
    if (direct || t * R <= detail::direct_phase_limit || g.family() == FormFactor::Family::tabulated)
        return quad::integrate_or_throw(full, detail::wave_points(g, t), opt, "gamma");
    const double r0 = pi / t;
    double v = quad::integrate_or_throw(full, detail::radial_points(r0), opt, "gamma near origin");
    auto smooth = [&](double r) { return f(r) / (r * r); };
    const auto edges = detail::oscillatory_edges(r0, R);
    v += 0.5 * quad::integrate_or_throw(smooth, edges, opt, "gamma mean");
    double osc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        osc += std::real(quad::fourier_panel(smooth, edges[i], edges[i + 1], t));
    return v - 0.5 * osc;
}

// S(t) = (1/2) area int r^{d-3} |g|^2 (r t - sin r t) dr.
inline double s_phase(const FormFactor& g, double t, const quad::Options& opt = {}, bool direct = false)
{
    if (t < 0.0) throw Error(ErrorKind::validation, "time must be nonnegative");
    if (t == 0.0) return 0.0;
    const double R = g.cutoff();
    const int d = g.dimension();
    auto q = [&](double r) { return g.area() * std::pow(r, d - 3) * g.abs2(r); };
    auto full = [&](double r) {
        const double x = r * t;
        // x - sin x loses digits for small x
        const double w = x < 1e-2 ? x * x * x / 6.0 * (1.0 - x * x / 20.0) : x - std::sin(x);
        return 0.5 * q(r) * w;
    };
    if (direct || t * R <= detail::direct_phase_limit || g.family() == FormFactor::Family::tabulated)
        return quad::integrate_or_throw(full, detail::wave_points(g, t), opt, "phase");
    const double r0 = pi / t;
    double v = quad::integrate_or_throw(full, detail::radial_points(r0), opt, "phase near origin");
    const auto edges = detail::oscillatory_edges(r0, R);
    auto linear = [&](double r) { return q(r) * r; };
    v += 0.5 * t * quad::integrate_or_throw(linear, edges, opt, "phase mean");
    double osc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) osc += std::imag(quad::fourier_panel(q, edges[i], edges[i + 1], t));
    return v - 0.5 * osc;
}

inline double gamma_decoherence(const DephasingModel& m, double t) { return gamma_decoherence(m.g, m.beta, t); }
inline double s_phase(const DephasingModel& m, double t) { return s_phase(m.g, t); }

// alpha_{m,n}(t) = (g_m^2 - g_n^2) S(t) + i (g_m - g_n)^2 Gamma(t)
inline cplx alpha(const DephasingModel& model, std::size_t m, std::size_t n, double gamma_t, double s_t)
{
    const double gm = model.gammas.at(m), gn = model.gammas.at(n);
    return cplx((gm * gm - gn * gn) * s_t, (gm - gn) * (gm - gn) * gamma_t);
}

inline Trajectory exact_trajectory(const DephasingModel& model, const DensityMatrix& rho0, const std::vector<double>& times,
                                   unsigned threads = 0)
{
    const SystemSpec sys = model.system();
    const std::size_t n = sys.dim();
    if (rho0.dim() != n) throw Error(ErrorKind::validation, "initial state dimension does not match system");
    Trajectory out;
    out.n = n;
    out.times = times;
    out.rho.assign(times.size(), CMatrix(n, n));
    out.envelope.assign(times.size(), 0.0);
    const double l2 = model.lambda * model.lambda;
    const auto& E = model.energies;
    parallel_for(times.size(), [&](std::size_t ti) {
        const double t = times[ti];
        const double gm = gamma_decoherence(model, t);
        const double sp = s_phase(model, t);
        CMatrix& rho = out.rho[ti];
        for (std::size_t a = 0; a < n; ++a) {
            rho(a, a) = rho0.matrix()(a, a);
            for (std::size_t b = a + 1; b < n; ++b) {
                const cplx phase = cplx(0.0, -t * (E[a] - E[b])) + cplx(0.0, l2) * alpha(model, a, b, gm, sp);
                rho(a, b) = rho0.matrix()(a, b) * std::exp(phase);
                rho(b, a) = std::conj(rho(a, b));
            }
        }
    }, threads);
    return out;
}

struct AsymptoticGenerator {
    double real = 0.0;  // (1/2)(g_m^2 - g_n^2) <g, omega^{-1} g>
    ExtReal imag;       // (g_m - g_n)^2 (pi/2) dSigma(0)
};

// lim_{t->inf} alpha_{m,n}(t) / t.
inline AsymptoticGenerator asymptotic_generator(const DephasingModel& model, std::size_t m, std::size_t n)
{
    AsymptoticGenerator out;
    const double gm = model.gammas.at(m), gn = model.gammas.at(n);
    if (gm * gm != gn * gn) out.real = 0.5 * (gm * gm - gn * gn) * g_omega_inverse(model.g);
    const double w = (gm - gn) * (gm - gn);
    if (w == 0.0) {
        out.imag = ExtReal::finite(0.0);
        return out;
    }
    const double d0 = line_density(model.g, model.beta, 0.0);
    out.imag = std::isinf(d0) ? ExtReal::infinity() : ExtReal::finite(w * 0.5 * pi * d0);
    return out;
}

struct RateLimitReport {
    std::vector<double> times;
    std::vector<cplx> alpha_over_t;
    std::vector<double> relative_deviation;
    AsymptoticGenerator target;
    bool converged = false;  // last relative deviation below 1e-2
};

inline RateLimitReport rate_limit_check(const DephasingModel& model, std::size_t m, std::size_t n,
                                        const std::vector<double>& t_grid)
{
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i])) throw Error(ErrorKind::validation, "time grid must be increasing");
    RateLimitReport r;
    r.target = asymptotic_generator(model, m, n);
    r.times = t_grid;
    for (double t : t_grid) {
        if (t <= 0.0) throw Error(ErrorKind::validation, "rate limit grid needs positive times");
        const cplx a = alpha(model, m, n, gamma_decoherence(model, t), s_phase(model, t)) / t;
        r.alpha_over_t.push_back(a);
        if (r.target.imag.is_finite()) {
            const cplx target(r.target.real, r.target.imag.value);
            const double scale = std::abs(target);
            r.relative_deviation.push_back(scale > 0.0 ? std::abs(a - target) / scale : std::abs(a));
        } else {
            r.relative_deviation.push_back(std::numeric_limits<double>::infinity());
        }
    }
    r.converged = !r.relative_deviation.empty() && r.relative_deviation.back() < 1e-2;
    return r;
}

// Gamma with the continuum replaced by M midpoint radial modes on [0, R*].
inline double discrete_mode_oracle(const FormFactor& g, double beta, std::size_t M, double t)
{
    if (M < 1) throw Error(ErrorKind::validation, "M must be >= 1");
    if (t == 0.0) return 0.0;
    const double R = g.cutoff();
    const double h = R / static_cast<double>(M);
    double sum = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        const double r = (k + 0.5) * h;
        const double s = std::sin(0.5 * r * t);
        sum += h * coth_density(g, beta, r) * s * s / (r * r);
    }
    return sum;
}

inline double discrete_mode_oracle(const DephasingModel& m, std::size_t M, double t)
{
    return discrete_mode_oracle(m.g, m.beta, M, t);
}

// Heuristic Gamma(infinity): sin^2 replaced by its time average 1/2.
struct GammaInfinity {
    ExtReal value;
    bool heuristic = true;
};

inline GammaInfinity gamma_infinity(const FormFactor& g, double beta)
{
    if (g.infrared_exponent() <= 1.0 + detail::infrared_tol) return {ExtReal::infinity(), true};
    auto f = [&](double r) { return 0.5 * coth_density(g, beta, r) / (r * r); };
    return {ExtReal::finite(quad::integrate_or_throw(f, detail::radial_points(g), {}, "gamma infinity")), true};
}

}  // namespace resonance
