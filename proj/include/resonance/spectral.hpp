#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "resonance/model.hpp"
#include "resonance/quadrature.hpp"
#include "resonance/types.hpp"

namespace resonance {

// Surface area of the unit sphere S^{d-1}: 2, 2 pi, 4 pi, ...
inline double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

// Isotropic reservoir coupling g(k) = g1 * radial(|k|) on R^d.
class FormFactor {
public:
    enum class Family { power_exp, tabulated };

    static FormFactor power_exp(double p, int m, double amplitude = 1.0, int dimension = 3, double g1 = 1.0)
    {
        FormFactor f;
        f.family_ = Family::power_exp;
        f.p_ = p;
        f.m_ = m;
        f.amplitude_ = amplitude;
        f.dimension_ = dimension;
        f.g1_ = g1;
        f.validate();
        return f;
    }

    static FormFactor tabulated(std::vector<double> r, std::vector<double> g, int dimension = 3, double g1 = 1.0)
    {
        FormFactor f;
        f.family_ = Family::tabulated;
        f.r_ = std::move(r);
        f.g_ = std::move(g);
        f.dimension_ = dimension;
        f.g1_ = g1;
        f.validate();
        return f;
    }

    Family family() const { return family_; }
    double p() const { return p_; }
    int m() const { return m_; }
    double amplitude() const { return amplitude_; }
    int dimension() const { return dimension_; }
    double angular() const { return g1_; }
    const std::vector<double>& grid() const { return r_; }
    const std::vector<double>& values() const { return g_; }

    FormFactor scaled(double s) const
    {
        FormFactor f = *this;
        f.g1_ *= s;
        return f;
    }

    // Radial profile g(r) without the angular constant.
    double radial(double r) const
    {
        if (family_ == Family::power_exp) return amplitude_ * std::pow(r, p_) * std::exp(-std::pow(r, m_));
        if (r >= r_.back()) return r == r_.back() ? g_.back() : 0.0;
        if (r < r_.front()) {
            if (r_.front() == 0.0) return g_.front();
            return g_.front() * std::pow(r / r_.front(), tab_exponent_);
        }
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - r_.begin());
        const double t = (r - r_[j - 1]) / (r_[j] - r_[j - 1]);
        return g_[j - 1] + t * (g_[j] - g_[j - 1]);
    }

    // |g(r,sigma)|^2 including the angular constant.
    double abs2(double r) const
    {
        const double v = radial(r) * g1_;
        return v * v;
    }

    double area() const { return sphere_area(dimension_); }

    // Truncation radius: e^{-r^m} below 1e-18, or the end of the table.
    double cutoff() const
    {
        if (family_ == Family::power_exp) return std::pow(std::log(1e18), 1.0 / m_);
        return r_.back();
    }

    // Exponent alpha with r^{d-2} |g(r)|^2 ~ r^alpha as r -> 0.
    double infrared_exponent() const
    {
        if (family_ == Family::power_exp) return dimension_ - 2.0 + 2.0 * p_;
        return dimension_ - 2.0 + 2.0 * tab_exponent_;
    }

    // lim_{r->0} r^{d-2} |g|^2 (meaningful when the infrared exponent is zero).
    double infrared_constant() const
    {
        if (family_ == Family::power_exp) return amplitude_ * amplitude_ * g1_ * g1_;
        const double r0 = first_positive_r();
        return std::pow(r0, dimension_ - 2.0) * abs2(r0);
    }

private:
    FormFactor() = default;

    double first_positive_r() const
    {
        for (double r : r_)
            if (r > 0.0) return r;
        return r_.back();
    }

    void validate()
    {
        if (dimension_ < 1) throw Error(ErrorKind::validation, "dimension must be >= 1", "form_factor.dimension");
        if (!std::isfinite(g1_)) throw Error(ErrorKind::validation, "angular constant must be finite", "form_factor.angular");
        if (family_ == Family::power_exp) {
            if (!(amplitude_ > 0.0) || !std::isfinite(amplitude_))
                throw Error(ErrorKind::validation, "amplitude must be positive", "form_factor.amplitude");
            if (m_ != 1 && m_ != 2) throw Error(ErrorKind::validation, "m must be 1 or 2", "form_factor.m");
            if (!(p_ >= -0.5) || !std::isfinite(p_))
                throw Error(ErrorKind::validation, "p must be >= -1/2", "form_factor.p");
            return;
        }
        if (r_.size() < 2 || r_.size() != g_.size())
            throw Error(ErrorKind::validation, "tabulated form factor needs matching r and g arrays", "form_factor.r");
        for (std::size_t i = 0; i < r_.size(); ++i) {
            if (!std::isfinite(r_[i]) || !std::isfinite(g_[i]) || r_[i] < 0.0)
                throw Error(ErrorKind::validation, "tabulated values must be finite", "form_factor.g");
            if (i > 0 && !(r_[i] > r_[i - 1]))
                throw Error(ErrorKind::validation, "tabulated grid must be increasing", "form_factor.r");
        }
        // local power law from the first two positive grid points
        std::size_t i0 = 0;
        while (i0 < r_.size() && r_[i0] == 0.0) ++i0;
        if (i0 + 1 < r_.size() && g_[i0] != 0.0 && g_[i0 + 1] != 0.0)
            tab_exponent_ = std::log(std::abs(g_[i0 + 1] / g_[i0])) / std::log(r_[i0 + 1] / r_[i0]);
        else if (i0 > 0 && g_[0] != 0.0)
            tab_exponent_ = 0.0;
        else
            tab_exponent_ = 1.0;
    }

    Family family_ = Family::power_exp;
    double p_ = 0.5;
    int m_ = 1;
    double amplitude_ = 1.0;
    std::vector<double> r_, g_;
    double tab_exponent_ = 0.0;
    int dimension_ = 3;
    double g1_ = 1.0;
};

namespace detail {

inline constexpr double infrared_tol = 1e-9;

// Breakpoints on [0, R]: geometric grading toward 0 then uniform panels.
inline std::vector<double> radial_points(double R, std::vector<double> extra = {})
{
    std::vector<double> pts{0.0};
    for (int k = 40; k >= 5; k -= 5) pts.push_back(R * std::ldexp(1.0, -k));
    const int panels = 16;
    for (int i = 1; i <= panels; ++i) pts.push_back(R * i / panels);
    for (double x : extra)
        if (x > 0.0 && x < R) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// As above on [0, cutoff], with the grid of a tabulated profile added so every panel is smooth.
inline std::vector<double> radial_points(const FormFactor& g, std::vector<double> extra = {})
{
    if (g.family() == FormFactor::Family::tabulated) extra.insert(extra.end(), g.grid().begin(), g.grid().end());
    return radial_points(g.cutoff(), std::move(extra));
}

// |1 - e^{-beta u}| computed without cancellation near u = 0.
inline double planck_denominator(double beta, double u) { return std::abs(std::expm1(-beta * u)); }

inline double coth(double x) { return 1.0 / std::tanh(x); }

// Detects a non-integrable singularity at r = 0 from dyadic shell contributions.
template <class F>
bool diverges_at_origin(F&& f, double R)
{
    std::vector<double> shells;
    double hi = std::min(R, 1e-2);
    for (int k = 0; k < 12; ++k) {
        const double lo = hi / 4.0;
        shells.push_back(std::abs(quad::integrate(f, lo, hi, {1e-300, 1e-8, 200}).value));
        hi = lo;
    }
    // a convergent power law r^a with a > -1 shrinks shells by 4^{a+1} > 1
    int growing = 0;
    for (std::size_t k = 6; k < shells.size(); ++k)
        if (shells[k] >= 0.99 * shells[k - 1] && shells[k] > 0.0) ++growing;
    return growing >= 5;
}

}  // namespace detail

// Thermal form factor g_beta(u, sigma) for the isotropic profile on R x S^2.
inline cplx thermal_form_factor(const FormFactor& g, double beta, double u, double phi = 0.0)
{
    if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    if (u == 0.0) {
        const double e = 0.5 + g.p();
        if (g.family() == FormFactor::Family::power_exp) {
            if (std::abs(e) <= detail::infrared_tol) return g.amplitude() * g.angular() / std::sqrt(beta);
            return 0.0;
        }
        return 0.0;
    }
    const double pref = std::sqrt(u / -std::expm1(-beta * u)) * std::sqrt(std::abs(u));
    const double gr = g.radial(std::abs(u)) * g.angular();
    if (u > 0.0) return pref * gr;
    return -pref * std::exp(cplx(0.0, phi)) * gr;
}

// Angular-integrated line density of |g_beta(u)|^2 on the real line.
inline double line_density(const FormFactor& g, double beta, double u)
{
    if (u == 0.0) {
        const double a = g.infrared_exponent();
        if (a > detail::infrared_tol) return 0.0;
        if (a < -detail::infrared_tol) return std::numeric_limits<double>::infinity();
        return g.area() * g.infrared_constant() / beta;
    }
    const double r = std::abs(u);
    return g.area() * std::pow(r, g.dimension() - 1) * g.abs2(r) / detail::planck_denominator(beta, u);
}

// area * r^{d-1} |g(r)|^2 coth(beta r / 2) for r > 0; equals line_density(r) + line_density(-r).
inline double coth_density(const FormFactor& g, double beta, double r)
{
    return g.area() * std::pow(r, g.dimension() - 1) * g.abs2(r) * detail::coth(0.5 * beta * r);
}

// xi(eta): delta-limit value for eta > 0; at eta = 0 the Lorentzian centred on the
// boundary of the radial half-line picks up half the mass, giving line_density(0).
inline ExtReal xi(const FormFactor& g, double beta, double eta)
{
    if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    if (eta < 0.0) throw Error(ErrorKind::validation, "xi needs eta >= 0");
    if (eta > 0.0) return ExtReal::finite(coth_density(g, beta, eta));
    const double v = line_density(g, beta, 0.0);
    if (std::isinf(v)) return ExtReal::infinity();
    return ExtReal::finite(v);
}

// Finite-epsilon Lorentzian form of xi (test oracle for the delta limit).
inline double xi_lorentzian(const FormFactor& g, double beta, double eta, double epsilon, const quad::Options& opt = {})
{
    if (!(epsilon > 0.0)) throw Error(ErrorKind::validation, "epsilon must be positive");
    auto f = [&](double r) {
        const double d = r - eta;
        return coth_density(g, beta, r) * epsilon / (d * d + epsilon * epsilon) / pi;
    };
    std::vector<double> extra;
    for (double k : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
        extra.push_back(eta - k * epsilon);
        extra.push_back(eta + k * epsilon);
    }
    extra.push_back(eta);
    return quad::integrate_or_throw(f, detail::radial_points(g, extra), opt, "xi_lorentzian");
}

// Richardson extrapolation of xi_lorentzian over {4 eps, 2 eps, eps}.
inline double xi_lorentzian_extrapolated(const FormFactor& g, double beta, double eta, double epsilon)
{
    const double x4 = xi_lorentzian(g, beta, eta, 4.0 * epsilon);
    const double x2 = xi_lorentzian(g, beta, eta, 2.0 * epsilon);
    const double x1 = xi_lorentzian(g, beta, eta, epsilon);
    // remove the O(eps) and O(eps^2) terms
    return (8.0 * x1 - 6.0 * x2 + x4) / 3.0;
}

// <g, omega^{-1} g> = area * int r^{d-2} |g(r)|^2 dr.
inline double g_omega_inverse(const FormFactor& g, const quad::Options& opt = {})
{
    const double R = g.cutoff();
    auto f = [&](double r) { return g.area() * std::pow(r, g.dimension() - 2) * g.abs2(r); };
    if (g.infrared_exponent() <= -1.0 + detail::infrared_tol || detail::diverges_at_origin(f, R))
        throw Error(ErrorKind::divergent_integral, "<g, omega^-1 g> diverges at the origin");
    return quad::integrate_or_throw(f, detail::radial_points(g), opt, "g_omega_inverse");
}

namespace detail {

// PV of int_{lo}^{hi} f(u) / (u - u0) du with lo < u0 < hi, by symmetric subtraction around u0.
template <class F>
double principal_value(F&& f, double u0, std::vector<double> pts, double w, const quad::Options& opt)
{
    auto folded = [&](double s) { return (f(u0 + s) - f(u0 - s)) / s; };
    double v = quad::integrate_or_throw(folded, {0.0, 0.5 * w, w}, opt, "principal value window");
    pts.push_back(u0 - w);
    pts.push_back(u0 + w);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto g = [&](double u) { return f(u) / (u - u0); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (a >= u0 - w && b <= u0 + w) continue;
        v += quad::integrate_or_throw(g, {a, b}, opt, "principal value outer");
    }
    return v;
}

}  // namespace detail

// P.V. int_R area |u|^{d-1} |g|^2 coth(beta|u|/2) / (u - Delta) du, folded onto the half-line.
inline double pv_coth(const FormFactor& g, double beta, double Delta, const quad::Options& opt = {})
{
    if (Delta == 0.0) return 0.0;
    const double R = g.cutoff();
    const double d = std::abs(Delta);
    auto q = [&](double u) { return coth_density(g, beta, u) * 2.0 * Delta / (u + d); };
    if (d >= R) {
        auto f = [&](double u) { return q(u) / (u - d); };
        return quad::integrate_or_throw(f, detail::radial_points(g), opt, "pv_coth");
    }
    const double w = 0.5 * std::min(d, R - d);
    return detail::principal_value(q, d, detail::radial_points(g, {d}), w, opt);
}

// Regular and density parts of the boundary value int dSigma(u) / (u + theta + i0).
struct SokhotskiValue {
    double pv = 0.0;       // principal value
    ExtReal density;       // line density at u = -theta
    cplx value() const { return cplx(pv, -pi * density.value); }
};

inline SokhotskiValue sokhotski_parts(const FormFactor& g, double beta, double theta, const quad::Options& opt = {})
{
    if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    SokhotskiValue out;
    const double u0 = -theta;
    const double dens = line_density(g, beta, u0);
    out.density = std::isinf(dens) ? ExtReal::infinity() : ExtReal::finite(dens);
    if (theta == 0.0) {
        // PV int dSigma(u)/u = int_0^inf (dSigma(u) - dSigma(-u))/u du = <g, omega^{-1} g>
        out.pv = g_omega_inverse(g, opt);
        return out;
    }
    const double R = g.cutoff();
    auto f = [&](double u) { return line_density(g, beta, u); };
    std::vector<double> pts;
    for (double x : detail::radial_points(g)) {
        pts.push_back(x);
        if (x > 0.0) pts.push_back(-x);
    }
    std::sort(pts.begin(), pts.end());
    // dSigma ~ |u|^{alpha}: integrable on the line exactly when <g, omega^{-1} g> is finite
    if (g.infrared_exponent() <= -1.0 + detail::infrared_tol)
        throw Error(ErrorKind::divergent_integral, "line density not integrable at the origin");
    if (std::abs(u0) >= R) {
        auto h = [&](double u) { return f(u) / (u - u0); };
        out.pv = quad::integrate_or_throw(h, pts, opt, "sokhotski");
        return out;
    }
    const double w = 0.5 * std::min(std::abs(u0), R - std::abs(u0));
    out.pv = detail::principal_value(f, u0, pts, w, opt);
    return out;
}

inline cplx sokhotski(const FormFactor& g, double beta, double theta, const quad::Options& opt = {})
{
    auto s = sokhotski_parts(g, beta, theta, opt);
    if (s.density.is_infinite())
        throw Error(ErrorKind::infinite_rate, "line density diverges at the origin (xi(0) infinite)");
    return s.value();
}

struct AnalyticityReport {
    enum class Status { pass, fail, unverified };
    Status status = Status::pass;
    std::vector<std::string> reasons;
};

inline const char* to_string(AnalyticityReport::Status s)
{
    switch (s) {
    case AnalyticityReport::Status::pass: return "pass";
    case AnalyticityReport::Status::fail: return "fail";
    case AnalyticityReport::Status::unverified: return "unverified";
    }
    return "unknown";
}

inline AnalyticityReport analyticity_check(const FormFactor& g, const ThermalConfig& cfg)
{
    AnalyticityReport r;
    if (!(cfg.omega_prime > 0.0 && cfg.omega_prime < 2.0 * pi / cfg.beta)) {
        r.status = AnalyticityReport::Status::fail;
        r.reasons.push_back("omega_prime must lie in (0, 2 pi / beta)");
    }
    if (g.family() == FormFactor::Family::tabulated) {
        if (r.status == AnalyticityReport::Status::pass) r.status = AnalyticityReport::Status::unverified;
        r.reasons.push_back("tabulated profile: analytic continuation not verifiable");
        return r;
    }
    const double n = g.p() + 0.5;
    if (std::abs(n - std::round(n)) > 1e-12 || n < -1e-12) {
        r.status = AnalyticityReport::Status::fail;
        r.reasons.push_back("p must be -1/2 + n for integer n >= 0");
    }
    return r;
}

// Memoized reservoir integrals at fixed beta; safe for concurrent lookups.
class CorrelationSet {
public:
    CorrelationSet(FormFactor g, double beta, quad::Options opt = {})
        : g_(std::move(g)), beta_(beta), opt_(opt)
    {
        if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    }

    const FormFactor& form_factor() const { return g_; }
    double beta() const { return beta_; }

    ExtReal xi_at(double eta) const
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = xi_cache_.find(eta);
        if (it != xi_cache_.end()) return it->second;
        return xi_cache_[eta] = xi(g_, beta_, eta);
    }

    double g_omega_inv() const
    {
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (k_) return *k_;
        }
        const double v = g_omega_inverse(g_, opt_);
        std::lock_guard<std::mutex> lock(mu_);
        k_ = v;
        return v;
    }

    double pv(double Delta) const
    {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = pv_cache_.find(Delta);
            if (it != pv_cache_.end()) return it->second;
        }
        const double v = pv_coth(g_, beta_, Delta, opt_);
        std::lock_guard<std::mutex> lock(mu_);
        return pv_cache_[Delta] = v;
    }

    SokhotskiValue sokhotski_at(double theta) const
    {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = sok_cache_.find(theta);
            if (it != sok_cache_.end()) return it->second;
        }
        SokhotskiValue v;
        if (theta == 0.0) {
            v.pv = g_omega_inv();
            const double d = line_density(g_, beta_, 0.0);
            v.density = std::isinf(d) ? ExtReal::infinity() : ExtReal::finite(d);
        } else {
            v = sokhotski_parts(g_, beta_, theta, opt_);
        }
        std::lock_guard<std::mutex> lock(mu_);
        return sok_cache_[theta] = v;
    }

private:
    FormFactor g_;
    double beta_;
    quad::Options opt_;
    mutable std::mutex mu_;
    mutable std::map<double, ExtReal> xi_cache_;
    mutable std::optional<double> k_;
    mutable std::map<double, double> pv_cache_;
    mutable std::map<double, SokhotskiValue> sok_cache_;
};

}  // namespace resonance
