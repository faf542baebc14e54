#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "resonance/linalg.hpp"
#include "resonance/model.hpp"
#include "resonance/parallel.hpp"
#include "resonance/spectral.hpp"
#include "resonance/types.hpp"

namespace resonance {

struct BohrFrequency {
    double e = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (m, n) with E_m - E_n = e, zero-based
    std::size_t multiplicity() const { return pairs.size(); }
};

inline double default_bohr_tolerance(const SystemSpec& sys)
{
    const auto& E = sys.energies();
    const double spread = E.back() - E.front();
    return 1e-9 * (spread > 0.0 ? spread : 1.0);
}

// Clusters all differences E_m - E_n; sorted ascending by e.
inline std::vector<BohrFrequency> bohr_frequencies(const SystemSpec& sys, double tol)
{
    if (!(tol > 0.0)) throw Error(ErrorKind::validation, "clustering tolerance must be positive");
    const auto& E = sys.energies();
    const std::size_t n = E.size();
    struct Diff {
        double v;
        std::size_t m, k;
    };
    std::vector<Diff> d;
    d.reserve(n * n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) d.push_back({E[m] - E[k], m, k});
    std::stable_sort(d.begin(), d.end(), [](const Diff& x, const Diff& y) { return x.v < y.v; });

    std::vector<std::vector<Diff>> clusters;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i > 0) {
            const double gap = d[i].v - d[i - 1].v;
            if (gap > tol && gap <= 2.0 * tol)
                throw Error(ErrorKind::degeneracy_resolution,
                            "ambiguous Bohr frequency clustering; pass an explicit tolerance");
            if (gap <= tol) {
                clusters.back().push_back(d[i]);
                continue;
            }
        }
        clusters.push_back({d[i]});
    }

    std::vector<BohrFrequency> out(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        auto& cl = clusters[c];
        std::sort(cl.begin(), cl.end(), [](const Diff& x, const Diff& y) {
            return std::make_pair(x.m, x.k) < std::make_pair(y.m, y.k);
        });
        bool has_zero = false;
        for (const auto& x : cl) {
            out[c].pairs.emplace_back(x.m, x.k);
            if (x.m == x.k) has_zero = true;
        }
        out[c].e = has_zero ? 0.0 : cl.front().v;
    }
    // mirror clusters carry exactly negated representatives
    for (std::size_t c = 0; c < out.size(); ++c) {
        const std::size_t mirror = out.size() - 1 - c;
        if (mirror < c) out[c].e = -out[mirror].e;
    }
    return out;
}

inline std::vector<BohrFrequency> bohr_frequencies(const SystemSpec& sys)
{
    return bohr_frequencies(sys, default_bohr_tolerance(sys));
}

struct LevelShiftOperator {
    BohrFrequency bohr;
    CMatrix matrix;  // diagonal + off_diagonal + mixed
    CMatrix diagonal, off_diagonal, mixed;
};

namespace detail {

// Kernel value split as finite + coef * dSigma(0), so an infinite dSigma(0) can be isolated.
struct KernelValue {
    cplx finite = 0.0;
    cplx coef = 0.0;
};

// Boundary value F(theta) = int dSigma(u) / (u + theta + i0).
inline KernelValue kernel_f(const CorrelationSet& corr, double theta)
{
    if (theta == 0.0) return {cplx(corr.g_omega_inv(), 0.0), cplx(0.0, -pi)};
    const auto s = corr.sokhotski_at(theta);
    return {s.value(), 0.0};
}

// -conj F(-theta)
inline KernelValue kernel_f_reflected(const CorrelationSet& corr, double theta)
{
    const auto k = kernel_f(corr, -theta);
    return {-std::conj(k.finite), -std::conj(k.coef)};
}

// Bilinear level shift form with left coupling from (ga, gta) and right from (gb, gtb).
// Terms: X1 R X1 - X1 R X2 + X2 R' X2 - X2 R' X1 with X1 = G (x) 1 and X2 = 1 (x) G~.
inline void assemble(const SystemSpec& sys, const CorrelationSet& corr, const BohrFrequency& bf,
                     const CMatrix& ga, const CMatrix& gta, const CMatrix& gb, const CMatrix& gtb, double snap,
                     CMatrix& finite, CMatrix& coef)
{
    const auto& E = sys.energies();
    const std::size_t n = sys.dim();
    const std::size_t dim = bf.multiplicity();
    const double e = bf.e;
    auto theta = [&](std::size_t k, std::size_t l) {
        const double t = E[k] - E[l] - e;
        return std::abs(t) <= snap ? 0.0 : t;
    };
    auto add = [&](std::size_t i, std::size_t j, cplx w, const KernelValue& kv) {
        if (w == cplx(0.0)) return;
        finite(i, j) += w * kv.finite;
        coef(i, j) += w * kv.coef;
    };
    for (std::size_t i = 0; i < dim; ++i) {
        const auto [mp, np] = bf.pairs[i];
        for (std::size_t j = 0; j < dim; ++j) {
            const auto [m, nn] = bf.pairs[j];
            if (np == nn) {
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx w = 0.5 * ga(mp, k) * gb(k, m);
                    if (w != cplx(0.0)) add(i, j, w, kernel_f(corr, theta(k, nn)));
                }
            }
            {
                const cplx w = -0.5 * ga(mp, m) * gtb(np, nn);
                if (w != cplx(0.0)) add(i, j, w, kernel_f(corr, theta(m, np)));
            }
            if (mp == m) {
                for (std::size_t l = 0; l < n; ++l) {
                    const cplx w = 0.5 * gta(np, l) * gtb(l, nn);
                    if (w != cplx(0.0)) add(i, j, w, kernel_f_reflected(corr, theta(m, l)));
                }
            }
            {
                const cplx w = -0.5 * gta(np, nn) * gb(mp, m);
                if (w != cplx(0.0)) add(i, j, w, kernel_f_reflected(corr, theta(mp, nn)));
            }
        }
    }
}

// G~ = e^{-beta H / 2} conj(G) e^{beta H / 2}
inline CMatrix modular_partner(const CMatrix& g, const std::vector<double>& E, double beta)
{
    const std::size_t n = g.rows();
    CMatrix t(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) t(k, l) = std::exp(-0.5 * beta * (E[k] - E[l])) * std::conj(g(k, l));
    return t;
}

inline CMatrix resolve_density(const CMatrix& finite, const CMatrix& coef, double d0, const std::string& part)
{
    const double scale = std::max({1.0, finite.max_abs(), coef.max_abs()});
    CMatrix out = finite;
    if (std::isinf(d0)) {
        if (coef.max_abs() > 1e-12 * scale)
            throw Error(ErrorKind::infinite_rate,
                        "xi(0) is infinite and the " + part + " level shift term has a nonzero diagonal-difference coefficient");
        return out;
    }
    if (d0 != 0.0) out += coef * cplx(d0, 0.0);
    return out;
}

}  // namespace detail

// Level shift operator on span{phi_m (x) phi_n : (m, n) in I_e}, split into
// diagonal (G_d only), off-diagonal (G_o only) and mixed parts.
inline LevelShiftOperator level_shift(const SystemSpec& sys, const CorrelationSet& corr, const BohrFrequency& bf)
{
    const auto& E = sys.energies();
    const double beta = corr.beta();
    const auto split = coupling_split(sys.coupling());
    const CMatrix td = detail::modular_partner(split.diagonal, E, beta);
    const CMatrix to = detail::modular_partner(split.off_diagonal, E, beta);
    const std::size_t dim = bf.multiplicity();
    const double snap = default_bohr_tolerance(sys);
    const double d0 = line_density(corr.form_factor(), beta, 0.0);

    LevelShiftOperator out;
    out.bohr = bf;
    {
        CMatrix f(dim, dim), c(dim, dim);
        detail::assemble(sys, corr, bf, split.diagonal, td, split.diagonal, td, snap, f, c);
        out.diagonal = detail::resolve_density(f, c, d0, "diagonal");
    }
    {
        CMatrix f(dim, dim), c(dim, dim);
        detail::assemble(sys, corr, bf, split.off_diagonal, to, split.off_diagonal, to, snap, f, c);
        out.off_diagonal = detail::resolve_density(f, c, d0, "off-diagonal");
    }
    {
        CMatrix f(dim, dim), c(dim, dim);
        detail::assemble(sys, corr, bf, split.diagonal, td, split.off_diagonal, to, snap, f, c);
        detail::assemble(sys, corr, bf, split.off_diagonal, to, split.diagonal, td, snap, f, c);
        out.mixed = detail::resolve_density(f, c, d0, "mixed");
    }
    out.matrix = out.diagonal + out.off_diagonal + out.mixed;
    return out;
}

inline LevelShiftOperator level_shift(const SystemSpec& sys, const FormFactor& g, double beta, const BohrFrequency& bf)
{
    CorrelationSet corr(g, beta);
    return level_shift(sys, corr, bf);
}

// All level shift operators; distinct Bohr frequencies are assembled concurrently.
inline std::vector<LevelShiftOperator> level_shifts(const SystemSpec& sys, const CorrelationSet& corr,
                                                    const std::vector<BohrFrequency>& bohr, unsigned threads = 0)
{
    std::vector<LevelShiftOperator> out(bohr.size());
    parallel_for(bohr.size(), [&](std::size_t i) { out[i] = level_shift(sys, corr, bohr[i]); }, threads);
    return out;
}

enum class QubitBlock { zero, plus, minus };

// Closed-form qubit level shift operators (H = diag(E_1, E_2), G = [[a, c], [conj c, b]]).
inline LevelShiftOperator level_shift_qubit_closed(const SystemSpec& sys, const CorrelationSet& corr, QubitBlock which)
{
    if (sys.dim() != 2) throw Error(ErrorKind::wrong_arity, "closed-form level shift needs a two-level system");
    const double Delta = sys.energies()[1] - sys.energies()[0];
    if (!(Delta > 0.0)) throw Error(ErrorKind::validation, "closed-form level shift needs a nondegenerate qubit");
    const double beta = corr.beta();
    const double a = std::real(sys.coupling()(0, 0));
    const double b = std::real(sys.coupling()(1, 1));
    const double c2 = std::norm(sys.coupling()(0, 1));
    const double x = beta * Delta;
    const double xi_d = c2 != 0.0 ? corr.xi_at(Delta).value : 0.0;

    LevelShiftOperator out;
    if (which == QubitBlock::zero) {
        out.bohr = {0.0, {{0, 0}, {1, 1}}};
        const cplx pref(0.0, -pi * c2 * xi_d / (2.0 * std::cosh(0.5 * x)));
        out.off_diagonal = CMatrix{{pref * std::exp(-0.5 * x), -pref}, {-pref, pref * std::exp(0.5 * x)}};
        out.diagonal = CMatrix(2, 2);
        out.mixed = CMatrix(2, 2);
        out.matrix = out.diagonal + out.off_diagonal + out.mixed;
        return out;
    }

    cplx diag = 0.0;
    if (b * b - a * a != 0.0) diag += 0.5 * (b * b - a * a) * corr.g_omega_inv();
    if (b - a != 0.0) {
        const ExtReal xi0 = corr.xi_at(0.0);
        if (xi0.is_infinite())
            throw Error(ErrorKind::infinite_rate, "xi(0) is infinite and (b - a) is nonzero");
        diag += cplx(0.0, -0.5 * pi * (b - a) * (b - a) * xi0.value);
    }
    cplx off = 0.0;
    if (c2 != 0.0) off = cplx(0.5 * c2 * corr.pv(Delta), -0.5 * pi * c2 * xi_d);
    out.bohr = {Delta, {{1, 0}}};
    out.diagonal = CMatrix{{diag}};
    out.off_diagonal = CMatrix{{off}};
    out.mixed = CMatrix(1, 1);
    out.matrix = out.diagonal + out.off_diagonal + out.mixed;
    if (which == QubitBlock::minus) {
        out.bohr = {-Delta, {{0, 1}}};
        out.diagonal = out.diagonal.conjugate() * cplx(-1.0);
        out.off_diagonal = out.off_diagonal.conjugate() * cplx(-1.0);
        out.matrix = out.matrix.conjugate() * cplx(-1.0);
    }
    return out;
}

// Biorthogonal eigensystem of one level shift operator, sorted by Im descending then Re ascending.
inline Eigensystem lso_eigensystem(const LevelShiftOperator& L) { return eigensystem(L.matrix); }

struct Resonance {
    double e = 0.0;
    std::size_t s = 0;  // zero-based within the Bohr frequency
    cplx delta;
    cplx epsilon;
    CVector eta;        // N^2 coordinates
    CVector eta_tilde;  // N^2 coordinates, <eta_tilde, eta> = 1
    bool pinned = false;
};

struct ResonanceSet {
    std::size_t n = 0;
    double lambda = 0.0;
    std::vector<Resonance> items;
    double min_pairing = 1.0;
    std::vector<std::string> warnings;

    const Resonance& find(double e, std::size_t s, double tol = 1e-9) const
    {
        for (const auto& r : items)
            if (r.s == s && std::abs(r.e - e) <= tol * std::max(1.0, std::abs(e))) return r;
        throw Error(ErrorKind::validation, "no resonance with the requested (e, s)");
    }
};

struct ResonanceOptions {
    double smallness = 1.0;  // warn when |lambda| > smallness / beta
    double beta = 0.0;       // 0 skips the smallness check
};

// epsilon = e - lambda^2 delta for every level shift eigenvalue.
inline ResonanceSet resonance_energies(const SystemSpec& sys, const std::vector<LevelShiftOperator>& lsos,
                                       double lambda, const ResonanceOptions& opt = {})
{
    ResonanceSet out;
    const std::size_t n = sys.dim();
    out.n = n;
    out.lambda = lambda;
    if (opt.beta > 0.0 && std::abs(lambda) > opt.smallness / opt.beta)
        out.warnings.push_back("|lambda| exceeds the smallness threshold c0/beta; resonance expansion may be inaccurate");
    const double l2 = lambda * lambda;
    for (const auto& L : lsos) {
        const auto es = lso_eigensystem(L);
        out.min_pairing = std::min(out.min_pairing, es.min_pairing);
        const double scale = std::max(1.0, L.matrix.max_abs());
        for (std::size_t s = 0; s < es.pairs.size(); ++s) {
            const auto& p = es.pairs[s];
            Resonance r;
            r.e = L.bohr.e;
            r.s = s;
            r.delta = p.value;
            if (L.bohr.e == 0.0 && std::abs(p.value) < 1e-10 * scale) {
                r.delta = 0.0;
                r.pinned = true;
            }
            r.epsilon = r.pinned ? cplx(0.0) : cplx(L.bohr.e, 0.0) - l2 * r.delta;
            if (std::imag(r.epsilon) < -1e-10 * std::max(1.0, l2 * scale))
                throw Error(ErrorKind::sign_violation, "resonance with negative imaginary part");
            r.eta.assign(n * n, 0.0);
            r.eta_tilde.assign(n * n, 0.0);
            for (std::size_t i = 0; i < L.bohr.pairs.size(); ++i) {
                const auto [m, k] = L.bohr.pairs[i];
                r.eta[m * n + k] = p.right[i];
                r.eta_tilde[m * n + k] = p.left[i];
            }
            out.items.push_back(std::move(r));
        }
    }
    return out;
}

// Full pipeline: Bohr frequencies, level shift operators, resonances.
inline ResonanceSet resonances(const SystemSpec& sys, const CorrelationSet& corr, double lambda,
                               ResonanceOptions opt = {}, unsigned threads = 0)
{
    const auto bohr = bohr_frequencies(sys);
    const auto lsos = level_shifts(sys, corr, bohr, threads);
    if (opt.beta == 0.0) opt.beta = corr.beta();
    return resonance_energies(sys, lsos, lambda, opt);
}

}  // namespace resonance
