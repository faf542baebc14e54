#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "resonance/lso.hpp"
#include "resonance/model.hpp"
#include "resonance/parallel.hpp"
#include "resonance/types.hpp"

namespace resonance {

struct ExpansionTerm {
    double e = 0.0;
    std::size_t s = 0;
    cplx epsilon;
    cplx amplitude;
};

struct ResonanceExpansion {
    std::vector<ExpansionTerm> terms;
    cplx ergodic_mean = 0.0;
    double remainder_exponent = 0.0;  // omega' / 2
};

// Initial-state overlaps <psi0, (1 (x) B') eta> for every resonance.
inline CVector initial_overlaps(const ResonanceSet& res, const SystemVector& psi0, const SystemSpec& sys, double beta)
{
    const CMatrix b = commutant_factor(psi0, sys, beta);
    CVector out(res.items.size());
    for (std::size_t r = 0; r < res.items.size(); ++r) {
        const CVector v = apply_right(b, SystemVector{res.n, res.items[r].eta});
        out[r] = dot(psi0.coords, v);
    }
    return out;
}

// Leading-order amplitude <psi0, (1 (x) B') eta> <eta~, (A (x) 1) Omega>.
inline cplx amplitude(const CMatrix& A, const Resonance& r, const SystemVector& psi0, const CMatrix& b_factor,
                      const SystemVector& omega)
{
    const std::size_t n = psi0.n;
    const cplx left = dot(psi0.coords, apply_right(b_factor, SystemVector{n, r.eta}));
    const cplx right = dot(r.eta_tilde, apply_left(A, omega));
    return left * right;
}

// <A>_t = sum e^{i t eps} amplitude; remainder reported only as an envelope.
inline ResonanceExpansion expand_observable(const CMatrix& A, const ResonanceSet& res, const SystemVector& psi0,
                                            const SystemSpec& sys, const ThermalConfig& cfg)
{
    cfg.validate();
    const CMatrix b = commutant_factor(psi0, sys, cfg.beta);
    const SystemVector omega = gibbs_vector(sys, cfg.beta);
    const CVector a_omega = apply_left(A, omega);
    ResonanceExpansion out;
    out.remainder_exponent = 0.5 * cfg.omega_prime;
    for (const auto& r : res.items) {
        const cplx left = dot(psi0.coords, apply_right(b, SystemVector{res.n, r.eta}));
        const cplx amp = left * dot(r.eta_tilde, a_omega);
        out.terms.push_back({r.e, r.s, r.epsilon, amp});
        if (r.epsilon == cplx(0.0)) out.ergodic_mean += amp;
    }
    return out;
}

inline cplx evaluate(const ResonanceExpansion& x, double t)
{
    cplx v = 0.0;
    for (const auto& term : x.terms) v += std::exp(cplx(0.0, t) * term.epsilon) * term.amplitude;
    return v;
}

// lambda^2 e^{-(t/2)(max Im eps + omega'/2)}
inline double remainder_envelope(const ResonanceSet& res, double omega_prime, double t)
{
    double im = 0.0;
    for (const auto& r : res.items) im = std::max(im, std::imag(r.epsilon));
    return res.lambda * res.lambda * std::exp(-0.5 * t * (im + 0.5 * omega_prime));
}

struct EvolvedObservable {
    ResonanceExpansion expansion;
    std::vector<double> times;
    std::vector<cplx> values;
    std::vector<double> envelope;
};

inline EvolvedObservable evolve_observable(const CMatrix& A, const std::vector<double>& times, const ResonanceSet& res,
                                           const SystemVector& psi0, const SystemSpec& sys, const ThermalConfig& cfg)
{
    for (const auto& r : res.items)
        if (std::imag(r.epsilon) < -1e-10) throw Error(ErrorKind::sign_violation, "resonance with negative imaginary part");
    EvolvedObservable out;
    out.expansion = expand_observable(A, res, psi0, sys, cfg);
    out.times = times;
    for (double t : times) {
        out.values.push_back(evaluate(out.expansion, t));
        out.envelope.push_back(remainder_envelope(res, cfg.omega_prime, t));
    }
    return out;
}

inline cplx ergodic_average(const CMatrix& A, const ResonanceSet& res, const SystemVector& psi0, const SystemSpec& sys,
                            const ThermalConfig& cfg)
{
    return expand_observable(A, res, psi0, sys, cfg).ergodic_mean;
}

struct Rates {
    ExtReal tau_T, tau_D, ratio;
    std::vector<std::pair<double, ExtReal>> decay_times;  // (e, [Im eps]^{-1}) per resonance
};

inline ExtReal inverse_rate(double im)
{
    if (im <= 0.0) return ExtReal::infinity();
    return ExtReal::finite(1.0 / im);
}

inline Rates rates(const ResonanceSet& res)
{
    Rates out;
    for (const auto& r : res.items) out.decay_times.emplace_back(r.e, inverse_rate(std::imag(r.epsilon)));
    if (res.n != 2) {
        out.tau_T = out.tau_D = out.ratio = ExtReal::undefined();
        return out;
    }
    double im_t = 0.0, im_d = 0.0;
    for (const auto& r : res.items) {
        if (r.e == 0.0 && r.s == 1) im_t = std::imag(r.epsilon);
        if (r.e > 0.0) im_d = std::imag(r.epsilon);
    }
    out.tau_T = inverse_rate(im_t);
    out.tau_D = inverse_rate(im_d);
    // tau_T / tau_D = Im eps_Delta / Im eps_0^(2)
    if (im_t > 0.0)
        out.ratio = ExtReal::finite(std::max(im_d, 0.0) / im_t);
    else if (im_d > 0.0)
        out.ratio = ExtReal::infinity();
    else
        out.ratio = ExtReal::undefined();
    return out;
}

struct Trajectory {
    std::size_t n = 0;
    std::vector<double> times;
    std::vector<CMatrix> rho;
    std::vector<double> envelope;
    Rates rates;
    double amplitude_bound = 0.0;  // max over entries of sum |amplitudes|
};

namespace detail {

// [rho_t]_{m,n} = sum_r e^{i t eps_r} u_r sqrt(w_m) conj(eta~_r[n N + m]).
struct EntryTerms {
    std::vector<cplx> eps, amp;
};

inline std::vector<EntryTerms> entry_terms(const ResonanceSet& res, const SystemVector& psi0, const SystemSpec& sys,
                                           double beta)
{
    const std::size_t n = sys.dim();
    const auto w = gibbs_weights(sys.energies(), beta);
    const CVector u = initial_overlaps(res, psi0, sys, beta);
    std::vector<EntryTerms> out(n * n);
    for (std::size_t r = 0; r < res.items.size(); ++r) {
        const auto& it = res.items[r];
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m; k < n; ++k) {
                const cplx et = it.eta_tilde[k * n + m];
                if (et == cplx(0.0)) continue;
                const cplx a = u[r] * std::sqrt(w[m]) * std::conj(et);
                if (a == cplx(0.0)) continue;
                out[m * n + k].eps.push_back(it.epsilon);
                out[m * n + k].amp.push_back(a);
            }
    }
    return out;
}

}  // namespace detail

inline Trajectory reduced_density_trajectory(const DensityMatrix& rho0, const std::vector<double>& times,
                                             const ResonanceSet& res, const SystemSpec& sys, const ThermalConfig& cfg,
                                             unsigned threads = 0)
{
    cfg.validate();
    const std::size_t n = sys.dim();
    if (rho0.dim() != n) throw Error(ErrorKind::validation, "initial state dimension does not match system");
    for (const auto& r : res.items)
        if (std::imag(r.epsilon) < -1e-10) throw Error(ErrorKind::sign_violation, "resonance with negative imaginary part");
    const SystemVector psi0 = gns_vector(rho0);
    const auto terms = detail::entry_terms(res, psi0, sys, cfg.beta);

    Trajectory out;
    out.n = n;
    out.times = times;
    out.rho.assign(times.size(), CMatrix(n, n));
    out.envelope.resize(times.size());
    out.rates = rates(res);
    for (const auto& et : terms) {
        double s = 0.0;
        for (const auto& a : et.amp) s += std::abs(a);
        out.amplitude_bound = std::max(out.amplitude_bound, s);
    }
    parallel_for(times.size(), [&](std::size_t ti) {
        const double t = times[ti];
        CMatrix& rho = out.rho[ti];
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m; k < n; ++k) {
                const auto& et = terms[m * n + k];
                cplx v = 0.0;
                for (std::size_t j = 0; j < et.eps.size(); ++j) v += std::exp(cplx(0.0, t) * et.eps[j]) * et.amp[j];
                rho(m, k) = v;
            }
        double trace = 0.0;
        for (std::size_t m = 0; m + 1 < n; ++m) {
            rho(m, m) = std::real(rho(m, m));
            trace += std::real(rho(m, m));
        }
        rho(n - 1, n - 1) = 1.0 - trace;
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m + 1; k < n; ++k) rho(k, m) = std::conj(rho(m, k));
        out.envelope[ti] = remainder_envelope(res, cfg.omega_prime, t);
    }, threads);
    return out;
}

}  // namespace resonance
