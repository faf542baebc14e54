#pragma once

#include <cmath>
#include <vector>

#include "resonance/model.hpp"
#include "resonance/quadrature.hpp"
#include "resonance/spectral.hpp"
#include "resonance/types.hpp"

namespace resonance {

inline DensityMatrix gibbs_reduced(const SystemSpec& sys, double beta)
{
    if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    const auto w = gibbs_weights(sys.energies(), beta);
    CMatrix rho(w.size(), w.size());
    double tail = 1.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        rho(i, i) = w[i];
        tail -= w[i];
    }
    rho(w.size() - 1, w.size() - 1) = tail;
    return DensityMatrix(rho);
}

namespace detail {

// Bose occupation 1 / (e^{beta w} - 1).
inline double planck(double beta, double w) { return 1.0 / std::expm1(beta * w); }

// (1 - e^{-k x}) / x with the x -> 0 limit k.
inline double one_minus_exp_over(double k, double x)
{
    if (x == 0.0) return k;
    return -std::expm1(-k * x) / x;
}

}  // namespace detail

// B_1 and B_2 in their literal form (apparent poles at w = Delta left in place).
inline double b1_literal(double w, double Delta, double beta)
{
    const double mu = detail::planck(beta, w);
    const double ew = std::exp(0.5 * beta * w), emw = std::exp(-0.5 * beta * w);
    const double ed = std::exp(0.5 * beta * Delta), emd = std::exp(-0.5 * beta * Delta);
    return mu / (w * (w + Delta)) * (ew * (ew - 1.0) - emd * (emd - 1.0) + ed - 1.0) +
           (1.0 + mu) / (w * (w - Delta)) * (emw - emd) * (emd + emw - 1.0) -
           (emd - 1.0) / (w * Delta) * (emd - mu - 1.0) + mu / (Delta * (w + Delta)) * (emd - 1.0);
}

inline double b2_literal(double w, double Delta, double beta)
{
    const double mu = detail::planck(beta, w);
    const double emw = std::exp(-0.5 * beta * w);
    const double ed = std::exp(0.5 * beta * Delta);
    return (1.0 + mu) / (w * (w + Delta)) * ((emw - ed) * (emw - ed) + ed - 1.0) +
           mu / (w * (w - Delta)) * (std::exp(beta * w) - ed * (ed - 1.0) - 1.0) + ed * (ed - 1.0) / (w * Delta) +
           (1.0 + mu) / (Delta * (w + Delta)) * (ed - 1.0) - mu / (Delta * (w - Delta)) * (ed - 1.0);
}

// B_1 with the (w - Delta)^{-1} group written as a difference quotient and
// mu e^{bw/2}(e^{bw/2} - 1) = 1 / (1 + e^{-bw/2}) to avoid overflow.
inline double b1(double w, double Delta, double beta)
{
    const double mu = detail::planck(beta, w);
    const double emw = std::exp(-0.5 * beta * w);
    const double ed = std::exp(0.5 * beta * Delta), emd = std::exp(-0.5 * beta * Delta);
    const double x = w - Delta;
    // (e^{-bw/2} - e^{-bD/2}) / (w - D) = -e^{-bD/2} (1 - e^{-bx/2}) / x
    const double quotient = -emd * detail::one_minus_exp_over(0.5 * beta, x);
    return (1.0 / (1.0 + emw) + mu * (-emd * (emd - 1.0) + ed - 1.0)) / (w * (w + Delta)) +
           (1.0 + mu) / w * quotient * (emd + emw - 1.0) - (emd - 1.0) / (w * Delta) * (emd - mu - 1.0) +
           mu / (Delta * (w + Delta)) * (emd - 1.0);
}

// B_2 with its two (w - Delta)^{-1} terms combined:
// mu / w [e^{bD} expm1(b x) / x - (e^{bD/2} - 1) / D],  mu e^{bD} expm1(bx) = (1 - e^{-bx}) / (1 - e^{-bw}).
inline double b2(double w, double Delta, double beta)
{
    const double mu = detail::planck(beta, w);
    const double emw = std::exp(-0.5 * beta * w);
    const double ed = std::exp(0.5 * beta * Delta);
    const double x = w - Delta;
    const double grouped = detail::one_minus_exp_over(beta, x) / -std::expm1(-beta * w) / w - mu * (ed - 1.0) / (w * Delta);
    return (1.0 + mu) / (w * (w + Delta)) * ((emw - ed) * (emw - ed) + ed - 1.0) + grouped +
           ed * (ed - 1.0) / (w * Delta) + (1.0 + mu) / (Delta * (w + Delta)) * (ed - 1.0);
}

struct EquilibriumReport {
    DensityMatrix gibbs;
    cplx offdiag_12;
    double integral_b1 = 0.0;  // <g, B_1 g>
    double integral_b2 = 0.0;  // <g, B_2 g>
};

// <g, B g> = area int r^{d-1} |g|^2 B(r) dr, with a divergence probe at the origin.
inline double b_integral(const FormFactor& g, double Delta, double beta, int which, const quad::Options& opt = {})
{
    const double R = g.cutoff();
    auto f = [&](double r) {
        const double b = which == 1 ? b1(r, Delta, beta) : b2(r, Delta, beta);
        return g.area() * std::pow(r, g.dimension() - 1) * g.abs2(r) * b;
    };
    if (detail::diverges_at_origin(f, R))
        throw Error(ErrorKind::divergent_integral,
                    std::string("<g, B_") + (which == 1 ? "1" : "2") + " g> diverges at the origin");
    return quad::integrate_or_throw(f, detail::radial_points(g, {Delta}), opt, which == 1 ? "B1" : "B2");
}

// [rho_inf]_{1,2} = (c lambda^2 / Z) <g, (a e^{-b E_1} B_1 + b e^{-b E_2} B_2) g>.
inline EquilibriumReport equilibrium_offdiagonal_qubit(const SystemSpec& sys, const FormFactor& g, double beta,
                                                       double lambda)
{
    if (sys.dim() != 2) throw Error(ErrorKind::wrong_arity, "equilibrium off-diagonal formula needs a qubit");
    const double Delta = sys.energies()[1] - sys.energies()[0];
    if (!(Delta > 0.0)) throw Error(ErrorKind::validation, "equilibrium off-diagonal formula needs a positive gap");
    EquilibriumReport out{gibbs_reduced(sys, beta), 0.0};
    const double a = std::real(sys.coupling()(0, 0));
    const double b = std::real(sys.coupling()(1, 1));
    const cplx c = sys.coupling()(0, 1);
    if (c == cplx(0.0) || (a == 0.0 && b == 0.0)) return out;
    const auto w = gibbs_weights(sys.energies(), beta);
    if (a != 0.0) out.integral_b1 = b_integral(g, Delta, beta, 1);
    if (b != 0.0) out.integral_b2 = b_integral(g, Delta, beta, 2);
    out.offdiag_12 = lambda * lambda * (c * (a * w[0] * out.integral_b1 + b * w[1] * out.integral_b2));
    return out;
}

}  // namespace resonance
