#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "resonance/linalg.hpp"
#include "resonance/types.hpp"

namespace resonance {

// N-level Hamiltonian diag(E_1..E_N), ascending, with Hermitian coupling G in the energy basis.
class SystemSpec {
public:
    SystemSpec(std::vector<double> energies, CMatrix coupling)
        : energies_(std::move(energies)), coupling_(std::move(coupling))
    {
        const std::size_t n = energies_.size();
        if (n < 2) throw Error(ErrorKind::validation, "system needs at least two levels", "system.energies");
        if (coupling_.rows() != n || coupling_.cols() != n)
            throw Error(ErrorKind::validation, "coupling dimension does not match energies", "system.coupling");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (energies_[i + 1] < energies_[i])
                throw Error(ErrorKind::validation, "energies must be sorted non-decreasing", "system.energies");
        for (double e : energies_)
            if (!std::isfinite(e)) throw Error(ErrorKind::validation, "non-finite energy", "system.energies");
        if (max_abs_diff(coupling_, coupling_.adjoint()) > 1e-12)
            throw Error(ErrorKind::validation, "coupling must be Hermitian", "system.coupling");
    }

    std::size_t dim() const { return energies_.size(); }
    const std::vector<double>& energies() const { return energies_; }
    const CMatrix& coupling() const { return coupling_; }

private:
    std::vector<double> energies_;
    CMatrix coupling_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho))
    {
        const std::size_t n = rho_.rows();
        if (n == 0 || rho_.cols() != n) throw Error(ErrorKind::invalid_state, "density matrix must be square");
        if (max_abs_diff(rho_, rho_.adjoint()) > 1e-12)
            throw Error(ErrorKind::invalid_state, "density matrix must be Hermitian");
        cplx tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += rho_(i, i);
        if (std::abs(tr - 1.0) > 1e-12) throw Error(ErrorKind::invalid_state, "density matrix must have unit trace");
    }
    const CMatrix& matrix() const { return rho_; }
    std::size_t dim() const { return rho_.rows(); }

private:
    CMatrix rho_;
};

// Coordinates on C^N (x) C^N, index m*N+n for phi_m (x) phi_n.
struct SystemVector {
    std::size_t n = 0;
    CVector coords;

    cplx operator()(std::size_t m, std::size_t k) const { return coords[m * n + k]; }
};

struct ThermalConfig {
    double beta = 1.0;
    double lambda = 0.0;
    double omega_prime = 1.0;

    void validate() const
    {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
        if (!std::isfinite(lambda)) throw Error(ErrorKind::validation, "lambda must be finite", "thermal.lambda");
        if (!(omega_prime > 0.0) || !(omega_prime < 2.0 * pi / beta))
            throw Error(ErrorKind::validation, "omega_prime must lie in (0, 2 pi / beta)", "thermal.omega_prime");
    }
};

// |phi_n><phi_m|
inline CMatrix rank_one(std::size_t dim, std::size_t n, std::size_t m)
{
    CMatrix p(dim, dim);
    p(n, m) = 1.0;
    return p;
}

// Apply A (x) 1 to a vector on C^N (x) C^N.
inline CVector apply_left(const CMatrix& a, const SystemVector& v)
{
    const std::size_t n = v.n;
    CVector out(n * n, 0.0);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t j = 0; j < n; ++j) {
            const cplx amj = a(m, j);
            if (amj == cplx(0.0)) continue;
            for (std::size_t k = 0; k < n; ++k) out[m * n + k] += amj * v.coords[j * n + k];
        }
    return out;
}

// Apply 1 (x) B to a vector on C^N (x) C^N.
inline CVector apply_right(const CMatrix& b, const SystemVector& v)
{
    const std::size_t n = v.n;
    CVector out(n * n, 0.0);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) out[m * n + k] += b(k, j) * v.coords[m * n + j];
    return out;
}

// Psi = sum_j sqrt(p_j) psi_j (x) C psi_j, i.e. the coordinates of rho^{1/2}.
inline SystemVector gns_vector(const DensityMatrix& rho)
{
    const std::size_t n = rho.dim();
    const auto eig = hermitian_eigen(rho.matrix());
    for (double p : eig.values)
        if (p < -1e-12) throw Error(ErrorKind::invalid_state, "density matrix is not positive semidefinite");
    SystemVector out{n, CVector(n * n, 0.0)};
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::sqrt(std::max(eig.values[j], 0.0));
        if (w == 0.0) continue;
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = 0; k < n; ++k)
                out.coords[m * n + k] += w * eig.vectors(m, j) * std::conj(eig.vectors(k, j));
    }
    return out;
}

// Boltzmann weights e^{-beta (E_j - E_1)} / Z' with energies shifted for overflow safety.
inline std::vector<double> gibbs_weights(const std::vector<double>& energies, double beta)
{
    const double e0 = *std::min_element(energies.begin(), energies.end());
    std::vector<double> w(energies.size());
    double z = 0.0;
    for (std::size_t j = 0; j < energies.size(); ++j) z += (w[j] = std::exp(-beta * (energies[j] - e0)));
    for (auto& x : w) x /= z;
    return w;
}

inline SystemVector gibbs_vector(const SystemSpec& sys, double beta)
{
    if (!(beta > 0.0)) throw Error(ErrorKind::validation, "beta must be positive", "thermal.beta");
    const std::size_t n = sys.dim();
    const auto w = gibbs_weights(sys.energies(), beta);
    SystemVector out{n, CVector(n * n, 0.0)};
    for (std::size_t j = 0; j < n; ++j) out.coords[j * n + j] = std::sqrt(w[j]);
    return out;
}

// B' with (1 (x) B') Omega = psi0: B'_{k,j} = psi0_{(j,k)} / sqrt(w_j).
inline CMatrix commutant_factor(const SystemVector& psi0, const SystemSpec& sys, double beta)
{
    const std::size_t n = sys.dim();
    if (psi0.n != n) throw Error(ErrorKind::validation, "vector dimension does not match system");
    const auto w = gibbs_weights(sys.energies(), beta);
    CMatrix b(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) b(k, j) = psi0(j, k) / std::sqrt(w[j]);
    return b;
}

struct SpinBosonParams {
    double Delta, a, b, c;
};

// Biased two-level tunneling system mapped onto energy-basis coupling entries.
inline SpinBosonParams spin_boson_map(double epsilon_bias, double delta0)
{
    if (epsilon_bias == 0.0 && delta0 == 0.0)
        throw Error(ErrorKind::validation, "bias and tunneling element cannot both vanish");
    const double Delta = std::hypot(epsilon_bias, delta0);
    if (epsilon_bias == 0.0) return {Delta, 0.0, 0.0, 0.5};
    if (delta0 == 0.0) return {Delta, -1.0, 1.0, 0.0};
    // (D0^2/e^2 + 1)^{-1/2} = |e|/Delta and (e^2/D0^2 + 1)^{-1/2} = |D0|/Delta
    const double a = -std::abs(epsilon_bias) / Delta;
    const double c = 0.5 * std::abs(delta0) / Delta;
    return {Delta, a, -a, c};
}

struct CouplingSplit {
    CMatrix diagonal, off_diagonal;
};

inline CouplingSplit coupling_split(const CMatrix& g)
{
    const std::size_t n = g.rows();
    CouplingSplit s{CMatrix(n, n), g};
    for (std::size_t i = 0; i < n; ++i) {
        s.diagonal(i, i) = g(i, i);
        s.off_diagonal(i, i) = 0.0;
    }
    return s;
}

// Qubit with H = diag(0, Delta) and G = [[a, c], [conj c, b]].
inline SystemSpec qubit(double Delta, double a, double b, cplx c)
{
    return SystemSpec({0.0, Delta}, CMatrix{{a, c}, {std::conj(c), b}});
}

}  // namespace resonance
