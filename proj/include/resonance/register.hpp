#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "resonance/dynamics.hpp"
#include "resonance/lso.hpp"
#include "resonance/model.hpp"
#include "resonance/spectral.hpp"
#include "resonance/types.hpp"

namespace resonance {

// Multi-index m in {0,1}^L packed with qubit 0 as the most significant bit,
// so dense matrices agree with the Kronecker product rho_0 (x) rho_1 (x) ...
inline int register_bit(std::uint64_t m, std::size_t j, std::size_t L)
{
    return static_cast<int>((m >> (L - 1 - j)) & 1u);
}

inline constexpr std::size_t default_dense_cap = 10;
inline constexpr std::size_t collective_cap = 12;

class IndependentRegisterTrajectory {
public:
    explicit IndependentRegisterTrajectory(std::vector<Trajectory> qubits) : qubits_(std::move(qubits))
    {
        if (qubits_.empty()) throw Error(ErrorKind::validation, "register needs at least one qubit", "register.L");
        for (const auto& q : qubits_) {
            if (q.n != 2) throw Error(ErrorKind::validation, "register factors must be qubits", "register.G");
            if (q.times.size() != qubits_.front().times.size())
                throw Error(ErrorKind::validation, "register factors must share a time grid");
        }
    }

    std::size_t size() const { return qubits_.size(); }
    const std::vector<double>& times() const { return qubits_.front().times; }
    const Trajectory& qubit(std::size_t j) const { return qubits_.at(j); }

    // [rho_t]_{m,n} = prod_j [rho_{j,t}]_{m_j, n_j}
    cplx entry(std::size_t ti, std::uint64_t m, std::uint64_t n) const
    {
        const std::size_t L = qubits_.size();
        cplx v = 1.0;
        for (std::size_t j = 0; j < L; ++j) v *= qubits_[j].rho.at(ti)(register_bit(m, j, L), register_bit(n, j, L));
        return v;
    }

    CMatrix dense(std::size_t ti, std::size_t cap = default_dense_cap) const
    {
        const std::size_t L = qubits_.size();
        if (L > cap) throw Error(ErrorKind::dimension_cap, "register too large for dense output; use entry()", "register.L");
        const std::uint64_t dim = std::uint64_t{1} << L;
        CMatrix out(dim, dim);
        for (std::uint64_t m = 0; m < dim; ++m)
            for (std::uint64_t n = 0; n < dim; ++n) out(m, n) = entry(ti, m, n);
        return out;
    }

private:
    std::vector<Trajectory> qubits_;
};

// Each qubit evolves through the single-qubit resonance pipeline with its own reservoir.
inline IndependentRegisterTrajectory independent_register_trajectory(const std::vector<SystemSpec>& qubits,
                                                                     const std::vector<DensityMatrix>& rho0,
                                                                     const std::vector<double>& times,
                                                                     const CorrelationSet& corr, const ThermalConfig& cfg)
{
    if (qubits.size() != rho0.size())
        throw Error(ErrorKind::validation, "one initial state per qubit is required", "register.initial_state");
    std::vector<Trajectory> parts;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        if (qubits[j].dim() != 2) throw Error(ErrorKind::validation, "register factors must be qubits", "register.G");
        const auto res = resonances(qubits[j], corr, cfg.lambda);
        parts.push_back(reduced_density_trajectory(rho0[j], times, res, qubits[j], cfg));
    }
    return IndependentRegisterTrajectory(std::move(parts));
}

struct CollectiveSystem {
    SystemSpec system;
    std::vector<std::uint64_t> labels;  // multi-index of each energy-sorted basis state
};

// H = sum_j diag(0, Delta_j) on factor j and G_tot = sum_j G_j on factor j, basis sorted by energy.
inline CollectiveSystem collective_system(const std::vector<double>& deltas, const std::vector<CMatrix>& couplings)
{
    const std::size_t L = deltas.size();
    if (L < 1) throw Error(ErrorKind::validation, "register needs at least one qubit", "register.L");
    if (L > collective_cap) throw Error(ErrorKind::dimension_cap, "collective register limited to L <= 12", "register.L");
    if (couplings.size() != L) throw Error(ErrorKind::validation, "one coupling matrix per qubit", "register.G");
    for (const auto& G : couplings)
        if (G.rows() != 2 || G.cols() != 2) throw Error(ErrorKind::validation, "qubit couplings must be 2x2", "register.G");
    const std::uint64_t dim = std::uint64_t{1} << L;
    std::vector<double> energy(dim, 0.0);
    for (std::uint64_t m = 0; m < dim; ++m)
        for (std::size_t j = 0; j < L; ++j)
            if (register_bit(m, j, L)) energy[m] += deltas[j];
    std::vector<std::uint64_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::uint64_t x, std::uint64_t y) { return energy[x] < energy[y]; });

    CMatrix G(dim, dim);
    for (std::uint64_t i = 0; i < dim; ++i)
        for (std::uint64_t k = 0; k < dim; ++k) {
            const std::uint64_t m = order[i], n = order[k];
            cplx v = 0.0;
            for (std::size_t j = 0; j < L; ++j) {
                // G_j acts on bit j; the remaining bits must agree
                const std::uint64_t mask = ~(std::uint64_t{1} << (L - 1 - j)) & (dim - 1);
                if ((m & mask) != (n & mask)) continue;
                v += couplings[j](register_bit(m, j, L), register_bit(n, j, L));
            }
            G(i, k) = v;
        }
    std::vector<double> sorted(dim);
    for (std::uint64_t i = 0; i < dim; ++i) sorted[i] = energy[order[i]];
    return {SystemSpec(sorted, G), order};
}

inline CollectiveSystem collective_system(std::size_t L, double delta, const CMatrix& G)
{
    return collective_system(std::vector<double>(L, delta), std::vector<CMatrix>(L, G));
}

struct CoherentDirection {
    double e = 0.0;
    std::size_t s = 0;
    cplx delta;
    bool coherent = false;
    // eigenvector support as (label_m, label_n, coefficient)
    std::vector<std::tuple<std::uint64_t, std::uint64_t, cplx>> support;
};

struct CoherentSubspaceReport {
    double threshold = 0.0;
    std::vector<CoherentDirection> directions;
};

inline CoherentSubspaceReport coherent_subspace_report(const CollectiveSystem& reg, const CorrelationSet& corr,
                                                       double relative_threshold = 1e-10, unsigned threads = 0)
{
    const auto bohr = bohr_frequencies(reg.system);
    const auto lsos = level_shifts(reg.system, corr, bohr, threads);
    CoherentSubspaceReport out;
    out.threshold = relative_threshold;
    for (const auto& L : lsos) {
        const auto es = lso_eigensystem(L);
        const double scale = std::max(1.0, L.matrix.max_abs());
        for (std::size_t s = 0; s < es.pairs.size(); ++s) {
            CoherentDirection d;
            d.e = L.bohr.e;
            d.s = s;
            d.delta = es.pairs[s].value;
            d.coherent = std::abs(std::imag(d.delta)) < relative_threshold * scale;
            for (std::size_t i = 0; i < L.bohr.pairs.size(); ++i) {
                const cplx v = es.pairs[s].right[i];
                if (std::abs(v) > 1e-12)
                    d.support.emplace_back(reg.labels[L.bohr.pairs[i].first], reg.labels[L.bohr.pairs[i].second], v);
            }
            out.directions.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace resonance
