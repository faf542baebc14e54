#pragma once

#include <complex>
#include <random>
#include <vector>

#include <catch_amalgamated.hpp>

#include "resonance/resonance.hpp"

namespace testutil {

using resonance::CMatrix;
using resonance::cplx;
using resonance::CVector;

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20260415);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline cplx cuniform() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

inline CMatrix random_matrix(std::size_t n)
{
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cuniform();
    return m;
}

inline CMatrix random_hermitian(std::size_t n)
{
    const CMatrix a = random_matrix(n);
    return (a + a.adjoint()) * cplx(0.5);
}

inline resonance::DensityMatrix random_density(std::size_t n)
{
    const CMatrix a = random_matrix(n);
    CMatrix rho = a * a.adjoint();
    cplx tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += rho(i, i);
    rho *= 1.0 / std::real(tr);
    for (std::size_t i = 0; i < n; ++i) rho(i, i) = std::real(rho(i, i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) rho(j, i) = std::conj(rho(i, j));
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) t += std::real(rho(i, i));
    rho(n - 1, n - 1) = 1.0 - t;
    return resonance::DensityMatrix(rho);
}

inline std::vector<double> random_energies(std::size_t n)
{
    std::vector<double> e(n);
    for (auto& x : e) x = uniform(0.0, 3.0);
    std::sort(e.begin(), e.end());
    return e;
}

inline cplx trace(const CMatrix& m)
{
    cplx t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
