#include "helpers.hpp"

#include <Eigen/Dense>

using namespace resonance;
using namespace testutil;

namespace {

CVector psi_state(std::initializer_list<cplx> c) { return CVector(c); }

}  // namespace

TEST_CASE("SystemSpec validates its invariants", "[model]")
{
    CHECK_NOTHROW(SystemSpec({0.0, 1.0}, CMatrix{{1.0, cplx(0.0, 1.0)}, {cplx(0.0, -1.0), 0.0}}));
    CHECK_THROWS_AS(SystemSpec({1.0, 0.0}, CMatrix(2, 2)), Error);
    CHECK_THROWS_AS(SystemSpec({0.0}, CMatrix(1, 1)), Error);
    CHECK_THROWS_AS(SystemSpec({0.0, 1.0}, CMatrix(3, 3)), Error);
    CHECK_THROWS_AS(SystemSpec({0.0, 1.0}, CMatrix{{0.0, 1.0}, {2.0, 0.0}}), Error);
}

TEST_CASE("DensityMatrix validates Hermiticity and trace", "[model]")
{
    CHECK_THROWS_AS(DensityMatrix(CMatrix{{0.5, 0.1}, {0.2, 0.5}}), Error);
    CHECK_THROWS_AS(DensityMatrix(CMatrix{{0.5, 0.0}, {0.0, 0.6}}), Error);
    try {
        gns_vector(DensityMatrix(CMatrix{{1.2, 0.0}, {0.0, -0.2}}));
        FAIL("expected invalid_state");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_state);
    }
}

TEST_CASE("ThermalConfig requires omega_prime below 2 pi / beta", "[model]")
{
    ThermalConfig ok{1.0, 0.01, 1.0};
    CHECK_NOTHROW(ok.validate());
    ThermalConfig bad{1.0, 0.01, 7.0};
    CHECK_THROWS_AS(bad.validate(), Error);
    ThermalConfig neg{-1.0, 0.01, 1.0};
    try {
        neg.validate();
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.field() == "thermal.beta");
    }
}

TEST_CASE("gns_vector of pure and mixed states", "[model]")
{
    const auto p = gns_vector(DensityMatrix(CMatrix{{1.0, 0.0}, {0.0, 0.0}}));
    CHECK(std::abs(p.coords[0] - 1.0) < 1e-15);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(p.coords[i]) < 1e-15);

    const auto m = gns_vector(DensityMatrix(CMatrix{{0.5, 0.0}, {0.0, 0.5}}));
    CHECK(std::abs(m.coords[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(m.coords[3] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(m.coords[1]) < 1e-15);
    CHECK(std::abs(m.coords[2]) < 1e-15);
}

TEST_CASE("illustration vector and gns_vector represent the same reduced state", "[model]")
{
    const DensityMatrix rho(CMatrix{{0.5, 0.5}, {0.5, 0.5}});
    const SystemVector ill{2, psi_state({0.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0)})};
    const SystemVector g = gns_vector(rho);
    for (int k = 0; k < 20; ++k) {
        const CMatrix A = random_matrix(2);
        const cplx tr = trace(rho.matrix() * A);
        CHECK(std::abs(dot(g.coords, apply_left(A, g)) - tr) < 1e-12);
        CHECK(std::abs(dot(ill.coords, apply_left(A, ill)) - tr) < 1e-12);
    }
}

TEST_CASE("trace identity <Psi, (A x 1) Psi> = Tr(rho A) for random states", "[model][property]")
{
    for (std::size_t n = 2; n <= 6; ++n)
        for (int rep = 0; rep < 10; ++rep) {
            const auto rho = random_density(n);
            const auto psi = gns_vector(rho);
            CHECK(std::abs(norm(psi.coords) - 1.0) < 1e-12);
            const CMatrix A = random_matrix(n);
            CHECK(std::abs(dot(psi.coords, apply_left(A, psi)) - trace(rho.matrix() * A)) < 1e-10);
        }
}

TEST_CASE("gns_vector agrees with an Eigen matrix square root", "[model][oracle]")
{
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4;
        const auto rho = random_density(n);
        Eigen::MatrixXcd r(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) = rho.matrix()(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
        const Eigen::MatrixXcd root = es.operatorSqrt();
        const auto psi = gns_vector(rho);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(psi(i, j) - root(i, j)) < 1e-10);
    }
}

TEST_CASE("gibbs_vector", "[model]")
{
    const SystemSpec cold({0.0, 1.0}, CMatrix(2, 2));
    const auto g = gibbs_vector(cold, 50.0);
    CHECK(std::abs(g.coords[0] - 1.0) < 1e-10);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(g.coords[i]) < 1e-10);

    const SystemSpec deg({0.0, 0.0}, CMatrix(2, 2));
    const auto d = gibbs_vector(deg, 3.0);
    CHECK(std::abs(d.coords[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(d.coords[3] - 1.0 / std::sqrt(2.0)) < 1e-15);

    const SystemSpec q({0.0, 0.8}, CMatrix(2, 2));
    const auto direct = gibbs_vector(q, 1.3);
    const auto via = gns_vector(gibbs_reduced(q, 1.3));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(direct.coords[i] - via.coords[i]) < 1e-12);
    CHECK(std::abs(norm(direct.coords) - 1.0) < 1e-15);
}

TEST_CASE("commutant_factor examples", "[model]")
{
    const double beta = 0.7;
    const SystemSpec q({0.2, 1.1}, CMatrix(2, 2));
    const double Z = std::exp(-beta * 0.2) + std::exp(-beta * 1.1);

    // pure logic state phi_j (x) phi_j
    for (std::size_t j = 0; j < 2; ++j) {
        SystemVector psi{2, CVector(4, 0.0)};
        psi.coords[j * 2 + j] = 1.0;
        const CMatrix b = commutant_factor(psi, q, beta);
        const double cj = std::sqrt(Z) * std::exp(0.5 * beta * q.energies()[j]);
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l) CHECK(std::abs(b(k, l) - (k == j && l == j ? cj : 0.0)) < 1e-12);
    }

    // (phi_1 (x) phi_2 + phi_2 (x) phi_2) / sqrt 2
    const SystemVector ill{2, psi_state({0.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0)})};
    const CMatrix b = commutant_factor(ill, q, beta);
    const double s = std::sqrt(Z / 2.0);
    CHECK(std::abs(b(0, 0)) < 1e-15);
    CHECK(std::abs(b(0, 1)) < 1e-15);
    CHECK(std::abs(b(1, 0) - s * std::exp(0.5 * beta * 0.2)) < 1e-12);
    CHECK(std::abs(b(1, 1) - s * std::exp(0.5 * beta * 1.1)) < 1e-12);

    // Omega itself
    const CMatrix id = commutant_factor(gibbs_vector(q, beta), q, beta);
    CHECK(max_abs_diff(id, CMatrix::identity(2)) < 1e-12);
}

TEST_CASE("commutant_factor reconstructs random vectors", "[model][property]")
{
    for (std::size_t n = 2; n <= 5; ++n)
        for (int rep = 0; rep < 10; ++rep) {
            const SystemSpec sys(random_energies(n), CMatrix(n, n));
            const double beta = uniform(0.1, 5.0);
            SystemVector psi{n, CVector(n * n)};
            for (auto& z : psi.coords) z = cuniform();
            const double nv = norm(psi.coords);
            for (auto& z : psi.coords) z /= nv;
            const CMatrix b = commutant_factor(psi, sys, beta);
            const CVector back = apply_right(b, gibbs_vector(sys, beta));
            for (std::size_t i = 0; i < n * n; ++i) CHECK(std::abs(back[i] - psi.coords[i]) < 1e-10);
        }
}

TEST_CASE("spin_boson_map", "[model]")
{
    const auto eq = spin_boson_map(0.9, 0.9);
    CHECK(std::abs(eq.a + 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(eq.b - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(eq.c - 1.0 / (2.0 * std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(eq.Delta - 0.9 * std::sqrt(2.0)) < 1e-15);

    const auto nc = spin_boson_map(-1.5, 0.0);
    CHECK(nc.Delta == 1.5);
    CHECK(nc.a == -1.0);
    CHECK(nc.b == 1.0);
    CHECK(nc.c == 0.0);

    const auto sym = spin_boson_map(0.0, 2.0);
    CHECK(sym.a == 0.0);
    CHECK(sym.b == 0.0);
    CHECK(sym.c == 0.5);

    CHECK_THROWS_AS(spin_boson_map(0.0, 0.0), Error);
}

TEST_CASE("spin_boson_map identities", "[model][property]")
{
    for (int k = 0; k < 100; ++k) {
        const auto p = spin_boson_map(uniform(-5.0, 5.0), uniform(-5.0, 5.0));
        CHECK(std::abs(p.a + p.b) < 1e-12);
        CHECK(std::abs(p.a * p.a + 4.0 * p.c * p.c - 1.0) < 1e-12);
    }
}

TEST_CASE("coupling_split", "[model]")
{
    const CMatrix g{{0.3, cplx(0.1, 0.2)}, {cplx(0.1, -0.2), -0.4}};
    const auto s = coupling_split(g);
    CHECK(s.diagonal(0, 0) == cplx(0.3));
    CHECK(s.diagonal(1, 1) == cplx(-0.4));
    CHECK(s.diagonal(0, 1) == cplx(0.0));
    CHECK(s.off_diagonal(0, 1) == g(0, 1));
    CHECK(s.off_diagonal(0, 0) == cplx(0.0));
    CHECK(max_abs_diff(s.diagonal + s.off_diagonal, g) == 0.0);

    const auto d = coupling_split(CMatrix::diagonal({1.0, 2.0, 3.0}));
    CHECK(d.off_diagonal.max_abs() == 0.0);
    const auto o = coupling_split(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(o.diagonal.max_abs() == 0.0);

    for (int k = 0; k < 10; ++k) {
        const CMatrix h = random_hermitian(5);
        const auto r = coupling_split(h);
        CHECK(max_abs_diff(r.diagonal + r.off_diagonal, h) == 0.0);
    }
}
