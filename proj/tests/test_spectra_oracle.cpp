// Reordering matrices, resolvent, sensor spectra and the independent oracles.

#include "anharm/field.hpp"
#include "anharm/oracle.hpp"
#include "anharm/spectra.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace anharm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelSpec quartic(double U, Index dim = 60) {
    ModelSpec s;
    s.U = U;
    s.dim = dim;
    return s;
}

ModelSpec kerr(double U, Index dim = 40) {
    ModelSpec s;
    s.model = Model::kerr;
    s.U = U;
    s.dim = dim;
    return s;
}

struct System {
    EigenSystem eig;
    LiouvillianMatrix L;
    DensityVector v;
    FockOperator xp;
    ReorderingMatrices T;
    RateTable rates;
};

System make_system(const ModelSpec& spec, Index keep, double gamma, double T,
                   Split split = Split::quadrature) {
    System s;
    s.eig = solve_model(spec, keep);
    s.rates = build_eigenbasis_dissipator(s.eig, gamma, T);
    s.L = assemble_liouvillian(s.eig.energies, s.rates);
    s.v = steady_state(s.L);
    s.xp = frequency_components(s.eig, Quadrature::X, split).plus;
    s.T = build_reordering_matrices(s.xp, keep);
    return s;
}

Vector scrambled(Index n, int seed) {
    Vector b(n);
    for (Index i = 0; i < n; ++i) b[i] = complex(std::sin(0.37 * i + seed), std::cos(1.1 * i - seed));
    return b;
}

// Harmonic limit of the eigenbasis dissipator. Each coherence between levels j
// and j+1 relaxes on its own at half the summed out-rates of the two levels, so
// the filtered spectrum is a sum of Lorentzians weighted by (j+1) P_{j+1}.
double harmonic_eigen_spectrum(const RealVector& pops, double gamma, double T, double Gamma, double omega) {
    const Index K = pops.size();
    const double nb = bose_occupation(1.0, T);
    auto out = [&](Index n) { return gamma * (n * (1.0 + nb) + (n + 1 < K ? (n + 1) * nb : 0.0)); };
    double S = 0.0;
    for (Index j = 0; j + 1 < K; ++j) {
        const double w = Gamma / 2.0 + (out(j) + out(j + 1)) / 2.0;
        S += (j + 1) * pops[j + 1] * w / ((omega - 1.0) * (omega - 1.0) + w * w);
    }
    return S / std::numbers::pi;
}

// Coherent damping of a in the Fock basis: a single Lorentzian.
struct NaiveHarmonic {
    LiouvillianMatrix L;
    DensityVector v;
    ReorderingMatrices T;
    double n;
};

NaiveHarmonic naive_harmonic(Index dim, double gamma, double T) {
    NaiveHarmonic h;
    h.L = assemble_liouvillian(build_hamiltonian(quartic(0.0, dim)).elements,
                               build_naive_dissipator(gamma, T, dim), Basis::fock);
    h.v = steady_state(h.L);
    const FockOperator a = build_ladder_operators(dim).a;
    h.T = build_reordering_matrices(a, dim);
    h.n = (unvectorize(h.v, dim) * a.elements.adjoint() * a.elements).trace().real();
    return h;
}

} // namespace

TEST_CASE("reordering matrices", "[spectra]") {
    const System s = make_system(quartic(0.05), 6, 1e-3, 0.5);
    const Matrix rho = unvectorize(s.v, 6);
    const Matrix xm = s.xp.elements.adjoint();
    CHECK((unvectorize(s.T.t_plus * s.v, 6) - s.xp.elements * rho).norm() < 1e-14);
    CHECK((unvectorize(s.T.t_minus * s.v, 6) - rho * xm).norm() < 1e-14);
    const complex n = vector_trace(s.T.t_minus * (s.T.t_plus * s.v), 6);
    CHECK_THAT(n.real(), WithinRel((rho * xm * s.xp.elements).trace().real(), 1e-12));
    // T+ v and T- v are adjoints of each other for Hermitian rho.
    CHECK((unvectorize(s.T.t_plus * s.v, 6).adjoint() - unvectorize(s.T.t_minus * s.v, 6)).norm() < 1e-14);

    CHECK_THROWS_AS(build_reordering_matrices(s.xp, 5), ContractViolation);
    const ReorderingMatrices fock_T = build_reordering_matrices(FockOperator(s.xp.elements, Basis::fock), 6);
    CHECK_THROWS_AS(SensorCalculator(s.L, fock_T, s.v), ContractViolation);
}

TEST_CASE("resolvent", "[spectra]") {
    for (Index keep : {2, 10}) { // dense and sparse factorization paths
        const System s = make_system(quartic(0.05), keep, 1e-2, 0.5);
        const Vector b = scrambled(s.L.size(), int(keep));
        Resolvent R(s.L);

        const complex big(1e8, 0.0);
        CHECK((R.apply(big, b) + b / big).norm() < 1e-6 * (b / big).norm());

        const complex z1(-0.01, 0.9), z2(-0.02, -0.4);
        const Vector lhs = R.apply(z1, R.apply(z2, b));
        const Vector rhs = (R.apply(z1, b) - R.apply(z2, b)) / (z1 - z2);
        CHECK((lhs - rhs).norm() < 1e-9 * rhs.norm());

        const std::size_t before = R.factorizations();
        R.apply(z1, scrambled(s.L.size(), 7));
        CHECK(R.factorizations() == before);
        R.apply(complex(-0.03, 0.1), b, false);
        R.apply(complex(-0.03, 0.1), b, false);
        CHECK(R.factorizations() == before + 2);
    }
    SECTION("singular shift") {
        const System s = make_system(quartic(0.05), 2, 1e-2, 0.5);
        CHECK_THROWS_AS(resolvent_apply(s.L, 0.0, scrambled(4, 1)), SolverError);
        CHECK_THROWS_AS(resolvent_apply(s.L, 0.1, scrambled(3, 1)), InvalidDimension);
    }
}

TEST_CASE("one-photon spectrum", "[spectra]") {
    SECTION("harmonic oscillator: one Lorentzian per ladder coherence") {
        const double gamma = 1e-3, Gamma = 5e-3, T = 0.3;
        const System s = make_system(quartic(0.0, 40), 14, gamma, T);
        SensorCalculator calc(s.L, s.T, s.v);
        const RealVector pops = unvectorize(s.v, 14).diagonal().real();
        for (double omega : {0.95, 0.99, 0.998, 1.0, 1.003, 1.02, 1.2})
            CHECK_THAT(calc.one_photon_spectrum({omega, Gamma}),
                       WithinRel(harmonic_eigen_spectrum(pops, gamma, T, Gamma, omega), 1e-8));
    }
    SECTION("coherently damped oscillator gives a Lorentzian of half-width (gamma + Gamma) / 2") {
        const double gamma = 1e-3, Gamma = 5e-3, T = 0.3;
        const NaiveHarmonic h = naive_harmonic(30, gamma, T);
        CHECK_THAT(h.n, WithinRel(bose_occupation(1.0, T), 1e-10));
        SensorCalculator calc(h.L, h.T, h.v);
        const double w = (gamma + Gamma) / 2.0;
        for (double omega : {0.95, 0.99, 0.998, 1.0, 1.003, 1.02, 1.2}) {
            const double expect = h.n / std::numbers::pi * w / ((omega - 1.0) * (omega - 1.0) + w * w);
            CHECK_THAT(calc.one_photon_spectrum({omega, Gamma}), WithinRel(expect, 1e-8));
        }
    }
    SECTION("integrated spectrum recovers the intensity") {
        const System s = make_system(kerr(0.05), 6, 1e-3, 0.3);
        SensorCalculator calc(s.L, s.T, s.v);
        const double Gamma = 2e-3, step = 2e-4;
        double sum = 0.0;
        for (double w = 0.5; w <= 1.8; w += step) sum += calc.one_photon_spectrum({w, Gamma}) * step;
        const Matrix rho = unvectorize(s.v, 6);
        const double n = (rho * s.xp.elements.adjoint() * s.xp.elements).trace().real();
        CHECK_THAT(sum, WithinRel(n, 1e-2));
    }
    SECTION("Kerr peaks sit on the ladder transitions and weaken up the ladder") {
        const double U = std::exp(-1.0);
        const System s = make_system(kerr(U), 10, 1e-3, 1.0);
        SensorCalculator calc(s.L, s.T, s.v);
        const double G = 1e-3;
        const auto peaks = kerr_transition_energies(1.0, U, 3);
        double prev = INFINITY;
        for (double p : peaks) {
            const double at = calc.one_photon_spectrum({p, G});
            CHECK(at > calc.one_photon_spectrum({p - 0.01, G}));
            CHECK(at > calc.one_photon_spectrum({p + 0.01, G}));
            CHECK(at < prev);
            prev = at;
        }
    }
    SECTION("spectrum is non-negative and the prefactor is omega^2") {
        const System s = make_system(quartic(0.1), 6, 1e-3, 0.3, Split::derivative);
        SensorCalculator calc(s.L, s.T, s.v);
        for (double w = 0.5; w < 2.0; w += 0.05) {
            const double S = calc.one_photon_spectrum({w, 5e-3});
            CHECK(S >= 0.0);
            CHECK_THAT(calc.one_photon_spectrum({w, 5e-3}, Prefactor::omega_squared), WithinRel(S * w * w, 1e-14));
        }
        CHECK_THROWS_AS(calc.one_photon_spectrum({1.0, 0.0}), InvalidParameter);
    }
}

TEST_CASE("QRF oracle", "[oracle]") {
    SECTION("harmonic closed forms") {
        const double gamma = 1e-2, Gamma = 2e-2, T = 0.3;
        const System s = make_system(quartic(0.0, 40), 8, gamma, T);
        const std::vector<double> grid{0.9, 0.98, 1.0, 1.01, 1.1};
        const QrfSpectrum q = qrf_spectrum(s.L, s.xp.adjoint(), s.xp, s.v, grid, Gamma);
        const RealVector pops = unvectorize(s.v, 8).diagonal().real();
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK_THAT(q.S[i], WithinRel(harmonic_eigen_spectrum(pops, gamma, T, Gamma, grid[i]), 1e-6));

        const NaiveHarmonic h = naive_harmonic(20, gamma, T);
        const FockOperator a = build_ladder_operators(20).a;
        const QrfSpectrum qn = qrf_spectrum(h.L, a.adjoint(), a, h.v, grid, Gamma);
        const double w = (gamma + Gamma) / 2.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dw = grid[i] - 1.0;
            CHECK_THAT(qn.S[i], WithinRel(h.n / std::numbers::pi * w / (dw * dw + w * w), 1e-6));
        }
    }
    SECTION("matches the resolvent formula") {
        const System s = make_system(quartic(0.1), 6, 1e-3, 0.3, Split::derivative);
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i) grid.push_back(1.1 + 0.05 * i);
        const double Gamma = 5e-3;
        const QrfSpectrum q = qrf_spectrum(s.L, s.xp.adjoint(), s.xp, s.v, grid, Gamma);
        SensorCalculator calc(s.L, s.T, s.v);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK_THAT(calc.one_photon_spectrum({grid[i], Gamma}), WithinRel(q.S[i], 1e-6));
    }
    SECTION("undamped dynamics is refused") {
        const Matrix H = build_hamiltonian(kerr(0.1, 3)).elements;
        const auto L = assemble_liouvillian(H, std::span<const Channel>{}, Basis::fock);
        Matrix rho = Matrix::Zero(3, 3);
        rho(0, 0) = 0.6;
        rho(1, 1) = 0.4;
        const FockOperator a = build_ladder_operators(3).a;
        CHECK_THROWS_AS(qrf_spectrum(L, a.adjoint(), a, vectorize(rho), {1.0}, 0.0), IntegrationError);
    }
}

TEST_CASE("two-photon correlations", "[spectra]") {
    const System s = make_system(quartic(1e-3), 10, 1e-4, 0.3);
    SensorCalculator calc(s.L, s.T, s.v);
    const double G = 5e-4;
    const double d10 = s.eig.delta(1, 0);

    SECTION("symmetric under sensor exchange") {
        for (auto [a, b] : {std::pair{1.005, 1.02}, std::pair{1.011, 1.03}, std::pair{1.0, 1.04}}) {
            CHECK_THAT(calc.two_photon_correlation({a, G}, {b, G}), WithinRel(calc.two_photon_correlation({b, G}, {a, G}), 1e-9));
        }
    }
    SECTION("independent of the formal coupling") {
        const double g1 = calc.two_photon_correlation({1.01, G, 1.0}, {1.02, G, 1.0});
        const double g2 = calc.two_photon_correlation({1.01, G, 1e-3}, {1.02, G, 7.0});
        CHECK_THAT(g1, WithinRel(g2, 1e-12));
        const auto r = calc.two_photon({1.01, G, 1e-3}, {1.02, G, 1e-3});
        CHECK_THAT(r.n1, WithinRel(1e-6 * calc.one_photon_chain(1.01, G).real(), 1e-12));
    }
    SECTION("antibunched on the first transition, bunched on the diagonal away from peaks") {
        CHECK(calc.two_photon_correlation({d10, G}, {d10, G}) < 0.2);
        for (double w : {1.006, 1.04}) {
            const double diag = calc.two_photon_correlation({w, G}, {w, G});
            CHECK(diag > calc.two_photon_correlation({w, G}, {w + 3 * G, G}));
            CHECK(diag > calc.two_photon_correlation({w, G}, {w - 3 * G, G}));
        }
    }
    SECTION("positive everywhere on a coarse grid") {
        for (double a = 1.003; a < 1.045; a += 0.006)
            for (double b = 1.003; b < 1.045; b += 0.006) CHECK(calc.two_photon_correlation({a, G}, {b, G}) > 0.0);
    }
}

TEST_CASE("correlation map", "[spectra]") {
    const System s = make_system(quartic(1e-3), 10, 1e-4, 0.3);
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(1.003 + i * 0.04 / 11.0);
    const CorrelationMap one = correlation_map(s.L, s.T, s.v, grid, grid, 5e-4, 5e-4, 1, &s.eig);
    const CorrelationMap many = correlation_map(s.L, s.T, s.v, grid, grid, 5e-4, 5e-4, 3, &s.eig);
    CHECK((one.values - many.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((one.values - one.values.transpose()).cwiseAbs().maxCoeff() < 1e-9 * one.max_value);
    CHECK(one.max_imag_residue < 1e-8);
    CHECK(one.min_value == one.values.minCoeff());
    CHECK_FALSE(one.leapfrogs.empty());
    bool eps20 = false;
    for (const auto& l : one.leapfrogs) eps20 = eps20 || (l.j == 2 && std::abs(l.sum - s.eig.delta(2, 0)) < 1e-14);
    CHECK(eps20);
    CHECK_FALSE(one.cascades.empty());
    for (const auto& c : one.cascades) CHECK(c.omega1 > c.omega2);

    CHECK_THROWS_AS(correlation_map(s.L, s.T, s.v, {}, grid, 5e-4, 5e-4), InvalidParameter);
    CHECK_THROWS_AS(correlation_map(s.L, s.T, s.v, {1.02, 1.01}, grid, 5e-4, 5e-4), InvalidParameter);
    CHECK_THROWS_AS(correlation_map(s.L, s.T, s.v, grid, grid, 0.0, 5e-4), InvalidParameter);

    const ReorderingMatrices zero = build_reordering_matrices(FockOperator(Matrix::Zero(10, 10), Basis::eigen), 10);
    CHECK_THROWS_AS(correlation_map(s.L, zero, s.v, grid, grid, 5e-4, 5e-4), UndefinedStatistic);
}

TEST_CASE("augmented two-sensor oracle", "[oracle]") {
    const double gamma = 0.01, T = 0.6, G = 0.02;
    const System s = make_system(kerr(0.05, 4), 4, gamma, T);
    SensorCalculator calc(s.L, s.T, s.v);
    const double eps = 0.25 * max_oracle_epsilon(G, gamma);

    SECTION("agrees with the resolvent formula") {
        for (auto [a, b] : {std::pair{1.0, 1.1}, std::pair{1.05, 1.05}, std::pair{1.2, 0.98}}) {
            const auto o = augmented_two_sensor(s.eig.energies, s.rates, s.xp, {a, G, eps}, {b, G, eps}, gamma);
            CHECK(o.weak_coupling);
            CHECK(o.augmented_dim == 16);
            CHECK_THAT(o.g2, WithinRel(calc.two_photon_correlation({a, G}, {b, G}), 1e-2));
            CHECK_THAT(o.n1, WithinRel(calc.sensor_occupation({a, G, eps}), 1e-2));
        }
    }
    SECTION("sensor population scales as eps^2") {
        const auto o1 = augmented_two_sensor(s.eig.energies, s.rates, s.xp, {1.1, G, eps}, {1.0, G, eps}, gamma);
        const auto o2 = augmented_two_sensor(s.eig.energies, s.rates, s.xp, {1.1, G, eps / 2}, {1.0, G, eps / 2}, gamma);
        CHECK_THAT(o1.n1 / o2.n1, WithinRel(4.0, 1e-2));
    }
    SECTION("filter limits") {
        // A very broad filter passes the whole positive-frequency field.
        const DensityMatrix rho{unvectorize(s.v, 4), Basis::eigen};
        const double unfiltered = g2_zero_delay(rho, frequency_components(s.eig, Quadrature::X, Split::quadrature));
        const double broad = calc.two_photon_correlation({1.1, 5.0}, {1.1, 5.0});
        const double narrow = calc.two_photon_correlation({1.1, 0.2}, {1.1, 0.2});
        CHECK_THAT(broad, WithinRel(unfiltered, 1e-2));
        CHECK(std::abs(narrow - unfiltered) > std::abs(broad - unfiltered));
    }
    SECTION("refusals") {
        CHECK_THROWS_AS(augmented_two_sensor(s.eig.energies, s.rates, s.xp, {1.0, G, 2 * max_oracle_epsilon(G, gamma)},
                                             {1.0, G, eps}, gamma),
                        InvalidParameter);
        const System big = make_system(kerr(0.05, 12), 9, gamma, T);
        CHECK_THROWS_AS(augmented_two_sensor(big.eig.energies, big.rates, big.xp, {1.0, G, eps}, {1.0, G, eps}, gamma),
                        ContractViolation);
    }
}
