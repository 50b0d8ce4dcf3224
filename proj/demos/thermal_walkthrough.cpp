// Steady state of the quartic resonator at one working point, compared with
// the naive thermal dissipator, plus a handful of filtered correlations.

#include "anharm/anharm.hpp"

#include <cstdio>

int main() {
    using namespace anharm;

    ModelSpec spec;
    spec.model = Model::quartic;
    spec.U = 1e-3;
    spec.dim = 60;
    const double T = 0.3, gamma_a = 1e-4, Gamma = 5e-4;

    const EigenSystem es = solve_model(spec, 10);
    const RateTable rates = build_eigenbasis_dissipator(es, gamma_a, T);
    const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
    const DensityVector v = steady_state(L);
    const DensityMatrix rho{unvectorize(v, es.keep()), Basis::eigen};

    std::printf("trace distance to canonical state: %.3e\n", trace_distance(rho, canonical_state(es, T)));

    const auto x = frequency_components(es, Quadrature::X, Split::quadrature);
    const auto xdot = frequency_components(es, Quadrature::X);
    std::printf("<X- X+>          = %.5f\n", mean_intensity(rho, x));
    std::printf("g2 of dX/dt (0)  = %.5f\n", g2_zero_delay(rho, xdot));

    // The textbook dissipator ignores U and always gives thermal statistics.
    const auto naive = build_naive_dissipator(gamma_a, T, 40);
    const LiouvillianMatrix Ln = assemble_liouvillian(build_hamiltonian({1.0, Model::kerr, 0.5, {}, 40}).elements, naive, Basis::fock);
    const DensityMatrix rn{unvectorize(steady_state(Ln), 40), Basis::fock};
    std::printf("naive dissipator, Kerr U=0.5: g2 = %.6f\n", g_n_statistic(rn, build_ladder_operators(40).a, 2));

    const ReorderingMatrices Tr = build_reordering_matrices(x.plus, es.keep());
    SensorCalculator calc(L, Tr, v);
    std::printf("\n  w1        w2        g2(w1;w2)\n");
    const double d10 = es.delta(1, 0), d21 = es.delta(2, 1), d32 = es.delta(3, 2);
    const double pairs[][2] = {{d10, d10}, {d10, d21}, {d21, d32}, {d10, es.delta(2, 0) - d10 + 2e-3}};
    for (const auto& p : pairs) {
        std::printf("  %.6f  %.6f  %.4f\n", p[0], p[1], calc.two_photon_correlation({p[0], Gamma, 1.0}, {p[1], Gamma, 1.0}));
    }
    return 0;
}
