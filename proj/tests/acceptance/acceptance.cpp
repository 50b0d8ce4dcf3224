// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Tolerances are fixed here and are not configurable.

#include "anharm/anharm.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace anharm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + i * (std::log(hi) - std::log(lo)) / (n - 1)));
    return out;
}

ModelSpec kerr(double U, Index dim = 40) {
    ModelSpec s;
    s.model = Model::kerr;
    s.U = U;
    s.dim = dim;
    return s;
}

ModelSpec quartic(double U, Index dim = 60) {
    ModelSpec s;
    s.U = U;
    s.dim = dim;
    return s;
}

// States produced along the way, checked for physicality in criterion 9.
std::vector<DensityMatrix> g_states;
// The criterion-5 map, reused for the transpose check.
CorrelationMap g_map;

Outcome canonical_steady_state() {
    double worst = 0.0;
    for (double U : log_grid(std::exp(-5.0), std::exp(2.0), 5))
        for (double T : log_grid(0.1, std::exp(2.0), 5)) {
            const ThermalSolution sol = solve_canonical(kerr(U), T);
            const RateTable rates = build_eigenbasis_dissipator(sol.eigen, 1e-3, T);
            const LiouvillianMatrix L = assemble_liouvillian(sol.eigen.energies, rates);
            const DensityMatrix rho = to_density(steady_state(L), sol.eigen.keep(), Basis::eigen);
            worst = std::max(worst, trace_distance(rho, sol.rho));
            g_states.push_back(rho);
        }
    return {worst < 1e-8, fmt("max trace distance %.2e over 25 (U,T) points (tol 1e-8)", worst)};
}

Outcome naive_pathology() {
    double worst = 0.0;
    for (double U : log_grid(std::exp(-5.0), std::exp(2.0), 5))
        for (double T : log_grid(0.1, std::exp(2.0), 5)) {
            // Bose tail below e^-45 at the last retained level.
            const Index dim = static_cast<Index>(std::ceil(45.0 * T)) + 10;
            const Matrix H = build_hamiltonian(kerr(U, dim)).elements;
            const LiouvillianMatrix L = assemble_liouvillian(H, build_naive_dissipator(1e-3, T, dim), Basis::fock);
            const DensityMatrix rho = to_density(steady_state(L), dim, Basis::fock);
            worst = std::max(worst, std::abs(g_n_statistic(rho, build_ladder_operators(dim).a, 2) - 2.0));
        }
    return {worst < 1e-9, fmt("max |g2 - 2| = %.2e over 25 (U,T) points (tol 1e-9)", worst)};
}

Outcome high_T_limit() {
    const double U = std::exp(-3.0), T = std::exp(10.0);
    const RealVector p = kerr_canonical_populations(1.0, U, T);
    const double g2 = g_n_statistic(p, 2);
    const double n = mean_occupation(p);
    const Approximation approx = kerr_high_T_occupation(1.0, U, T);
    const double e1 = std::abs(g2 / (std::numbers::pi / 2.0) - 1.0);
    const double e2 = std::abs(approx.value / n - 1.0);
    return {e1 < 2e-2 && e2 < 1e-2 && approx.within_validity,
            fmt("g2 = %.5f vs pi/2 (rel %.2e, tol 2e-2); closed-form <n> = %.4f vs %.4f (rel %.2e, tol 1e-2); "
                "%lld levels",
                g2, e1, approx.value, n, e2, static_cast<long long>(p.size()))};
}

Outcome subpoissonian_boundary() {
    std::string detail;
    bool ok = true;
    for (double T : {0.1, 0.2, 0.3}) {
        const Approximation b = kerr_subpoissonian_boundary(1.0, T);
        const double g2 = kerr_canonical_g2(1.0, b.value, T);
        ok = ok && std::abs(g2 - 1.0) < 5e-2;
        detail += fmt("%sT=%.1f: U_th=%.4f g2=%.4f%s", detail.empty() ? "" : "; ", T, b.value, g2,
                      b.within_validity ? "" : " (outside stated validity)");
    }
    return {ok, detail + " (tol 5e-2)"};
}

Outcome working_point_values() {
    const double T = 0.3, gamma = 1e-4, G = 5e-4;
    const ThermalSolution sol = solve_canonical(quartic(1e-3), T, {10, 512});
    const EigenSystem& es = sol.eigen;
    const auto xq = frequency_components(es, Quadrature::X, Split::quadrature);
    const double intensity = mean_intensity(sol.rho, xq);
    const double g2 = g2_zero_delay(sol.rho, frequency_components(es, Quadrature::X));

    const RateTable rates = build_eigenbasis_dissipator(es, gamma, T);
    const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
    const DensityVector v = steady_state(L);
    g_states.push_back(to_density(v, es.keep(), Basis::eigen));
    const ReorderingMatrices Tm = build_reordering_matrices(xq.plus, es.keep());
    std::vector<double> grid;
    for (int i = 0; i < 60; ++i) grid.push_back(1.003 + 0.04 * i / 59.0);
    g_map = correlation_map(L, Tm, v, grid, grid, G, G, 0, &es);

    const bool ok = std::abs(intensity - 0.035) <= 0.002 && std::abs(g2 - 1.943) <= 0.01 &&
                    std::abs(g_map.min_value / 0.063 - 1.0) <= 0.2 &&
                    std::abs(g_map.max_value / 1572.0 - 1.0) <= 0.2;
    return {ok, fmt("<X-X+> = %.5f (0.035 +- 0.002); g2 = %.5f (1.943 +- 0.01); map min %.4f (0.063 +- 20%%) "
                    "at (%.4f, %.4f), max %.1f (1572 +- 20%%) at (%.4f, %.4f)",
                    intensity, g2, g_map.min_value, grid[g_map.argmin.first], grid[g_map.argmin.second],
                    g_map.max_value, grid[g_map.argmax.first], grid[g_map.argmax.second])};
}

Outcome spectrum_oracle() {
    const double gamma = 1e-3, Gamma = 5e-3, T = 0.3;
    struct Case {
        const char* name;
        ModelSpec spec;
    };
    std::string detail;
    bool ok = true;
    for (const Case& c : {Case{"H_K U=1e-3", kerr(1e-3)}, Case{"H_K U=0.1", kerr(0.1)},
                          Case{"H_S U=1e-3", quartic(1e-3)}, Case{"H_S U=0.1", quartic(0.1)}}) {
        const ThermalSolution sol = solve_canonical(c.spec, T);
        const EigenSystem& es = sol.eigen;
        const RateTable rates = build_eigenbasis_dissipator(es, gamma, T);
        const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
        const DensityVector v = steady_state(L);
        const auto xd = frequency_components(es, Quadrature::X);
        const ReorderingMatrices Tm = build_reordering_matrices(xd.plus, es.keep());
        // Span the first three transitions with a margin.
        const double lo = es.delta(1, 0) - 0.05, hi = es.delta(3, 2) + 0.05;
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i) grid.push_back(lo + (hi - lo) * i / 19.0);
        const QrfSpectrum q = qrf_spectrum(L, xd.minus, xd.plus, v, grid, Gamma);
        SensorCalculator calc(L, Tm, v);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(calc.one_photon_spectrum({grid[i], Gamma}) / q.S[i] - 1.0));
        }
        ok = ok && worst < 1e-6;
        detail += fmt("%s%s: %.1e", detail.empty() ? "" : "; ", c.name, worst);
    }
    return {ok, "max relative difference at 20 frequencies: " + detail + " (tol 1e-6)"};
}

Outcome two_photon_oracle() {
    const double gamma = 0.01, T = 0.6, G = 0.02;
    const EigenSystem es = diagonalize(build_hamiltonian(kerr(0.05, 4)), 4);
    const RateTable rates = build_eigenbasis_dissipator(es, gamma, T);
    const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
    const DensityVector v = steady_state(L);
    const FockOperator xp = frequency_components(es, Quadrature::X, Split::quadrature).plus;
    const ReorderingMatrices Tm = build_reordering_matrices(xp, 4);
    SensorCalculator calc(L, Tm, v);
    const double eps = 0.25 * max_oracle_epsilon(G, gamma);
    const double pts[][2] = {{1.0, 1.0},  {1.0, 1.1},   {1.1, 1.2}, {1.05, 1.05}, {0.98, 1.12},
                             {1.2, 1.2},  {1.15, 1.02}, {1.0, 1.2}, {1.1, 1.1},   {1.12, 0.97}};
    double worst = 0.0;
    bool weak = true;
    for (const auto& p : pts) {
        const double a = calc.two_photon_correlation({p[0], G}, {p[1], G});
        const AugmentedResult o = augmented_two_sensor(es.energies, rates, xp, {p[0], G, eps}, {p[1], G, eps}, gamma);
        worst = std::max(worst, std::abs(o.g2 / a - 1.0));
        weak = weak && o.weak_coupling;
    }
    return {worst < 1e-2 && weak,
            fmt("max relative difference %.2e at 10 points, dim-4 Kerr, sensor eps = %.2e (tol 1e-2)", worst, eps)};
}

Outcome boundedness_and_attractive() {
    // Repulsive quartic on the full (U, T) window of the phase diagram.
    struct Extreme {
        double lo = INFINITY, hi = -INFINITY, U = 0.0, T = 0.0;
    } ext[2];
    for (double U : log_grid(std::exp(-5.0), std::exp(2.0), 10))
        for (double T : log_grid(0.1, std::exp(2.0), 10)) {
            const ThermalSolution sol = solve_canonical(quartic(U), T);
            g_states.push_back(sol.rho);
            for (int i = 0; i < 2; ++i) {
                const double g2 = g2_zero_delay(sol.rho, frequency_components(sol.eigen, i ? Quadrature::P : Quadrature::X));
                ext[i].lo = std::min(ext[i].lo, g2);
                if (g2 > ext[i].hi) ext[i] = {ext[i].lo, g2, U, T};
            }
        }
    auto attractive_g2 = [](double absU, double T) {
        ModelSpec spec = attractive_model(-absU, 1.0, 80).model;
        const ThermalSolution sol = solve_canonical(spec, T);
        return g2_zero_delay(sol.rho, frequency_components(sol.eigen, Quadrature::X));
    };
    double bunched = 0.0;
    for (double T : {0.02, 0.05})
        for (double U : {0.005, 0.01, 0.02, 0.03}) bunched = std::max(bunched, attractive_g2(U, T));
    double antibunched = 0.0;
    for (double T : {0.02, 0.05})
        for (double U : {0.04, 0.05, 0.06, 0.08}) antibunched = std::max(antibunched, attractive_g2(U, T));
    bool ok = bunched > 2.0 && antibunched < 1.0;
    for (const Extreme& e : ext) ok = ok && e.lo >= 0.0 && e.hi <= 2.0 + 1e-6;
    return {ok, fmt("repulsive U in [e^-5, e^2], T in [0.1, e^2] (bound [0, 2+1e-6]): X g2 in [%.4f, %.4f], max at "
                    "U=%.3g T=%.3g; P g2 in [%.4f, %.4f], max at U=%.3g T=%.3g; attractive T in {0.02, 0.05}: "
                    "max g2 %.3f for |U| in [0.005, 0.03] (> 2), max g2 %.3f for |U| in [0.04, 0.08] (< 1)",
                    ext[0].lo, ext[0].hi, ext[0].U, ext[0].T, ext[1].lo, ext[1].hi, ext[1].U, ext[1].T, bunched,
                    antibunched)};
}

Outcome structural_invariants() {
    const auto start = std::chrono::steady_clock::now();
    double trace_err = 0.0, balance_err = 0.0, ground = 0.0;
    std::vector<ModelSpec> models{quartic(1e-3), quartic(0.1), quartic(1.0), kerr(0.05), kerr(1.0),
                                  attractive_model(-0.02, 1.0, 60).model};
    for (const ModelSpec& spec : models) {
        const EigenSystem es = solve_model(spec, 8);
        for (double T : {0.1, 0.5, 2.0}) {
            const RateTable rates = build_eigenbasis_dissipator(es, 1e-2, T);
            for (const RateEntry& e : rates.entries) {
                balance_err = std::max(balance_err, std::abs(e.occupation / (1.0 + e.occupation) / std::exp(-e.delta / T) - 1.0));
            }
            const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
            Vector tr = Vector::Zero(L.size());
            for (Index j = 0; j < 8; ++j) tr[vec_index(j, j, 8)] = 1.0;
            trace_err = std::max(trace_err, Vector(L.matrix.transpose() * tr).cwiseAbs().maxCoeff());
            const DensityVector v = steady_state(L);
            g_states.push_back(to_density(v, 8, Basis::eigen));
            Matrix seed = Matrix::Zero(8, 8);
            seed(7, 7) = 0.5;
            seed(3, 3) = 0.5;
            seed(3, 7) = seed(7, 3) = 0.4;
            g_states.push_back(to_density(propagate(L, vectorize(seed), 50.0), 8, Basis::eigen));
        }
        for (Quadrature q : {Quadrature::X, Quadrature::P}) {
            const auto c = frequency_components(es, q);
            ground = std::max(ground, c.plus.elements.col(0).norm());
        }
    }
    double herm = 0.0, trace_dev = 0.0, min_eig = INFINITY;
    for (const DensityMatrix& rho : g_states) {
        const PhysicalityReport r = check_physical(rho);
        herm = std::max(herm, r.hermiticity);
        trace_dev = std::max(trace_dev, r.trace_error);
        min_eig = std::min(min_eig, r.min_eigenvalue);
    }
    if (g_map.values.size() == 0) {
        const ThermalSolution sol = solve_canonical(quartic(1e-3), 0.3, {10, 512});
        const LiouvillianMatrix L = assemble_liouvillian(sol.eigen.energies, build_eigenbasis_dissipator(sol.eigen, 1e-4, 0.3));
        const auto xq = frequency_components(sol.eigen, Quadrature::X, Split::quadrature);
        const std::vector<double> grid{1.005, 1.012, 1.02, 1.03, 1.04};
        g_map = correlation_map(L, build_reordering_matrices(xq.plus, sol.eigen.keep()), steady_state(L), grid, grid,
                                5e-4, 5e-4);
    }
    const double asym = (g_map.values - g_map.values.transpose()).cwiseAbs().maxCoeff() / g_map.max_value;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = trace_err < 1e-12 && balance_err < 1e-12 && herm < 1e-12 && trace_dev < 1e-10 &&
                    min_eig >= -1e-10 && ground == 0.0 && asym < 1e-9 && secs < 60.0;
    return {ok, fmt("trace preservation %.1e; detailed balance %.1e; %zu states: hermiticity %.1e, trace %.1e, "
                    "min eigenvalue %.1e; ground annihilation %.1e; map asymmetry %.1e; %.1f s",
                    trace_err, balance_err, g_states.size(), herm, trace_dev, min_eig, ground, asym, secs)};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "canonical steady state", canonical_steady_state},
        {2, "naive dissipator g2", naive_pathology},
        {3, "high-temperature Kerr limit", high_T_limit},
        {4, "subpoissonian boundary", subpoissonian_boundary},
        {5, "working-point statistics and map", working_point_values},
        {6, "one-photon spectrum vs time-domain integral", spectrum_oracle},
        {7, "two-photon formula vs explicit sensors", two_photon_oracle},
        {8, "boundedness and attractive statistics", boundedness_and_attractive},
        {9, "structural invariants", structural_invariants},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%d] %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
