// thermal.hpp: canonical and naive thermal states, photon statistics and the
// closed-form Kerr limits.
//
// Temperatures carry k_B and are given in units of omega_a.

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace anharm {

struct DensityMatrix {
    Matrix elements;
    Basis basis = Basis::fock;

    Index dim() const noexcept { return elements.rows(); }
};

struct PhysicalityReport {
    double hermiticity = 0.0;    // relative Frobenius distance from adjoint
    double trace_error = 0.0;    // |Tr rho - 1|
    double min_eigenvalue = 0.0; // of the Hermitian part

    bool ok(double herm_tol = 1e-12, double trace_tol = 1e-10, double pos_tol = 1e-10) const {
        return hermiticity < herm_tol && trace_error < trace_tol && min_eigenvalue >= -pos_tol;
    }
};

inline PhysicalityReport check_physical(const DensityMatrix& rho) {
    PhysicalityReport r;
    r.hermiticity = hermiticity_error(rho.elements);
    r.trace_error = std::abs(rho.elements.trace() - complex(1.0, 0.0));
    const Matrix herm = 0.5 * (rho.elements + rho.elements.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = solver.eigenvalues().minCoeff();
    return r;
}

// 1/2 ||rho1 - rho2||_1 for Hermitian arguments of equal dimension.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim() || a.basis != b.basis) {
        throw ContractViolation("trace_distance: states must share dimension and basis");
    }
    const Matrix diff = a.elements - b.elements;
    const Matrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline constexpr double kTailTolerance = 1e-12;

// Boltzmann weights exp(-eps_j / T) / Z. The normalized weight of the highest
// level must stay below `tail_tolerance`, otherwise the truncation is too small
// for the requested temperature. T = 0 selects the ground state.
inline RealVector canonical_populations(const RealVector& energies, double T,
                                        double tail_tolerance = kTailTolerance) {
    if (energies.size() < 1) throw InvalidDimension("canonical_populations: no levels");
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw InvalidParameter("canonical_populations: temperature must be >= 0");
    }
    RealVector w = RealVector::Zero(energies.size());
    if (T == 0.0) {
        w[0] = 1.0;
        return w;
    }
    const double e0 = energies.minCoeff();
    for (Index j = 0; j < energies.size(); ++j) w[j] = std::exp(-(energies[j] - e0) / T);
    w /= w.sum();
    const double tail = w[energies.size() - 1];
    if (!(tail < tail_tolerance)) {
        throw TruncationOverflow("canonical_populations: weight of highest retained level is " +
                                 std::to_string(tail) + " at T = " + std::to_string(T) +
                                 "; increase the truncation");
    }
    return w;
}

inline DensityMatrix canonical_state(const EigenSystem& eig, double T) {
    const RealVector w = canonical_populations(eig.energies, T);
    return {w.cast<complex>().asDiagonal().toDenseMatrix(), Basis::eigen};
}

// Bose-Einstein state exp(-omega_a n / T) / Z in the Fock basis, independent of
// any nonlinearity.
inline DensityMatrix naive_thermal_state(double omega_a, double T, Index dim) {
    if (dim < 2) throw InvalidDimension("naive_thermal_state: dim must be >= 2");
    RealVector e(dim);
    for (Index n = 0; n < dim; ++n) e[n] = omega_a * static_cast<double>(n);
    const RealVector w = canonical_populations(e, T);
    return {w.cast<complex>().asDiagonal().toDenseMatrix(), Basis::fock};
}

inline DensityMatrix to_fock(const DensityMatrix& rho, const EigenSystem& eig) {
    if (rho.basis == Basis::fock) return rho;
    if (rho.dim() != eig.keep()) {
        throw ContractViolation("to_fock: state dimension does not match the eigensystem");
    }
    return {eig.to_fock(rho.elements), Basis::fock};
}

// <(a^dag)^N a^N> / <a^dag a>^N.
inline double g_n_statistic(const DensityMatrix& rho, const FockOperator& a, int N) {
    if (N < 1) throw InvalidParameter("g_n_statistic: N must be >= 1");
    if (rho.dim() != a.dim() || rho.basis != a.basis) {
        throw ContractViolation("g_n_statistic: state and operator must share dimension and basis");
    }
    const complex n_mean = (rho.elements * a.elements.adjoint() * a.elements).trace();
    if (!(n_mean.real() > std::numeric_limits<double>::min())) {
        throw UndefinedStatistic("g_n_statistic: <a^dag a> vanishes");
    }
    Matrix aN = a.elements;
    for (int k = 1; k < N; ++k) aN = aN * a.elements;
    const complex moment = (rho.elements * aN.adjoint() * aN).trace();
    return moment.real() / std::pow(n_mean.real(), N);
}

// Same statistic for a state diagonal in the Fock basis, P[n] = <n|rho|n>.
inline double g_n_statistic(const RealVector& populations, int N) {
    if (N < 1) throw InvalidParameter("g_n_statistic: N must be >= 1");
    double n_mean = 0.0;
    double moment = 0.0;
    for (Index n = 0; n < populations.size(); ++n) {
        const double nn = static_cast<double>(n);
        n_mean += nn * populations[n];
        double falling = 1.0; // n (n-1) ... (n-N+1)
        for (int k = 0; k < N; ++k) falling *= (nn - k);
        moment += falling * populations[n];
    }
    if (!(n_mean > std::numeric_limits<double>::min())) {
        throw UndefinedStatistic("g_n_statistic: <a^dag a> vanishes");
    }
    return moment / std::pow(n_mean, N);
}

inline double mean_occupation(const RealVector& populations) {
    double s = 0.0;
    for (Index n = 0; n < populations.size(); ++n) s += static_cast<double>(n) * populations[n];
    return s;
}

// P[n] = <n|rho|n>; rho must be in the Fock basis.
inline RealVector photon_distribution(const DensityMatrix& rho) {
    if (rho.basis != Basis::fock) {
        throw ContractViolation("photon_distribution: state must be in the Fock basis");
    }
    RealVector p = rho.elements.diagonal().real();
    for (Index n = 0; n < p.size(); ++n) {
        if (p[n] < 0.0 && p[n] > -1e-14) p[n] = 0.0;
    }
    return p;
}

inline RealVector photon_distribution(const DensityMatrix& rho, const EigenSystem& eig) {
    return photon_distribution(to_fock(rho, eig));
}

// Retained-level escalation used when the required truncation depends on T.
struct TruncationPolicy {
    Index keep_start = 8;
    Index keep_ceiling = 512;
};

struct ThermalSolution {
    EigenSystem eigen;
    DensityMatrix rho;
};

// Canonical state of `spec`, doubling the retained count (and the working
// dimension, at least default_working_dim(keep)) until the Boltzmann tail
// criterion holds.
inline ThermalSolution solve_canonical(ModelSpec spec, double T, TruncationPolicy policy = {}) {
    Index keep = std::max<Index>(policy.keep_start, 2);
    const Index requested_dim = spec.dim;
    for (;;) {
        spec.dim = std::max(requested_dim, default_working_dim(keep));
        EigenSystem eig = solve_model(spec, keep);
        try {
            const RealVector w = canonical_populations(eig.energies, T);
            // Trim escalated counts back to the smallest that satisfies the tail
            // criterion, but never below keep_start: correlation ratios such as
            // P_2 / P_1^2 stay finite as T -> 0 even when P_2 itself is tiny.
            Index minimal = std::min<Index>(std::max<Index>(policy.keep_start, 2), keep);
            while (minimal < keep &&
                   !(w[minimal - 1] / w.head(minimal).sum() < kTailTolerance)) {
                ++minimal;
            }
            if (minimal < keep) eig = retain(eig, minimal);
            DensityMatrix rho = canonical_state(eig, T);
            return {std::move(eig), std::move(rho)};
        } catch (const TruncationOverflow&) {
            if (keep >= policy.keep_ceiling) throw;
            keep = std::min(2 * keep, policy.keep_ceiling);
        }
    }
}

// Canonical populations of the Kerr Hamiltonian, which is diagonal in the Fock
// basis, so arbitrarily large truncations cost O(n). The truncation doubles
// until the tail criterion holds.
inline RealVector kerr_canonical_populations(double omega_a, double U, double T,
                                             Index ceiling = Index(1) << 22) {
    if (U < 0.0) throw UnstableSpectrum("kerr_canonical_populations: U must be >= 0");
    Index dim = 64;
    for (;;) {
        RealVector e(dim);
        for (Index n = 0; n < dim; ++n) {
            const double nn = static_cast<double>(n);
            e[n] = nn * omega_a + nn * (nn - 1.0) * U;
        }
        try {
            return canonical_populations(e, T);
        } catch (const TruncationOverflow&) {
            if (dim >= ceiling) throw;
            dim = std::min(2 * dim, ceiling);
        }
    }
}

inline double kerr_canonical_g2(double omega_a, double U, double T) {
    return g_n_statistic(kerr_canonical_populations(omega_a, U, T), 2);
}

// A closed-form approximation together with whether the inputs lie in the
// regime where it is meant to hold.
struct Approximation {
    double value = 0.0;
    bool within_validity = false;
};

namespace detail {

// exp(y^2) erfc(y), switching to the asymptotic series where erfc underflows.
inline double erfcx(double y) {
    if (y < 25.0) return std::exp(y * y) * std::erfc(y);
    const double inv = 1.0 / (2.0 * y * y);
    return (1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv) / (y * std::sqrt(std::numbers::pi));
}

} // namespace detail

// Continuous-variable estimate of <a^dag a> for the Kerr oscillator at T >> omega_a:
//   1/2 - omega_a/(2U) + sqrt(T/(pi U)) exp(-(omega_a - U)^2 / (4TU)) / (1 + erf((U - omega_a)/(2 sqrt(TU))))
// Valid for T >= 100 omega_a.
inline Approximation kerr_high_T_occupation(double omega_a, double U, double T) {
    if (!(U > 0.0)) throw DomainError("kerr_high_T_occupation: U must be positive");
    if (!(T > 0.0)) throw DomainError("kerr_high_T_occupation: T must be positive");
    const double y = (omega_a - U) / (2.0 * std::sqrt(T * U));
    // exp(-y^2) / (1 + erf(-y)) = exp(-y^2) / erfc(y) = 1 / erfcx(y)
    const double ratio = 1.0 / detail::erfcx(y);
    const double value =
        0.5 - omega_a / (2.0 * U) + std::sqrt(T / (std::numbers::pi * U)) * ratio;
    return {value, T >= 100.0 * omega_a};
}

// Smallest U at which the two-photon-truncated Kerr statistics turn
// subpoissonian:
//   U = (T/2) ln(e^{w/T} - 1 + sqrt(e^{2w/T} - 2 e^{w/T} - 1)) - w/2
// Meant for 0 < T < 0.3 omega_a.
inline Approximation kerr_subpoissonian_boundary(double omega_a, double T) {
    if (!(T > 0.0)) throw DomainError("kerr_subpoissonian_boundary: T must be positive");
    const double x = omega_a / T;
    // e^{x} - 1 + sqrt(e^{2x} - 2e^{x} - 1) = e^{x} (1 - e^{-x} + sqrt(1 - 2e^{-x} - e^{-2x}))
    const double ex = std::exp(-x);
    const double disc = 1.0 - 2.0 * ex - ex * ex;
    if (!(disc >= 0.0)) {
        throw DomainError("kerr_subpoissonian_boundary: no real boundary at T = " +
                          std::to_string(T));
    }
    const double log_arg = x + std::log(1.0 - ex + std::sqrt(disc));
    const double value = 0.5 * T * log_arg - 0.5 * omega_a;
    return {value, T < 0.3 * omega_a};
}

} // namespace anharm
