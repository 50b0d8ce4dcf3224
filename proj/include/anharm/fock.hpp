// fock.hpp: truncated Fock-space operators, the resonator Hamiltonians and
// their eigensystems.
//
// Units: energies and frequencies are measured in units of the bare mode
// frequency omega_a unless a ModelSpec states otherwise. Quadratures use
// X = a + a^dag and P = -i (a - a^dag), i.e. unit prefactors; all exported
// correlations are ratios in which those prefactors cancel.

#pragma once

#include "anharm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace anharm {

using complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class Basis { fock, eigen };

inline const char* to_string(Basis b) {
    return b == Basis::fock ? "fock" : "eigen";
}

// Relative Frobenius-norm distance of a square matrix from its adjoint.
inline double hermiticity_error(const Matrix& m) {
    const double norm = m.norm();
    if (norm == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / norm;
}

// Dense operator on a truncated space, tagged with the basis it is written in.
struct FockOperator {
    Matrix elements;
    Basis basis = Basis::fock;

    FockOperator() = default;

    explicit FockOperator(Matrix m, Basis b = Basis::fock)
        : elements(std::move(m)), basis(b) {
        if (elements.rows() != elements.cols()) {
            throw InvalidDimension("FockOperator: matrix must be square");
        }
        if (elements.rows() < 2) {
            throw InvalidDimension("FockOperator: dimension must be >= 2");
        }
    }

    Index dim() const noexcept { return elements.rows(); }

    FockOperator adjoint() const { return FockOperator(elements.adjoint(), basis); }

    double hermiticity_error() const { return anharm::hermiticity_error(elements); }
};

struct LadderOperators {
    FockOperator a;
    FockOperator a_dagger;
};

// a|n> = sqrt(n)|n-1>, truncated to n < dim.
inline LadderOperators build_ladder_operators(Index dim) {
    if (dim < 2) {
        throw InvalidDimension("build_ladder_operators: dim must be >= 2, got " +
                               std::to_string(dim));
    }
    Matrix a = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    Matrix ad = a.adjoint();
    return {FockOperator(std::move(a)), FockOperator(std::move(ad))};
}

namespace detail {

inline RealMatrix real_ladder(Index dim) {
    RealMatrix a = RealMatrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// (a + a^dag)^power restricted to the lowest `dim` Fock states. The operator is
// built in a padded space so that every retained matrix element is exact.
inline RealMatrix quadrature_power(Index dim, int power) {
    const Index padded = dim + power / 2 + 1;
    const RealMatrix a = real_ladder(padded);
    const RealMatrix x = a + a.transpose();
    RealMatrix result = RealMatrix::Identity(padded, padded);
    for (int p = 0; p < power; ++p) result = result * x;
    return result.topLeftCorner(dim, dim);
}

} // namespace detail

enum class Model { kerr, quartic, series };

inline const char* to_string(Model m) {
    switch (m) {
    case Model::kerr: return "kerr";
    case Model::quartic: return "quartic";
    case Model::series: return "series";
    }
    return "?";
}

// Coefficient of (a + a^dag)^power in the potential expansion.
struct PowerTerm {
    int power = 6;
    double coefficient = 0.0;

    friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

// Parameters of one Hamiltonian.
//   kerr:    omega_a a^dag a + U a^dag a^dag a a
//   quartic: omega_a a^dag a + U (a + a^dag)^4 [+ extra_orders]
//   series:  same operator form as quartic; used for truncated circuit expansions
// `dim` is the working Fock truncation used to build and diagonalize H.
struct ModelSpec {
    double omega_a = 1.0;
    Model model = Model::quartic;
    double U = 0.0;
    std::vector<PowerTerm> extra_orders;
    Index dim = 40;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

    void validate() const {
        if (dim < 2) throw InvalidDimension("ModelSpec: dim must be >= 2");
        if (!(omega_a > 0.0) || !std::isfinite(omega_a)) {
            throw InvalidParameter("ModelSpec: omega_a must be positive");
        }
        if (!std::isfinite(U)) throw InvalidParameter("ModelSpec: U must be finite");
        if (model == Model::kerr) {
            if (!extra_orders.empty()) {
                throw InvalidParameter("ModelSpec: kerr model takes no extra_orders");
            }
            if (U < 0.0) {
                throw UnstableSpectrum("ModelSpec: attractive Kerr term (U < 0) has no lower bound");
            }
            return;
        }
        // Highest nonzero power decides whether H is bounded below.
        int top_power = 4;
        double top_coeff = U;
        for (const auto& t : extra_orders) {
            if (t.power < 6 || t.power % 2 != 0) {
                throw InvalidParameter("ModelSpec: extra_orders powers must be even and >= 6, got " +
                                       std::to_string(t.power));
            }
            if (!std::isfinite(t.coefficient)) {
                throw InvalidParameter("ModelSpec: extra_orders coefficient must be finite");
            }
            if (t.coefficient != 0.0 && t.power > top_power) {
                top_power = t.power;
                top_coeff = t.coefficient;
            }
        }
        if (top_coeff < 0.0 || (U < 0.0 && top_power == 4)) {
            throw UnstableSpectrum(
                "ModelSpec: U < 0 requires a positive higher-order term (e.g. U_6) to bound the spectrum");
        }
    }
};

inline FockOperator build_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    const Index d = spec.dim;
    RealMatrix h = RealMatrix::Zero(d, d);
    if (spec.model == Model::kerr) {
        for (Index n = 0; n < d; ++n) {
            const double nn = static_cast<double>(n);
            h(n, n) = nn * spec.omega_a + nn * (nn - 1.0) * spec.U;
        }
    } else {
        for (Index n = 0; n < d; ++n) h(n, n) = static_cast<double>(n) * spec.omega_a;
        if (spec.U != 0.0) h += spec.U * detail::quadrature_power(d, 4);
        for (const auto& t : spec.extra_orders) {
            if (t.coefficient != 0.0) h += t.coefficient * detail::quadrature_power(d, t.power);
        }
        // Symmetrize away rounding from the matrix powers.
        h = 0.5 * (h + h.transpose()).eval();
    }
    FockOperator H(h.cast<complex>(), Basis::fock);
    if (H.hermiticity_error() > 1e-12) {
        throw InvalidOperator("build_hamiltonian: result is not Hermitian");
    }
    return H;
}

// Result of mapping circuit energies onto the power-series Hamiltonian.
struct CircuitMapping {
    ModelSpec model;
    std::vector<std::string> warnings;
};

// Josephson-junction resonator -E_J cos(phi) with phi = (2E_C/E_J)^{1/4}(a+a^dag):
//   omega_a = sqrt(8 E_C E_J),  U_{2n} = -E_J (-sqrt(2E_C/E_J))^n / (2n)!
// so that U = U_4 = -E_C/12 and U_6 > 0.
inline CircuitMapping circuit_params_to_model(double E_C, double E_J, int max_order = 6,
                                              Index dim = 40) {
    if (!(E_C > 0.0) || !(E_J > 0.0)) {
        throw InvalidParameter("circuit_params_to_model: E_C and E_J must be positive");
    }
    if (max_order < 4 || max_order % 2 != 0) {
        throw InvalidParameter("circuit_params_to_model: max_order must be even and >= 4");
    }
    CircuitMapping out;
    out.model.omega_a = std::sqrt(8.0 * E_C * E_J);
    out.model.model = Model::series;
    out.model.dim = dim;
    const double root = std::sqrt(2.0 * E_C / E_J);
    double factorial = 24.0; // (2n)! at n = 2
    for (int n = 2; 2 * n <= max_order; ++n) {
        if (n > 2) factorial *= static_cast<double>((2 * n - 1) * (2 * n));
        const double coeff = -E_J * std::pow(-root, n) / factorial;
        if (n == 2) {
            out.model.U = coeff;
        } else {
            out.model.extra_orders.push_back({2 * n, coeff});
        }
    }
    if (E_C / E_J > 0.1) {
        out.warnings.push_back("E_C/E_J = " + std::to_string(E_C / E_J) +
                               " exceeds 0.1; the truncated power series may be inaccurate");
    }
    return out;
}

// Attractive model parameterized by its quartic coefficient U < 0 at fixed
// omega_a: E_C = -12 U, E_J = omega_a^2 / (8 E_C), series kept to order six.
inline CircuitMapping attractive_model(double U, double omega_a = 1.0, Index dim = 40) {
    if (!(U < 0.0)) throw InvalidParameter("attractive_model: U must be negative");
    if (!(omega_a > 0.0)) throw InvalidParameter("attractive_model: omega_a must be positive");
    const double E_C = -12.0 * U;
    const double E_J = omega_a * omega_a / (8.0 * E_C);
    return circuit_params_to_model(E_C, E_J, 6, dim);
}

// Eigenstates of a Hamiltonian, ordered by energy, restricted to the lowest
// `keep` states.
struct EigenSystem {
    RealVector energies;   // ascending
    Matrix transform;      // working_dim x keep, columns are |j> in the Fock basis
    RealMatrix delta;      // delta(k, j) = energies[k] - energies[j]
    Matrix c_table;        // C_jk = <j|(a + a^dag)|k>
    Matrix p_table;        // <j| -i(a - a^dag) |k>
    double frequency_scale = 1.0;
    std::vector<std::string> warnings;

    Index keep() const noexcept { return energies.size(); }
    Index working_dim() const noexcept { return transform.rows(); }

    // Eigenbasis operator -> Fock basis (working dimension).
    Matrix to_fock(const Matrix& eigen_op) const {
        return transform * eigen_op * transform.adjoint();
    }
    // Fock operator (working dimension) -> retained eigenbasis.
    Matrix to_eigen(const Matrix& fock_op) const {
        if (fock_op.rows() != working_dim() || fock_op.cols() != working_dim()) {
            throw InvalidDimension("EigenSystem::to_eigen: dimension mismatch");
        }
        return transform.adjoint() * fock_op * transform;
    }
};

namespace detail {

inline void fix_phases(Matrix& vecs) {
    for (Index c = 0; c < vecs.cols(); ++c) {
        Index best = 0;
        vecs.col(c).cwiseAbs().maxCoeff(&best);
        const complex pivot = vecs(best, c);
        vecs.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
}

// Flags pairs of coupled transitions closer than 1e-9 * scale.
inline void check_degenerate_transitions(EigenSystem& es) {
    std::vector<double> freqs;
    const Index k = es.keep();
    for (Index j = 0; j < k; ++j) {
        for (Index i = j + 1; i < k; ++i) {
            if (std::abs(es.c_table(j, i)) > 1e-10) freqs.push_back(es.delta(i, j));
        }
    }
    std::sort(freqs.begin(), freqs.end());
    std::size_t close = 0;
    for (std::size_t i = 1; i < freqs.size(); ++i) {
        if (freqs[i] - freqs[i - 1] < 1e-9 * es.frequency_scale) ++close;
    }
    if (close > 0) {
        es.warnings.push_back(std::to_string(close) +
                              " pair(s) of degenerate transition frequencies; the secular "
                              "eigenbasis dissipator assumes nondegenerate transitions");
    }
}

} // namespace detail

inline EigenSystem diagonalize(const FockOperator& H, Index keep, double frequency_scale = 1.0) {
    if (H.basis != Basis::fock) {
        throw ContractViolation("diagonalize: Hamiltonian must be given in the Fock basis");
    }
    const Index d = H.dim();
    if (keep < 1 || keep > d) {
        throw InvalidDimension("diagonalize: keep must lie in [1, dim]");
    }
    if (H.hermiticity_error() > 1e-12) {
        throw InvalidOperator("diagonalize: Hamiltonian is not Hermitian");
    }

    EigenSystem es;
    es.frequency_scale = frequency_scale;
    Matrix vecs;
    RealVector vals;
    if (H.elements.imag().norm() == 0.0) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(H.elements.real());
        if (solver.info() != Eigen::Success) {
            throw InvalidOperator("diagonalize: eigensolver failed");
        }
        vals = solver.eigenvalues();
        vecs = solver.eigenvectors().cast<complex>();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(H.elements);
        if (solver.info() != Eigen::Success) {
            throw InvalidOperator("diagonalize: eigensolver failed");
        }
        vals = solver.eigenvalues();
        vecs = solver.eigenvectors();
    }
    detail::fix_phases(vecs);

    es.energies = vals.head(keep);
    es.transform = vecs.leftCols(keep);
    es.delta.resize(keep, keep);
    for (Index k = 0; k < keep; ++k) {
        for (Index j = 0; j < keep; ++j) es.delta(k, j) = es.energies[k] - es.energies[j];
    }
    const auto ladder = build_ladder_operators(d);
    const Matrix x = ladder.a.elements + ladder.a_dagger.elements;
    const Matrix p = complex(0.0, -1.0) * (ladder.a.elements - ladder.a_dagger.elements);
    es.c_table = es.to_eigen(x);
    es.p_table = es.to_eigen(p);
    detail::check_degenerate_transitions(es);
    return es;
}

// Restricts an eigensystem to its lowest `keep` states.
inline EigenSystem retain(const EigenSystem& es, Index keep) {
    if (keep < 1 || keep > es.keep()) throw InvalidDimension("retain: keep out of range");
    EigenSystem out;
    out.energies = es.energies.head(keep);
    out.transform = es.transform.leftCols(keep);
    out.delta = es.delta.topLeftCorner(keep, keep);
    out.c_table = es.c_table.topLeftCorner(keep, keep);
    out.p_table = es.p_table.topLeftCorner(keep, keep);
    out.frequency_scale = es.frequency_scale;
    detail::check_degenerate_transitions(out);
    return out;
}

// Working dimension used when only the retained count is known.
inline Index default_working_dim(Index keep) { return std::max<Index>(4 * keep, 40); }

inline EigenSystem solve_model(const ModelSpec& spec, Index keep) {
    return diagonalize(build_hamiltonian(spec), keep, spec.omega_a);
}

struct TruncationCheck {
    double max_relative_change = 0.0;
    bool converged = false;
};

// Doubling test: the retained levels must not move by more than `tolerance`
// (relative to max(|eps_j|, omega_a)) when the working dimension is doubled.
inline TruncationCheck check_truncation(const ModelSpec& spec, Index keep,
                                        double tolerance = 1e-8) {
    ModelSpec doubled = spec;
    doubled.dim = 2 * spec.dim;
    const EigenSystem base = solve_model(spec, keep);
    const EigenSystem fine = solve_model(doubled, keep);
    TruncationCheck out;
    for (Index j = 0; j < keep; ++j) {
        const double scale = std::max(std::abs(fine.energies[j]), spec.omega_a);
        out.max_relative_change = std::max(
            out.max_relative_change, std::abs(fine.energies[j] - base.energies[j]) / scale);
    }
    out.converged = out.max_relative_change < tolerance;
    return out;
}

// Delta eps_n = omega_a + 2 (n - 1) U for n = 1..n_max.
inline std::vector<double> kerr_transition_energies(double omega_a, double U, int n_max) {
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) out.push_back(omega_a + 2.0 * (n - 1) * U);
    return out;
}

} // namespace anharm
