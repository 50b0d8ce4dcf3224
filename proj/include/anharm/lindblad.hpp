// lindblad.hpp: thermal dissipators, vectorized Liouvillian, steady state and
// transient propagation.
//
// Vectorization is row-major: <j|rho|k> sits at index j*D + k. With this
// ordering vec(A rho B) = (A kron B^T) vec(rho).

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"
#include "anharm/thermal.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace anharm {

using SparseMatrix = Eigen::SparseMatrix<complex>;
using Triplet = Eigen::Triplet<complex>;
using DensityVector = Vector;

inline Index vec_index(Index j, Index k, Index dim) noexcept { return j * dim + k; }

inline DensityVector vectorize(const Matrix& rho) {
    const Index d = rho.rows();
    DensityVector v(d * d);
    for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) v[vec_index(j, k, d)] = rho(j, k);
    }
    return v;
}

inline Matrix unvectorize(const DensityVector& v, Index dim) {
    if (v.size() != dim * dim) throw InvalidDimension("unvectorize: size mismatch");
    Matrix rho(dim, dim);
    for (Index j = 0; j < dim; ++j) {
        for (Index k = 0; k < dim; ++k) rho(j, k) = v[vec_index(j, k, dim)];
    }
    return rho;
}

inline complex vector_trace(const DensityVector& v, Index dim) {
    complex t = 0.0;
    for (Index j = 0; j < dim; ++j) t += v[vec_index(j, j, dim)];
    return t;
}

// Bath occupation 1/(exp(delta/T) - 1); zero at T = 0.
inline double bose_occupation(double delta, double T) {
    if (!(delta > 0.0)) {
        throw DomainError("bose_occupation: transition frequency must be positive");
    }
    if (!(T >= 0.0)) throw DomainError("bose_occupation: temperature must be >= 0");
    if (T == 0.0) return 0.0;
    return 1.0 / std::expm1(delta / T);
}

// One eigenbasis transition k -> j (k > j): downward channel |j><k| with weight
// rate*(1 + occupation), upward channel |k><j| with weight rate*occupation.
struct RateEntry {
    Index j = 0;
    Index k = 0;
    double rate = 0.0;       // gamma_a |C_jk|^2
    double occupation = 0.0; // nbar_T(delta)
    double delta = 0.0;      // eps_k - eps_j
};

struct RateTable {
    Index dim = 0;
    std::vector<RateEntry> entries;
    std::vector<std::string> warnings;
};

// Transitions with Delta below this (in units of the frequency scale) are dropped.
inline constexpr double kMinTransition = 1e-9;
// |C_jk| below this is treated as a selection-rule zero.
inline constexpr double kMinCoupling = 1e-10;

inline RateTable build_eigenbasis_dissipator(const EigenSystem& eig, double gamma_a, double T) {
    if (!(gamma_a > 0.0)) throw InvalidParameter("build_eigenbasis_dissipator: gamma_a must be positive");
    if (!(T >= 0.0)) throw InvalidParameter("build_eigenbasis_dissipator: T must be >= 0");
    RateTable table;
    table.dim = eig.keep();
    table.warnings = eig.warnings;
    std::size_t dropped = 0;
    for (Index j = 0; j < eig.keep(); ++j) {
        for (Index k = j + 1; k < eig.keep(); ++k) {
            const double c = std::abs(eig.c_table(j, k));
            if (c < kMinCoupling) continue;
            const double delta = eig.delta(k, j);
            if (delta < kMinTransition * eig.frequency_scale) {
                ++dropped;
                continue;
            }
            table.entries.push_back({j, k, gamma_a * c * c, bose_occupation(delta, T), delta});
        }
    }
    if (dropped > 0) {
        table.warnings.push_back(std::to_string(dropped) +
                                 " near-zero-frequency transition(s) dropped from the dissipator");
    }
    return table;
}

// rate * D[op], D[L]rho = L rho L^dag - 1/2 {L^dag L, rho}.
struct Channel {
    Matrix op;
    double rate = 0.0;
};

// (1 + nbar) D[a] + nbar D[a^dag] with a single nbar = nbar_T(omega_a), in the
// Fock basis.
inline std::vector<Channel> build_naive_dissipator(double gamma_a, double T, Index dim,
                                                   double omega_a = 1.0) {
    if (!(gamma_a > 0.0)) throw InvalidParameter("build_naive_dissipator: gamma_a must be positive");
    const auto ladder = build_ladder_operators(dim);
    const double nbar = bose_occupation(omega_a, T);
    std::vector<Channel> channels;
    channels.push_back({ladder.a.elements, gamma_a * (1.0 + nbar)});
    if (nbar > 0.0) channels.push_back({ladder.a_dagger.elements, gamma_a * nbar});
    return channels;
}

struct LiouvillianMatrix {
    Index dim_sys = 0;
    SparseMatrix matrix; // dim_sys^2 x dim_sys^2
    Basis basis = Basis::eigen;

    Index size() const noexcept { return dim_sys * dim_sys; }
    Matrix dense() const { return Matrix(matrix); }
};

namespace detail {

// Appends scale * (A kron B) to `out`, skipping exact zeros.
inline void kron_into(const Matrix& A, const Matrix& B, complex scale, std::vector<Triplet>& out) {
    const Index nb = B.rows();
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            const complex a = A(i, j);
            if (a == 0.0) continue;
            for (Index k = 0; k < nb; ++k) {
                for (Index l = 0; l < B.cols(); ++l) {
                    const complex b = B(k, l);
                    if (b == 0.0) continue;
                    out.emplace_back(i * nb + k, j * B.cols() + l, scale * a * b);
                }
            }
        }
    }
}

} // namespace detail

// Eigenbasis Liouvillian: i[rho, H] with H = diag(energies) plus every channel
// of the rate table. Coherences only decay; populations follow the rate
// equations.
inline LiouvillianMatrix assemble_liouvillian(const RealVector& energies, const RateTable& rates) {
    const Index d = energies.size();
    if (rates.dim != d) throw InvalidDimension("assemble_liouvillian: rate table dimension mismatch");
    RealVector out_rate = RealVector::Zero(d); // total rate leaving each level
    std::vector<Triplet> trips;
    for (const auto& e : rates.entries) {
        if (e.j >= d || e.k >= d) throw InvalidDimension("assemble_liouvillian: entry out of range");
        const double down = e.rate * (1.0 + e.occupation);
        const double up = e.rate * e.occupation;
        trips.emplace_back(vec_index(e.j, e.j, d), vec_index(e.k, e.k, d), down);
        out_rate[e.k] += down;
        if (up > 0.0) {
            trips.emplace_back(vec_index(e.k, e.k, d), vec_index(e.j, e.j, d), up);
            out_rate[e.j] += up;
        }
    }
    for (Index m = 0; m < d; ++m) {
        for (Index n = 0; n < d; ++n) {
            const complex diag(-0.5 * (out_rate[m] + out_rate[n]), -(energies[m] - energies[n]));
            if (diag != 0.0) trips.emplace_back(vec_index(m, n, d), vec_index(m, n, d), diag);
        }
    }
    LiouvillianMatrix L;
    L.dim_sys = d;
    L.basis = Basis::eigen;
    L.matrix.resize(d * d, d * d);
    L.matrix.setFromTriplets(trips.begin(), trips.end());
    L.matrix.makeCompressed();
    return L;
}

// General form for an arbitrary Hamiltonian and channel list written in the
// same basis.
inline LiouvillianMatrix assemble_liouvillian(const Matrix& H, std::span<const Channel> channels,
                                              Basis basis) {
    const Index d = H.rows();
    if (H.cols() != d) throw InvalidDimension("assemble_liouvillian: H must be square");
    const Matrix I = Matrix::Identity(d, d);
    std::vector<Triplet> trips;
    const complex minus_i(0.0, -1.0);
    detail::kron_into(H, I, minus_i, trips);
    detail::kron_into(I, H.transpose(), -minus_i, trips);
    for (const auto& c : channels) {
        if (c.op.rows() != d || c.op.cols() != d) {
            throw InvalidDimension("assemble_liouvillian: channel dimension mismatch");
        }
        if (c.rate < 0.0) throw InvalidParameter("assemble_liouvillian: negative channel rate");
        if (c.rate == 0.0) continue;
        const Matrix LdL = c.op.adjoint() * c.op;
        detail::kron_into(c.op, c.op.conjugate(), c.rate, trips);
        detail::kron_into(LdL, I, -0.5 * c.rate, trips);
        detail::kron_into(I, LdL.transpose(), -0.5 * c.rate, trips);
    }
    LiouvillianMatrix L;
    L.dim_sys = d;
    L.basis = basis;
    L.matrix.resize(d * d, d * d);
    L.matrix.setFromTriplets(trips.begin(), trips.end());
    L.matrix.makeCompressed();
    return L;
}

inline DensityMatrix to_density(const DensityVector& v, Index dim, Basis basis) {
    return {unvectorize(v, dim), basis};
}

namespace detail {

inline double residual_norm(const SparseMatrix& M, const DensityVector& v) {
    return (M * v).norm();
}

// Null vector of M from a dense eigendecomposition; throws if it is not unique.
inline DensityVector dense_null_vector(const LiouvillianMatrix& L) {
    const Matrix Md = L.dense();
    Eigen::ComplexEigenSolver<Matrix> solver(Md);
    if (solver.info() != Eigen::Success) {
        throw SolverError("steady_state: eigen decomposition of M failed", 0.0);
    }
    const double scale = std::max(1.0, Md.cwiseAbs().maxCoeff());
    Index count = 0;
    Index best = 0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double a = std::abs(solver.eigenvalues()[i]);
        if (a < 1e-10 * scale) ++count;
        if (a < best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (count > 1) {
        throw NonUniqueSteadyState("steady_state: Liouvillian has " + std::to_string(count) +
                                   " zero eigenvalues");
    }
    DensityVector v = solver.eigenvectors().col(best);
    const complex tr = vector_trace(v, L.dim_sys);
    if (std::abs(tr) < 1e-12) {
        throw NonUniqueSteadyState("steady_state: null vector has zero trace");
    }
    return v / tr;
}

} // namespace detail

// Solves M v = 0 with Tr v = 1 through the bordered system in which the first
// row of M is replaced by the trace functional. Falls back to the smallest
// eigenvector of M when the bordered system is singular or inaccurate.
inline DensityVector steady_state(const LiouvillianMatrix& L) {
    const Index d = L.dim_sys;
    const Index n = L.size();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(L.matrix.nonZeros() + d));
    for (Index col = 0; col < L.matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(L.matrix, col); it; ++it) {
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Index j = 0; j < d; ++j) trips.emplace_back(0, vec_index(j, j, d), 1.0);
    SparseMatrix A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    bool ok = lu.info() == Eigen::Success;
    DensityVector v;
    if (ok) {
        DensityVector rhs = DensityVector::Zero(n);
        rhs[0] = 1.0;
        v = lu.solve(rhs);
        ok = lu.info() == Eigen::Success && v.allFinite();
        if (ok) {
            const complex tr = vector_trace(v, d);
            ok = std::abs(tr) > 1e-12;
            if (ok) v /= tr;
            ok = ok && detail::residual_norm(L.matrix, v) < 1e-10;
        }
    }
    if (ok) return v;
    if (n > 2500) {
        throw NonUniqueSteadyState("steady_state: bordered system is singular (dimension " +
                                   std::to_string(n) + ", too large for the dense fallback)");
    }
    return detail::dense_null_vector(L);
}

// exp(M tau) v0 through a dense matrix exponential.
inline DensityVector propagate(const LiouvillianMatrix& L, const DensityVector& v0, double tau) {
    if (!(tau >= 0.0)) throw InvalidParameter("propagate: tau must be >= 0");
    if (v0.size() != L.size()) throw InvalidDimension("propagate: vector size mismatch");
    if (tau == 0.0) return v0;
    if (L.size() > 4096) {
        throw ContractViolation("propagate: dense propagation limited to dimension 64");
    }
    const Matrix step = (L.dense() * tau).exp();
    return step * v0;
}

// Repeated application of exp(M h) for a fixed step h.
class Propagator {
public:
    Propagator(const LiouvillianMatrix& L, double step) : step_(step) {
        if (!(step > 0.0)) throw InvalidParameter("Propagator: step must be positive");
        if (L.size() > 4096) {
            throw ContractViolation("Propagator: dense propagation limited to dimension 64");
        }
        map_ = (L.dense() * step).exp();
    }

    double step() const noexcept { return step_; }
    DensityVector apply(const DensityVector& v) const { return map_ * v; }
    const Matrix& map() const noexcept { return map_; }

private:
    double step_;
    Matrix map_;
};

} // namespace anharm
