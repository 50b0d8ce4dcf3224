// spectra.hpp: sensor-method spectra: one-photon spectrum and the two-photon
// frequency-resolved correlation g2(w1; w2), evaluated with chained resolvent
// solves on the vectorized Liouvillian.
//
// Conventions:
//   R_z(b) solves (M + z) x = -b.
//   T+ v = vec(X+ rho), T- v = vec(rho X-).
//   <n_i> = eps_i^2 * chain_i and S(w) = Gamma * chain / (2 pi), so that
//   <n_i> = (eps_i^2 / Gamma_i) 2 pi S(w_i).

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"
#include "anharm/lindblad.hpp"
#include "anharm/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <cfloat>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anharm {

struct ReorderingMatrices {
    Index dim = 0;
    Basis basis = Basis::eigen;
    SparseMatrix t_plus;  // v -> vec(X+ rho)
    SparseMatrix t_minus; // v -> vec(rho X-)
};

// X+ must already be written in the basis used by the Liouvillian. The last
// row of X+ vanishes for both the eigenbasis split and the truncated a, so the
// truncation rows of T+ are zero automatically.
inline ReorderingMatrices build_reordering_matrices(const FockOperator& x_plus, Index dim) {
    if (x_plus.dim() != dim) {
        throw ContractViolation("build_reordering_matrices: X+ has dimension " +
                                std::to_string(x_plus.dim()) + ", vectorization expects " +
                                std::to_string(dim));
    }
    const Matrix I = Matrix::Identity(dim, dim);
    std::vector<Triplet> tp, tm;
    detail::kron_into(x_plus.elements, I, 1.0, tp);
    // vec(rho X-) = (I kron (X-)^T) vec(rho) and (X-)^T = conj(X+).
    detail::kron_into(I, x_plus.elements.conjugate(), 1.0, tm);
    ReorderingMatrices out;
    out.dim = dim;
    out.basis = x_plus.basis;
    out.t_plus.resize(dim * dim, dim * dim);
    out.t_plus.setFromTriplets(tp.begin(), tp.end());
    out.t_plus.makeCompressed();
    out.t_minus.resize(dim * dim, dim * dim);
    out.t_minus.setFromTriplets(tm.begin(), tm.end());
    out.t_minus.makeCompressed();
    return out;
}

// Solves (M + z) x = -b with one LU factorization per distinct shift. Shifts
// requested with reuse = true are kept for later calls.
class Resolvent {
public:
    // Dense LU is used only for small or fairly dense generators; the
    // eigenbasis Liouvillian is diagonal outside its population block.
    static constexpr Index kDenseLimit = 1600;
    static constexpr double kDenseFill = 0.1;

    // Cached factorizations are capped at roughly this many bytes.
    static constexpr double kCacheBudget = 256.0 * 1024 * 1024;

    explicit Resolvent(const LiouvillianMatrix& L) : L_(&L) {
        const double fill = static_cast<double>(L.matrix.nonZeros()) /
                            (static_cast<double>(L.size()) * static_cast<double>(L.size()));
        if (L.size() <= kDenseLimit && (L.size() <= 64 || fill > kDenseFill)) dense_ = L.dense();
        const double n = static_cast<double>(L.size());
        const double bytes = dense_.size() > 0 ? 16.0 * n * n : 16.0 * 40.0 * n;
        max_cached_ = static_cast<std::size_t>(std::max(8.0, kCacheBudget / bytes));
    }

    Vector apply(complex z, const Vector& b, bool reuse = true) {
        if (b.size() != L_->size()) throw InvalidDimension("Resolvent: vector size mismatch");
        const Key key{z.real(), z.imag()};
        auto it = cache_.find(key);
        if (it != cache_.end()) return solve(*it->second, z, b);
        auto f = factorize(z);
        ++factorizations_;
        Vector x = solve(*f, z, b);
        if (reuse && cache_.size() < max_cached_) cache_.emplace(key, std::move(f));
        return x;
    }

    std::size_t factorizations() const noexcept { return factorizations_; }
    std::size_t cached() const noexcept { return cache_.size(); }
    void clear() { cache_.clear(); }
    const LiouvillianMatrix& liouvillian() const noexcept { return *L_; }

private:
    using Key = std::pair<double, double>;
    struct Factor {
        std::optional<Eigen::PartialPivLU<Matrix>> dense;
        std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> sparse;
        SparseMatrix shifted; // sparse path only
        double rcond = 0.0;
        double norm = 0.0;
    };

    std::unique_ptr<Factor> factorize(complex z) const {
        auto f = std::make_unique<Factor>();
        const Index n = L_->size();
        if (dense_.size() > 0) {
            Matrix A = dense_;
            A.diagonal().array() += z;
            f->norm = A.cwiseAbs().colwise().sum().maxCoeff();
            f->dense.emplace(A);
            f->rcond = f->dense->rcond();
            if (!(f->rcond > 1e-14)) {
                throw SolverError("resolvent: M + z is singular or ill-conditioned at z = (" +
                                      std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")",
                                  f->rcond > 0.0 ? 1.0 / f->rcond : INFINITY);
            }
        } else {
            SparseMatrix I(n, n);
            I.setIdentity();
            f->shifted = L_->matrix + z * I;
            f->shifted.makeCompressed();
            f->norm = 0.0;
            for (Index c = 0; c < f->shifted.outerSize(); ++c) {
                double s = 0.0;
                for (SparseMatrix::InnerIterator it(f->shifted, c); it; ++it) s += std::abs(it.value());
                f->norm = std::max(f->norm, s);
            }
            f->sparse = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
            f->sparse->compute(f->shifted);
            if (f->sparse->info() != Eigen::Success) {
                throw SolverError("resolvent: sparse LU failed: " + f->sparse->lastErrorMessage(),
                                  INFINITY);
            }
        }
        return f;
    }

    Vector solve(const Factor& f, complex z, const Vector& b) const {
        Vector x = f.dense ? Vector(f.dense->solve(-b)) : Vector(f.sparse->solve(-b));
        // Normwise backward error of the solve.
        Vector r = L_->matrix * x + z * x + b;
        const double scale = f.norm * x.norm() + b.norm();
        if (!x.allFinite() || (scale > 0.0 && r.norm() > 1e-10 * scale)) {
            const double cond = f.rcond > 0.0 ? 1.0 / f.rcond : INFINITY;
            throw SolverError("resolvent: residual " + std::to_string(r.norm() / scale) +
                                  " exceeds tolerance",
                              cond);
        }
        return x;
    }

    const LiouvillianMatrix* L_;
    Matrix dense_;
    std::map<Key, std::unique_ptr<Factor>> cache_;
    std::size_t factorizations_ = 0;
    std::size_t max_cached_ = 8;
};

// One-shot resolvent application.
inline Vector resolvent_apply(const LiouvillianMatrix& L, complex z, const Vector& b) {
    Resolvent r(L);
    return r.apply(z, b, false);
}

struct SensorParams {
    double omega = 1.0;
    double Gamma = 1e-3;
    double epsilon = 1.0; // formal; cancels in normalized outputs

    void validate() const {
        if (!(Gamma > 0.0)) throw InvalidParameter("SensorParams: Gamma must be positive");
        if (!std::isfinite(omega)) throw InvalidParameter("SensorParams: omega must be finite");
        if (!(epsilon > 0.0)) throw InvalidParameter("SensorParams: epsilon must be positive");
    }

    // eps << sqrt(Gamma gamma_Q / 2); ratio eps / sqrt(Gamma gamma_Q / 2).
    double weak_coupling_ratio(double gamma_q) const {
        return epsilon / std::sqrt(Gamma * gamma_q / 2.0);
    }
};

enum class Prefactor { none, omega_squared };

struct TwoPhotonResult {
    double n1 = 0.0;
    double n2 = 0.0;
    double n12 = 0.0;
    double g2 = 0.0;
    double imag_residue = 0.0; // |Im| / |Re| of the correlation chain
};

// Shared state for sensor computations on one Liouvillian. Not thread-safe;
// use one instance per worker.
class SensorCalculator {
public:
    SensorCalculator(const LiouvillianMatrix& L, const ReorderingMatrices& T, DensityVector v_ss)
        : L_(&L), T_(&T), v_(std::move(v_ss)), resolvent_(L) {
        if (T.dim != L.dim_sys) {
            throw ContractViolation("SensorCalculator: reordering matrices and Liouvillian differ in dimension");
        }
        if (T.basis != L.basis) {
            throw ContractViolation(std::string("SensorCalculator: X+ is in the ") + to_string(T.basis) +
                                    " basis but the Liouvillian is in the " + to_string(L.basis) +
                                    " basis");
        }
        if (v_.size() != L.size()) throw InvalidDimension("SensorCalculator: steady state size mismatch");
        tp_v_ = T.t_plus * v_;
        tm_v_ = T.t_minus * v_;
    }

    // Unnormalized one-sensor chain; <n> = eps^2 * chain.
    complex one_photon_chain(double omega, double Gamma) {
        const First f = first(omega, Gamma);
        return trace(level2(f, Gamma));
    }

    // S(w) = Gamma chain / (2 pi), optionally times w^2.
    double one_photon_spectrum(const SensorParams& s, Prefactor prefactor = Prefactor::none) {
        s.validate();
        const double S = s.Gamma * one_photon_chain(s.omega, s.Gamma).real() / (2.0 * std::numbers::pi);
        return prefactor == Prefactor::omega_squared ? S * s.omega * s.omega : S;
    }

    double sensor_occupation(const SensorParams& s) {
        s.validate();
        return s.epsilon * s.epsilon * one_photon_chain(s.omega, s.Gamma).real();
    }

    // Unnormalized two-sensor chain; <n1 n2> = eps1^2 eps2^2 * chain.
    complex two_photon_chain(double w1, double G1, double w2, double G2) {
        const First f1 = first(w1, G1);
        const First f2 = first(w2, G2);
        const Vector s = half(w1, G1, f1, w2, G2, f2) + half(w2, G2, f2, w1, G1, f1);
        return trace(resolvent_.apply(shift(-(G1 + G2), 0.0), s));
    }

    TwoPhotonResult two_photon(const SensorParams& s1, const SensorParams& s2) {
        s1.validate();
        s2.validate();
        const double c1 = one_photon_chain(s1.omega, s1.Gamma).real();
        const double c2 = one_photon_chain(s2.omega, s2.Gamma).real();
        const complex c12 = two_photon_chain(s1.omega, s1.Gamma, s2.omega, s2.Gamma);
        TwoPhotonResult r;
        const double e1 = s1.epsilon * s1.epsilon;
        const double e2 = s2.epsilon * s2.epsilon;
        r.n1 = e1 * c1;
        r.n2 = e2 * c2;
        r.n12 = e1 * e2 * c12.real();
        r.imag_residue = std::abs(c12.imag()) / std::max(std::abs(c12.real()), DBL_MIN);
        if (!(c1 > DBL_MIN) || !(c2 > DBL_MIN)) {
            throw UndefinedStatistic("two_photon_correlation: vanishing one-photon spectrum at a sensor frequency");
        }
        r.g2 = c12.real() / (c1 * c2);
        return r;
    }

    double two_photon_correlation(const SensorParams& s1, const SensorParams& s2) {
        return two_photon(s1, s2).g2;
    }

    Resolvent& resolvent() noexcept { return resolvent_; }
    const DensityVector& steady_state() const noexcept { return v_; }

private:
    struct First {
        Vector p; // R_{i w - G/2}(T- v)
        Vector m; // R_{-i w - G/2}(T+ v)
    };

    static complex shift(double re, double im) { return {re, im}; }

    complex trace(const Vector& x) const { return vector_trace(x, L_->dim_sys); }

    First first(double w, double G) {
        return {resolvent_.apply(shift(-G / 2.0, w), tm_v_), resolvent_.apply(shift(-G / 2.0, -w), tp_v_)};
    }

    Vector level2(const First& f, double G) {
        return resolvent_.apply(shift(-G, 0.0), T_->t_plus * f.p + T_->t_minus * f.m);
    }

    // One ordering of the symmetrized two-sensor chain; the other is obtained
    // by calling with the sensor indices swapped.
    Vector half(double w1, double G1, const First& f1, double w2, double G2, const First& f2) {
        const SparseMatrix& Tp = T_->t_plus;
        const SparseMatrix& Tm = T_->t_minus;
        const double Gs = (G1 + G2) / 2.0;
        const Vector n1 = level2(f1, G1);

        const Vector A = Tm * n1;
        const Vector B = Tm * resolvent_.apply(shift(-Gs, w2 - w1), Tm * f1.m + Tp * f2.p, false);
        const Vector C = Tp * resolvent_.apply(shift(-Gs, w1 + w2), Tm * f2.p + Tm * f1.p, false);
        const Vector t1 = Tp * resolvent_.apply(shift(-G1 - G2 / 2.0, w2), A + B + C);

        const Vector A2 = Tp * n1;
        const Vector B2 = Tm * resolvent_.apply(shift(-Gs, -w1 - w2), Tp * f2.m + Tp * f1.m, false);
        const Vector C2 = Tp * resolvent_.apply(shift(-Gs, w1 - w2), Tm * f2.m + Tp * f1.p, false);
        const Vector t2 = Tm * resolvent_.apply(shift(-G1 - G2 / 2.0, -w2), A2 + B2 + C2);
        return t1 + t2;
    }

    const LiouvillianMatrix* L_;
    const ReorderingMatrices* T_;
    DensityVector v_;
    Vector tp_v_;
    Vector tm_v_;
    Resolvent resolvent_;
};

// Free-function forms; each builds a fresh factorization cache.
inline double one_photon_spectrum(const LiouvillianMatrix& L, const ReorderingMatrices& T,
                                  const DensityVector& v_ss, const SensorParams& s,
                                  Prefactor prefactor = Prefactor::none) {
    SensorCalculator calc(L, T, v_ss);
    return calc.one_photon_spectrum(s, prefactor);
}

inline double two_photon_correlation(const LiouvillianMatrix& L, const ReorderingMatrices& T,
                                     const DensityVector& v_ss, const SensorParams& s1,
                                     const SensorParams& s2) {
    SensorCalculator calc(L, T, v_ss);
    return calc.two_photon_correlation(s1, s2);
}

struct CascadePoint {
    Index j = 0;        // upper level of the first emission
    double omega1 = 0;  // Delta_{j+1, j}
    double omega2 = 0;  // Delta_{j, j-1}
};

struct LeapfrogLine {
    Index j = 0;        // eps_j -> eps_{j-2}
    double sum = 0.0;   // w1 + w2
};

struct CorrelationMap {
    std::vector<double> omega1;
    std::vector<double> omega2;
    RealMatrix values;          // values(i, k) = g2(omega1[i]; omega2[k])
    std::vector<double> s1_row; // S(omega1[i]) with Gamma1, no prefactor
    std::vector<double> s1_col; // S(omega2[k]) with Gamma2, no prefactor
    double Gamma1 = 0.0;
    double Gamma2 = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    std::pair<Index, Index> argmin{0, 0};
    std::pair<Index, Index> argmax{0, 0};
    double max_imag_residue = 0.0;
    std::vector<CascadePoint> cascades;
    std::vector<LeapfrogLine> leapfrogs;
};

namespace detail {

inline void check_grid(const std::vector<double>& g, const char* name) {
    if (g.empty()) throw InvalidParameter(std::string("correlation_map: ") + name + " is empty");
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) {
            throw InvalidParameter(std::string("correlation_map: ") + name + " must be strictly increasing");
        }
    }
}

} // namespace detail

// Cascade points and leapfrog lines from the retained levels; only features
// inside the grid window are listed.
inline void annotate_map(CorrelationMap& map, const EigenSystem& eig) {
    const double lo1 = map.omega1.front(), hi1 = map.omega1.back();
    const double lo2 = map.omega2.front(), hi2 = map.omega2.back();
    const Index d = eig.keep();
    for (Index j = 1; j + 1 < d; ++j) {
        const CascadePoint c{j, eig.delta(j + 1, j), eig.delta(j, j - 1)};
        if (c.omega1 >= lo1 && c.omega1 <= hi1 && c.omega2 >= lo2 && c.omega2 <= hi2) {
            map.cascades.push_back(c);
        }
    }
    for (Index j = 2; j < d; ++j) {
        const double s = eig.delta(j, j - 2);
        if (s >= lo1 + lo2 && s <= hi1 + hi2) map.leapfrogs.push_back({j, s});
    }
}

// g2(w1; w2) over grid1 x grid2, parallel over grid points. Deterministic:
// every value depends only on its own grid coordinates.
inline CorrelationMap correlation_map(const LiouvillianMatrix& L, const ReorderingMatrices& T,
                                      const DensityVector& v_ss, const std::vector<double>& grid1,
                                      const std::vector<double>& grid2, double Gamma1, double Gamma2,
                                      unsigned threads = 1, const EigenSystem* eig = nullptr) {
    detail::check_grid(grid1, "grid1");
    detail::check_grid(grid2, "grid2");
    if (!(Gamma1 > 0.0) || !(Gamma2 > 0.0)) {
        throw InvalidParameter("correlation_map: sensor linewidths must be positive");
    }
    CorrelationMap map;
    map.omega1 = grid1;
    map.omega2 = grid2;
    map.Gamma1 = Gamma1;
    map.Gamma2 = Gamma2;
    const Index n1 = static_cast<Index>(grid1.size());
    const Index n2 = static_cast<Index>(grid2.size());
    map.values.resize(n1, n2);
    RealMatrix residue(n1, n2);

    const unsigned workers = resolve_threads(threads);
    std::vector<std::unique_ptr<SensorCalculator>> calcs(workers);
    auto calc_for = [&](unsigned w) -> SensorCalculator& {
        if (!calcs[w]) calcs[w] = std::make_unique<SensorCalculator>(L, T, v_ss);
        return *calcs[w];
    };

    std::vector<double> c1(grid1.size()), c2(grid2.size());
    parallel_for(grid1.size() + grid2.size(), workers, [&](std::size_t i, unsigned w) {
        auto& calc = calc_for(w);
        if (i < grid1.size()) {
            c1[i] = calc.one_photon_chain(grid1[i], Gamma1).real();
        } else {
            const std::size_t k = i - grid1.size();
            c2[k] = calc.one_photon_chain(grid2[k], Gamma2).real();
        }
    });
    for (std::size_t i = 0; i < c1.size(); ++i) {
        if (!(c1[i] > DBL_MIN)) throw UndefinedStatistic("correlation_map: vanishing spectrum on grid1");
        map.s1_row.push_back(Gamma1 * c1[i] / (2.0 * std::numbers::pi));
    }
    for (std::size_t k = 0; k < c2.size(); ++k) {
        if (!(c2[k] > DBL_MIN)) throw UndefinedStatistic("correlation_map: vanishing spectrum on grid2");
        map.s1_col.push_back(Gamma2 * c2[k] / (2.0 * std::numbers::pi));
    }

    parallel_for(grid1.size() * grid2.size(), workers, [&](std::size_t idx, unsigned w) {
        const Index i = static_cast<Index>(idx / grid2.size());
        const Index k = static_cast<Index>(idx % grid2.size());
        auto& calc = calc_for(w);
        const complex c12 = calc.two_photon_chain(grid1[i], Gamma1, grid2[k], Gamma2);
        map.values(i, k) = c12.real() / (c1[i] * c2[k]);
        residue(i, k) = std::abs(c12.imag()) / std::max(std::abs(c12.real()), DBL_MIN);
    });

    Index r = 0, c = 0;
    map.min_value = map.values.minCoeff(&r, &c);
    map.argmin = {r, c};
    map.max_value = map.values.maxCoeff(&r, &c);
    map.argmax = {r, c};
    map.max_imag_residue = residue.maxCoeff();
    if (eig) annotate_map(map, *eig);
    return map;
}

} // namespace anharm
