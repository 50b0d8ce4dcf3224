// field.hpp: positive/negative frequency parts of the output quadratures and
// the full-field second-order correlations.
//
// X0 = P0 = 1 and the output coupling prefactor is dropped, so intensities are
// quoted up to a constant; normalized correlations are unaffected.

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"
#include "anharm/lindblad.hpp"
#include "anharm/thermal.hpp"

#include <cfloat>

namespace anharm {

enum class Quadrature { X, P };

inline const char* to_string(Quadrature q) { return q == Quadrature::X ? "X" : "P"; }

// derivative: the split of dX/dt (what the detector sees);
// quadrature: the split of X itself.
enum class Split { derivative, quadrature };

inline const char* to_string(Split s) { return s == Split::derivative ? "derivative" : "quadrature"; }

struct FrequencyComponents {
    FockOperator plus;  // eigenbasis, strictly upper triangular
    FockOperator minus; // plus^dag
    Quadrature quadrature = Quadrature::X;
    Split split = Split::derivative;
};

// plus = sum_{j<k} f_jk Q_jk |j><k| with f = -i Delta_kj for the derivative split
// and f = 1 for the quadrature split.
inline FrequencyComponents frequency_components(const EigenSystem& eig, Quadrature q,
                                                Split split = Split::derivative) {
    const Matrix& table = q == Quadrature::X ? eig.c_table : eig.p_table;
    const Index d = eig.keep();
    Matrix plus = Matrix::Zero(d, d);
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            const complex factor = split == Split::derivative ? complex(0.0, -eig.delta(k, j)) : 1.0;
            plus(j, k) = factor * table(j, k);
        }
    }
    FrequencyComponents out{FockOperator(plus, Basis::eigen), FockOperator(plus.adjoint(), Basis::eigen),
                            q, split};
    return out;
}

namespace detail {

inline void check_state_and_components(const DensityMatrix& rho, const FrequencyComponents& c,
                                       const char* who) {
    if (rho.basis != Basis::eigen) {
        throw ContractViolation(std::string(who) + ": state must be in the eigenbasis");
    }
    if (rho.dim() != c.plus.dim()) throw InvalidDimension(std::string(who) + ": dimension mismatch");
}

} // namespace detail

// <minus plus>
inline double mean_intensity(const DensityMatrix& rho, const FrequencyComponents& c) {
    detail::check_state_and_components(rho, c, "mean_intensity");
    return (rho.elements * c.minus.elements * c.plus.elements).trace().real();
}

// <minus minus plus plus> / <minus plus>^2
inline double g2_zero_delay(const DensityMatrix& rho, const FrequencyComponents& c) {
    const double n = mean_intensity(rho, c);
    if (!(n > DBL_MIN)) throw UndefinedStatistic("g2_zero_delay: zero intensity");
    const Matrix pp = c.plus.elements * c.plus.elements;
    const double num = (rho.elements * pp.adjoint() * pp).trace().real();
    return num / (n * n);
}

// Normalized first-order correlation <minus(0) plus(tau)> / <minus plus>.
inline complex g1_delayed(const LiouvillianMatrix& L, const DensityMatrix& rho,
                          const FrequencyComponents& c, double tau) {
    const double n = mean_intensity(rho, c);
    if (!(n > DBL_MIN)) throw UndefinedStatistic("g1_delayed: zero intensity");
    const Index d = rho.dim();
    const DensityVector v = propagate(L, vectorize(rho.elements * c.minus.elements), tau);
    return (c.plus.elements * unvectorize(v, d)).trace() / n;
}

// Regression formula: sigma(tau) = exp(M tau)[plus rho minus], then
// <minus plus>_sigma / <minus plus>^2.
inline double g2_delayed(const LiouvillianMatrix& L, const DensityMatrix& rho,
                         const FrequencyComponents& c, double tau) {
    const double n = mean_intensity(rho, c);
    if (!(n > DBL_MIN)) throw UndefinedStatistic("g2_delayed: zero intensity");
    if (L.dim_sys != rho.dim()) throw InvalidDimension("g2_delayed: Liouvillian dimension mismatch");
    const Index d = rho.dim();
    const Matrix start = c.plus.elements * rho.elements * c.minus.elements;
    const DensityVector v = propagate(L, vectorize(start), tau);
    const Matrix sigma = unvectorize(v, d);
    return (sigma * c.minus.elements * c.plus.elements).trace().real() / (n * n);
}

} // namespace anharm
