// oracle.hpp: brute-force references for the sensor-method spectra.
//
// qrf_spectrum integrates the two-time correlator in the time domain;
// augmented_two_sensor simulates two explicit two-level sensors coupled to
// the system. Neither uses the reordering matrices or the resolvent chains.

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"
#include "anharm/lindblad.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace anharm {

struct QrfSpectrum {
    std::vector<double> omega;
    std::vector<double> S;            // (1/pi) Re int_0^inf e^{(i w - G/2) t} <X-(0) X+(t)> dt
    std::vector<double> error_bound;  // quadrature estimate plus neglected tail, per frequency
    double horizon = 0.0;
    double step = 0.0;
    std::size_t panels = 0;
};

namespace detail {

struct KronrodRule {
    std::array<double, 15> x{};  // nodes on [-1, 1]
    std::array<double, 15> wk{}; // Kronrod weights
    std::array<double, 15> wg{}; // Gauss weights, zero at Kronrod-only nodes
};

inline KronrodRule kronrod15() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& ka = gauss_kronrod<double, 15>::abscissa();
    const auto& kw = gauss_kronrod<double, 15>::weights();
    const auto& gw = gauss<double, 7>::weights();
    KronrodRule r;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ka.size(); ++i) {
        const double g = i % 2 == 0 ? gw[i / 2] : 0.0;
        if (i == 0) {
            r.x[n] = 0.0;
            r.wk[n] = kw[0];
            r.wg[n] = g;
            ++n;
            continue;
        }
        for (double sign : {-1.0, 1.0}) {
            r.x[n] = sign * ka[i];
            r.wk[n] = kw[i];
            r.wg[n] = g;
            ++n;
        }
    }
    return r;
}

} // namespace detail

// Time-domain spectrum from the regression formula: the correlator
// c(t) = Tr[X+ e^{M t}(rho X-)] is sampled on Gauss-Kronrod panels of fixed
// width, using precomputed propagators, up to a horizon set by the slowest
// decay. The panel width is halved until the Kronrod/Gauss difference meets
// `tolerance` relative to each spectrum value.
inline QrfSpectrum qrf_spectrum(const LiouvillianMatrix& L, const FockOperator& x_minus,
                                const FockOperator& x_plus, const DensityVector& v_ss,
                                const std::vector<double>& omega_grid, double Gamma,
                                double tolerance = 1e-9) {
    const Index d = L.dim_sys;
    const Index n = L.size();
    if (x_plus.dim() != d || x_minus.dim() != d) throw InvalidDimension("qrf_spectrum: dimension mismatch");
    if (v_ss.size() != n) throw InvalidDimension("qrf_spectrum: steady state size mismatch");
    if (Gamma < 0.0) throw InvalidParameter("qrf_spectrum: Gamma must be >= 0");
    if (n > 4096) throw ContractViolation("qrf_spectrum: dense oracle limited to dimension 64");
    if (omega_grid.empty()) throw InvalidParameter("qrf_spectrum: empty frequency grid");

    const Matrix Md = L.dense();
    Eigen::ComplexEigenSolver<Matrix> es(Md, false);
    if (es.info() != Eigen::Success) throw IntegrationError("qrf_spectrum: eigenvalues of M failed");
    const double scale = std::max(1.0, Md.cwiseAbs().maxCoeff());
    double slowest = INFINITY;
    double fastest = 0.0;
    for (Index i = 0; i < n; ++i) {
        const complex lam = es.eigenvalues()[i];
        fastest = std::max(fastest, std::abs(lam.imag()));
        if (std::abs(lam) > 1e-10 * scale) slowest = std::min(slowest, -lam.real());
    }

    const Matrix rho = unvectorize(v_ss, d);
    const DensityVector u0 = vectorize(rho * x_minus.elements);
    // Tr[X+ sigma] = sum_jk X+(k, j) sigma(j, k)
    const Vector r = vectorize(x_plus.elements.transpose());

    // Stationary part Tr[X+ rho] Tr[rho X-] does not decay without a filter.
    const complex stationary = (x_plus.elements * rho).trace() * (rho * x_minus.elements).trace();
    if (Gamma == 0.0 && std::abs(stationary) > 1e-14) {
        throw IntegrationError("qrf_spectrum: correlator has an undamped stationary part and Gamma = 0");
    }
    const double decay = Gamma / 2.0 + (std::isfinite(slowest) ? std::max(slowest, 0.0) : 0.0);
    if (!(decay > 1e-14)) {
        throw IntegrationError("qrf_spectrum: correlator does not decay (Gamma = 0 and undamped coherences)");
    }
    double horizon = std::log(1e16) / decay;
    const double slow_rate = std::min(Gamma > 0.0 ? Gamma : INFINITY, std::isfinite(slowest) ? slowest : INFINITY);
    if (std::isfinite(slow_rate) && slow_rate > 0.0) horizon = std::max(horizon, 10.0 / slow_rate);

    double w_max = 0.0;
    for (double w : omega_grid) w_max = std::max(w_max, std::abs(w));
    const detail::KronrodRule rule = detail::kronrod15();

    QrfSpectrum out;
    out.omega = omega_grid;
    const std::size_t nw = omega_grid.size();
    double h = 2.0 / (fastest + w_max + decay);
    for (int attempt = 0; attempt < 6; ++attempt, h /= 2.0) {
        const std::size_t panels = static_cast<std::size_t>(std::ceil(horizon / h));
        // Row functionals at the panel nodes: q_i = r^T exp(M s_i).
        Matrix Q(15, n);
        for (int i = 0; i < 15; ++i) {
            const double s = 0.5 * h * (1.0 + rule.x[i]);
            Q.row(i) = r.transpose() * (Md * s).exp();
        }
        const Matrix step = (Md * h).exp();

        std::vector<complex> ik(nw, 0.0), err(nw, 0.0);
        std::vector<double> err_abs(nw, 0.0);
        Vector u = u0;
        for (std::size_t p = 0; p < panels; ++p) {
            const double t0 = static_cast<double>(p) * h;
            const Vector c = Q * u;
            for (std::size_t w = 0; w < nw; ++w) {
                const complex rate(-Gamma / 2.0, omega_grid[w]);
                const complex base = std::exp(rate * t0);
                complex k = 0.0, g = 0.0;
                for (int i = 0; i < 15; ++i) {
                    const double s = 0.5 * h * (1.0 + rule.x[i]);
                    const complex f = c[i] * std::exp(rate * s);
                    k += rule.wk[i] * f;
                    g += rule.wg[i] * f;
                }
                k *= 0.5 * h * base;
                g *= 0.5 * h * base;
                ik[w] += k;
                err_abs[w] += std::abs(k - g);
            }
            u = step * u;
        }
        // Neglected tail: |c(t)| e^{-decay t} bounded by |c(T)| e^{-G T / 2} / decay.
        const double tail = std::abs((Q.row(0) * u)(0)) * std::exp(-Gamma * horizon / 2.0) / decay;
        bool ok = true;
        out.S.assign(nw, 0.0);
        out.error_bound.assign(nw, 0.0);
        for (std::size_t w = 0; w < nw; ++w) {
            out.S[w] = ik[w].real() / std::numbers::pi;
            out.error_bound[w] = (err_abs[w] + tail) / std::numbers::pi;
            if (out.error_bound[w] > tolerance * std::abs(out.S[w])) ok = false;
        }
        out.horizon = horizon;
        out.step = h;
        out.panels = panels;
        if (ok) return out;
    }
    throw IntegrationError("qrf_spectrum: quadrature did not reach the requested tolerance");
}

struct AugmentedResult {
    double n1 = 0.0;
    double n2 = 0.0;
    double n12 = 0.0;
    double g2 = 0.0;
    double max_sensor_population = 0.0;
    bool weak_coupling = true; // sensor populations below 1e-3
    Index augmented_dim = 0;
};

struct OracleSensor {
    double omega = 1.0;
    double Gamma = 1e-3;
    double epsilon = 1e-4;
};

// Largest coupling accepted by the augmented oracle: 0.1 sqrt(Gamma gamma_q / 2).
inline double max_oracle_epsilon(double Gamma, double gamma_q) {
    return 0.1 * std::sqrt(Gamma * gamma_q / 2.0);
}

// Literal steady state of system (eigenbasis, dimension D) x sensor 1 x
// sensor 2, each sensor a two-level system with H = w s^dag s +
// eps (X+ s^dag + X- s) and decay Gamma D[s].
inline AugmentedResult augmented_two_sensor(const RealVector& energies, const RateTable& rates,
                                            const FockOperator& x_plus, const OracleSensor& s1,
                                            const OracleSensor& s2, double gamma_q) {
    const Index d = energies.size();
    if (d > 8) throw ContractViolation("augmented_two_sensor: system dimension above 8 refused");
    if (x_plus.dim() != d || rates.dim != d) throw InvalidDimension("augmented_two_sensor: dimension mismatch");
    for (const auto* s : {&s1, &s2}) {
        if (!(s->Gamma > 0.0)) throw InvalidParameter("augmented_two_sensor: Gamma must be positive");
        if (!(s->epsilon > 0.0) || s->epsilon > max_oracle_epsilon(s->Gamma, gamma_q) * (1.0 + 1e-12)) {
            throw InvalidParameter("augmented_two_sensor: epsilon must lie in (0, 0.1 sqrt(Gamma gamma_q / 2)]");
        }
    }

    using Eigen::kroneckerProduct;
    const Matrix I2 = Matrix::Identity(2, 2);
    const Matrix Id = Matrix::Identity(d, d);
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 1) = 1.0; // |0><1|, lowers the sensor
    const Matrix sd = sigma.adjoint();
    const Matrix num = sd * sigma;

    auto on_sys = [&](const Matrix& A) -> Matrix { return kroneckerProduct(kroneckerProduct(A, I2).eval(), I2).eval(); };
    auto on_s1 = [&](const Matrix& A, const Matrix& B) -> Matrix { return kroneckerProduct(kroneckerProduct(A, B).eval(), I2).eval(); };
    auto on_s2 = [&](const Matrix& A, const Matrix& B) -> Matrix { return kroneckerProduct(kroneckerProduct(A, I2).eval(), B).eval(); };

    const Matrix& xp = x_plus.elements;
    const Matrix xm = xp.adjoint();
    Matrix Hs = Matrix::Zero(d, d);
    Hs.diagonal() = energies.cast<complex>();
    Matrix H = on_sys(Hs);
    H += s1.omega * on_s1(Id, num) + s2.omega * on_s2(Id, num);
    H += s1.epsilon * (on_s1(xp, sd) + on_s1(xm, sigma));
    H += s2.epsilon * (on_s2(xp, sd) + on_s2(xm, sigma));

    std::vector<Channel> channels;
    for (const auto& e : rates.entries) {
        Matrix down = Matrix::Zero(d, d);
        down(e.j, e.k) = 1.0;
        channels.push_back({on_sys(down), e.rate * (1.0 + e.occupation)});
        if (e.occupation > 0.0) channels.push_back({on_sys(down.transpose()), e.rate * e.occupation});
    }
    channels.push_back({on_s1(Id, sigma), s1.Gamma});
    channels.push_back({on_s2(Id, sigma), s2.Gamma});

    const LiouvillianMatrix L = assemble_liouvillian(H, channels, Basis::eigen);
    const DensityVector v = steady_state(L);
    const Matrix rho = unvectorize(v, L.dim_sys);

    const Matrix n1 = on_s1(Id, num);
    const Matrix n2 = on_s2(Id, num);
    AugmentedResult out;
    out.augmented_dim = L.dim_sys;
    out.n1 = (rho * n1).trace().real();
    out.n2 = (rho * n2).trace().real();
    out.n12 = (rho * n1 * n2).trace().real();
    if (!(out.n1 > 0.0) || !(out.n2 > 0.0)) {
        throw UndefinedStatistic("augmented_two_sensor: sensor population vanishes");
    }
    out.g2 = out.n12 / (out.n1 * out.n2);
    out.max_sensor_population = std::max(out.n1, out.n2);
    out.weak_coupling = out.max_sensor_population < 1e-3;
    return out;
}

} // namespace anharm
