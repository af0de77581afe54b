// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_CHANNEL_HPP
#define MATOPT_CHANNEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "matopt/scenario.hpp"

namespace matopt {

// Field-response channel vector evaluated at MA position x.
struct ChannelVector {
    Eigen::VectorXcd entries; // h_n(x), length N
    double position_x = 0.0;  // meters
};

// entry n: sum_l tau_l^* exp(j 2pi/lambda (x * vartheta_l - t_n^T p_l))
inline ChannelVector channel_vector(const UserChannel& ch, double x, double region_len_A) {
    if (x < 0.0 || x > region_len_A)
        throw std::domain_error("channel_vector: x outside the moving region");
    const int N = ch.n_tx();
    const int L = ch.n_paths();
    ChannelVector h;
    h.position_x = x;
    h.entries = Eigen::VectorXcd::Zero(N);
    const double w = kTwoPi / ch.wavelength;
    for (int n = 0; n < N; ++n) {
        std::complex<double> s(0.0, 0.0);
        for (int l = 0; l < L; ++l) {
            const double phase = w * (x * ch.virtual_aoas[l] - ch.tx_positions.col(n).dot(ch.aod_dir(l)));
            s += std::conj(ch.path_responses[l]) * std::polar(1.0, phase);
        }
        h.entries[n] = s;
    }
    return h;
}

// Closed-form channel power gain ||h(x)||^2:
//   sum_{a<b} 2|F_ab| cos(2pi/lambda (vartheta_b - vartheta_a) x + arg F_ab) + G
// Uses the cached coefficients; O(L^2) per evaluation.
inline double gain_closed_form(const UserChannel& ch, double x) {
    const int L = ch.n_paths();
    const double w = kTwoPi / ch.wavelength;
    double g = ch.g_const;
    for (int a = 0; a < L; ++a)
        for (int b = a + 1; b < L; ++b) {
            const std::complex<double>& f = ch.f_coeffs(a, b);
            g += 2.0 * std::abs(f) *
                 std::cos(w * (ch.virtual_aoas[b] - ch.virtual_aoas[a]) * x + std::arg(f));
        }
    return g;
}

// Recomputes F_ab (Hermitian L x L) and G from the raw channel fields.
// The diagonal F_aa = N |tau_a|^2, so G equals the trace.
inline void f_coefficients(const UserChannel& ch, Eigen::MatrixXcd& f, double& g) {
    UserChannel tmp = ch;
    tmp.finalize();
    f = tmp.f_coeffs;
    g = tmp.g_const;
}

// Position-dependent powers are finite cosine sums
//   m(x) = offset + sum_t amp_t cos(omega_t x + phase_t),
// which gives exact derivatives and a global curvature bound for the
// quadratic surrogates.
struct CosineMixture {
    struct Term {
        double amp, omega, phase;
    };
    double offset = 0.0;
    std::vector<Term> terms;

    double value(double x) const {
        double s = offset;
        for (const auto& t : terms) s += t.amp * std::cos(t.omega * x + t.phase);
        return s;
    }
    double slope(double x) const {
        double s = 0.0;
        for (const auto& t : terms) s -= t.amp * t.omega * std::sin(t.omega * x + t.phase);
        return s;
    }
    double second_derivative(double x) const {
        double s = 0.0;
        for (const auto& t : terms)
            s -= t.amp * t.omega * t.omega * std::cos(t.omega * x + t.phase);
        return s;
    }
    // delta with |m''(x)| <= delta for all x
    double curvature_bound() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.amp) * t.omega * t.omega;
        return s;
    }
    CosineMixture& scale(double c) {
        offset *= c;
        for (auto& t : terms) t.amp *= c;
        return *this;
    }
};

// ||h(x)||^2 as a cosine mixture (the closed-form gain expansion)
inline CosineMixture gain_mixture(const UserChannel& ch) {
    CosineMixture m;
    m.offset = ch.g_const;
    const double w = kTwoPi / ch.wavelength;
    const int L = ch.n_paths();
    for (int a = 0; a < L; ++a)
        for (int b = a + 1; b < L; ++b) {
            const std::complex<double>& f = ch.f_coeffs(a, b);
            if (std::abs(f) == 0.0) continue;
            m.terms.push_back({2.0 * std::abs(f),
                               w * (ch.virtual_aoas[b] - ch.virtual_aoas[a]), std::arg(f)});
        }
    return m;
}

// |h(x)^H w|^2 as a cosine mixture. With c_l = tau_l sum_n w_n
// exp(j 2pi/lambda t_n^T p_l), the inner product is sum_l c_l
// exp(-j 2pi/lambda vartheta_l x); expanding the squared magnitude
// gives offset sum |c_l|^2 and one term per path pair.
inline CosineMixture beam_gain_mixture(const UserChannel& ch, const Eigen::VectorXcd& w) {
    const int L = ch.n_paths();
    const int N = ch.n_tx();
    const double wv = kTwoPi / ch.wavelength;
    Eigen::VectorXcd c(L);
    for (int l = 0; l < L; ++l) {
        std::complex<double> s(0.0, 0.0);
        const Eigen::Vector2d p = ch.aod_dir(l);
        for (int n = 0; n < N; ++n)
            s += w[n] * std::polar(1.0, wv * ch.tx_positions.col(n).dot(p));
        c[l] = ch.path_responses[l] * s;
    }
    CosineMixture m;
    for (int l = 0; l < L; ++l) m.offset += std::norm(c[l]);
    for (int a = 0; a < L; ++a)
        for (int b = a + 1; b < L; ++b) {
            const std::complex<double> p = c[a] * std::conj(c[b]);
            if (std::abs(p) == 0.0) continue;
            m.terms.push_back({2.0 * std::abs(p),
                               wv * (ch.virtual_aoas[b] - ch.virtual_aoas[a]), std::arg(p)});
        }
    return m;
}

// h(x)^H W h(x) for a Hermitian PSD covariance W. With the per-path
// steering vectors (g_l)_n = exp(j 2pi/lambda t_n^T p_l), the quadratic
// form is sum_{a,b} M_ab exp(j(omega_b - omega_a) x) where
// M_ab = tau_a conj(tau_b) g_a^T W conj(g_b) is Hermitian; rank-one
// W = w w^H reduces to beam_gain_mixture.
inline CosineMixture cov_gain_mixture(const UserChannel& ch, const Eigen::MatrixXcd& w) {
    const int L = ch.n_paths();
    const int N = ch.n_tx();
    const double wv = kTwoPi / ch.wavelength;
    Eigen::MatrixXcd g(N, L);
    for (int l = 0; l < L; ++l) {
        const Eigen::Vector2d p = ch.aod_dir(l);
        for (int n = 0; n < N; ++n)
            g(n, l) = std::polar(1.0, wv * ch.tx_positions.col(n).dot(p));
    }
    CosineMixture m;
    for (int a = 0; a < L; ++a)
        for (int b = a; b < L; ++b) {
            const std::complex<double> mab = ch.path_responses[a] *
                                             std::conj(ch.path_responses[b]) *
                                             (g.col(a).transpose() * w * g.col(b).conjugate())(0);
            if (a == b) {
                m.offset += mab.real();
            } else if (std::abs(mab) > 0.0) {
                m.terms.push_back({2.0 * std::abs(mab),
                                   wv * (ch.virtual_aoas[b] - ch.virtual_aoas[a]),
                                   std::arg(mab)});
            }
        }
    return m;
}

} // namespace matopt

#endif
