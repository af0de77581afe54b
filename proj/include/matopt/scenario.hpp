// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_SCENARIO_HPP
#define MATOPT_SCENARIO_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "matopt/config.hpp"
#include "matopt/rng.hpp"

namespace matopt {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// RNG stream tags (see rng.hpp for the splitting convention)
inline constexpr std::uint64_t kStreamScenario = 0x5c301;
inline constexpr std::uint64_t kStreamTrial = 0x7a1a1;
inline constexpr std::uint64_t kStreamRandomization = 0x6ad00;

// virtual AoA of a receive path: sin(elev) * cos(azim)
inline double virtual_aoa(double elev, double azim) {
    return std::sin(elev) * std::cos(azim);
}

// Per-user multipath description. Immutable after construction; the
// closed-form gain coefficients F_ab and G are cached once.
struct UserChannel {
    Eigen::VectorXd elev_aods, azim_aods; // departure angles, [0, pi]
    Eigen::VectorXd elev_aoas, azim_aoas; // arrival angles, [0, pi]
    Eigen::VectorXcd path_responses;      // tau_l
    Eigen::Matrix2Xd tx_positions;        // t_n, 2 x N, meters
    double wavelength = 0.1;

    // cached
    Eigen::VectorXd virtual_aoas; // sin(elev_aoa) * cos(azim_aoa)
    Eigen::MatrixXcd f_coeffs;    // Hermitian L x L, F_ab below
    double g_const = 0.0;         // N * sum |tau_l|^2

    int n_paths() const { return static_cast<int>(path_responses.size()); }
    int n_tx() const { return static_cast<int>(tx_positions.cols()); }

    // direction vector p_l = [sin(th) cos(ph), cos(th)] of transmit path l
    Eigen::Vector2d aod_dir(int l) const {
        return {std::sin(elev_aods[l]) * std::cos(azim_aods[l]), std::cos(elev_aods[l])};
    }

    // Fills the caches: virtual AoAs, F_ab = tau_a tau_b^* sum_n
    // exp(j 2pi/lambda t_n^T (p_a - p_b)), and G = N sum_l |tau_l|^2.
    // (F_ab is the coefficient of exp(j 2pi/lambda (vartheta_b -
    // vartheta_a) x) in the expansion of ||h(x)||^2.)
    void finalize() {
        const int L = n_paths();
        const int N = n_tx();
        virtual_aoas.resize(L);
        for (int l = 0; l < L; ++l)
            virtual_aoas[l] = virtual_aoa(elev_aoas[l], azim_aoas[l]);

        f_coeffs = Eigen::MatrixXcd::Zero(L, L);
        for (int a = 0; a < L; ++a) {
            const Eigen::Vector2d pa = aod_dir(a);
            for (int b = a; b < L; ++b) {
                const Eigen::Vector2d diff = pa - aod_dir(b);
                std::complex<double> s(0.0, 0.0);
                for (int n = 0; n < N; ++n) {
                    const double phase = kTwoPi / wavelength * tx_positions.col(n).dot(diff);
                    s += std::polar(1.0, phase);
                }
                f_coeffs(a, b) = path_responses[a] * std::conj(path_responses[b]) * s;
                f_coeffs(b, a) = std::conj(f_coeffs(a, b));
            }
        }
        g_const = N * path_responses.squaredNorm();
    }
};

// Half-wavelength UPA grid centered at the origin (sum of t_n = 0).
inline Eigen::Matrix2Xd upa_positions(int n_tx, double wavelength) {
    const int rows = ScenarioConfig::upa_rows(n_tx);
    const int cols = n_tx / rows;
    Eigen::Matrix2Xd t(2, n_tx);
    const double d = wavelength / 2.0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int n = r * cols + c;
            t(0, n) = (r - (rows - 1) / 2.0) * d;
            t(1, n) = (c - (cols - 1) / 2.0) * d;
        }
    return t;
}

// One random problem instance: users at distance r from the BS, AoDs/AoAs
// i.i.d. uniform on [0, pi], path responses CSCG with variance G^2/L where
// G^2 = rho0 * r^(-xi0). Deterministic given cfg.rng_seed; user k draws
// from its own substream.
inline std::vector<UserChannel> sample_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const double gamma2 = cfg.pathloss_rho0 * std::pow(cfg.user_radius_r, -cfg.pathloss_exp_xi0);
    const Eigen::Matrix2Xd tx = upa_positions(cfg.n_tx, cfg.wavelength);

    std::vector<UserChannel> users;
    users.reserve(cfg.k_users);
    for (int k = 0; k < cfg.k_users; ++k) {
        Rng rng = Rng::split(cfg.rng_seed, kStreamScenario, static_cast<std::uint64_t>(k));
        UserChannel ch;
        const int L = cfg.l_paths;
        ch.elev_aods.resize(L);
        ch.azim_aods.resize(L);
        ch.elev_aoas.resize(L);
        ch.azim_aoas.resize(L);
        ch.path_responses.resize(L);
        constexpr double pi = 3.14159265358979323846;
        for (int l = 0; l < L; ++l) {
            ch.elev_aods[l] = rng.uniform(0.0, pi);
            ch.azim_aods[l] = rng.uniform(0.0, pi);
            ch.elev_aoas[l] = rng.uniform(0.0, pi);
            ch.azim_aoas[l] = rng.uniform(0.0, pi);
        }
        for (int l = 0; l < L; ++l) ch.path_responses[l] = rng.cscg(gamma2 / L);
        ch.tx_positions = tx;
        ch.wavelength = cfg.wavelength;
        ch.finalize();
        users.push_back(std::move(ch));
    }
    return users;
}

// grid point value for index k (1-based): -1 + (2k-1)/kappa0
inline double quant_grid_value(int k, int kappa0) {
    return -1.0 + (2.0 * k - 1.0) / kappa0;
}

// Nearest quantization index for v in [-1, 1]; midpoint ties round
// toward the smaller index.
inline int quantize_index(double v, int kappa0) {
    const double pos = (v + 1.0) * kappa0 / 2.0 + 0.5; // equals k at grid points
    int lo = static_cast<int>(std::floor(pos));
    int hi = lo + 1;
    if (lo < 1) lo = 1;
    if (hi < 1) hi = 1;
    if (lo > kappa0) lo = kappa0;
    if (hi > kappa0) hi = kappa0;
    const double dlo = std::abs(v - quant_grid_value(lo, kappa0));
    const double dhi = std::abs(v - quant_grid_value(hi, kappa0));
    return dlo <= dhi ? lo : hi;
}

// Replace the virtual AoAs by their nearest quantization grid points;
// arrival angles are remapped so the caches stay consistent under
// recomputation.
inline UserChannel quantized_channel(const UserChannel& ch, int kappa0) {
    if (kappa0 < 1) throw std::invalid_argument("quantized_channel: kappa0 must be >= 1");
    UserChannel q = ch;
    for (int l = 0; l < ch.n_paths(); ++l) {
        const int k = quantize_index(ch.virtual_aoas[l], kappa0);
        const double gv = quant_grid_value(k, kappa0);
        q.virtual_aoas[l] = gv;
        q.azim_aoas[l] = gv >= 0.0 ? 0.0 : 3.14159265358979323846;
        q.elev_aoas[l] = std::asin(std::min(1.0, std::abs(gv)));
    }
    // F and G do not depend on arrival angles; refresh anyway for consistency
    const Eigen::VectorXd keep = q.virtual_aoas;
    q.finalize();
    q.virtual_aoas = keep; // exact grid values, not asin/sin round trips
    return q;
}

// Canonical text form; used for the byte-identical determinism contract.
inline std::string serialize_scenario(const std::vector<UserChannel>& users) {
    std::ostringstream os;
    os.precision(17);
    os << "users=" << users.size() << "\n";
    for (std::size_t k = 0; k < users.size(); ++k) {
        const UserChannel& ch = users[k];
        os << "user " << k << " L=" << ch.n_paths() << " N=" << ch.n_tx() << "\n";
        for (int l = 0; l < ch.n_paths(); ++l) {
            os << ch.elev_aods[l] << ' ' << ch.azim_aods[l] << ' '
               << ch.elev_aoas[l] << ' ' << ch.azim_aoas[l] << ' '
               << ch.path_responses[l].real() << ' ' << ch.path_responses[l].imag() << '\n';
        }
    }
    return os.str();
}

} // namespace matopt

#endif
