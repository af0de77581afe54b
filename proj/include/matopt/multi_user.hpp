// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_MULTI_USER_HPP
#define MATOPT_MULTI_USER_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "matopt/channel.hpp"
#include "matopt/conic.hpp"
#include "matopt/scenario.hpp"
#include "matopt/single_user.hpp"

namespace matopt {

// Downlink with one movable antenna per user: the BS sends beams w_k,
// user k's channel depends on its own antenna coordinate x_k, and the
// whole block pays the delay of the slowest mover.

struct ThroughputReport {
    std::vector<double> sinr;       // per user
    std::vector<double> throughput; // C_k, bits/Hz
    double t1 = 0.0;                // moving delay, seconds
    double min_throughput = 0.0;
};

inline ThroughputReport sinr_and_throughput(const std::vector<UserChannel>& channels,
                                            const std::vector<double>& x,
                                            const std::vector<Eigen::VectorXcd>& w,
                                            const ScenarioConfig& cfg) {
    const int K = static_cast<int>(channels.size());
    ThroughputReport rep;
    rep.sinr.resize(K);
    rep.throughput.resize(K);
    for (int k = 0; k < K; ++k)
        rep.t1 = std::max(rep.t1, std::abs(x[k] - cfg.init_pos_x0) / cfg.move_speed_v);
    const double t_it = std::max(0.0, cfg.block_T - rep.t1);
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        const ChannelVector h = channel_vector(channels[k], x[k], cfg.region_len_A);
        double sig = 0.0, intf = 0.0;
        for (int j = 0; j < K; ++j) {
            const double p = std::norm(h.entries.dot(w[j])); // conj(h)^T w
            (j == k ? sig : intf) += p;
        }
        rep.sinr[k] = sig / (intf + cfg.noise_power);
        rep.throughput[k] = t_it * std::log2(1.0 + rep.sinr[k]);
        mn = std::min(mn, rep.throughput[k]);
    }
    rep.min_throughput = mn;
    return rep;
}

// ---------------------------------------------------------------------------
// Beamforming subproblem: relaxed covariances W_k with positions fixed.
// All quantities are scaled (covariances by P_m, powers by sigma^2) so
// the solver sees O(1)..O(1e5) numbers.
// ---------------------------------------------------------------------------

struct BfSolution {
    std::vector<Eigen::MatrixXcd> w_cov; // W_k, unscaled (trace sums to <= P_m)
    Eigen::VectorXd alpha, beta;
    double eta = 0.0;
    bool ok = false;
};

inline conic::ConvexProgram build_beamforming_subproblem(
    const std::vector<UserChannel>& channels, const std::vector<double>& x,
    const Eigen::VectorXd& beta_i, double t_tilde, const ScenarioConfig& cfg) {
    const int K = static_cast<int>(channels.size());
    const int N = channels[0].n_tx();
    const double ln2 = std::log(2.0);
    const int vE = 0;                       // eta
    auto vA = [](int k) { return 1 + k; };  // alpha_k
    const int nA = 1;
    auto vB = [&](int k) { return 1 + K + k; }; // beta_k
    (void)nA;

    conic::ConvexProgram p;
    p.n_scalars = 1 + 2 * K;
    p.block_dims.assign(K, N);
    p.obj_c = Eigen::VectorXd::Zero(p.n_scalars);
    p.obj_c[vE] = 1.0;
    p.tol = 1e-9;

    // D_k = P_m h_k h_k^H / sigma^2, so received powers are tr(D_k W~_j)
    std::vector<Eigen::MatrixXcd> d(K);
    for (int k = 0; k < K; ++k) {
        const ChannelVector h = channel_vector(channels[k], x[k], cfg.region_len_A);
        d[k] = (cfg.p_max / cfg.noise_power) * (h.entries * h.entries.adjoint());
    }

    auto zero_a = [&] { return Eigen::VectorXd::Zero(p.n_scalars); };
    for (int k = 0; k < K; ++k) {
        { // t~ (alpha_k - beta_k)/ln2 >= eta
            conic::Constraint c;
            c.name = "rate-floor";
            c.a = zero_a();
            c.a[vA(k)] = t_tilde / ln2;
            c.a[vB(k)] = -t_tilde / ln2;
            c.a[vE] = -1.0;
            p.constraints.push_back(std::move(c));
        }
        { // 1 + sum_j tr(D_k W~_j) >= e^{alpha_k}
            conic::Constraint c;
            c.name = "received-power";
            c.b = 1.0;
            for (int j = 0; j < K; ++j) c.block_lin.emplace_back(j, d[k]);
            conic::ExpTerm e;
            e.expo_a = zero_a();
            e.expo_a[vA(k)] = 1.0;
            c.exps.push_back(std::move(e));
            p.constraints.push_back(std::move(c));
        }
        { // tangent of e^beta at beta_i dominates 1 + interference
            conic::Constraint c;
            c.name = "interference-cap";
            const double eb = std::exp(beta_i[k]);
            c.a = zero_a();
            c.a[vB(k)] = eb;
            c.b = (1.0 - beta_i[k]) * eb - 1.0;
            for (int j = 0; j < K; ++j)
                if (j != k) c.block_lin.emplace_back(j, Eigen::MatrixXcd(-d[k]));
            p.constraints.push_back(std::move(c));
        }
        { // beta_k >= 1e-8
            conic::Constraint c;
            c.name = "beta-floor";
            c.a = zero_a();
            c.a[vB(k)] = 1.0;
            c.b = -1e-8;
            p.constraints.push_back(std::move(c));
        }
    }
    { // sum_k tr(W~_k) <= 1
        conic::Constraint c;
        c.name = "power-budget";
        c.b = 1.0;
        for (int k = 0; k < K; ++k)
            c.block_lin.emplace_back(k, Eigen::MatrixXcd(-Eigen::MatrixXcd::Identity(N, N)));
        p.constraints.push_back(std::move(c));
    }

    // strictly feasible start: equal isotropic covariances at half power
    p.start_blocks.assign(K, Eigen::MatrixXcd::Identity(N, N) / (2.0 * K * N));
    p.start_scalars = Eigen::VectorXd::Zero(p.n_scalars);
    double eta0 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        const double per = d[k].trace().real() / (2.0 * K * N);
        const double recv = K * per;
        const double intf = (K - 1) * per;
        const double a0 = 0.5 * std::log1p(recv) - 1e-9;
        const double beq = (1.0 + intf) * std::exp(-beta_i[k]) - 1.0 + beta_i[k];
        const double b0 = std::max(beq + 1.0, 2e-8);
        p.start_scalars[vA(k)] = a0;
        p.start_scalars[vB(k)] = b0;
        eta0 = std::min(eta0, t_tilde * (a0 - b0) / ln2);
    }
    p.start_scalars[vE] = eta0 - 1.0;
    return p;
}

inline BfSolution solve_beamforming(const std::vector<UserChannel>& channels,
                                    const std::vector<double>& x, const Eigen::VectorXd& beta_i,
                                    double t_tilde, const ScenarioConfig& cfg) {
    conic::ConvexProgram p = build_beamforming_subproblem(channels, x, beta_i, t_tilde, cfg);
    conic::Solution sol = conic::solve(p);
    if (sol.status != conic::SolveStatus::Optimal) { // retry, relaxed tolerance
        p.tol *= 10.0;
        sol = conic::solve(p);
    }
    const int K = static_cast<int>(channels.size());
    BfSolution out;
    out.ok = sol.status == conic::SolveStatus::Optimal;
    out.eta = sol.scalars[0];
    out.alpha.resize(K);
    out.beta.resize(K);
    for (int k = 0; k < K; ++k) {
        out.alpha[k] = sol.scalars[1 + k];
        out.beta[k] = sol.scalars[1 + K + k];
        out.w_cov.push_back(cfg.p_max * sol.blocks[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Position subproblem: coordinates x_k with covariances fixed. The
// bilinear delay/rate couplings are replaced by their standard concave
// minorants / convex majorants around the local points.
// ---------------------------------------------------------------------------

struct PosLocalPoints {
    std::vector<double> x;
    double zeta = 0.0;          // > 0
    Eigen::VectorXd alpha, beta; // > 0
};

struct PosSolution {
    std::vector<double> x;
    double zeta = 0.0;
    Eigen::VectorXd alpha, beta;
    double eta = 0.0;
    bool ok = false;
};

inline conic::ConvexProgram build_position_subproblem(
    const std::vector<UserChannel>& channels, const std::vector<Eigen::MatrixXcd>& w_cov,
    const PosLocalPoints& lp, bool with_delay, const ScenarioConfig& cfg) {
    const int K = static_cast<int>(channels.size());
    const double ln2 = std::log(2.0);
    const double s2 = cfg.noise_power;
    const double A = cfg.region_len_A;

    // layout: x_k | eta | [zeta] | alpha_k | beta_k
    auto vX = [](int k) { return k; };
    const int vE = K;
    const int vZ = with_delay ? K + 1 : -1;
    const int base = with_delay ? K + 2 : K + 1;
    auto vA = [&](int k) { return base + k; };
    auto vB = [&](int k) { return base + K + k; };

    conic::ConvexProgram p;
    p.n_scalars = base + 2 * K;
    p.obj_c = Eigen::VectorXd::Zero(p.n_scalars);
    p.obj_c[vE] = 1.0;
    p.tol = 1e-9;
    auto zero_a = [&] { return Eigen::VectorXd::Zero(p.n_scalars); };
    auto zero_q = [&] { return Eigen::MatrixXd::Zero(p.n_scalars, p.n_scalars); };

    // scaled received-power mixtures m_kj(x)/sigma^2 expanded at x_k^i
    struct Quad {
        double v, s, d; // value, slope, curvature bound at the local point
    };
    std::vector<std::vector<Quad>> q(K, std::vector<Quad>(K));
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j) {
            CosineMixture m = cov_gain_mixture(channels[k], w_cov[j]);
            m.scale(1.0 / s2);
            q[k][j] = {m.value(lp.x[k]), m.slope(lp.x[k]), m.curvature_bound()};
        }

    for (int k = 0; k < K; ++k) {
        const double xi = lp.x[k];
        { // min-rate surrogate replacing (T - zeta)(alpha - beta) >= eta ln2
            conic::Constraint c;
            c.name = "rate-floor";
            c.a = zero_a();
            c.a[vA(k)] = cfg.block_T;
            c.a[vB(k)] = -cfg.block_T;
            c.a[vE] = -ln2;
            if (with_delay) {
                const double zb = lp.zeta * lp.beta[k];
                c.b = zb * (1.0 - std::log(lp.zeta) - std::log(lp.beta[k]));
                c.logs.push_back({zb, vZ});
                c.logs.push_back({zb, vB(k)});
                c.Q = zero_q();
                c.Q(vZ, vZ) = lp.alpha[k] / lp.zeta;
                c.Q(vA(k), vA(k)) = lp.zeta / lp.alpha[k];
            }
            p.constraints.push_back(std::move(c));
        }
        { // sum_j received lower surrogate + 1 >= e^{alpha_k}
            conic::Constraint c;
            c.name = "received-power";
            double v = 0, sl = 0, dd = 0;
            for (int j = 0; j < K; ++j) {
                v += q[k][j].v;
                sl += q[k][j].s;
                dd += q[k][j].d;
            }
            c.b = 1.0 + v - sl * xi - 0.5 * dd * xi * xi;
            c.a = zero_a();
            c.a[vX(k)] = sl + dd * xi;
            c.Q = zero_q();
            c.Q(vX(k), vX(k)) = dd;
            conic::ExpTerm e;
            e.expo_a = zero_a();
            e.expo_a[vA(k)] = 1.0;
            c.exps.push_back(std::move(e));
            p.constraints.push_back(std::move(c));
        }
        { // interference upper surrogate + 1 <= tangent of e^{beta_k}
            conic::Constraint c;
            c.name = "interference-cap";
            double v = 0, sl = 0, dd = 0;
            for (int j = 0; j < K; ++j)
                if (j != k) {
                    v += q[k][j].v;
                    sl += q[k][j].s;
                    dd += q[k][j].d;
                }
            const double eb = std::exp(lp.beta[k]);
            c.b = (1.0 - lp.beta[k]) * eb - 1.0 - (v - sl * xi + 0.5 * dd * xi * xi);
            c.a = zero_a();
            c.a[vB(k)] = eb;
            c.a[vX(k)] = -(sl - dd * xi);
            c.Q = zero_q();
            c.Q(vX(k), vX(k)) = dd;
            p.constraints.push_back(std::move(c));
        }
        if (with_delay) { // zeta >= |x_k - x0|/v
            conic::Constraint c;
            c.name = "delay-above";
            c.a = zero_a();
            c.a[vZ] = 1.0;
            c.a[vX(k)] = -1.0 / cfg.move_speed_v;
            c.b = cfg.init_pos_x0 / cfg.move_speed_v;
            p.constraints.push_back(std::move(c));
            conic::Constraint c2;
            c2.name = "delay-below";
            c2.a = zero_a();
            c2.a[vZ] = 1.0;
            c2.a[vX(k)] = 1.0 / cfg.move_speed_v;
            c2.b = -cfg.init_pos_x0 / cfg.move_speed_v;
            p.constraints.push_back(std::move(c2));
        }
        auto affine = [&](const char* name, double b, int i, double ai) {
            conic::Constraint c;
            c.name = name;
            c.b = b;
            c.a = zero_a();
            c.a[i] = ai;
            p.constraints.push_back(std::move(c));
        };
        affine("x-lo", 0.0, vX(k), 1.0);
        affine("x-hi", A, vX(k), -1.0);
        affine("beta-floor", -1e-8, vB(k), 1.0);
    }

    // strictly feasible start at the local positions
    p.start_scalars = Eigen::VectorXd::Zero(p.n_scalars);
    double eta0 = std::numeric_limits<double>::infinity();
    double zmax = 0.0;
    for (int k = 0; k < K; ++k) {
        const double xs = std::clamp(lp.x[k], 1e-9 * A, (1.0 - 1e-9) * A);
        p.start_scalars[vX(k)] = xs;
        zmax = std::max(zmax, std::abs(xs - cfg.init_pos_x0) / cfg.move_speed_v);
    }
    const double z0 = zmax + 1e-6 * A / cfg.move_speed_v + 1e-12;
    if (with_delay) p.start_scalars[vZ] = z0;
    for (int k = 0; k < K; ++k) {
        const double xs = p.start_scalars[vX(k)];
        const double dx = xs - lp.x[k];
        double recv_lb = 0.0, intf_ub = 0.0;
        for (int j = 0; j < K; ++j) {
            const Quad& qq = q[k][j];
            recv_lb += qq.v + qq.s * dx - 0.5 * qq.d * dx * dx;
            if (j != k) intf_ub += qq.v + qq.s * dx + 0.5 * qq.d * dx * dx;
        }
        const double a0 = recv_lb > 0.0 ? 0.5 * std::log1p(recv_lb) - 1e-9 : -1.0;
        const double eb = std::exp(lp.beta[k]);
        const double beq = (1.0 + intf_ub - (1.0 - lp.beta[k]) * eb) / eb;
        const double b0 = std::max(beq + 1.0, 2e-8);
        p.start_scalars[vA(k)] = a0;
        p.start_scalars[vB(k)] = b0;
        double g1;
        if (with_delay) {
            const double zb = lp.zeta * lp.beta[k];
            g1 = zb * (1.0 + std::log(z0) + std::log(b0) - std::log(lp.zeta) -
                       std::log(lp.beta[k])) -
                 0.5 * (lp.alpha[k] / lp.zeta * z0 * z0 + lp.zeta / lp.alpha[k] * a0 * a0) +
                 cfg.block_T * (a0 - b0);
        } else {
            g1 = cfg.block_T * (a0 - b0);
        }
        eta0 = std::min(eta0, g1 / ln2);
    }
    p.start_scalars[vE] = eta0 - 1.0;
    return p;
}

inline PosSolution solve_positions(const std::vector<UserChannel>& channels,
                                   const std::vector<Eigen::MatrixXcd>& w_cov,
                                   const PosLocalPoints& lp, bool with_delay,
                                   const ScenarioConfig& cfg) {
    conic::ConvexProgram p = build_position_subproblem(channels, w_cov, lp, with_delay, cfg);
    conic::Solution sol = conic::solve(p);
    if (sol.status != conic::SolveStatus::Optimal) {
        p.tol *= 10.0;
        sol = conic::solve(p);
    }
    const int K = static_cast<int>(channels.size());
    const int base = with_delay ? K + 2 : K + 1;
    PosSolution out;
    out.ok = sol.status == conic::SolveStatus::Optimal;
    out.x.resize(K);
    out.alpha.resize(K);
    out.beta.resize(K);
    for (int k = 0; k < K; ++k) {
        out.x[k] = std::clamp(sol.scalars[k], 0.0, cfg.region_len_A);
        out.alpha[k] = sol.scalars[base + k];
        out.beta[k] = sol.scalars[base + K + k];
    }
    out.eta = sol.scalars[K];
    out.zeta = with_delay ? sol.scalars[K + 1] : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Rank-one recovery
// ---------------------------------------------------------------------------

struct RankOneReport {
    std::vector<double> eig_ratio; // lambda_1 / trace per user
    std::vector<Eigen::VectorXcd> w;
    double min_throughput = 0.0;
    double eta_relaxed = 0.0;
    bool used_randomization = false;
};

inline RankOneReport gaussian_randomization(const std::vector<Eigen::MatrixXcd>& w_cov,
                                            const std::vector<UserChannel>& channels,
                                            const std::vector<double>& x,
                                            const ScenarioConfig& cfg, int n_rand) {
    const int K = static_cast<int>(w_cov.size());
    const int N = static_cast<int>(w_cov[0].rows());
    RankOneReport rep;

    std::vector<Eigen::VectorXd> evals(K);
    std::vector<Eigen::MatrixXcd> evecs(K);
    bool all_rank_one = true;
    for (int k = 0; k < K; ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w_cov[k]);
        evals[k] = es.eigenvalues().cwiseMax(0.0);
        evecs[k] = es.eigenvectors();
        const double tr = evals[k].sum();
        const double ratio = tr > 0.0 ? evals[k].maxCoeff() / tr : 1.0;
        rep.eig_ratio.push_back(ratio);
        if (ratio <= 1.0 - 1e-6) all_rank_one = false;
    }

    auto dominant = [&] {
        std::vector<Eigen::VectorXcd> w(K);
        for (int k = 0; k < K; ++k) {
            const double tr = evals[k].sum();
            w[k] = std::sqrt(tr) * evecs[k].col(N - 1); // eigenvalues ascend
        }
        return w;
    };

    if (all_rank_one) {
        rep.w = dominant();
        rep.min_throughput = sinr_and_throughput(channels, x, rep.w, cfg).min_throughput;
        return rep;
    }

    rep.used_randomization = true;
    rep.w = dominant();
    rep.min_throughput = sinr_and_throughput(channels, x, rep.w, cfg).min_throughput;
    for (int c = 1; c <= n_rand; ++c) {
        Rng rng = Rng::split(cfg.rng_seed, kStreamRandomization, static_cast<std::uint64_t>(c));
        std::vector<Eigen::VectorXcd> w(K);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            Eigen::VectorXcd g(N);
            for (int n = 0; n < N; ++n) g[n] = rng.cscg(1.0);
            w[k] = evecs[k] * (evals[k].cwiseSqrt().asDiagonal() * (evecs[k].adjoint() * g));
            total += w[k].squaredNorm();
        }
        if (total <= 0.0) continue;
        const double s = std::sqrt(cfg.p_max / total);
        for (auto& wk : w) wk *= s;
        const double val = sinr_and_throughput(channels, x, w, cfg).min_throughput;
        if (val > rep.min_throughput) {
            rep.min_throughput = val;
            rep.w = std::move(w);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Alternating optimization
// ---------------------------------------------------------------------------

enum class MuScheme { Ao, MaxMinSinr, Fpa };

struct MuResult {
    std::vector<double> x;
    std::vector<Eigen::VectorXcd> w;
    double min_throughput = 0.0; // after rank-one recovery, true delay
    double eta_relaxed = 0.0;    // final relaxed objective
    double t1 = 0.0;
    std::vector<double> eta_trace; // subproblem objective per round
    std::vector<double> eig_ratio;
    bool used_randomization = false;
    int iterations = 0;
    bool ok = true;
};

namespace detail_mu {
inline constexpr int kAoCap = 100;

// equal-power per-user MRT beams at the initial positions seed the
// interference-dependent local points
inline void initial_points(const std::vector<UserChannel>& channels, const ScenarioConfig& cfg,
                           Eigen::VectorXd& alpha, Eigen::VectorXd& beta) {
    const int K = static_cast<int>(channels.size());
    std::vector<Eigen::VectorXcd> w(K);
    std::vector<ChannelVector> h(K);
    for (int k = 0; k < K; ++k) {
        h[k] = channel_vector(channels[k], cfg.init_pos_x0, cfg.region_len_A);
        w[k] = mrt_beamformer(h[k], cfg.p_max / K);
    }
    alpha.resize(K);
    beta.resize(K);
    for (int k = 0; k < K; ++k) {
        double recv = 0.0, intf = 0.0;
        for (int j = 0; j < K; ++j) {
            const double p = std::norm(h[k].entries.dot(w[j]));
            recv += p;
            if (j != k) intf += p;
        }
        alpha[k] = std::max(std::log1p(recv / cfg.noise_power), 1e-6);
        beta[k] = std::max(std::log1p(intf / cfg.noise_power), 1e-6);
    }
}
} // namespace detail_mu

inline MuResult alternating_optimize(const std::vector<UserChannel>& channels,
                                     const ScenarioConfig& cfg, MuScheme scheme = MuScheme::Ao) {
    const int K = static_cast<int>(channels.size());
    MuResult res;
    res.x.assign(K, cfg.init_pos_x0);
    if (cfg.block_T <= 0.0) return res;

    Eigen::VectorXd alpha_i, beta_i;
    detail_mu::initial_points(channels, cfg, alpha_i, beta_i);
    const double zeta_floor = 1e-9 * cfg.region_len_A / cfg.move_speed_v;
    double zeta_i = 0.01 * cfg.region_len_A / cfg.move_speed_v;

    auto t_tilde_at = [&](const std::vector<double>& x) {
        if (scheme == MuScheme::MaxMinSinr) return cfg.block_T; // delay ignored
        double t1 = 0.0;
        for (int k = 0; k < K; ++k)
            t1 = std::max(t1, std::abs(x[k] - cfg.init_pos_x0) / cfg.move_speed_v);
        return std::max(0.0, cfg.block_T - t1);
    };

    // best (x, covariance) pair seen across all beamforming solves; the
    // warm-start phase below walks the same path as the FPA scheme, so the
    // returned design never falls behind beamforming-only refinement
    std::vector<double> best_x = res.x;
    BfSolution best_bf;
    double best_eta = -std::numeric_limits<double>::infinity();

    BfSolution bf;
    double eta_prev = -std::numeric_limits<double>::infinity();

    // phase 1: refine the beams at the initial positions until the
    // objective stalls (this IS the whole loop for the Fpa scheme)
    for (int it = 0; it < detail_mu::kAoCap; ++it) {
        res.iterations = it + 1;
        bf = solve_beamforming(channels, res.x, beta_i, t_tilde_at(res.x), cfg);
        if (!bf.ok) {
            res.ok = false;
            break;
        }
        beta_i = bf.beta;
        if (bf.eta > best_eta) {
            best_eta = bf.eta;
            best_bf = bf;
            best_x = res.x;
        }
        res.eta_trace.push_back(bf.eta);
        if (it > 0 && bf.eta - eta_prev <= cfg.sca_eps * std::max(std::abs(eta_prev), 1e-12))
            break;
        eta_prev = bf.eta;
    }

    // phase 2 (safeguarded alternation): propose positions from the current
    // beams, then re-solve the beams at the proposal; a move is kept only if
    // the objective does not regress, so the recorded trace stays monotone
    // and the final design dominates beamforming-only refinement
    for (int it = 0; res.ok && scheme != MuScheme::Fpa && it < detail_mu::kAoCap; ++it) {
        PosLocalPoints lp;
        lp.x = best_x;
        lp.zeta = std::max(zeta_i, zeta_floor);
        lp.alpha = best_bf.alpha.cwiseMax(1e-9);
        lp.beta = best_bf.beta.cwiseMax(1e-9);
        const PosSolution pos =
            solve_positions(channels, best_bf.w_cov, lp, scheme == MuScheme::Ao, cfg);
        if (!pos.ok) break; // keep the current design

        res.iterations += 1;
        const BfSolution cand = solve_beamforming(channels, pos.x, pos.beta,
                                                  t_tilde_at(pos.x), cfg);
        if (!cand.ok || cand.eta < best_eta) break; // reject the move
        best_bf = cand;
        best_x = pos.x;
        res.eta_trace.push_back(cand.eta);
        double zmax = zeta_floor;
        for (int k = 0; k < K; ++k)
            zmax = std::max(zmax, std::abs(pos.x[k] - cfg.init_pos_x0) / cfg.move_speed_v);
        zeta_i = zmax;
        if (cand.eta - best_eta <= cfg.sca_eps * std::max(std::abs(best_eta), 1e-12)) {
            best_eta = cand.eta;
            break;
        }
        best_eta = cand.eta;
    }
    if (!res.ok || !best_bf.ok) {
        res.ok = false;
        return res;
    }
    bf = best_bf;
    res.x = best_x;
    RankOneReport rank = gaussian_randomization(bf.w_cov, channels, res.x, cfg, cfg.n_rand);
    res.w = rank.w;
    res.eta_relaxed = bf.eta;
    res.min_throughput = rank.min_throughput;
    res.eig_ratio = rank.eig_ratio;
    res.used_randomization = rank.used_randomization;
    for (int k = 0; k < K; ++k)
        res.t1 = std::max(res.t1, std::abs(res.x[k] - cfg.init_pos_x0) / cfg.move_speed_v);
    return res;
}

} // namespace matopt

#endif
