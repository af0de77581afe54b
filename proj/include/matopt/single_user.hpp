// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_SINGLE_USER_HPP
#define MATOPT_SINGLE_USER_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "matopt/channel.hpp"
#include "matopt/conic.hpp"
#include "matopt/scenario.hpp"

namespace matopt {

// Single-user: full power on the MRT beam, so the SNR at position x is
// P_m ||h(x)||^2 / sigma^2 and only the position is optimized.

inline double su_rate(const UserChannel& ch, const ScenarioConfig& cfg, double x) {
    return std::log2(1.0 + cfg.p_max * gain_closed_form(ch, x) / cfg.noise_power);
}

// delay-discounted throughput max{0, T - |x - x0|/v} * log2(1 + SNR(x))
inline double throughput_su(const UserChannel& ch, const ScenarioConfig& cfg, double x) {
    const double t_move = std::abs(x - cfg.init_pos_x0) / cfg.move_speed_v;
    const double t_it = cfg.block_T - t_move;
    if (t_it <= 0.0) return 0.0;
    return t_it * su_rate(ch, cfg, x);
}

// w = sqrt(P) h / ||h||
inline Eigen::VectorXcd mrt_beamformer(const ChannelVector& h, double p_max) {
    const double n = h.entries.norm();
    if (n == 0.0) throw std::invalid_argument("mrt_beamformer: zero channel");
    return std::sqrt(p_max) / n * h.entries;
}

// received power y3(x) = P_m ||h(x)||^2, its slope, and a curvature
// bound delta valid for every x (|y3''| <= delta)
struct Y3Info {
    double value = 0.0;
    double slope = 0.0;
    double delta = 0.0; // shared by the lower and upper quadratic surrogates
};

inline Y3Info y3_and_derivatives(const UserChannel& ch, const ScenarioConfig& cfg, double x) {
    const CosineMixture m = gain_mixture(ch); // unscaled ||h||^2
    Y3Info out;
    out.value = cfg.p_max * m.value(x);
    out.slope = cfg.p_max * m.slope(x);
    out.delta = cfg.p_max * m.curvature_bound();
    return out;
}

// Local expansion state of the position iteration.
struct ScaStateSU {
    double x = 0.0;      // expansion point x^i
    double q = 0.0;      // > 0, slack |x - x0| local point
    double u = 0.0;      // y3(x^i)
    double w = 0.0;      // > 0, rate local point log2(1 + y3/sigma^2)
    double delta = 0.0;  // curvature bound
    std::vector<double> trace; // true objective after each accepted iterate
};

inline ScaStateSU make_sca_state(const UserChannel& ch, const ScenarioConfig& cfg, double x) {
    ScaStateSU st;
    st.x = x;
    const Y3Info y = y3_and_derivatives(ch, cfg, x);
    st.q = std::max(1e-6 * ch.wavelength, std::abs(x - cfg.init_pos_x0));
    st.u = y.value;
    st.w = std::log2(1.0 + y.value / cfg.noise_power);
    st.delta = y.delta;
    return st;
}

// Convex restriction around the current iterate. Variables
// (x, q, u~, w, r, p) with u~ = u/sigma^2; the objective epigraph uses
// r <= log2(1 + u~) through 1 + u~ >= 2^r, and the delay cost is
// majorized by p >= (w^i/q^i) q^2 + (q^i/w^i) w^2 >= 2 q w.
inline conic::ConvexProgram build_subproblem_P24(const ScaStateSU& st, const UserChannel& ch,
                                                 const ScenarioConfig& cfg) {
    (void)ch;
    constexpr int X = 0, Q = 1, U = 2, W = 3, R = 4, P = 5;
    const double s2 = cfg.noise_power;
    const double ln2 = std::log(2.0);
    const Y3Info y = y3_and_derivatives(ch, cfg, st.x);
    const double k0 = y.value - y.slope * st.x; // affine part of the tangent
    const double d = y.delta;

    conic::ConvexProgram p;
    p.n_scalars = 6;
    p.obj_c = Eigen::VectorXd::Zero(6);
    p.obj_c[R] = cfg.block_T;
    p.obj_c[P] = -1.0 / (2.0 * cfg.move_speed_v);
    p.tol = 1e-10;

    auto add = [&p](conic::Constraint c) { p.constraints.push_back(std::move(c)); };

    { // 1 + u~ - 2^r >= 0
        conic::Constraint c;
        c.name = "rate-epigraph";
        c.b = 1.0;
        c.a = Eigen::VectorXd::Zero(6);
        c.a[U] = 1.0;
        conic::ExpTerm e;
        e.coeff = 1.0;
        e.expo_a = Eigen::VectorXd::Zero(6);
        e.expo_a[R] = ln2;
        c.exps.push_back(std::move(e));
        add(std::move(c));
    }
    { // u~ <= y3_lb(x)/sigma^2 (quadratic minorant around x^i)
        conic::Constraint c;
        c.name = "gain-minorant";
        c.b = (k0 - 0.5 * d * st.x * st.x) / s2;
        c.a = Eigen::VectorXd::Zero(6);
        c.a[X] = (y.slope + d * st.x) / s2;
        c.a[U] = -1.0;
        c.Q = Eigen::MatrixXd::Zero(6, 6);
        c.Q(X, X) = d / s2;
        add(std::move(c));
    }
    { // 2^{w^i}(1 + (w - w^i) ln2) - 1 >= y3_ub(x)/sigma^2
        conic::Constraint c;
        c.name = "rate-majorant";
        const double tw = std::exp2(st.w);
        c.b = tw * (1.0 - st.w * ln2) - 1.0 - (k0 + 0.5 * d * st.x * st.x) / s2;
        c.a = Eigen::VectorXd::Zero(6);
        c.a[W] = tw * ln2;
        c.a[X] = -(y.slope - d * st.x) / s2;
        c.Q = Eigen::MatrixXd::Zero(6, 6);
        c.Q(X, X) = d / s2;
        add(std::move(c));
    }
    { // p >= (w^i/q^i) q^2 + (q^i/w^i) w^2
        conic::Constraint c;
        c.name = "delay-majorant";
        c.a = Eigen::VectorXd::Zero(6);
        c.a[P] = 1.0;
        c.Q = Eigen::MatrixXd::Zero(6, 6);
        c.Q(Q, Q) = 2.0 * st.w / st.q;
        c.Q(W, W) = 2.0 * st.q / st.w;
        add(std::move(c));
    }
    auto affine = [&](const char* name, double b, std::initializer_list<std::pair<int, double>> a) {
        conic::Constraint c;
        c.name = name;
        c.b = b;
        c.a = Eigen::VectorXd::Zero(6);
        for (auto [i, v] : a) c.a[i] = v;
        add(std::move(c));
    };
    affine("q-above", cfg.init_pos_x0, {{Q, 1.0}, {X, -1.0}});  // q >= x - x0
    affine("q-below", -cfg.init_pos_x0, {{Q, 1.0}, {X, 1.0}});  // q >= x0 - x
    affine("q-cap", cfg.move_speed_v * cfg.block_T, {{Q, -1.0}}); // q <= vT
    affine("x-lo", 0.0, {{X, 1.0}});
    affine("x-hi", cfg.region_len_A, {{X, -1.0}});

    // strictly feasible start near the expansion point: pull boundary
    // iterates slightly inside the reachable set and the region
    const double vt = cfg.move_speed_v * cfg.block_T;
    double x0s = st.x;
    const double dmax = vt * (1.0 - 1e-6);
    if (std::abs(x0s - cfg.init_pos_x0) > dmax)
        x0s = cfg.init_pos_x0 + (x0s > cfg.init_pos_x0 ? dmax : -dmax);
    x0s = std::clamp(x0s, 1e-9 * cfg.region_len_A, cfg.region_len_A * (1.0 - 1e-9));
    const double dist = std::abs(x0s - cfg.init_pos_x0);
    const double q0 = 0.5 * (dist + vt);
    const double dx = x0s - st.x;
    const double ylb0 = (y.value + y.slope * dx - 0.5 * d * dx * dx) / s2;
    const double u0 = ylb0 > 0.0 ? 0.5 * ylb0 : ylb0 - 1.0;
    const double w0 = st.w + 1.0;
    Eigen::VectorXd start(6);
    start[X] = x0s;
    start[Q] = q0;
    start[U] = u0;
    start[W] = w0;
    start[R] = u0 > -1.0 ? std::log2(1.0 + u0) - 1.0 : -40.0;
    start[P] = st.w / st.q * q0 * q0 + st.q / st.w * w0 * w0 + 1.0;
    p.start_scalars = start;
    return p;
}

struct SuResult {
    double x = 0.0;
    double throughput = 0.0;
    double gain = 0.0; // channel power gain at x
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace; // true objective per iteration (winning start)
};

namespace detail_su {
inline constexpr int kScaCap = 500;

// one SCA run from a fixed start
inline SuResult sca_from(const UserChannel& ch, const ScenarioConfig& cfg, double x_init) {
    const double vt = cfg.move_speed_v * cfg.block_T;
    const double lo = std::max(0.0, cfg.init_pos_x0 - vt);
    const double hi = std::min(cfg.region_len_A, cfg.init_pos_x0 + vt);
    double x = std::clamp(x_init, lo, hi);

    SuResult res;
    if (ch.n_paths() == 1) { // flat gain: moving only burns time
        res.x = cfg.init_pos_x0;
        res.throughput = throughput_su(ch, cfg, res.x);
        res.gain = gain_closed_form(ch, res.x);
        res.converged = true;
        res.trace.push_back(res.throughput);
        return res;
    }

    double f_prev = throughput_su(ch, cfg, x);
    res.trace.push_back(f_prev);
    for (int it = 0; it < kScaCap; ++it) {
        ScaStateSU st = make_sca_state(ch, cfg, x);
        const conic::ConvexProgram prog = build_subproblem_P24(st, ch, cfg);
        const conic::Solution sol = conic::solve(prog);
        if (sol.status != conic::SolveStatus::Optimal) break;
        const double x_new = std::clamp(sol.scalars[0], 0.0, cfg.region_len_A);
        const double f_new = throughput_su(ch, cfg, x_new);
        res.iterations = it + 1;
        if (f_new + 1e-12 < f_prev) break; // surrogate stalled; keep the old point
        x = x_new;
        res.trace.push_back(f_new);
        if (f_new - f_prev <= cfg.sca_eps * std::max(std::abs(f_prev), 1e-12)) {
            f_prev = f_new;
            res.converged = true;
            break;
        }
        f_prev = f_new;
    }
    res.x = x;
    res.throughput = f_prev;
    res.gain = gain_closed_form(ch, x);
    return res;
}
} // namespace detail_su

// Algorithm: iterate the convex restriction around the current point,
// re-expanding the surrogates each round, until the true objective's
// fractional increase drops below sca_eps. Multi-start over the
// reachable interval picks the best local solution.
inline SuResult optimize_position(const UserChannel& ch, const ScenarioConfig& cfg,
                                  double x_init) {
    const double vt = cfg.move_speed_v * cfg.block_T;
    const double lo = std::max(0.0, cfg.init_pos_x0 - vt);
    const double hi = std::min(cfg.region_len_A, cfg.init_pos_x0 + vt);

    SuResult best = detail_su::sca_from(ch, cfg, x_init);
    for (int s = 1; s < cfg.multi_starts; ++s) {
        const double xs = lo + (hi - lo) * (s + 0.5) / (cfg.multi_starts + 1.0);
        SuResult r = detail_su::sca_from(ch, cfg, xs);
        if (r.throughput > best.throughput) best = r;
    }
    return best;
}

// Gain-only baseline: each round maximizes the quadratic minorant of
// y3 over [0, A], whose argmax is x^i + y3'(x^i)/delta clamped.
inline SuResult max_snr_position(const UserChannel& ch, const ScenarioConfig& cfg,
                                 double x_init) {
    auto run = [&](double x) {
        SuResult r;
        if (ch.n_paths() == 1) {
            r.x = x;
            r.gain = gain_closed_form(ch, x);
            r.converged = true;
        } else {
            double g_prev = gain_closed_form(ch, x);
            for (int it = 0; it < detail_su::kScaCap; ++it) {
                const Y3Info y = y3_and_derivatives(ch, cfg, x);
                if (y.delta == 0.0) break;
                const double x_new = std::clamp(x + y.slope / y.delta, 0.0, cfg.region_len_A);
                const double g_new = gain_closed_form(ch, x_new);
                r.iterations = it + 1;
                if (g_new < g_prev) break;
                x = x_new;
                if (g_new - g_prev <= cfg.sca_eps * std::max(g_prev, 1e-300)) {
                    r.converged = true;
                    g_prev = g_new;
                    break;
                }
                g_prev = g_new;
            }
            r.x = x;
            r.gain = g_prev;
        }
        r.throughput = throughput_su(ch, cfg, r.x);
        return r;
    };
    SuResult best = run(std::clamp(x_init, 0.0, cfg.region_len_A));
    for (int s = 1; s < cfg.multi_starts; ++s) {
        SuResult r = run(cfg.region_len_A * (s + 0.5) / (cfg.multi_starts + 1.0));
        if (r.gain > best.gain) best = r;
    }
    return best;
}

// Exhaustive reference over {0, step, ..., A}; ties break toward the
// smallest move from x0.
inline std::pair<double, double> grid_oracle(const UserChannel& ch, const ScenarioConfig& cfg,
                                             double step) {
    if (step <= 0.0) throw std::invalid_argument("grid_oracle: step must be positive");
    double best_x = 0.0;
    double best_v = -1.0;
    const long n = static_cast<long>(std::floor(cfg.region_len_A / step));
    for (long i = 0; i <= n; ++i) {
        const double x = std::min(i * step, cfg.region_len_A);
        const double v = throughput_su(ch, cfg, x);
        const bool better =
            v > best_v ||
            (v == best_v && std::abs(x - cfg.init_pos_x0) < std::abs(best_x - cfg.init_pos_x0));
        if (better) {
            best_v = v;
            best_x = x;
        }
    }
    return {best_x, best_v};
}

} // namespace matopt

#endif
