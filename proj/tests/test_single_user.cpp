// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matopt/single_user.hpp"

using namespace matopt;

namespace {
ScenarioConfig desk_cfg(std::uint64_t seed, int l_paths = 4) {
    ScenarioConfig cfg;
    cfg.rng_seed = seed;
    cfg.l_paths = l_paths;
    return cfg;
}
} // namespace

TEST(ThroughputSu, ZeroDelayAndExhaustedBlock) {
    const ScenarioConfig cfg = desk_cfg(1);
    const UserChannel ch = sample_scenario(cfg).front();
    const double at_x0 = throughput_su(ch, cfg, cfg.init_pos_x0);
    EXPECT_NEAR(at_x0, cfg.block_T * su_rate(ch, cfg, cfg.init_pos_x0), 1e-12 * at_x0);

    // |x - x0| = vT consumes the whole block
    ScenarioConfig short_cfg = cfg;
    short_cfg.block_T = 0.5; // vT = 0.05 <= x0
    const double x_edge = short_cfg.init_pos_x0 - short_cfg.move_speed_v * short_cfg.block_T;
    ASSERT_GE(x_edge, 0.0);
    EXPECT_DOUBLE_EQ(throughput_su(ch, short_cfg, x_edge), 0.0);
    EXPECT_GE(throughput_su(ch, short_cfg, 0.0), 0.0);
}

TEST(ThroughputSu, MatchesDirectMrtComposition) {
    Rng r(2);
    for (int i = 0; i < 50; ++i) {
        const ScenarioConfig cfg = desk_cfg(100 + i, 2 + i % 5);
        const UserChannel ch = sample_scenario(cfg).front();
        const double x = r.uniform(0.0, cfg.region_len_A);
        const ChannelVector h = channel_vector(ch, x, cfg.region_len_A);
        const Eigen::VectorXcd w = mrt_beamformer(h, cfg.p_max);
        const double snr = std::norm(h.entries.dot(w)) / cfg.noise_power;
        const double direct =
            std::max(0.0, cfg.block_T - std::abs(x - cfg.init_pos_x0) / cfg.move_speed_v) *
            std::log2(1.0 + snr);
        ASSERT_NEAR(throughput_su(ch, cfg, x), direct, 1e-9 * std::max(direct, 1e-12));
    }
}

TEST(Y3, SinglePathFlat) {
    const ScenarioConfig cfg = desk_cfg(3, 1);
    const UserChannel ch = sample_scenario(cfg).front();
    const Y3Info y = y3_and_derivatives(ch, cfg, 0.07);
    EXPECT_NEAR(y.value, cfg.p_max * ch.g_const, 1e-12 * y.value);
    EXPECT_DOUBLE_EQ(y.slope, 0.0);
    EXPECT_DOUBLE_EQ(y.delta, 0.0);
}

TEST(Y3, DerivativeFiniteDifference) {
    const ScenarioConfig cfg = desk_cfg(4, 5);
    const UserChannel ch = sample_scenario(cfg).front();
    Rng r(4);
    const double h = 1e-6 * ch.wavelength;
    for (int i = 0; i < 100; ++i) {
        const double x = r.uniform(0.01, cfg.region_len_A - 0.01);
        const double fd = (y3_and_derivatives(ch, cfg, x + h).value -
                           y3_and_derivatives(ch, cfg, x - h).value) /
                          (2.0 * h);
        const double an = y3_and_derivatives(ch, cfg, x).slope;
        const double scale =
            std::max({std::abs(an), std::abs(fd), 1e-6 * y3_and_derivatives(ch, cfg, x).value});
        ASSERT_NEAR(an, fd, 1e-6 * scale);
    }
}

TEST(Y3, CurvatureBoundDominates) {
    Rng r(6);
    for (int i = 0; i < 10; ++i) {
        const ScenarioConfig cfg = desk_cfg(200 + i, 2 + i % 5);
        const UserChannel ch = sample_scenario(cfg).front();
        CosineMixture m = gain_mixture(ch);
        m.scale(cfg.p_max);
        const double delta = y3_and_derivatives(ch, cfg, 0.0).delta;
        EXPECT_NEAR(delta, m.curvature_bound(), 1e-12 * std::max(delta, 1e-300));
        for (int j = 0; j < 100; ++j) {
            const double x = r.uniform(0.0, cfg.region_len_A);
            ASSERT_LE(std::abs(m.second_derivative(x)), delta * (1.0 + 1e-12));
        }
    }
}

TEST(Surrogates, SandwichAndTightness) {
    Rng r(8);
    for (int i = 0; i < 20; ++i) {
        const ScenarioConfig cfg = desk_cfg(300 + i, 2 + i % 5);
        const UserChannel ch = sample_scenario(cfg).front();
        const double xi = r.uniform(0.0, cfg.region_len_A);
        const Y3Info y = y3_and_derivatives(ch, cfg, xi);
        auto lb = [&](double x) {
            return y.value + y.slope * (x - xi) - 0.5 * y.delta * (x - xi) * (x - xi);
        };
        auto ub = [&](double x) {
            return y.value + y.slope * (x - xi) + 0.5 * y.delta * (x - xi) * (x - xi);
        };
        // tight at the expansion point
        ASSERT_NEAR(lb(xi), y3_and_derivatives(ch, cfg, xi).value, 1e-9);
        ASSERT_NEAR(ub(xi), y3_and_derivatives(ch, cfg, xi).value, 1e-9);
        for (int j = 0; j < 50; ++j) {
            const double x = r.uniform(0.0, cfg.region_len_A);
            const double v = y3_and_derivatives(ch, cfg, x).value;
            ASSERT_LE(lb(x), v + 1e-9 * std::max(1.0, std::abs(v)));
            ASSERT_GE(ub(x), v - 1e-9 * std::max(1.0, std::abs(v)));
        }
    }
}

TEST(Surrogates, BilinearMajorantAndExpTangent) {
    // (w^i/q^i) q^2/2 + (q^i/w^i) w^2/2 >= q w, tight on the local ray
    EXPECT_DOUBLE_EQ(0.5 * (1.0 * 1.0 + 1.0 * 1.0), 1.0);
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double qi = r.uniform(0.01, 5.0), wi = r.uniform(0.01, 5.0);
        const double q = r.uniform(0.0, 5.0), w = r.uniform(0.0, 5.0);
        ASSERT_GE(0.5 * (wi / qi * q * q + qi / wi * w * w), q * w - 1e-12);
        // first-order tangent of 2^w lies below 2^w
        const double tangent = std::exp2(wi) * (1.0 + (w - wi) * std::log(2.0));
        ASSERT_LE(tangent, std::exp2(w) + 1e-9 * std::exp2(w));
    }
}

TEST(Mrt, AlignmentAndOptimality) {
    // single-entry channel aligns the phase
    ChannelVector h;
    h.entries = Eigen::VectorXcd::Zero(4);
    h.entries[0] = std::complex<double>(3.0, 4.0);
    const Eigen::VectorXcd w = mrt_beamformer(h, 0.01);
    EXPECT_NEAR(std::abs(w[0]), 0.1, 1e-12);
    EXPECT_NEAR(std::arg(w[0]), std::arg(h.entries[0]), 1e-12);
    EXPECT_NEAR(w.tail(3).norm(), 0.0, 1e-15);

    // ||w||^2 = P and Cauchy-Schwarz optimality against random beams
    const ScenarioConfig cfg = desk_cfg(10);
    const UserChannel ch = sample_scenario(cfg).front();
    const ChannelVector hr = channel_vector(ch, 0.05, cfg.region_len_A);
    const Eigen::VectorXcd wm = mrt_beamformer(hr, cfg.p_max);
    EXPECT_NEAR(wm.squaredNorm(), cfg.p_max, 1e-12 * cfg.p_max);
    EXPECT_NEAR(std::norm(hr.entries.dot(wm)), cfg.p_max * hr.entries.squaredNorm(),
                1e-10 * cfg.p_max * hr.entries.squaredNorm());
    Rng r(11);
    const double best = std::norm(hr.entries.dot(wm));
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXcd u(hr.entries.size());
        for (int n = 0; n < u.size(); ++n) u[n] = r.cscg(1.0);
        u *= std::sqrt(cfg.p_max) / u.norm();
        ASSERT_GE(best, std::norm(hr.entries.dot(u)) - 1e-9 * best);
    }

    ChannelVector zero;
    zero.entries = Eigen::VectorXcd::Zero(4);
    EXPECT_THROW(mrt_beamformer(zero, 0.01), std::invalid_argument);
}

TEST(Optimize, SinglePathStaysAtX0) {
    const ScenarioConfig cfg = desk_cfg(12, 1);
    const UserChannel ch = sample_scenario(cfg).front();
    const SuResult r = optimize_position(ch, cfg, cfg.init_pos_x0);
    EXPECT_DOUBLE_EQ(r.x, cfg.init_pos_x0);
}

TEST(Optimize, MonotoneTraceAndOracleDominance) {
    for (int i = 0; i < 20; ++i) {
        ScenarioConfig cfg = desk_cfg(500 + i, 2 + i % 5);
        cfg.multi_starts = 4;
        const UserChannel ch = sample_scenario(cfg).front();
        const SuResult r = optimize_position(ch, cfg, cfg.init_pos_x0);
        for (std::size_t t = 1; t < r.trace.size(); ++t)
            ASSERT_GE(r.trace[t], r.trace[t - 1] - 1e-9) << "seed " << 500 + i;
        const auto [ox, ov] = grid_oracle(ch, cfg, ch.wavelength / 1000.0);
        ASSERT_GE(ov, r.throughput - 1e-9) << "seed " << 500 + i;
    }
}

TEST(Optimize, SubproblemRespectsOriginalConstraints) {
    const ScenarioConfig cfg = desk_cfg(42, 4);
    const UserChannel ch = sample_scenario(cfg).front();
    const ScaStateSU st = make_sca_state(ch, cfg, cfg.init_pos_x0);
    const conic::ConvexProgram p = build_subproblem_P24(st, ch, cfg);
    const conic::Solution s = conic::solve(p);
    ASSERT_EQ(s.status, conic::SolveStatus::Optimal);
    const double x = s.scalars[0], q = s.scalars[1], u = s.scalars[2], w = s.scalars[3],
                 rr = s.scalars[4];
    EXPECT_GE(x, -1e-9);
    EXPECT_LE(x, cfg.region_len_A + 1e-9);
    EXPECT_GE(q, std::abs(x - cfg.init_pos_x0) - 1e-9);
    EXPECT_LE(q, cfg.move_speed_v * cfg.block_T + 1e-9);
    // the nonlinear epigraph constraint holds at the returned point
    EXPECT_GE(1.0 + u, std::exp2(rr) - 1e-7);
    const Y3Info y = y3_and_derivatives(ch, cfg, st.x);
    const double dx = x - st.x;
    EXPECT_LE(u, (y.value + y.slope * dx - 0.5 * y.delta * dx * dx) / cfg.noise_power + 1e-7);
    EXPECT_GT(w, 0.0);
}

TEST(MaxSnr, FlatChannelKeepsStart) {
    const ScenarioConfig cfg = desk_cfg(13, 1);
    const UserChannel ch = sample_scenario(cfg).front();
    const SuResult r = max_snr_position(ch, cfg, 0.03);
    EXPECT_DOUBLE_EQ(r.x, 0.03);
}

TEST(MaxSnr, NearsGridOracleGain) {
    int good = 0;
    const int total = 30;
    for (int i = 0; i < total; ++i) {
        ScenarioConfig cfg = desk_cfg(800 + i, 2 + i % 5);
        cfg.multi_starts = 16;
        const UserChannel ch = sample_scenario(cfg).front();
        const SuResult r = max_snr_position(ch, cfg, cfg.init_pos_x0);
        // oracle on the gain itself
        double best = 0.0;
        const double step = ch.wavelength / 1000.0;
        for (double x = 0.0; x <= cfg.region_len_A + 1e-12; x += step)
            best = std::max(best, gain_closed_form(ch, std::min(x, cfg.region_len_A)));
        if (r.gain >= 0.99 * best) ++good;
    }
    EXPECT_GE(good, static_cast<int>(0.9 * total));
}

TEST(Oracle, TrivialCases) {
    const ScenarioConfig cfg1 = desk_cfg(14, 1);
    const UserChannel ch1 = sample_scenario(cfg1).front();
    const double step = ch1.wavelength / 1000.0;
    EXPECT_NEAR(grid_oracle(ch1, cfg1, step).first, cfg1.init_pos_x0, step);

    // flat-gain two-path: equal virtual AoAs
    ScenarioConfig cfg2 = desk_cfg(15, 2);
    UserChannel ch2 = sample_scenario(cfg2).front();
    ch2.elev_aoas[1] = ch2.elev_aoas[0];
    ch2.azim_aoas[1] = ch2.azim_aoas[0];
    ch2.finalize();
    EXPECT_NEAR(grid_oracle(ch2, cfg2, step).first, cfg2.init_pos_x0, step);

    EXPECT_THROW(grid_oracle(ch1, cfg1, 0.0), std::invalid_argument);
}
