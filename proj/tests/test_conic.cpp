// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matopt/conic.hpp"
#include "matopt/rng.hpp"

using namespace matopt;
using conic::Constraint;
using conic::ConvexProgram;
using conic::Solution;
using conic::SolveStatus;

namespace {
Constraint affine(int n, double b, std::initializer_list<std::pair<int, double>> a,
                  const char* name = "") {
    Constraint c;
    c.b = b;
    c.a = Eigen::VectorXd::Zero(n);
    for (auto [i, v] : a) c.a[i] = v;
    c.name = name;
    return c;
}
} // namespace

TEST(Conic, OneDimensionalLp) {
    // maximize x s.t. x <= 3, x >= -10 (bounded box)
    ConvexProgram p;
    p.n_scalars = 1;
    p.obj_c = Eigen::VectorXd::Constant(1, 1.0);
    p.constraints.push_back(affine(1, 3.0, {{0, -1.0}}));
    p.constraints.push_back(affine(1, 10.0, {{0, 1.0}}));
    p.start_scalars = Eigen::VectorXd::Zero(1);
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.scalars[0], 3.0, 1e-6);
    EXPECT_LE(s.max_residual, p.tol);
}

TEST(Conic, QuadraticEpigraph) {
    // maximize s subject to s + q^2 <= 0: optimum (q, s) = (0, 0)
    ConvexProgram p;
    p.n_scalars = 2; // q, s
    p.obj_c = Eigen::VectorXd::Zero(2);
    p.obj_c[1] = 1.0;
    Constraint c;
    c.a = Eigen::VectorXd::Zero(2);
    c.a[1] = -1.0;
    c.Q = Eigen::MatrixXd::Zero(2, 2);
    c.Q(0, 0) = 2.0;
    p.constraints.push_back(std::move(c));
    p.start_scalars = Eigen::VectorXd::Zero(2);
    p.start_scalars[1] = -1.0;
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.scalars[0], 0.0, 1e-4);
    EXPECT_NEAR(s.scalars[1], 0.0, 1e-6);
}

TEST(Conic, ExponentialConstraintActive) {
    // maximize u s.t. u <= 5 - e^a, a >= 0 -> u = 4 at a = 0
    ConvexProgram p;
    p.n_scalars = 2; // u, a
    p.obj_c = Eigen::VectorXd::Zero(2);
    p.obj_c[0] = 1.0;
    Constraint c;
    c.b = 5.0;
    c.a = Eigen::VectorXd::Zero(2);
    c.a[0] = -1.0;
    conic::ExpTerm e;
    e.expo_a = Eigen::VectorXd::Zero(2);
    e.expo_a[1] = 1.0;
    c.exps.push_back(std::move(e));
    p.constraints.push_back(std::move(c));
    p.constraints.push_back(affine(2, 0.0, {{1, 1.0}}));
    p.start_scalars = Eigen::VectorXd::Zero(2);
    p.start_scalars[0] = 1.0;
    p.start_scalars[1] = 0.5;
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.scalars[0], 4.0, 1e-5);
    EXPECT_NEAR(s.scalars[1], 0.0, 1e-5);
    // the original nonlinear constraint holds at the returned point
    EXPECT_LE(s.scalars[0], 5.0 - std::exp(s.scalars[1]) + 1e-7);
}

TEST(Conic, LogarithmicConstraint) {
    // maximize u s.t. u <= 2 ln z + 1, z <= 3: optimum u = 2 ln 3 + 1
    ConvexProgram p;
    p.n_scalars = 2; // u, z
    p.obj_c = Eigen::VectorXd::Zero(2);
    p.obj_c[0] = 1.0;
    Constraint c;
    c.b = 1.0;
    c.a = Eigen::VectorXd::Zero(2);
    c.a[0] = -1.0;
    c.logs.push_back({2.0, 1});
    p.constraints.push_back(std::move(c));
    p.constraints.push_back(affine(2, 3.0, {{1, -1.0}}));
    p.start_scalars = Eigen::VectorXd::Zero(2);
    p.start_scalars[0] = 0.5;
    p.start_scalars[1] = 1.0;
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.scalars[0], 2.0 * std::log(3.0) + 1.0, 1e-5);
    EXPECT_NEAR(s.scalars[1], 3.0, 1e-5);
}

TEST(Conic, InfeasibleDetected) {
    // x >= 1 and x <= 0
    ConvexProgram p;
    p.n_scalars = 1;
    p.obj_c = Eigen::VectorXd::Constant(1, 1.0);
    p.constraints.push_back(affine(1, -1.0, {{0, 1.0}}));
    p.constraints.push_back(affine(1, 0.0, {{0, -1.0}}));
    p.start_scalars = Eigen::VectorXd::Constant(1, 0.5);
    const Solution s = conic::solve(p);
    EXPECT_EQ(s.status, SolveStatus::Infeasible);
}

TEST(Conic, UnboundedDetected) {
    // maximize x s.t. x >= 0
    ConvexProgram p;
    p.n_scalars = 1;
    p.obj_c = Eigen::VectorXd::Constant(1, 1.0);
    p.constraints.push_back(affine(1, 0.0, {{0, 1.0}}));
    p.start_scalars = Eigen::VectorXd::Constant(1, 1.0);
    const Solution s = conic::solve(p);
    EXPECT_EQ(s.status, SolveStatus::Unbounded);
}

TEST(Conic, PhaseOneRepairsInfeasibleStart) {
    // feasible program, start outside: x in [2, 3], start at 0
    ConvexProgram p;
    p.n_scalars = 1;
    p.obj_c = Eigen::VectorXd::Constant(1, 1.0);
    p.constraints.push_back(affine(1, -2.0, {{0, 1.0}}));
    p.constraints.push_back(affine(1, 3.0, {{0, -1.0}}));
    p.start_scalars = Eigen::VectorXd::Zero(1);
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.scalars[0], 3.0, 1e-6);
}

TEST(Conic, HermitianParamRoundTrip) {
    Rng r(3);
    const int n = 4;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = r.cscg(1.0);
    const Eigen::MatrixXcd w = (a + a.adjoint()) / 2.0;
    double params[16];
    conic::detail::herm_to_params(w, params);
    const Eigen::MatrixXcd back = conic::detail::herm_from_params(params, n);
    EXPECT_NEAR((w - back).norm(), 0.0, 1e-14);

    // Re tr(C W) equals the coordinate inner product
    Eigen::MatrixXcd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = r.cscg(1.0);
    const Eigen::MatrixXcd c = (b + b.adjoint()) / 2.0;
    double coords[16];
    conic::detail::herm_lin_coords(c, coords);
    double dot = 0.0;
    for (int i = 0; i < 16; ++i) dot += coords[i] * params[i];
    EXPECT_NEAR(dot, (c * w).trace().real(), 1e-12 * std::abs((c * w).trace().real()) + 1e-12);
}

TEST(Conic, PsdBlockMaxEigenvalue) {
    // maximize Re tr(C W) s.t. tr(W) <= 1, W PSD -> lambda_max(C)
    Rng r(5);
    const int n = 3;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = r.cscg(1.0);
    const Eigen::MatrixXcd c = (a + a.adjoint()) / 2.0;

    ConvexProgram p;
    p.n_scalars = 0;
    p.block_dims = {n};
    p.obj_blocks.emplace_back(0, c);
    Constraint pw;
    pw.b = 1.0;
    pw.block_lin.emplace_back(0, Eigen::MatrixXcd(-Eigen::MatrixXcd::Identity(n, n)));
    p.constraints.push_back(std::move(pw));
    p.start_blocks = {Eigen::MatrixXcd::Identity(n, n) / (2.0 * n)};
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
    EXPECT_NEAR(s.objective, es.eigenvalues().maxCoeff(), 1e-5);
    // solution block is PSD within tolerance
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ew(s.blocks[0]);
    EXPECT_GE(ew.eigenvalues().minCoeff(), -1e-9);
}

TEST(Conic, ResidualContractRecomputable) {
    // residuals reported on the returned point agree with an independent
    // re-evaluation of every constraint
    ConvexProgram p;
    p.n_scalars = 2;
    p.obj_c = Eigen::VectorXd::Zero(2);
    p.obj_c[0] = 1.0;
    p.obj_c[1] = 0.5;
    p.constraints.push_back(affine(2, 1.0, {{0, -1.0}, {1, -0.5}}));
    p.constraints.push_back(affine(2, 0.0, {{0, 1.0}}));
    p.constraints.push_back(affine(2, 0.0, {{1, 1.0}}));
    p.start_scalars = Eigen::VectorXd::Constant(2, 0.2);
    const Solution s = conic::solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    double res = 0.0;
    for (const auto& c : p.constraints)
        res = std::max(res, -(c.b + c.a.dot(s.scalars)));
    res = std::max(res, 0.0);
    EXPECT_NEAR(s.max_residual, res, 1e-9);
}

TEST(Conic, ObjectiveScalingInvariance) {
    auto build = [](double scale) {
        ConvexProgram p;
        p.n_scalars = 2;
        p.obj_c = Eigen::VectorXd::Zero(2);
        p.obj_c[0] = scale * 1.0;
        p.obj_c[1] = scale * -0.3;
        Constraint c; // 4 - x^2 - y^2 >= 0 (disc)
        c.b = 4.0;
        c.Q = 2.0 * Eigen::MatrixXd::Identity(2, 2);
        p.constraints.push_back(std::move(c));
        p.start_scalars = Eigen::VectorXd::Zero(2);
        return p;
    };
    const Solution a = conic::solve(build(1.0));
    const Solution b = conic::solve(build(100.0));
    ASSERT_EQ(a.status, SolveStatus::Optimal);
    ASSERT_EQ(b.status, SolveStatus::Optimal);
    EXPECT_NEAR(a.scalars[0], b.scalars[0], 1e-6);
    EXPECT_NEAR(a.scalars[1], b.scalars[1], 1e-6);
}
