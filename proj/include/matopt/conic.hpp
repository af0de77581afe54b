// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_CONIC_HPP
#define MATOPT_CONIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace matopt::conic {

// ---------------------------------------------------------------------------
// Problem description
//
// maximize   c^T v + sum_b Re tr(C_b W_b)
// subject to g_i(v, W) >= 0                      (concave g_i, kinds below)
//            W_b Hermitian positive semidefinite
//
// Each constraint is a sum of building blocks:
//   affine        b + a^T v + sum Re tr(C W)
//   quadratic     - 1/2 v^T Q v                  (Q PSD: concave)
//   logarithmic   + c * ln(v_j)                  (c > 0)
//   exponential   - c * exp(a^T v + b)           (c > 0)
// which covers the affine, convex-quadratic, exponential-type and
// logarithmic-type constraints the position/beamforming subproblems need.
// ---------------------------------------------------------------------------

struct LogTerm {
    double coeff = 1.0; // > 0
    int var = 0;        // scalar index; implies v[var] > 0 on the domain
};

struct ExpTerm {
    double coeff = 1.0;     // > 0
    Eigen::VectorXd expo_a; // exponent a^T v + b over scalars
    double expo_b = 0.0;
};

struct Constraint {
    double b = 0.0;
    Eigen::VectorXd a; // size 0 means no scalar affine part
    std::vector<std::pair<int, Eigen::MatrixXcd>> block_lin; // (block, Hermitian C)
    Eigen::MatrixXd Q; // size 0 means no quadratic part; PSD over scalars
    std::vector<LogTerm> logs;
    std::vector<ExpTerm> exps;
    std::string name;
};

struct ConvexProgram {
    int n_scalars = 0;
    std::vector<int> block_dims;
    Eigen::VectorXd obj_c; // size n_scalars (zero-padded if empty)
    std::vector<std::pair<int, Eigen::MatrixXcd>> obj_blocks;
    std::vector<Constraint> constraints;
    double tol = 1e-8;   // duality-gap target of the barrier method
    int max_iter = 10000; // total Newton-step cap

    // optional strictly feasible start (must at least lie in the domain
    // of the log/exp terms; phase I repairs plain infeasibility)
    Eigen::VectorXd start_scalars;
    std::vector<Eigen::MatrixXcd> start_blocks;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct Solution {
    SolveStatus status = SolveStatus::MaxIter;
    Eigen::VectorXd scalars;
    std::vector<Eigen::MatrixXcd> blocks;
    double objective = 0.0;
    double max_residual = std::numeric_limits<double>::infinity();
    int newton_steps = 0;
};

namespace detail {

// Hermitian block parametrization: N diagonal entries, then (re, im)
// pairs for i < j in row-major order. dim -> N^2 real parameters.
inline int herm_params(int n) { return n * n; }

inline Eigen::MatrixXcd herm_from_params(const double* p, int n) {
    Eigen::MatrixXcd w(n, n);
    for (int i = 0; i < n; ++i) w(i, i) = p[i];
    int off = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            w(i, j) = std::complex<double>(p[off], p[off + 1]);
            w(j, i) = std::conj(w(i, j));
            off += 2;
        }
    return w;
}

inline void herm_to_params(const Eigen::MatrixXcd& w, double* p) {
    const int n = static_cast<int>(w.rows());
    for (int i = 0; i < n; ++i) p[i] = w(i, i).real();
    int off = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            p[off] = w(i, j).real();
            p[off + 1] = w(i, j).imag();
            off += 2;
        }
}

// coordinates of the linear form W -> Re tr(C W) for Hermitian C
inline void herm_lin_coords(const Eigen::MatrixXcd& c, double* out) {
    const int n = static_cast<int>(c.rows());
    for (int i = 0; i < n; ++i) out[i] = c(i, i).real();
    int off = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            out[off] = 2.0 * c(i, j).real();
            out[off + 1] = 2.0 * c(i, j).imag();
            off += 2;
        }
}

struct Layout {
    int n_scalars = 0;
    std::vector<int> block_dim;
    std::vector<int> block_off; // offset of each block's params
    int total = 0;
};

inline Layout make_layout(const ConvexProgram& p) {
    Layout lay;
    lay.n_scalars = p.n_scalars;
    lay.total = p.n_scalars;
    for (int d : p.block_dims) {
        lay.block_dim.push_back(d);
        lay.block_off.push_back(lay.total);
        lay.total += herm_params(d);
    }
    return lay;
}

// constraint with the affine part flattened to full coordinates
struct PreppedConstraint {
    Eigen::VectorXd lin; // full coords
    double b = 0.0;
    const Constraint* src = nullptr;
};

inline double eval_g(const PreppedConstraint& pc, const Eigen::VectorXd& v, int ns) {
    const Constraint& c = *pc.src;
    double g = pc.b + pc.lin.dot(v);
    if (c.Q.size() > 0) g -= 0.5 * v.head(ns).dot(c.Q * v.head(ns));
    for (const auto& lt : c.logs) {
        if (!(v[lt.var] > 0.0)) return -std::numeric_limits<double>::infinity();
        g += lt.coeff * std::log(v[lt.var]);
    }
    for (const auto& et : c.exps) {
        const double e = et.expo_a.dot(v.head(ns)) + et.expo_b;
        g -= et.coeff * std::exp(std::min(e, 709.0));
        if (e > 709.0) return -std::numeric_limits<double>::infinity();
    }
    return g;
}

} // namespace detail

class Solver {
public:
    explicit Solver(const ConvexProgram& p) : p_(p), lay_(detail::make_layout(p)) {
        obj_ = Eigen::VectorXd::Zero(lay_.total);
        if (p.obj_c.size() > 0) obj_.head(p.n_scalars) = p.obj_c;
        for (const auto& [bi, c] : p.obj_blocks)
            detail::herm_lin_coords(c, obj_.data() + lay_.block_off[bi]);
        for (const auto& c : p.constraints) {
            detail::PreppedConstraint pc;
            pc.lin = Eigen::VectorXd::Zero(lay_.total);
            if (c.a.size() > 0) pc.lin.head(p.n_scalars) = c.a;
            for (const auto& [bi, cm] : c.block_lin) {
                Eigen::VectorXd coords(detail::herm_params(lay_.block_dim[bi]));
                detail::herm_lin_coords(cm, coords.data());
                pc.lin.segment(lay_.block_off[bi], coords.size()) += coords;
            }
            pc.b = c.b;
            pc.src = &c;
            cons_.push_back(std::move(pc));
        }
    }

    Solution solve() {
        Eigen::VectorXd v = initial_point();
        Solution sol;
        steps_ = 0;

        if (min_slack(v) <= 0.0) {
            const auto phase1 = run_phase1(v);
            if (phase1 == SolveStatus::Infeasible || phase1 == SolveStatus::MaxIter) {
                sol.status = phase1;
                fill(sol, v);
                return sol;
            }
        }

        // barrier path following
        const double m = static_cast<double>(cons_.size()) + total_block_dim();
        double t = std::max(1.0, m / std::max(1.0, std::abs(obj_.dot(v))));
        const double obj_scale = std::max(1.0, std::abs(obj_.dot(v)));
        SolveStatus status = SolveStatus::Optimal;
        while (true) {
            if (!center(v, t, obj_)) {
                status = steps_ >= p_.max_iter ? SolveStatus::MaxIter : status;
                break;
            }
            if (std::abs(obj_.dot(v)) > 1e12 * obj_scale) {
                status = SolveStatus::Unbounded;
                break;
            }
            if (m / t <= p_.tol) break;
            t *= 20.0;
            if (steps_ >= p_.max_iter) {
                status = SolveStatus::MaxIter;
                break;
            }
        }
        sol.status = status;
        fill(sol, v);
        return sol;
    }

private:
    const ConvexProgram& p_;
    detail::Layout lay_;
    Eigen::VectorXd obj_;
    std::vector<detail::PreppedConstraint> cons_;
    int steps_ = 0;

    double total_block_dim() const {
        double s = 0;
        for (int d : lay_.block_dim) s += d;
        return s;
    }

    Eigen::VectorXd initial_point() const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(lay_.total);
        if (p_.start_scalars.size() == p_.n_scalars && p_.n_scalars > 0)
            v.head(p_.n_scalars) = p_.start_scalars;
        else
            for (const auto& c : p_.constraints)
                for (const auto& lt : c.logs) v[lt.var] = 1.0; // log domain
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::MatrixXcd w;
            if (b < p_.start_blocks.size() && p_.start_blocks[b].rows() == lay_.block_dim[b])
                w = p_.start_blocks[b];
            else
                w = Eigen::MatrixXcd::Identity(lay_.block_dim[b], lay_.block_dim[b]);
            detail::herm_to_params(w, const_cast<double*>(v.data()) + lay_.block_off[b]);
        }
        return v;
    }

    Eigen::MatrixXcd block_at(const Eigen::VectorXd& v, std::size_t b) const {
        return detail::herm_from_params(v.data() + lay_.block_off[b], lay_.block_dim[b]);
    }

    double min_slack(const Eigen::VectorXd& v) const {
        double s = std::numeric_limits<double>::infinity();
        for (const auto& pc : cons_) s = std::min(s, detail::eval_g(pc, v, p_.n_scalars));
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block_at(v, b),
                                                               Eigen::EigenvaluesOnly);
            s = std::min(s, es.eigenvalues().minCoeff());
        }
        return s;
    }

    bool strictly_feasible(const Eigen::VectorXd& v, double shift = 0.0) const {
        for (const auto& pc : cons_) {
            const double g = detail::eval_g(pc, v, p_.n_scalars) - shift;
            if (!(g > 0.0)) return false;
        }
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::LLT<Eigen::MatrixXcd> llt(block_at(v, b));
            if (llt.info() != Eigen::Success) return false;
        }
        return true;
    }

    // barrier value -sum ln(g_i - shift) - sum ln det W; +inf outside
    double barrier(const Eigen::VectorXd& v, double shift = 0.0) const {
        double phi = 0.0;
        for (const auto& pc : cons_) {
            const double g = detail::eval_g(pc, v, p_.n_scalars) - shift;
            if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= std::log(g);
        }
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::LLT<Eigen::MatrixXcd> llt(block_at(v, b));
            if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            for (int i = 0; i < lay_.block_dim[b]; ++i)
                phi -= 2.0 * std::log(llt.matrixL()(i, i).real());
        }
        return phi;
    }

    // gradient and Hessian of the barrier at v (shift applies to scalar
    // constraints only, used by phase I through an extra coordinate)
    void barrier_derivs(const Eigen::VectorXd& v, Eigen::VectorXd& grad,
                        Eigen::MatrixXd& hess) const {
        const int nv = lay_.total;
        const int ns = p_.n_scalars;
        grad.setZero(nv);
        hess.setZero(nv, nv);
        Eigen::VectorXd gi(nv);
        for (const auto& pc : cons_) {
            const Constraint& c = *pc.src;
            const double g = detail::eval_g(pc, v, ns);
            gi = pc.lin;
            if (c.Q.size() > 0) gi.head(ns) -= c.Q * v.head(ns);
            for (const auto& lt : c.logs) gi[lt.var] += lt.coeff / v[lt.var];
            for (const auto& et : c.exps) {
                const double e = et.coeff * std::exp(et.expo_a.dot(v.head(ns)) + et.expo_b);
                gi.head(ns) -= e * et.expo_a;
            }
            grad -= gi / g;
            hess += (gi * gi.transpose()) / (g * g);
            // -g'' / g (curvature of the concave pieces)
            if (c.Q.size() > 0) hess.topLeftCorner(ns, ns) += c.Q / g;
            for (const auto& lt : c.logs)
                hess(lt.var, lt.var) += lt.coeff / (v[lt.var] * v[lt.var] * g);
            for (const auto& et : c.exps) {
                const double e = et.coeff * std::exp(et.expo_a.dot(v.head(ns)) + et.expo_b);
                hess.topLeftCorner(ns, ns) += (e / g) * (et.expo_a * et.expo_a.transpose());
            }
        }
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            const int n = lay_.block_dim[b];
            const int off = lay_.block_off[b];
            const Eigen::MatrixXcd w = block_at(v, b);
            const Eigen::MatrixXcd s = w.inverse();
            Eigen::VectorXd gcoord(detail::herm_params(n));
            detail::herm_lin_coords(s, gcoord.data());
            grad.segment(off, gcoord.size()) -= gcoord;
            // H_pq = Re tr(S E_p S E_q)
            int p = 0;
            Eigen::VectorXd row(detail::herm_params(n));
            auto add_row = [&](const Eigen::MatrixXcd& m) {
                detail::herm_lin_coords(m, row.data());
                hess.block(off + p, off, 1, row.size()) += row.transpose();
                ++p;
            };
            for (int i = 0; i < n; ++i)
                add_row(s.col(i) * s.col(i).adjoint());
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const Eigen::MatrixXcd sij = s.col(i) * s.col(j).adjoint();
                    add_row(sij + sij.adjoint());
                    const Eigen::MatrixXcd im =
                        std::complex<double>(0, 1) * (sij - sij.adjoint());
                    add_row(im);
                }
        }
    }

    // damped Newton to the t-center of t*obj - barrier; returns false on
    // step budget exhaustion
    bool center(Eigen::VectorXd& v, double t, const Eigen::VectorXd& obj) {
        for (int it = 0; it < 80; ++it) {
            if (steps_ >= p_.max_iter) return false;
            ++steps_;
            Eigen::VectorXd bg;
            Eigen::MatrixXd bh;
            barrier_derivs(v, bg, bh);
            Eigen::VectorXd grad_f = t * obj - bg; // gradient of maximized function
            Eigen::VectorXd d;
            {
                Eigen::LDLT<Eigen::MatrixXd> ldlt(bh);
                d = ldlt.solve(grad_f);
                if (!d.allFinite()) {
                    bh.diagonal().array() += 1e-10 * (1.0 + bh.diagonal().maxCoeff());
                    d = Eigen::LDLT<Eigen::MatrixXd>(bh).solve(grad_f);
                    if (!d.allFinite()) return true; // numerically stuck: accept point
                }
            }
            const double decrement = grad_f.dot(d);
            if (decrement <= 0.0) return true;
            if (decrement / 2.0 < 1e-11) return true;
            const double f0 = t * obj.dot(v) - barrier(v);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd vn = v + alpha * d;
                const double fn = t * obj.dot(vn) - barrier(vn);
                if (std::isfinite(fn) && fn >= f0 + 0.25 * alpha * decrement) {
                    v = vn;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) return true; // no progress possible at this scale
        }
        return true;
    }

    // maximize a slack s with g_i >= s to find a strictly feasible point
    SolveStatus run_phase1(Eigen::VectorXd& v) {
        double shift = min_slack(v);
        if (!std::isfinite(shift)) return SolveStatus::Infeasible; // start outside domain
        double s = shift - std::max(1.0, std::abs(shift));
        // augmented coordinates (v, s): reuse derivative assembly by
        // treating the shift explicitly
        const int nv = lay_.total;
        const double m = static_cast<double>(cons_.size());
        double t = 1.0;
        for (int outer = 0; outer < 64; ++outer) {
            // Newton in (v, s)
            for (int it = 0; it < 80; ++it) {
                if (steps_ >= p_.max_iter) return SolveStatus::MaxIter;
                ++steps_;
                Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv + 1);
                Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nv + 1, nv + 1);
                Eigen::VectorXd gi(nv + 1);
                for (const auto& pc : cons_) {
                    const Constraint& c = *pc.src;
                    const double g = detail::eval_g(pc, v, p_.n_scalars) - s;
                    gi.setZero();
                    gi.head(nv) = pc.lin;
                    if (c.Q.size() > 0)
                        gi.head(p_.n_scalars) -= c.Q * v.head(p_.n_scalars);
                    for (const auto& lt : c.logs) gi[lt.var] += lt.coeff / v[lt.var];
                    for (const auto& et : c.exps) {
                        const double e =
                            et.coeff * std::exp(et.expo_a.dot(v.head(p_.n_scalars)) + et.expo_b);
                        gi.head(p_.n_scalars) -= e * et.expo_a;
                    }
                    gi[nv] = -1.0;
                    grad -= gi / g;
                    hess += (gi * gi.transpose()) / (g * g);
                    if (c.Q.size() > 0)
                        hess.topLeftCorner(p_.n_scalars, p_.n_scalars) += c.Q / g;
                    for (const auto& lt : c.logs)
                        hess(lt.var, lt.var) += lt.coeff / (v[lt.var] * v[lt.var] * g);
                    for (const auto& et : c.exps) {
                        const double e =
                            et.coeff * std::exp(et.expo_a.dot(v.head(p_.n_scalars)) + et.expo_b);
                        hess.topLeftCorner(p_.n_scalars, p_.n_scalars) +=
                            (e / g) * (et.expo_a * et.expo_a.transpose());
                    }
                }
                // PSD blocks stay strictly feasible on their own barrier
                {
                    Eigen::VectorXd bg;
                    Eigen::MatrixXd bh;
                    // reuse full-barrier derivatives for blocks only: compute and
                    // subtract the scalar-constraint part by zero trick is costly;
                    // instead assemble block terms directly
                    for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
                        const int n = lay_.block_dim[b];
                        const int off = lay_.block_off[b];
                        const Eigen::MatrixXcd w = block_at(v, b);
                        const Eigen::MatrixXcd sm = w.inverse();
                        Eigen::VectorXd gcoord(detail::herm_params(n));
                        detail::herm_lin_coords(sm, gcoord.data());
                        grad.segment(off, gcoord.size()) -= gcoord;
                        int p = 0;
                        Eigen::VectorXd row(detail::herm_params(n));
                        auto add_row = [&](const Eigen::MatrixXcd& mm) {
                            detail::herm_lin_coords(mm, row.data());
                            hess.block(off + p, off, 1, row.size()) += row.transpose();
                            ++p;
                        };
                        for (int i = 0; i < n; ++i) add_row(sm.col(i) * sm.col(i).adjoint());
                        for (int i = 0; i < n; ++i)
                            for (int j = i + 1; j < n; ++j) {
                                const Eigen::MatrixXcd sij = sm.col(i) * sm.col(j).adjoint();
                                add_row(sij + sij.adjoint());
                                add_row(std::complex<double>(0, 1) * (sij - sij.adjoint()));
                            }
                    }
                }
                Eigen::VectorXd grad_f = -grad;
                grad_f[nv] += t; // objective is t * s
                Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
                Eigen::VectorXd d = ldlt.solve(grad_f);
                if (!d.allFinite()) break;
                const double dec = grad_f.dot(d);
                if (dec <= 0.0 || dec / 2.0 < 1e-11) break;
                double alpha = 1.0;
                auto value = [&](const Eigen::VectorXd& vv, double ss) {
                    const double phi = barrier_phase1(vv, ss);
                    return t * ss - phi;
                };
                const double f0 = value(v, s);
                bool moved = false;
                for (int ls = 0; ls < 60; ++ls) {
                    Eigen::VectorXd vn = v + alpha * d.head(nv);
                    const double sn = s + alpha * d[nv];
                    const double fn = value(vn, sn);
                    if (std::isfinite(fn) && fn >= f0 + 0.25 * alpha * dec) {
                        v = vn;
                        s = sn;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved) break;
                if (s > 10.0 * p_.tol) return SolveStatus::Optimal; // found interior point
            }
            if (s > 0.0) return SolveStatus::Optimal;
            if (m / t <= p_.tol) break;
            t *= 20.0;
        }
        return s > 0.0 ? SolveStatus::Optimal : SolveStatus::Infeasible;
    }

    double barrier_phase1(const Eigen::VectorXd& v, double s) const {
        double phi = 0.0;
        for (const auto& pc : cons_) {
            const double g = detail::eval_g(pc, v, p_.n_scalars) - s;
            if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= std::log(g);
        }
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::LLT<Eigen::MatrixXcd> llt(block_at(v, b));
            if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            for (int i = 0; i < lay_.block_dim[b]; ++i)
                phi -= 2.0 * std::log(llt.matrixL()(i, i).real());
        }
        return phi;
    }

    void fill(Solution& sol, const Eigen::VectorXd& v) const {
        sol.scalars = v.head(p_.n_scalars);
        sol.blocks.clear();
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) sol.blocks.push_back(block_at(v, b));
        sol.objective = obj_.dot(v);
        double res = 0.0;
        for (const auto& pc : cons_)
            res = std::max(res, -detail::eval_g(pc, v, p_.n_scalars));
        for (std::size_t b = 0; b < lay_.block_dim.size(); ++b) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sol.blocks[b],
                                                               Eigen::EigenvaluesOnly);
            res = std::max(res, -es.eigenvalues().minCoeff());
        }
        sol.max_residual = std::max(0.0, res);
        sol.newton_steps = steps_;
    }
};

inline Solution solve(const ConvexProgram& p) { return Solver(p).solve(); }

} // namespace matopt::conic

#endif
