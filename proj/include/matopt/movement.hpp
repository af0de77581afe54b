// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_MOVEMENT_HPP
#define MATOPT_MOVEMENT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "matopt/scenario.hpp"

namespace matopt {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = false;
    bool contains(double x, double tol = 0.0) const {
        return !empty && x >= lo - tol && x <= hi + tol;
    }
};

// Virtual AoAs snapped to the grid -1 + (2k-1)/kappa0, sorted non-decreasing.
struct QuantizedAoAs {
    int kappa0 = 0;
    std::vector<int> indices;   // kappa_l, 1-based, non-decreasing
    std::vector<double> values; // grid values, non-decreasing
    std::vector<int> mu;        // adjacent index gaps
    int mu_star = 0;            // gcd of the nonzero gaps; 0 if all gaps vanish
};

inline QuantizedAoAs quantize(const std::vector<double>& values, int kappa0) {
    if (kappa0 < 1) throw std::invalid_argument("quantize: kappa0 must be >= 1");
    QuantizedAoAs q;
    q.kappa0 = kappa0;
    for (double v : values) q.indices.push_back(quantize_index(v, kappa0));
    std::sort(q.indices.begin(), q.indices.end());
    for (int k : q.indices) q.values.push_back(quant_grid_value(k, kappa0));
    for (std::size_t l = 0; l + 1 < q.indices.size(); ++l)
        q.mu.push_back(q.indices[l + 1] - q.indices[l]);
    int g = 0;
    for (int m : q.mu)
        if (m != 0) g = std::gcd(g, m);
    q.mu_star = g;
    return q;
}

// Minimum period of the quantized channel power gain: X = kappa0*lambda/(2 mu*).
// A flat gain (all gaps zero) has no finite period.
inline double gain_period(const QuantizedAoAs& q, double wavelength) {
    if (q.mu_star == 0) return std::numeric_limits<double>::infinity();
    return q.kappa0 * wavelength / (2.0 * q.mu_star);
}

// Interval of [0, A] guaranteed to contain the optimum under quantized AoAs:
// [max{0, min{x0 - X/2, A - X}}, min{A, max{x0 + X/2, X}}].
inline Interval candidate_interval(const QuantizedAoAs& q, double x0, double A, double wavelength) {
    const double X = gain_period(q, wavelength);
    if (!std::isfinite(X)) return {x0, x0, false}; // flat gain: stay put
    Interval iv;
    iv.lo = std::max(0.0, std::min(x0 - X / 2.0, A - X));
    iv.hi = std::min(A, std::max(x0 + X / 2.0, X));
    return iv;
}

struct DesignRules {
    Interval x0_interval;   // favorable initial coordinates
    bool resolution_ok = false; // kappa0 / A <= 2 mu* / lambda
};

// Initial-position design [kappa0*lambda/(4 mu*), A - kappa0*lambda/(4 mu*)]
// and the resolution condition tying kappa0 to the region length.
inline DesignRules design_rules(const QuantizedAoAs& q, double A, double wavelength) {
    DesignRules r;
    const double X = gain_period(q, wavelength);
    if (!std::isfinite(X)) {
        r.x0_interval = {0.0, A, false};
        r.resolution_ok = true; // flat gain imposes no constraint
        return r;
    }
    const double quarter = X / 2.0; // kappa0*lambda/(4 mu*)
    r.resolution_ok = static_cast<double>(q.kappa0) / A <= 2.0 * q.mu_star / wavelength;
    r.x0_interval.lo = quarter;
    r.x0_interval.hi = A - quarter;
    r.x0_interval.empty = r.x0_interval.lo > r.x0_interval.hi;
    return r;
}

struct MovementVerdict {
    enum class Kind { MustStay, MovementConsidered, Inconclusive };
    Kind kind = Kind::Inconclusive;
    bool must_stay = false;
    bool has_witness = false;
    long d1 = 0, d2 = 0;        // the integers certifying the stay decision
    Interval candidate;          // where the optimum lies when movement is on
    bool region_exceeds_period = false; // A |theta_21| > lambda
};

// single path: movement burns time and changes nothing
inline MovementVerdict one_path_verdict(const UserChannel& ch, double x0) {
    if (ch.n_paths() != 1) throw std::invalid_argument("one_path_verdict: L != 1");
    MovementVerdict v;
    v.kind = MovementVerdict::Kind::MustStay;
    v.must_stay = true;
    v.candidate = {x0, x0, false};
    return v;
}

namespace detail {
// smallest integer in [lo - tol, hi + tol], if any
inline bool integer_in(double lo, double hi, long& d, double tol = 1e-9) {
    const double c = std::ceil(lo - tol);
    if (c > hi + tol) return false;
    d = static_cast<long>(c);
    return true;
}
} // namespace detail

// Two-path stay test: the throughput maximum sits at x0 whenever integers
// d1, d2 exist inside the stated phase intervals (both monotonicity
// directions certified). Otherwise, movement is worth considering once
// the region spans more than one gain period, A |theta_21| > lambda.
inline MovementVerdict two_path_verdict(const UserChannel& ch, const ScenarioConfig& cfg) {
    if (ch.n_paths() != 2) throw std::invalid_argument("two_path_verdict: L != 2");
    const double A = cfg.region_len_A;
    const double x0 = cfg.init_pos_x0;
    const double lambda = ch.wavelength;
    const double theta21 = ch.virtual_aoas[1] - ch.virtual_aoas[0];

    MovementVerdict v;
    if (theta21 == 0.0) {
        // equal virtual AoAs: gain constant in x, same as the one-path case
        v.kind = MovementVerdict::Kind::MustStay;
        v.must_stay = true;
        v.candidate = {x0, x0, false};
        return v;
    }

    const double c = std::arg(ch.f_coeffs(0, 1)) / kTwoPi;
    bool have_d1 = false, have_d2 = false;
    long d1 = 0, d2 = 0;
    if (theta21 > 0.0) { // vartheta_1 < vartheta_2
        have_d1 = detail::integer_in(A * theta21 / lambda + c - 0.5, x0 * theta21 / lambda + c, d1);
        have_d2 = detail::integer_in(x0 * theta21 / lambda + c, c + 0.5, d2);
    } else {
        have_d1 = detail::integer_in(x0 * theta21 / lambda + c, A * theta21 / lambda + c + 0.5, d1);
        have_d2 = detail::integer_in(c - 0.5, x0 * theta21 / lambda + c, d2);
    }

    v.region_exceeds_period = A * std::abs(theta21) > lambda;
    if (have_d1 && have_d2) {
        v.kind = MovementVerdict::Kind::MustStay;
        v.must_stay = true;
        v.has_witness = true;
        v.d1 = d1;
        v.d2 = d2;
        v.candidate = {x0, x0, false};
        return v;
    }
    // exact two-path gain period
    const double X = lambda / std::abs(theta21);
    v.candidate.lo = std::max(0.0, std::min(x0 - X / 2.0, A - X));
    v.candidate.hi = std::min(A, std::max(x0 + X / 2.0, X));
    v.kind = v.region_exceeds_period ? MovementVerdict::Kind::MovementConsidered
                                     : MovementVerdict::Kind::Inconclusive;
    return v;
}

} // namespace matopt

#endif
