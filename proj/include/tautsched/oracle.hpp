#ifndef TAUTSCHED_ORACLE_HPP
#define TAUTSCHED_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/curve.hpp"
#include "tautsched/energy_model.hpp"
#include "tautsched/nonfifo.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/taut_string.hpp"

namespace tautsched {

struct GridSplitResult {
    double split_bits = 0.0;  // share of packet j-1 ahead of the late packet
    double head_bits = 0.0;   // full deferred-split head (equals split_bits when one packet crosses)
    double energy = 0.0;
    int index = 0;
    int n_grid = 0;
    int infeasible_points = 0;

    bool at_lower_endpoint() const { return index == 0; }
    bool at_upper_endpoint() const { return index == n_grid - 1; }
    bool interior() const { return !at_lower_endpoint() && !at_upper_endpoint(); }
};

/// Brute-force minimization over the split head: evaluates the optimal
/// deadline-ordered schedule of every reordered split on an even grid and
/// returns the cheapest. Trust anchor for the non-FIFO scheduler.
inline GridSplitResult grid_split_oracle(const PacketSequence& seq, std::size_t j,
                                         const EnergyModel& model, int n_grid) {
    const auto& p = seq.packets();
    if (n_grid < 2) throw std::invalid_argument("grid_split_oracle: need at least 2 grid points");
    if (j == 0 || j >= p.size() || !(p[j].deadline_s < p[j - 1].deadline_s))
        throw std::invalid_argument("grid_split_oracle: index does not name a non-FIFO packet");

    const std::size_t m = crossing_block_begin(seq, j);
    double block_total = 0.0;
    for (std::size_t k = m; k < j; ++k) block_total += p[k].size_bits;

    GridSplitResult best;
    best.n_grid = n_grid;
    best.energy = std::numeric_limits<double>::infinity();
    best.index = -1;
    for (int k = 0; k < n_grid; ++k) {
        double x = block_total * static_cast<double>(k) / static_cast<double>(n_grid - 1);
        try {
            DeferredSplit ds = split_block(seq, j, m, x);
            Schedule sch = schedule_fifo(ds.sequence);
            double e = schedule_energy(model, sch);
            if (e < best.energy || best.index < 0) {
                best.energy = e;
                best.split_bits = ds.prev_head_bits;
                best.head_bits = x;
                best.index = k;
            }
        } catch (const infeasible_error&) {
            ++best.infeasible_points;
        }
    }
    if (best.index < 0)
        throw infeasible_error("grid_split_oracle: every split factor infeasible", p[j].deadline_s);
    return best;
}

namespace detail {

// Twice-differentiable convex extension of the power map. Negative rates
// meet a quadratic wall (so the optimizer can move through 0 without a
// hard constraint; any residual negative rate stays at the 1e-6 scale),
// and rates beyond an overflow-safe cap continue quadratically so that
// transiently huge iterate rates keep the objective finite.
struct SmoothPower {
    const EnergyModel* model;
    double wall;
    double r_cap, f_cap, g_cap, h_cap;

    explicit SmoothPower(const EnergyModel& m)
        : model(&m), wall(1e6 * (1.0 + curvature_power(m, 1.0) + marginal_power(m, 0.0))) {
        r_cap = 1.0;
        while (r_cap < 1e12 && std::isfinite(curvature_power(m, 2.0 * r_cap)) &&
               curvature_power(m, 2.0 * r_cap) < 1e30)
            r_cap *= 2.0;
        f_cap = power_of_rate(m, r_cap);
        g_cap = marginal_power(m, r_cap);
        h_cap = curvature_power(m, r_cap);
    }

    double value(double r) const {
        if (r < 0.0) return marginal_power(*model, 0.0) * r + 0.5 * wall * r * r;
        if (r <= r_cap) return power_of_rate(*model, r);
        double d = r - r_cap;
        return f_cap + g_cap * d + 0.5 * h_cap * d * d;
    }
    double grad(double r) const {
        if (r < 0.0) return marginal_power(*model, 0.0) + wall * r;
        if (r <= r_cap) return marginal_power(*model, r);
        return g_cap + h_cap * (r - r_cap);
    }
    double hess(double r) const {
        if (r < 0.0) return wall;
        if (r <= r_cap) return curvature_power(*model, r);
        return h_cap;
    }
};

// Solves one free run of the cumulative chain by a log-barrier Newton
// method; boundary values are fixed, interior values live in open boxes.
// The Hessian is tridiagonal, so each Newton step is linear time.
inline void barrier_newton_run(std::vector<double>& c, std::size_t a, std::size_t b,
                               const std::vector<double>& lb, const std::vector<double>& ub,
                               const std::vector<double>& dt, const SmoothPower& f) {
    const std::size_t n = b - a + 1;
    // Start from the boundary-to-boundary chord clipped strictly into the
    // boxes; monotone bounds keep the clipped chord monotone and the
    // initial rates moderate.
    std::vector<double> x(n);
    double span = 0.0;
    for (std::size_t i = a; i <= b + 1; ++i) span += dt[i];
    double run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run += dt[a + i];
        double chord = c[a - 1] + (c[b + 1] - c[a - 1]) * run / span;
        double margin = 1e-3 * (ub[a + i] - lb[a + i]);
        x[i] = std::clamp(chord, lb[a + i] + margin, ub[a + i] - margin);
    }

    auto objective = [&](const std::vector<double>& v, double t_barrier) {
        double val = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double prev = (i == 0) ? c[a - 1] : v[i - 1];
            double next = (i == n) ? c[b + 1] : v[i];
            double d = dt[a + i];
            val += t_barrier * f.value((next - prev) / d) * d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] <= lb[a + i] || v[i] >= ub[a + i]) return std::numeric_limits<double>::infinity();
            val -= std::log(v[i] - lb[a + i]) + std::log(ub[a + i] - v[i]);
        }
        return val;
    };

    std::vector<double> grad(n), diag(n), off(n), step(n), aux(n);
    double t_barrier = 1.0;
    const double gap_target = 1e-11;

    for (int outer = 0; outer < 60; ++outer) {
        for (int inner = 0; inner < 80; ++inner) {
            for (std::size_t i = 0; i < n; ++i) {
                double prev = (i == 0) ? c[a - 1] : x[i - 1];
                double next = (i + 1 == n) ? c[b + 1] : x[i + 1];
                double dl = dt[a + i], dr = dt[a + i + 1];
                double rl = (x[i] - prev) / dl, rr = (next - x[i]) / dr;
                grad[i] = t_barrier * (f.grad(rl) - f.grad(rr)) - 1.0 / (x[i] - lb[a + i]) +
                          1.0 / (ub[a + i] - x[i]);
                diag[i] = t_barrier * (f.hess(rl) / dl + f.hess(rr) / dr) +
                          1.0 / ((x[i] - lb[a + i]) * (x[i] - lb[a + i])) +
                          1.0 / ((ub[a + i] - x[i]) * (ub[a + i] - x[i]));
                off[i] = (i + 1 < n) ? -t_barrier * f.hess(rr) / dr : 0.0;
            }
            // Thomas solve: (tridiag) step = -grad
            aux[0] = diag[0];
            step[0] = -grad[0];
            for (std::size_t i = 1; i < n; ++i) {
                double w = off[i - 1] / aux[i - 1];
                aux[i] = diag[i] - w * off[i - 1];
                step[i] = -grad[i] - w * step[i - 1];
            }
            step[n - 1] /= aux[n - 1];
            for (std::size_t i = n - 1; i-- > 0;) step[i] = (step[i] - off[i] * step[i + 1]) / aux[i];

            double decrement = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrement -= grad[i] * step[i];
            if (decrement * 0.5 < 1e-13) break;

            double alpha = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (step[i] > 0.0) alpha = std::min(alpha, 0.99 * (ub[a + i] - x[i]) / step[i]);
                if (step[i] < 0.0) alpha = std::min(alpha, 0.99 * (lb[a + i] - x[i]) / step[i]);
            }
            double base = objective(x, t_barrier);
            std::vector<double> trial(n);
            for (int half = 0; half < 60; ++half) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * step[i];
                if (objective(trial, t_barrier) <= base - 0.25 * alpha * decrement) break;
                alpha *= 0.5;
            }
            x = trial;
        }
        if (2.0 * static_cast<double>(n) / t_barrier < gap_target) break;
        t_barrier *= 10.0;
    }
    for (std::size_t i = 0; i < n; ++i) c[a + i] = x[i];
}

}  // namespace detail

/// Independent check of the taut string: time-discretizes the energy
/// minimization over the cumulative-bound polytope and solves the convex
/// program numerically. The grid contains every arrival and deadline, so
/// for staircase envelopes the discretization is exact up to solver
/// tolerance.
inline double discrete_convex_oracle(const PacketSequence& seq, const EnergyModel& model,
                                     int n_steps) {
    if (fifo_order_violation(seq))
        throw std::invalid_argument("discrete_convex_oracle: sequence must be deadline-ordered");
    if (seq.empty()) return 0.0;

    const CumulativeCurve arr = arrival_curve(seq);
    const CumulativeCurve dmin = min_departure_curve(seq);
    const double t_start = seq.first_arrival();
    const double t_end = seq.horizon();
    const double total = seq.total_bits();

    std::vector<double> events{t_start, t_end};
    for (const auto& j : arr.jumps())
        if (j.time_s > t_start && j.time_s < t_end) events.push_back(j.time_s);
    for (const auto& j : dmin.jumps())
        if (j.time_s > t_start && j.time_s < t_end) events.push_back(j.time_s);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    if (n_steps < static_cast<int>(events.size()) * 4)
        throw std::invalid_argument("discrete_convex_oracle: n_steps too small for event count");

    std::vector<double> grid;
    for (std::size_t e = 0; e + 1 < events.size(); ++e) {
        double u = events[e], v = events[e + 1];
        int cells = std::max(1, static_cast<int>(std::lround(n_steps * (v - u) / (t_end - t_start))));
        for (int i = 0; i < cells; ++i) grid.push_back(u + (v - u) * i / cells);
    }
    grid.push_back(t_end);

    const std::size_t m = grid.size() - 1;
    std::vector<double> dt(m + 1, 0.0);
    for (std::size_t i = 1; i <= m; ++i) dt[i] = grid[i] - grid[i - 1];

    std::vector<double> lb(m + 1), ub(m + 1), c(m + 1);
    const double pin_tol = 1e-12 * (1.0 + total);
    lb[0] = ub[0] = c[0] = 0.0;
    lb[m] = ub[m] = c[m] = total;
    std::vector<bool> pinned(m + 1, false);
    pinned[0] = pinned[m] = true;
    for (std::size_t k = 1; k < m; ++k) {
        lb[k] = dmin.value_at(grid[k]);
        ub[k] = std::min(arr.value_at(grid[k - 1]), total);
        if (lb[k] > ub[k] + 1e-9 * (1.0 + total))
            throw infeasible_error("discrete_convex_oracle: empty feasible box", grid[k]);
        if (ub[k] - lb[k] <= pin_tol) {
            pinned[k] = true;
            c[k] = 0.5 * (lb[k] + ub[k]);
        }
    }

    detail::SmoothPower f(model);
    std::size_t k = 1;
    while (k < m) {
        if (pinned[k]) {
            ++k;
            continue;
        }
        std::size_t a = k;
        while (k < m && !pinned[k]) ++k;
        detail::barrier_newton_run(c, a, k - 1, lb, ub, dt, f);
    }

    double energy = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        double r = std::max(0.0, (c[i] - c[i - 1]) / dt[i]);
        energy += power_of_rate(model, r) * dt[i];
    }
    return energy;
}

}  // namespace tautsched

#endif
