#ifndef TAUTSCHED_TAUT_STRING_HPP
#define TAUTSCHED_TAUT_STRING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/curve.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/schedule.hpp"

namespace tautsched {

namespace detail {

struct EnvelopeVertex {
    double t = 0.0;
    double y = 0.0;
    bool upper = false;  // true: inner corner of the arrival curve; false: corner of D_min
};

inline void merge_equal_rates(std::vector<Segment>& segs) {
    std::vector<Segment> out;
    for (const auto& s : segs) {
        if (!out.empty() && std::abs(out.back().rate - s.rate) <= 1e-12 * (1.0 + std::abs(s.rate)) &&
            std::abs(out.back().t1 - s.t0) <= 1e-12) {
            out.back().t1 = s.t1;
        } else {
            out.push_back(s);
        }
    }
    segs = std::move(out);
}

}  // namespace detail

/// Minimum-energy departure curve between two staircases.
///
/// Returns the piecewise-linear taut string from `start` to `end`
/// constrained to D_min(t) <= D(t) <= A(t). The string is built by a
/// vertex scan: from the current anchor the admissible slope window is
/// narrowed by each staircase corner in time order; when it closes, the
/// corner that pinned it becomes the next anchor. For staircase envelopes
/// the critical slope is always attained at a corner, so the scan is
/// exact. The construction is purely geometric: it does not depend on
/// which convex power function later prices the schedule.
///
/// Upper corners sit at (t, A(t-)) just before each arrival jump; lower
/// corners at (t, D_min(t)) on each deadline jump. The end point acts as
/// both, which forces the final segment to hit it exactly.
inline std::vector<Segment> string_tautening(const CumulativeCurve& arrival,
                                             const CumulativeCurve& min_dep, Point start,
                                             Point end) {
    if (end.time_s < start.time_s)
        throw validation_error("string_tautening: end precedes start");

    const double scale = 1.0 + std::max(std::abs(start.bits), std::abs(end.bits));
    const double eps = 1e-9 * scale;

    if (end.time_s == start.time_s) {
        if (std::abs(end.bits - start.bits) > eps)
            throw infeasible_error("string_tautening: zero-length horizon with bit mismatch",
                                   start.time_s);
        return {};
    }

    // Envelope feasibility: every required level must have arrived strictly earlier.
    if (start.bits < min_dep.value_at(start.time_s) - eps || start.bits > arrival.value_at(start.time_s) + eps)
        throw infeasible_error("string_tautening: start point outside envelope", start.time_s);
    for (const auto& j : min_dep.jumps()) {
        if (j.time_s <= start.time_s || j.time_s > end.time_s) continue;
        double need = std::min(j.bits, end.bits);
        if (need > arrival.value_before(j.time_s) + eps)
            throw infeasible_error("string_tautening: demand exceeds arrivals", j.time_s);
    }
    if (end.bits < min_dep.value_at(end.time_s) - eps)
        throw infeasible_error("string_tautening: end point below minimum departure", end.time_s);
    if (end.bits > arrival.value_before(end.time_s) + eps)
        throw infeasible_error("string_tautening: end point above arrivals", end.time_s);

    std::vector<detail::EnvelopeVertex> vertices;
    for (const auto& j : arrival.jumps()) {
        if (j.time_s > start.time_s && j.time_s <= end.time_s)
            vertices.push_back({j.time_s, std::min(arrival.value_before(j.time_s), end.bits), true});
    }
    for (const auto& j : min_dep.jumps()) {
        if (j.time_s > start.time_s && j.time_s <= end.time_s)
            vertices.push_back({j.time_s, std::min(j.bits, end.bits), false});
    }
    vertices.push_back({end.time_s, end.bits, true});
    vertices.push_back({end.time_s, end.bits, false});
    std::sort(vertices.begin(), vertices.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });

    std::vector<Segment> segs;
    Point anchor = start;

    while (anchor.time_s < end.time_s) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        detail::EnvelopeVertex vlo, vhi;
        bool bent = false;

        std::size_t i = 0;
        while (i < vertices.size() && vertices[i].t <= anchor.time_s) ++i;

        while (i < vertices.size()) {
            double t = vertices[i].t;
            std::size_t tick_end = i;
            while (tick_end < vertices.size() && vertices[tick_end].t == t) ++tick_end;

            // Lower corners first: a requirement that outruns an earlier
            // arrival corner bends the string on the arrival curve.
            for (std::size_t k = i; k < tick_end; ++k) {
                if (vertices[k].upper) continue;
                double s = (vertices[k].y - anchor.bits) / (t - anchor.time_s);
                if (s > lo) {
                    lo = s;
                    vlo = vertices[k];
                }
            }
            if (lo > hi) {
                segs.push_back({anchor.time_s, vhi.t, hi});
                anchor = {vhi.t, vhi.y};
                bent = true;
                break;
            }
            for (std::size_t k = i; k < tick_end; ++k) {
                if (!vertices[k].upper) continue;
                double s = (vertices[k].y - anchor.bits) / (t - anchor.time_s);
                if (s < hi) {
                    hi = s;
                    vhi = vertices[k];
                }
            }
            if (hi < lo) {
                if (vlo.t == t)
                    throw infeasible_error("string_tautening: envelope pinched shut", t);
                segs.push_back({anchor.time_s, vlo.t, lo});
                anchor = {vlo.t, vlo.y};
                bent = true;
                break;
            }
            i = tick_end;
        }

        if (!bent) {
            // Window stayed open through the end tick, so the chord to the
            // end point is feasible and the string terminates.
            double s = (end.bits - anchor.bits) / (end.time_s - anchor.time_s);
            segs.push_back({anchor.time_s, end.time_s, std::max(s, 0.0)});
            anchor = end;
        }
    }

    for (auto& s : segs) s.rate = std::max(s.rate, 0.0);
    detail::merge_equal_rates(segs);
    return segs;
}

/// Assigns the bits of a rate profile to packets, earliest deadline first
/// among arrived packets (list order breaks ties). For deadline-ordered
/// sequences this is the FIFO service order.
inline Schedule attribute_edf(const std::vector<Segment>& segments, const PacketSequence& seq) {
    Schedule out;
    out.segments = segments;
    out.attribution.assign(segments.size(), {});

    const auto& pkts = seq.packets();
    std::vector<double> remaining(pkts.size());
    for (std::size_t i = 0; i < pkts.size(); ++i) remaining[i] = pkts[i].size_bits;
    const double eps_bits = 1e-9 * (1.0 + seq.total_bits());

    std::vector<std::size_t> active;  // arrived, unfinished; kept sorted by (deadline, index)
    std::size_t next_arrival = 0;
    auto admit_until = [&](double t) {
        while (next_arrival < pkts.size() && pkts[next_arrival].arrival_s <= t) {
            active.push_back(next_arrival);
            ++next_arrival;
        }
        std::sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
            if (pkts[a].deadline_s != pkts[b].deadline_s)
                return pkts[a].deadline_s < pkts[b].deadline_s;
            return a < b;
        });
    };

    for (std::size_t k = 0; k < segments.size(); ++k) {
        const Segment& s = segments[k];
        if (s.rate <= 0.0) continue;
        double t = s.t0;
        while (t < s.t1 - 1e-15) {
            admit_until(t);
            double t_next = s.t1;
            if (next_arrival < pkts.size() && pkts[next_arrival].arrival_s < t_next &&
                pkts[next_arrival].arrival_s > t)
                t_next = pkts[next_arrival].arrival_s;
            double capacity = s.rate * (t_next - t);
            while (capacity > eps_bits) {
                if (active.empty())
                    throw infeasible_error("attribute_edf: transmitting with an empty queue", t);
                std::size_t idx = active.front();
                double take = std::min(remaining[idx], capacity);
                auto& shares = out.attribution[k];
                if (!shares.empty() && shares.back().packet_id == pkts[idx].id)
                    shares.back().bits += take;
                else
                    shares.push_back({pkts[idx].id, take});
                remaining[idx] -= take;
                capacity -= take;
                if (remaining[idx] <= eps_bits) {
                    // fold float dust into the final share
                    if (remaining[idx] != 0.0) {
                        out.attribution[k].back().bits += remaining[idx];
                        remaining[idx] = 0.0;
                    }
                    active.erase(active.begin());
                }
            }
            t = t_next;
        }
    }

    for (std::size_t i = 0; i < pkts.size(); ++i)
        if (remaining[i] > eps_bits)
            throw infeasible_error("attribute_edf: packet " + std::to_string(pkts[i].id) +
                                       " not fully scheduled",
                                   pkts[i].deadline_s);
    return out;
}

inline std::optional<std::size_t> fifo_order_violation(const PacketSequence& seq) {
    const auto& p = seq.packets();
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i].deadline_s < p[i - 1].deadline_s) return i;
    return std::nullopt;
}

/// Optimal offline schedule for a deadline-ordered sequence: the taut
/// string from (first arrival, 0) to (T, total bits), with FIFO
/// attribution.
inline Schedule schedule_fifo(const PacketSequence& seq) {
    if (auto j = fifo_order_violation(seq))
        throw std::invalid_argument("schedule_fifo: packet index " + std::to_string(*j) +
                                    " breaks deadline order; use schedule_non_fifo");
    if (seq.empty()) return {};
    auto segs = string_tautening(arrival_curve(seq), min_departure_curve(seq),
                                 {seq.first_arrival(), 0.0}, {seq.horizon(), seq.total_bits()});
    return attribute_edf(segs, seq);
}

}  // namespace tautsched

#endif
