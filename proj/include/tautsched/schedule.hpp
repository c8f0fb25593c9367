#ifndef TAUTSCHED_SCHEDULE_HPP
#define TAUTSCHED_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/curve.hpp"
#include "tautsched/packet.hpp"

namespace tautsched {

/// Constant-rate transmission interval [t0, t1).
struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    double rate = 0.0;  // bits/s
};

/// Bits of one packet carried inside a segment.
struct PacketShare {
    int packet_id = 0;
    double bits = 0.0;
};

/// A piecewise-constant-rate departure plan.
///
/// `attribution` is parallel to `segments`: attribution[k] lists which
/// packets the k-th segment carries, in transmission order. Within a
/// segment bits flow back to back, so each share occupies a well-defined
/// sub-interval recoverable from the listed order and the segment rate.
struct Schedule {
    std::vector<Segment> segments;
    std::vector<std::vector<PacketShare>> attribution;

    bool empty() const { return segments.empty(); }
    double start_time() const { return segments.empty() ? 0.0 : segments.front().t0; }
    double end_time() const { return segments.empty() ? 0.0 : segments.back().t1; }

    /// End of the last interval that actually transmits bits.
    double transmission_end() const {
        double t = start_time();
        for (const auto& s : segments)
            if (s.rate > 0.0) t = s.t1;
        return t;
    }

    double total_bits() const {
        double b = 0.0;
        for (const auto& s : segments) b += s.rate * (s.t1 - s.t0);
        return b;
    }

    /// Rejects overlapping or time-reversed segments and negative rates.
    void validate() const {
        if (attribution.size() != segments.size() && !attribution.empty())
            throw validation_error("schedule: attribution list does not match segment count");
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const Segment& s = segments[k];
            if (!(s.t1 >= s.t0)) throw validation_error("schedule: segment with negative duration");
            if (s.rate < 0.0) throw validation_error("schedule: negative rate");
            if (k > 0 && s.t0 < segments[k - 1].t1 - 1e-12)
                throw validation_error("schedule: overlapping segments");
        }
    }

    /// Induced departure curve D(t): continuous, piecewise linear.
    double departure_at(double t) const {
        double bits = 0.0;
        for (const auto& s : segments) {
            if (t <= s.t0) break;
            double upto = std::min(t, s.t1);
            if (upto > s.t0) bits += s.rate * (upto - s.t0);
        }
        return bits;
    }

    double rate_at(double t) const {  // right-continuous
        for (const auto& s : segments)
            if (s.t0 <= t && t < s.t1) return s.rate;
        return 0.0;
    }

    double rate_just_before(double t) const {
        for (const auto& s : segments)
            if (s.t0 < t && t <= s.t1) return s.rate;
        return 0.0;
    }

    double rate_just_after(double t) const { return rate_at(t); }

    double packet_bits(int id) const {
        double b = 0.0;
        for (const auto& shares : attribution)
            for (const auto& sh : shares)
                if (sh.packet_id == id) b += sh.bits;
        return b;
    }

    /// Time interval occupied by one share: [start, end) inside its segment.
    std::pair<double, double> share_interval(std::size_t seg, std::size_t share) const {
        const Segment& s = segments[seg];
        double offset_bits = 0.0;
        for (std::size_t i = 0; i < share; ++i) offset_bits += attribution[seg][i].bits;
        double start = s.t0 + (s.rate > 0.0 ? offset_bits / s.rate : 0.0);
        double end = start + (s.rate > 0.0 ? attribution[seg][share].bits / s.rate : 0.0);
        return {start, std::min(end, s.t1)};
    }

    /// Instant the last bit of the packet departs.
    std::optional<double> completion_time(int id) const {
        std::optional<double> t;
        for (std::size_t k = 0; k < attribution.size(); ++k)
            for (std::size_t i = 0; i < attribution[k].size(); ++i)
                if (attribution[k][i].packet_id == id) t = share_interval(k, i).second;
        return t;
    }

    std::optional<double> first_transmit_time(int id) const {
        for (std::size_t k = 0; k < attribution.size(); ++k)
            for (std::size_t i = 0; i < attribution[k].size(); ++i)
                if (attribution[k][i].packet_id == id) return share_interval(k, i).first;
        return std::nullopt;
    }

    /// Rate of the final segment carrying this packet's bits.
    std::optional<double> packet_final_rate(int id) const {
        std::optional<double> r;
        for (std::size_t k = 0; k < attribution.size(); ++k)
            for (const auto& sh : attribution[k])
                if (sh.packet_id == id) r = segments[k].rate;
        return r;
    }

    /// Splits at time t into (before, after); shares split by pour order.
    std::pair<Schedule, Schedule> split_at(double t) const {
        Schedule before, after;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const Segment& s = segments[k];
            const auto& shares = attribution.empty() ? std::vector<PacketShare>{} : attribution[k];
            if (s.t1 <= t) {
                before.segments.push_back(s);
                before.attribution.push_back(shares);
            } else if (s.t0 >= t) {
                after.segments.push_back(s);
                after.attribution.push_back(shares);
            } else {
                double cut_bits = s.rate * (t - s.t0);
                std::vector<PacketShare> first, second;
                double acc = 0.0;
                for (const auto& sh : shares) {
                    if (acc + sh.bits <= cut_bits + 1e-12 * (1.0 + cut_bits)) {
                        first.push_back(sh);
                    } else if (acc >= cut_bits) {
                        second.push_back(sh);
                    } else {
                        double head = cut_bits - acc;
                        if (head > 0.0) first.push_back({sh.packet_id, head});
                        second.push_back({sh.packet_id, sh.bits - head});
                    }
                    acc += sh.bits;
                }
                before.segments.push_back({s.t0, t, s.rate});
                before.attribution.push_back(std::move(first));
                after.segments.push_back({t, s.t1, s.rate});
                after.attribution.push_back(std::move(second));
            }
        }
        return {std::move(before), std::move(after)};
    }

    Schedule shifted(double dt) const {
        Schedule out = *this;
        for (auto& s : out.segments) {
            s.t0 += dt;
            s.t1 += dt;
        }
        return out;
    }

    void append(const Schedule& tail) {
        segments.insert(segments.end(), tail.segments.begin(), tail.segments.end());
        attribution.insert(attribution.end(), tail.attribution.begin(), tail.attribution.end());
    }

    /// Rewrites packet ids in all shares (used when derived sub-packets
    /// fold back into the original packet).
    void remap_ids(const std::vector<std::pair<int, int>>& from_to) {
        for (auto& shares : attribution) {
            for (auto& sh : shares)
                for (const auto& [from, to] : from_to)
                    if (sh.packet_id == from) sh.packet_id = to;
            // merge adjacent shares that now belong to the same packet
            std::vector<PacketShare> merged;
            for (const auto& sh : shares) {
                if (!merged.empty() && merged.back().packet_id == sh.packet_id)
                    merged.back().bits += sh.bits;
                else
                    merged.push_back(sh);
            }
            shares = std::move(merged);
        }
    }
};

struct FeasibilityReport {
    bool ok = true;
    double time_s = 0.0;
    std::string reason;
    explicit operator bool() const { return ok; }
};

namespace detail {
inline FeasibilityReport violation(double t, std::string why) { return {false, t, std::move(why)}; }
}  // namespace detail

/// Checks a schedule against a sequence: the aggregate envelope
/// D_min(t) <= D(t) <= A(t) at every breakpoint, per-packet bit
/// conservation, and that every share lies inside its packet's
/// arrival/deadline window.
inline FeasibilityReport is_feasible(const Schedule& schedule, const PacketSequence& seq,
                                     double tol = 1e-9) {
    try {
        schedule.validate();
    } catch (const validation_error& e) {
        return detail::violation(schedule.start_time(), e.what());
    }

    const CumulativeCurve arr = arrival_curve(seq);
    const CumulativeCurve dmin = min_departure_curve(seq);
    const double time_eps = 1e-9 + 1e-12 * seq.horizon();

    // Event grid: all curve jumps and segment boundaries.
    std::vector<double> events;
    for (const auto& j : arr.jumps()) events.push_back(j.time_s);
    for (const auto& j : dmin.jumps()) events.push_back(j.time_s);
    for (const auto& s : schedule.segments) {
        events.push_back(s.t0);
        events.push_back(s.t1);
    }
    events.push_back(seq.horizon());
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    for (std::size_t i = 0; i < events.size(); ++i) {
        double u = events[i];
        double d_u = schedule.departure_at(u);
        if (d_u < dmin.value_at(u) - tol)
            return detail::violation(u, "deadline violation: departed " + std::to_string(d_u) +
                                            " < required " + std::to_string(dmin.value_at(u)));
        // On [u, v) the arrival curve is flat at A(u); D is maximal at v.
        double v = (i + 1 < events.size()) ? events[i + 1] : u;
        double d_v = schedule.departure_at(v);
        if (d_v > arr.value_at(u) + tol)
            return detail::violation(v, "causality violation: departed " + std::to_string(d_v) +
                                            " > arrived " + std::to_string(arr.value_at(u)));
    }

    // Per-packet attribution: totals and window containment.
    if (schedule.attribution.size() != schedule.segments.size() && !seq.empty())
        return detail::violation(schedule.start_time(), "missing attribution");
    for (const auto& p : seq.packets()) {
        double got = schedule.packet_bits(p.id);
        if (std::abs(got - p.size_bits) > tol)
            return detail::violation(p.deadline_s, "packet " + std::to_string(p.id) + " carries " +
                                                       std::to_string(got) + " of " +
                                                       std::to_string(p.size_bits) + " bits");
    }
    for (std::size_t k = 0; k < schedule.attribution.size(); ++k) {
        for (std::size_t i = 0; i < schedule.attribution[k].size(); ++i) {
            const PacketShare& sh = schedule.attribution[k][i];
            if (sh.bits <= tol) continue;
            const Packet* p = seq.find(sh.packet_id);
            if (p == nullptr)
                return detail::violation(schedule.segments[k].t0,
                                         "unknown packet id " + std::to_string(sh.packet_id));
            auto [a, b] = schedule.share_interval(k, i);
            if (a < p->arrival_s - time_eps)
                return detail::violation(a, "packet " + std::to_string(p->id) + " transmitted before arrival");
            if (b > p->deadline_s + time_eps)
                return detail::violation(b, "packet " + std::to_string(p->id) + " transmitted after deadline");
        }
    }
    return {};
}

}  // namespace tautsched

#endif
