#ifndef TAUTSCHED_CURVE_HPP
#define TAUTSCHED_CURVE_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/packet.hpp"

namespace tautsched {

/// A nondecreasing right-continuous staircase of cumulative bits.
///
/// Stores jump points (time, value-after-jump) with strictly increasing
/// times; the curve is 0 before the first jump and flat between jumps.
/// Models both the arrival curve A(t) and the minimum departure curve
/// D_min(t).
class CumulativeCurve {
public:
    CumulativeCurve() = default;

    /// Build from (time, positive increment) pairs; same-time increments merge.
    static CumulativeCurve from_increments(std::vector<std::pair<double, double>> increments) {
        std::sort(increments.begin(), increments.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        CumulativeCurve c;
        double cum = 0.0;
        for (const auto& [t, delta] : increments) {
            if (delta < 0.0) throw validation_error("cumulative curve increments must be nonnegative");
            cum += delta;
            if (!c.jumps_.empty() && c.jumps_.back().time_s == t)
                c.jumps_.back().bits = cum;
            else
                c.jumps_.push_back({t, cum});
        }
        return c;
    }

    /// Value at t (right-continuous: a jump at t counts).
    double value_at(double t) const {
        double v = 0.0;
        for (const auto& j : jumps_) {
            if (j.time_s <= t)
                v = j.bits;
            else
                break;
        }
        return v;
    }

    /// Left limit at t (a jump exactly at t does not count).
    double value_before(double t) const {
        double v = 0.0;
        for (const auto& j : jumps_) {
            if (j.time_s < t)
                v = j.bits;
            else
                break;
        }
        return v;
    }

    double final_value() const { return jumps_.empty() ? 0.0 : jumps_.back().bits; }
    const std::vector<Point>& jumps() const { return jumps_; }
    bool empty() const { return jumps_.empty(); }

private:
    std::vector<Point> jumps_;
};

/// Cumulative bits arrived by time t: a step of size B_i at each arrival.
inline CumulativeCurve arrival_curve(const PacketSequence& seq) {
    std::vector<std::pair<double, double>> inc;
    inc.reserve(seq.size());
    for (const auto& p : seq.packets()) inc.emplace_back(p.arrival_s, p.size_bits);
    return CumulativeCurve::from_increments(std::move(inc));
}

/// Cumulative bits that must have departed by time t to meet every
/// deadline: a step of size B_i at each deadline, in deadline order.
inline CumulativeCurve min_departure_curve(const PacketSequence& seq) {
    std::vector<std::pair<double, double>> inc;
    inc.reserve(seq.size());
    for (const auto& p : seq.packets()) inc.emplace_back(p.deadline_s, p.size_bits);
    return CumulativeCurve::from_increments(std::move(inc));
}

}  // namespace tautsched

#endif
