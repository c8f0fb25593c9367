#ifndef TAUTSCHED_ONLINE_HPP
#define TAUTSCHED_ONLINE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/nonfifo.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/schedule.hpp"
#include "tautsched/taut_string.hpp"

namespace tautsched {

enum class OnlinePolicy {
    Optimal,    // replan with the optimal offline scheduler on every arrival
    FifoOrder,  // replan serving the backlog in arrival order (classic FIFO scheduler)
};

struct BacklogEntry {
    int id = 0;
    double bits = 0.0;
    double deadline_s = 0.0;
};

struct OnlineEvent {
    std::string kind;  // "arrival" | "replan" | "segment"
    double time_s = 0.0;
    int packet_id = 0;
    double bits = 0.0;
    double rate = 0.0;
};

struct OnlineState {
    double now = 0.0;
    std::vector<BacklogEntry> backlog;  // insertion order == arrival order
    Schedule executed;
    Schedule plan;  // from `now` onward
    OnlinePolicy policy = OnlinePolicy::Optimal;
    int edf_fallbacks = 0;
    int deadline_misses = 0;
    std::vector<OnlineEvent> events;
};

struct OnlineResult {
    Schedule schedule;
    int edf_fallbacks = 0;
    int deadline_misses = 0;
    std::vector<OnlineEvent> events;
};

namespace detail {

inline void merge_adjacent_equal_rate(Schedule& sch) {
    Schedule out;
    for (std::size_t k = 0; k < sch.segments.size(); ++k) {
        const Segment& s = sch.segments[k];
        if (s.t1 <= s.t0) continue;
        const auto& shares = k < sch.attribution.size() ? sch.attribution[k] : std::vector<PacketShare>{};
        if (!out.segments.empty() && std::abs(out.segments.back().t1 - s.t0) <= 1e-12 &&
            std::abs(out.segments.back().rate - s.rate) <= 1e-12 * (1.0 + std::abs(s.rate))) {
            out.segments.back().t1 = s.t1;
            auto& dst = out.attribution.back();
            for (const auto& sh : shares) {
                if (!dst.empty() && dst.back().packet_id == sh.packet_id)
                    dst.back().bits += sh.bits;
                else
                    dst.push_back(sh);
            }
        } else {
            out.segments.push_back(s);
            out.attribution.push_back(shares);
        }
    }
    sch = std::move(out);
}

// Subproblem for the interval [now, ...): every queued packet counts as
// arriving now, so the replan is causally valid by construction.
inline Schedule plan_backlog(OnlineState& state, int new_id) {
    std::vector<BacklogEntry> live;
    const double eps_bits = 1e-9;
    for (const auto& e : state.backlog)
        if (e.bits > eps_bits && e.deadline_s > state.now) live.push_back(e);
    if (live.empty()) return {};

    std::vector<std::size_t> order(live.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    auto by_deadline = [&](std::size_t a, std::size_t b) {
        if (live[a].deadline_s != live[b].deadline_s) return live[a].deadline_s < live[b].deadline_s;
        return a < b;
    };

    bool use_cascade = false;
    std::size_t new_pos = live.size();
    for (std::size_t i = 0; i < live.size(); ++i)
        if (live[i].id == new_id) new_pos = i;

    if (state.policy == OnlinePolicy::FifoOrder) {
        // Arrival order with suffix-min effective deadlines keeps the
        // FIFO service order schedulable.
        std::vector<double> eff(live.size());
        double run = std::numeric_limits<double>::infinity();
        for (std::size_t i = live.size(); i-- > 0;) {
            run = std::min(run, live[i].deadline_s);
            eff[i] = run;
        }
        std::vector<Packet> pkts;
        pkts.reserve(live.size());
        for (std::size_t i = 0; i < live.size(); ++i)
            pkts.push_back({live[i].id, live[i].bits, state.now, eff[i]});
        return schedule_fifo(PacketSequence::derived(std::move(pkts)));
    }

    if (new_pos < live.size() && live.size() >= 2) {
        double max_other = -std::numeric_limits<double>::infinity();
        double second = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (i == new_pos) continue;
            if (live[i].deadline_s > max_other) {
                second = max_other;
                max_other = live[i].deadline_s;
            } else {
                second = std::max(second, live[i].deadline_s);
            }
        }
        if (live[new_pos].deadline_s < max_other) {
            if (live[new_pos].deadline_s > second) {
                use_cascade = true;  // exactly one predecessor outranks it
            } else {
                ++state.edf_fallbacks;  // outside the one-violation class
            }
        }
    }

    std::vector<std::size_t> seq_order = order;
    if (use_cascade) {
        seq_order.erase(std::remove(seq_order.begin(), seq_order.end(), new_pos), seq_order.end());
        std::sort(seq_order.begin(), seq_order.end(), by_deadline);
        seq_order.push_back(new_pos);
    } else {
        std::sort(seq_order.begin(), seq_order.end(), by_deadline);
    }

    std::vector<Packet> pkts;
    pkts.reserve(live.size());
    for (std::size_t idx : seq_order)
        pkts.push_back({live[idx].id, live[idx].bits, state.now, live[idx].deadline_s});
    PacketSequence sub = PacketSequence::derived(std::move(pkts));
    return use_cascade ? detail::run_cascade(sub, sub.size() - 1).schedule : schedule_fifo(sub);
}

inline void advance_to(OnlineState& state, double t) {
    if (t < state.now) throw std::invalid_argument("online: time moves backwards");
    auto [head, tail] = state.plan.split_at(t);
    for (const auto& shares : head.attribution)
        for (const auto& sh : shares)
            for (auto& e : state.backlog)
                if (e.id == sh.packet_id) e.bits -= sh.bits;
    state.executed.append(head);
    state.plan = std::move(tail);
    state.now = t;
    const double eps_bits = 1e-9;
    for (const auto& e : state.backlog)
        if (e.bits > eps_bits && e.deadline_s < t - 1e-9) ++state.deadline_misses;
    std::erase_if(state.backlog, [&](const BacklogEntry& e) { return e.bits <= eps_bits; });
}

}  // namespace detail

/// Freezes the executed prefix up to the new arrival, adds the packet to
/// the backlog, and adopts a fresh plan for the residual work.
inline void online_step(OnlineState& state, const Packet& packet) {
    if (packet.arrival_s < state.now)
        throw std::invalid_argument("online_step: arrivals must be time-ordered");
    detail::advance_to(state, packet.arrival_s);
    state.backlog.push_back({packet.id, packet.size_bits, packet.deadline_s});
    state.events.push_back({"arrival", packet.arrival_s, packet.id, packet.size_bits, 0.0});
    state.plan = detail::plan_backlog(state, packet.id);
    state.events.push_back({"replan", packet.arrival_s, packet.id, 0.0, 0.0});
}

/// Recomputes the plan with no new information (must be a no-op).
inline Schedule replan(OnlineState& state) { return detail::plan_backlog(state, -1); }

/// Runs the causal policy over a whole arrival stream.
inline OnlineResult run_online(const PacketSequence& seq, OnlinePolicy policy = OnlinePolicy::Optimal) {
    OnlineState state;
    state.policy = policy;
    for (const auto& p : seq.packets()) online_step(state, p);
    detail::advance_to(state, std::max(state.now, state.plan.end_time()));
    detail::merge_adjacent_equal_rate(state.executed);

    OnlineResult out;
    out.schedule = std::move(state.executed);
    out.edf_fallbacks = state.edf_fallbacks;
    out.deadline_misses = state.deadline_misses;
    out.events = std::move(state.events);
    for (const auto& s : out.schedule.segments)
        out.events.push_back({"segment", s.t0, 0, s.rate * (s.t1 - s.t0), s.rate});
    return out;
}

inline void write_event_csv(std::ostream& os, const std::vector<OnlineEvent>& events) {
    os << "event,time_s,packet_id,bits,rate\n";
    char buf[160];
    for (const auto& e : events) {
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%d,%.10g,%.10g\n", e.kind.c_str(), e.time_s,
                      e.packet_id, e.bits, e.rate);
        os << buf;
    }
}

}  // namespace tautsched

#endif
