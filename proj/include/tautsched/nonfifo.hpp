#ifndef TAUTSCHED_NONFIFO_HPP
#define TAUTSCHED_NONFIFO_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/energy_model.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/schedule.hpp"
#include "tautsched/taut_string.hpp"

namespace tautsched {

enum class Possibility { P1, P2, P3, P4 };

inline const char* to_string(Possibility p) {
    switch (p) {
        case Possibility::P1: return "P1";
        case Possibility::P2: return "P2";
        case Possibility::P3: return "P3";
        case Possibility::P4: return "P4";
    }
    return "?";
}

/// Outcome of the non-FIFO scheduler.
struct NonFifoDecision {
    Possibility possibility = Possibility::P1;
    double split_bits = 0.0;          // bits of the immediately preceding packet sent before the late one
    std::size_t nonfifo_index = 0;    // 0-based position in the original sequence
    Schedule schedule;                // attribution uses the original packet ids
};

/// Index of the unique packet whose deadline precedes its predecessor's,
/// or nullopt for a deadline-ordered sequence. Exactly one adjacent
/// violation is supported, and removing the offender must restore strict
/// deadline order.
inline std::optional<std::size_t> detect_non_fifo(const PacketSequence& seq) {
    const auto& p = seq.packets();
    std::optional<std::size_t> found;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i].deadline_s < p[i - 1].deadline_s) {
            if (found)
                throw unsupported_error("sequence has more than one deadline-order violation");
            found = i;
        }
    }
    if (!found) return std::nullopt;
    std::size_t j = *found;
    if (j + 1 < p.size() && !(p[j + 1].deadline_s > p[j - 1].deadline_s))
        throw unsupported_error("removing packet " + std::to_string(p[j].id) +
                                " does not restore deadline order");
    return j;
}

/// First index of the run of predecessors whose deadlines exceed the
/// non-FIFO packet's (always <= j-1; equals j-1 exactly in the
/// single-predecessor class treated by the four-possibility cascade).
inline std::size_t crossing_block_begin(const PacketSequence& seq, std::size_t j) {
    const auto& p = seq.packets();
    std::size_t m = j;
    while (m > 0 && p[m - 1].deadline_s > p[j].deadline_s) --m;
    return m;
}

struct SplitResult {
    PacketSequence sequence;
    std::optional<int> sub1_id;  // head sub-packet (sent before the non-FIFO packet)
    std::optional<int> sub2_id;  // tail sub-packet
    int pj_id = 0;
};

/// Splits packet j-1 into head/tail sub-packets of S and B-S bits placed
/// around packet j, restoring deadline order. The head inherits packet
/// j-1's arrival and packet j's deadline; the tail arrives with packet j
/// and keeps packet j-1's deadline. Zero-size sub-packets are dropped.
inline SplitResult split_and_reorder(const PacketSequence& seq, std::size_t j, double split_bits) {
    const auto& p = seq.packets();
    if (j == 0 || j >= p.size())
        throw std::invalid_argument("split_and_reorder: index has no predecessor");
    const Packet& prev = p[j - 1];
    const Packet& pj = p[j];
    const double b = prev.size_bits;
    const double tol = 1e-12 * (1.0 + b);
    double s = split_bits;
    if (s < -tol || s > b + tol)
        throw std::invalid_argument("split_and_reorder: split factor outside [0, B]");
    s = std::clamp(s, 0.0, b);

    int fresh = 0;
    for (const auto& q : p) fresh = std::max(fresh, q.id);

    SplitResult out;
    out.pj_id = pj.id;
    std::vector<Packet> packets(p.begin(), p.begin() + static_cast<long>(j - 1));
    if (s > 0.0) {
        out.sub1_id = fresh + 1;
        packets.push_back({*out.sub1_id, s, prev.arrival_s, pj.deadline_s});
    }
    packets.push_back(pj);
    if (s < b) {
        out.sub2_id = fresh + 2;
        packets.push_back({*out.sub2_id, b - s, pj.arrival_s, prev.deadline_s});
    }
    packets.insert(packets.end(), p.begin() + static_cast<long>(j + 1), p.end());
    out.sequence = PacketSequence::derived(std::move(packets));
    return out;
}

/// Generalized reorder for a late packet whose deadline undercuts a run of
/// predecessors. `head_bits` of the run are transmitted before the late
/// packet, drawn greedily from the earliest-deadline members (their bits
/// gain the least from deferral and are available the earliest); each
/// member's remainder is deferred past the late packet, keeping its own
/// deadline. Degenerates to split_and_reorder when the run has length one.
struct DeferredSplit {
    PacketSequence sequence;
    std::vector<std::pair<int, int>> id_map;  // fresh sub-packet id -> original id
    int pj_id = 0;
    double head_bits = 0.0;
    double prev_head_bits = 0.0;  // share of packet j-1 inside the head
};

inline DeferredSplit split_block(const PacketSequence& seq, std::size_t j, std::size_t m,
                                 double head_bits) {
    const auto& p = seq.packets();
    if (m > j - 1 || j >= p.size()) throw std::invalid_argument("split_block: bad block");
    double block_total = 0.0;
    for (std::size_t k = m; k < j; ++k) block_total += p[k].size_bits;
    const double tol = 1e-12 * (1.0 + block_total);
    if (head_bits < -tol || head_bits > block_total + tol)
        throw std::invalid_argument("split_block: head bits outside [0, block]");
    double x = std::clamp(head_bits, 0.0, block_total);

    int fresh = 0;
    for (const auto& q : p) fresh = std::max(fresh, q.id);

    DeferredSplit out;
    out.pj_id = p[j].id;
    out.head_bits = x;

    std::vector<Packet> heads, tails;
    double rest = x;
    for (std::size_t k = m; k < j; ++k) {
        double s = std::clamp(rest, 0.0, p[k].size_bits);
        rest -= s;
        if (s <= tol) s = 0.0;
        if (p[k].size_bits - s <= tol) s = p[k].size_bits;
        if (k == j - 1) out.prev_head_bits = s;
        if (s > 0.0) {
            heads.push_back({++fresh, s, p[k].arrival_s, p[j].deadline_s});
            out.id_map.emplace_back(fresh, p[k].id);
        }
        if (s < p[k].size_bits) {
            tails.push_back({++fresh, p[k].size_bits - s, p[j].arrival_s, p[k].deadline_s});
            out.id_map.emplace_back(fresh, p[k].id);
        }
    }

    std::vector<Packet> packets(p.begin(), p.begin() + static_cast<long>(m));
    packets.insert(packets.end(), heads.begin(), heads.end());
    packets.push_back(p[j]);
    packets.insert(packets.end(), tails.begin(), tails.end());
    packets.insert(packets.end(), p.begin() + static_cast<long>(j + 1), p.end());
    out.sequence = PacketSequence::derived(std::move(packets));
    return out;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-strict rate comparison at 1e-9 relative slack; ties satisfy.
inline bool rate_ge(double a, double b) {
    if (a == kInf) return true;
    if (b == kInf) return false;
    return a >= b - 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}
inline bool rate_le(double a, double b) { return rate_ge(b, a); }

// Rate of the interval the head sub-packet's marginal bit would join:
// whatever transmits just before packet j's first bit. Idle counts as 0;
// a start flush against the problem origin leaves no room at all.
inline double rate_before_epoch(const Schedule& sch, int pj_id, double origin) {
    auto s = sch.first_transmit_time(pj_id);
    if (!s) throw std::logic_error("rate_before_epoch: packet carries no bits");
    if (*s <= origin + 1e-12 * (1.0 + std::abs(origin))) return kInf;
    return sch.rate_just_before(*s);
}

// Rate of the interval a tail sub-packet's marginal bit would join:
// whatever transmits right after packet j completes. Idle counts as 0
// unless completion already touches the horizon. Works on the share
// structure: completing mid-segment means a successor rides in the same
// segment, completing on the boundary means the next segment (if any)
// starts there.
inline double rate_after_epoch(const Schedule& sch, int pj_id, double horizon) {
    std::size_t seg = sch.segments.size(), idx = 0;
    for (std::size_t k = 0; k < sch.attribution.size(); ++k)
        for (std::size_t i = 0; i < sch.attribution[k].size(); ++i)
            if (sch.attribution[k][i].packet_id == pj_id) {
                seg = k;
                idx = i;
            }
    if (seg == sch.segments.size()) throw std::logic_error("rate_after_epoch: packet carries no bits");
    const Segment& s = sch.segments[seg];
    double share_end = sch.share_interval(seg, idx).second;
    double r = 0.0;
    if (share_end < s.t1 - 1e-9 * (1.0 + s.t1 - s.t0))
        r = s.rate;  // successor bits follow inside the same segment
    else
        r = sch.rate_at(s.t1);
    if (r > 0.0) return r;
    return (s.t1 >= horizon - 1e-9 * (1.0 + horizon)) ? kInf : 0.0;
}

inline double bits_before(const PacketSequence& seq, std::size_t j) {
    double b = 0.0;
    for (std::size_t i = 0; i + 1 < j; ++i) b += seq.packets()[i].size_bits;
    return b;  // sizes of packets 1..j-2 in 1-based terms
}

}  // namespace detail

/// Possibility 1: send all of packet j-1 after packet j (split factor 0).
/// Keeps the plan iff the rate ahead of packet j is no smaller than packet
/// j-1's rate behind it, so no bit gains by moving forward.
inline std::optional<Schedule> check_p1(const PacketSequence& seq, std::size_t j) {
    SplitResult sr = split_and_reorder(seq, j, 0.0);
    Schedule sch = schedule_fifo(sr.sequence);
    double before = detail::rate_before_epoch(sch, sr.pj_id, seq.first_arrival());
    double after = *sch.packet_final_rate(*sr.sub2_id);
    if (!detail::rate_ge(before, after)) return std::nullopt;
    sch.remap_ids({{*sr.sub2_id, seq.packets()[j - 1].id}});
    return sch;
}

/// Possibility 2: send all of packet j-1 before packet j (split factor B).
/// Keeps the plan iff packet j-1's rate is no larger than the rate behind
/// packet j, so no bit gains by moving backward.
inline std::optional<Schedule> check_p2(const PacketSequence& seq, std::size_t j) {
    const Packet& prev = seq.packets()[j - 1];
    SplitResult sr = split_and_reorder(seq, j, prev.size_bits);
    Schedule sch = schedule_fifo(sr.sequence);
    double self = *sch.packet_final_rate(*sr.sub1_id);
    double after = detail::rate_after_epoch(sch, sr.pj_id, seq.horizon());
    if (!detail::rate_le(self, after)) return std::nullopt;
    sch.remap_ids({{*sr.sub1_id, prev.id}});
    return sch;
}

/// Possibility 3: merge packets j-1 and j, schedule the merged sequence,
/// and read the split factor off the merged plan at packet j's deadline.
/// Valid iff the split is strictly interior and the merged plan respects
/// packet j's arrival: its flow by t_a,j must not exceed the bits that
/// exist before packet j arrives (earlier packets plus the head split).
inline std::optional<std::pair<Schedule, double>> check_p3(const PacketSequence& seq,
                                                           std::size_t j) {
    const auto& p = seq.packets();
    const Packet& prev = p[j - 1];
    const Packet& pj = p[j];

    int fresh = 0;
    for (const auto& q : p) fresh = std::max(fresh, q.id);
    std::vector<Packet> merged(p.begin(), p.begin() + static_cast<long>(j - 1));
    merged.push_back({fresh + 1, prev.size_bits + pj.size_bits, prev.arrival_s, prev.deadline_s});
    merged.insert(merged.end(), p.begin() + static_cast<long>(j + 1), p.end());

    Schedule sm = schedule_fifo(PacketSequence::derived(std::move(merged)));

    const double pre = detail::bits_before(seq, j);
    const double split = sm.departure_at(pj.deadline_s) - pre - pj.size_bits;
    const double tol = 1e-12 * (1.0 + prev.size_bits);
    if (!(split > tol) || !(split < prev.size_bits - tol)) return std::nullopt;
    const double bits_tol = 1e-9 * (1.0 + seq.total_bits());
    if (sm.departure_at(pj.arrival_s) > pre + split + bits_tol) return std::nullopt;

    SplitResult sr = split_and_reorder(seq, j, split);
    Schedule out = attribute_edf(sm.segments, sr.sequence);
    out.remap_ids({{*sr.sub1_id, prev.id}, {*sr.sub2_id, prev.id}});
    return std::make_pair(std::move(out), split);
}

/// Possibility 4: reserve [t_a,j, t_d,j] exclusively for packet j. The
/// other packets are scheduled on the remaining time axis: instants inside
/// the reserved window collapse onto its left edge and later instants
/// shift left by the window length. The resulting plan is spliced back
/// around a constant-rate segment that exactly fits packet j.
inline std::pair<Schedule, double> schedule_p4(const PacketSequence& seq, std::size_t j) {
    const auto& p = seq.packets();
    const Packet& pj = p[j];
    const double window = pj.deadline_s - pj.arrival_s;

    auto remap = [&](double t) {
        if (t <= pj.arrival_s) return t;
        if (t <= pj.deadline_s) return pj.arrival_s;
        return t - window;
    };
    std::vector<Packet> rest;
    rest.reserve(p.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i == j) continue;
        rest.push_back({p[i].id, p[i].size_bits, remap(p[i].arrival_s), remap(p[i].deadline_s)});
    }

    Schedule reduced = rest.empty() ? Schedule{} : schedule_fifo(PacketSequence::derived(std::move(rest)));

    double split = reduced.departure_at(pj.arrival_s) - detail::bits_before(seq, j);
    split = std::clamp(split, 0.0, p[j - 1].size_bits);

    auto [head, tail] = reduced.split_at(pj.arrival_s);
    Schedule out = std::move(head);
    out.segments.push_back({pj.arrival_s, pj.deadline_s, pj.size_bits / window});
    out.attribution.push_back({{pj.id, pj.size_bits}});
    out.append(tail.shifted(window));
    return {std::move(out), split};
}

namespace detail {

/// The four-possibility cascade; valid when only packet j-1's deadline
/// crosses packet j's.
inline NonFifoDecision run_cascade(const PacketSequence& seq, std::size_t j) {
    NonFifoDecision d;
    d.nonfifo_index = j;
    if (auto s1 = check_p1(seq, j)) {
        d.possibility = Possibility::P1;
        d.split_bits = 0.0;
        d.schedule = std::move(*s1);
        return d;
    }
    if (auto s2 = check_p2(seq, j)) {
        d.possibility = Possibility::P2;
        d.split_bits = seq.packets()[j - 1].size_bits;
        d.schedule = std::move(*s2);
        return d;
    }
    if (auto s3 = check_p3(seq, j)) {
        d.possibility = Possibility::P3;
        d.split_bits = s3->second;
        d.schedule = std::move(s3->first);
        return d;
    }
    auto [sch, split] = schedule_p4(seq, j);
    d.possibility = Possibility::P4;
    d.split_bits = split;
    d.schedule = std::move(sch);
    return d;
}

inline double block_split_energy(const PacketSequence& seq, std::size_t j, std::size_t m,
                                 double x, const EnergyModel& model) {
    DeferredSplit ds = split_block(seq, j, m, x);
    auto segs = string_tautening(arrival_curve(ds.sequence), min_departure_curve(ds.sequence),
                                 {ds.sequence.first_arrival(), 0.0},
                                 {ds.sequence.horizon(), ds.sequence.total_bits()});
    return segments_energy(model, segs);
}

/// Minimizes the deferred-split energy over the scalar head size. The
/// energy is convex on each interval of the greedy fill (the envelope
/// curves are affine in the head size there), so each piece is searched
/// by golden section when its boundary slopes bracket a minimum.
inline std::pair<double, double> minimize_block_split(const PacketSequence& seq, std::size_t j,
                                                      std::size_t m, const EnergyModel& model) {
    const auto& p = seq.packets();
    std::vector<double> knots{0.0};
    for (std::size_t k = m; k < j; ++k) knots.push_back(knots.back() + p[k].size_bits);
    const double total = knots.back();
    auto energy = [&](double x) { return block_split_energy(seq, j, m, x, model); };

    double best_x = 0.0, best_e = energy(0.0);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double e = energy(knots[i]);
        if (e < best_e) {
            best_e = e;
            best_x = knots[i];
        }
    }

    const double xtol = 1e-10 * (1.0 + total);
    const double golden = 0.6180339887498949;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double a = knots[i - 1], b = knots[i];
        if (b - a <= 8.0 * xtol) continue;
        double h = std::max(1e-7 * (b - a), xtol);
        if (energy(a + h) >= energy(a) || energy(b - h) >= energy(b)) continue;  // no interior dip
        double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
        double e1 = energy(x1), e2 = energy(x2);
        while (b - a > xtol) {
            if (e1 <= e2) {
                b = x2;
                x2 = x1;
                e2 = e1;
                x1 = b - golden * (b - a);
                e1 = energy(x1);
            } else {
                a = x1;
                x1 = x2;
                e1 = e2;
                x2 = a + golden * (b - a);
                e2 = energy(x2);
            }
        }
        double xm = 0.5 * (a + b), em = energy(xm);
        if (em < best_e) {
            best_e = em;
            best_x = xm;
        }
    }
    return {best_x, best_e};
}

}  // namespace detail

/// The optimal offline scheduler for one late-deadline packet.
///
/// When the late packet undercuts a single predecessor, the split factor
/// is found by checking the four possibilities in order (P4 always
/// applies once P1-P3 fail); the decision there is independent of the
/// energy model. When it undercuts a run of predecessors, the scalar
/// deferred-split search minimizes the model's energy directly.
inline NonFifoDecision schedule_non_fifo(const PacketSequence& seq, const EnergyModel& model) {
    auto jopt = detect_non_fifo(seq);
    if (!jopt)
        throw std::invalid_argument("schedule_non_fifo: sequence is deadline-ordered; use schedule_fifo");
    const std::size_t j = *jopt;
    const std::size_t m = crossing_block_begin(seq, j);
    if (m == j - 1) return detail::run_cascade(seq, j);

    auto [x, energy] = detail::minimize_block_split(seq, j, m, model);
    (void)energy;
    DeferredSplit ds = split_block(seq, j, m, x);
    Schedule sch = schedule_fifo(ds.sequence);
    sch.remap_ids(ds.id_map);

    NonFifoDecision d;
    d.nonfifo_index = j;
    d.split_bits = ds.prev_head_bits;
    d.schedule = std::move(sch);

    double block_total = 0.0;
    for (std::size_t k = m; k < j; ++k) block_total += seq.packets()[k].size_bits;
    const double tol = 1e-9 * (1.0 + block_total);
    if (x <= tol) {
        d.possibility = Possibility::P1;
    } else if (x >= block_total - tol) {
        d.possibility = Possibility::P2;
    } else {
        // interior: P3 when the late packet rides at its neighbours' rate,
        // P4 when its window is served at its own forced rate
        const Packet& pj = seq.packets()[j];
        double r_in = d.schedule.rate_just_before(pj.deadline_s);
        double r_before = d.schedule.rate_just_before(pj.arrival_s);
        double r_after = d.schedule.rate_just_after(pj.deadline_s);
        bool level = std::abs(r_in - r_before) <= 1e-9 * (1.0 + r_in) &&
                     std::abs(r_in - r_after) <= 1e-9 * (1.0 + r_in);
        d.possibility = level ? Possibility::P3 : Possibility::P4;
    }
    return d;
}

/// Arrival-order comparator: the classic FIFO scheduler. Serving in
/// arrival order makes every packet due by the earliest deadline behind
/// it, so each deadline is replaced by the suffix minimum and the
/// deadline-ordered optimum is applied. For the single-predecessor class
/// this equals forcing a split factor of B_{j-1}.
inline Schedule fifo_baseline(const PacketSequence& seq) {
    auto jopt = detect_non_fifo(seq);
    if (!jopt) return schedule_fifo(seq);
    const auto& p = seq.packets();
    std::vector<Packet> eff(p.begin(), p.end());
    double run = std::numeric_limits<double>::infinity();
    for (std::size_t i = p.size(); i-- > 0;) {
        run = std::min(run, p[i].deadline_s);
        eff[i].deadline_s = run;
    }
    return schedule_fifo(PacketSequence::derived(std::move(eff)));
}

}  // namespace tautsched

#endif
