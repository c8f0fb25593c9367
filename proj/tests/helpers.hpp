#ifndef TAUTSCHED_TEST_HELPERS_HPP
#define TAUTSCHED_TEST_HELPERS_HPP

#include <utility>
#include <vector>

#include "tautsched/packet.hpp"
#include "tautsched/workload.hpp"

namespace tshelp {

struct Spec3 {
    double bits, arrival, deadline;
};

inline tautsched::PacketSequence make_seq(std::initializer_list<Spec3> specs) {
    std::vector<tautsched::Packet> pkts;
    int id = 0;
    for (const auto& s : specs) pkts.push_back({++id, s.bits, s.arrival, s.deadline});
    return tautsched::PacketSequence::from(std::move(pkts));
}

inline tautsched::PacketSequence make_seq_derived(std::initializer_list<Spec3> specs) {
    std::vector<tautsched::Packet> pkts;
    int id = 0;
    for (const auto& s : specs) pkts.push_back({++id, s.bits, s.arrival, s.deadline});
    return tautsched::PacketSequence::derived(std::move(pkts));
}

/// Random deadline-ordered instance with up to max_n packets.
inline tautsched::PacketSequence random_fifo(tautsched::Rng& rng, int max_n = 6) {
    int n = 1 + static_cast<int>(rng.uniform01() * max_n);
    if (n > max_n) n = max_n;
    std::vector<tautsched::Packet> pkts;
    double arrival = 0.0;
    double deadline_floor = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) arrival += 0.05 + 1.2 * rng.uniform01();
        double deadline = std::max(deadline_floor + 0.05 + 0.8 * rng.uniform01(),
                                   arrival + 0.2 + 1.5 * rng.uniform01());
        deadline_floor = deadline;
        pkts.push_back({i + 1, 0.2 + 2.8 * rng.uniform01(), arrival, deadline});
    }
    return tautsched::PacketSequence::from(std::move(pkts));
}

/// Random instance with exactly one non-FIFO packet; returns its index.
inline std::pair<tautsched::PacketSequence, std::size_t> random_nonfifo(tautsched::Rng& rng,
                                                                        int max_n = 6) {
    for (;;) {
        tautsched::PacketSequence base = random_fifo(rng, max_n);
        if (base.size() < 2) continue;
        auto pkts = base.packets();
        std::size_t j = 1 + static_cast<std::size_t>(rng.uniform01() * (pkts.size() - 1));
        if (j >= pkts.size()) j = pkts.size() - 1;
        // keep the forced window wide enough that no rate drives the
        // exponential power map out of double range
        double lo = pkts[j].arrival_s + 0.25;
        if (j >= 2) lo = std::max(lo, pkts[j - 2].deadline_s);
        double hi = pkts[j - 1].deadline_s;
        double margin = 0.02 * (hi - lo);
        if (!(hi - lo > 0.05)) continue;
        pkts[j].deadline_s = lo + margin + (hi - lo - 2 * margin) * rng.uniform01();
        return {tautsched::PacketSequence::from(std::move(pkts)), j};
    }
}

}  // namespace tshelp

#endif
