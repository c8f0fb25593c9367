#ifndef TAUTSCHED_PACKET_HPP
#define TAUTSCHED_PACKET_HPP

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "tautsched/common.hpp"

namespace tautsched {

/// One packet: size in bits plus its arrival instant and deadline.
struct Packet {
    int id = 0;
    double size_bits = 0.0;
    double arrival_s = 0.0;
    double deadline_s = 0.0;
};

/// An arrival-ordered packet sequence over a finite horizon.
///
/// Two construction modes exist. `from` enforces strictly increasing
/// arrivals, which is the contract for user-supplied workloads. `derived`
/// allows arrival ties; sequences produced by split/merge/remap transforms
/// and by online replanning legitimately contain them.
class PacketSequence {
public:
    PacketSequence() = default;

    static PacketSequence from(std::vector<Packet> packets) {
        return PacketSequence(std::move(packets), /*strict_arrivals=*/true);
    }

    static PacketSequence derived(std::vector<Packet> packets) {
        return PacketSequence(std::move(packets), /*strict_arrivals=*/false);
    }

    const std::vector<Packet>& packets() const { return packets_; }
    std::size_t size() const { return packets_.size(); }
    bool empty() const { return packets_.empty(); }

    /// Horizon T = latest deadline (0 for an empty sequence).
    double horizon() const {
        double t = 0.0;
        for (const auto& p : packets_) t = std::max(t, p.deadline_s);
        return t;
    }

    double first_arrival() const { return packets_.empty() ? 0.0 : packets_.front().arrival_s; }

    double total_bits() const {
        double b = 0.0;
        for (const auto& p : packets_) b += p.size_bits;
        return b;
    }

    const Packet* find(int id) const {
        for (const auto& p : packets_) {
            if (p.id == id) return &p;
        }
        return nullptr;
    }

private:
    PacketSequence(std::vector<Packet> packets, bool strict_arrivals) : packets_(std::move(packets)) {
        std::set<int> ids;
        for (std::size_t i = 0; i < packets_.size(); ++i) {
            const Packet& p = packets_[i];
            if (!(p.size_bits > 0.0))
                throw validation_error("packet " + std::to_string(p.id) + ": size must be positive");
            if (p.arrival_s < 0.0)
                throw validation_error("packet " + std::to_string(p.id) + ": arrival must be >= 0");
            if (!(p.deadline_s > p.arrival_s))
                throw validation_error("packet " + std::to_string(p.id) + ": deadline must exceed arrival");
            if (!ids.insert(p.id).second)
                throw validation_error("duplicate packet id " + std::to_string(p.id));
            if (i > 0) {
                double prev = packets_[i - 1].arrival_s;
                if (strict_arrivals ? !(p.arrival_s > prev) : p.arrival_s < prev)
                    throw validation_error("packet " + std::to_string(p.id) + ": arrivals out of order");
            }
        }
    }

    std::vector<Packet> packets_;
};

}  // namespace tautsched

#endif
