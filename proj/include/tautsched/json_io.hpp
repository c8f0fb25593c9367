#ifndef TAUTSCHED_JSON_IO_HPP
#define TAUTSCHED_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "tautsched/energy_model.hpp"
#include "tautsched/nonfifo.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/schedule.hpp"
#include "tautsched/workload.hpp"

namespace tautsched {

using json = nlohmann::ordered_json;

inline json workload_to_json(const PacketSequence& seq) {
    json packets = json::array();
    for (const auto& p : seq.packets())
        packets.push_back({{"id", p.id}, {"bits", p.size_bits}, {"arrival", p.arrival_s},
                           {"deadline", p.deadline_s}});
    return {{"packets", packets}};
}

inline PacketSequence workload_from_json(const json& j) {
    if (!j.contains("packets")) throw validation_error("workload: missing field 'packets'");
    std::vector<Packet> packets;
    for (const auto& pj : j.at("packets")) {
        for (const char* key : {"id", "bits", "arrival", "deadline"})
            if (!pj.contains(key)) throw validation_error(std::string("workload packet: missing field '") + key + "'");
        packets.push_back({pj.at("id").get<int>(), pj.at("bits").get<double>(),
                           pj.at("arrival").get<double>(), pj.at("deadline").get<double>()});
    }
    return PacketSequence::from(std::move(packets));
}

inline json schedule_to_json(const Schedule& s) {
    json segments = json::array();
    for (const auto& seg : s.segments)
        segments.push_back({{"t0", seg.t0}, {"t1", seg.t1}, {"rate", seg.rate}});
    json attribution = json::array();
    for (const auto& shares : s.attribution) {
        json list = json::array();
        for (const auto& sh : shares) list.push_back({{"id", sh.packet_id}, {"bits", sh.bits}});
        attribution.push_back(list);
    }
    return {{"segments", segments}, {"attribution", attribution}};
}

inline Schedule schedule_from_json(const json& j) {
    Schedule s;
    if (!j.contains("segments")) throw validation_error("schedule: missing field 'segments'");
    for (const auto& sj : j.at("segments"))
        s.segments.push_back({sj.at("t0").get<double>(), sj.at("t1").get<double>(),
                              sj.at("rate").get<double>()});
    if (j.contains("attribution")) {
        for (const auto& lj : j.at("attribution")) {
            std::vector<PacketShare> shares;
            for (const auto& sh : lj)
                shares.push_back({sh.at("id").get<int>(), sh.at("bits").get<double>()});
            s.attribution.push_back(std::move(shares));
        }
    }
    return s;
}

inline json model_to_json(const EnergyModel& m) {
    switch (m.kind) {
        case ModelKind::UnitShannon:
            return {{"kind", "unit_shannon"}, {"sigma2", m.noise_power}};
        case ModelKind::BandlimitedShannon:
            return {{"kind", "bandlimited_shannon"}, {"W", m.bandwidth_hz},
                    {"sigma2", m.noise_power}, {"h2", m.channel_gain}};
        case ModelKind::Monomial:
            return {{"kind", "monomial"}, {"k", m.exponent}};
    }
    return {};
}

inline EnergyModel model_from_json(const json& j) {
    if (!j.contains("kind")) throw validation_error("model: missing field 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "unit_shannon") return EnergyModel::unit_shannon(j.value("sigma2", 1.0));
    if (kind == "bandlimited_shannon") {
        for (const char* key : {"W", "sigma2", "h2"})
            if (!j.contains(key)) throw validation_error(std::string("model: missing field '") + key + "'");
        return EnergyModel::bandlimited_shannon(j.at("W").get<double>(), j.at("sigma2").get<double>(),
                                                j.at("h2").get<double>());
    }
    if (kind == "monomial") return EnergyModel::monomial(j.value("k", 2.0));
    throw validation_error("model: unknown kind '" + kind + "'");
}

inline json decision_to_json(const NonFifoDecision& d, double energy_joules) {
    json out = {{"possibility", to_string(d.possibility)},
                {"split_bits", d.split_bits},
                {"j", d.nonfifo_index + 1},
                {"energy_joules", energy_joules}};
    out["schedule"] = schedule_to_json(d.schedule);
    return out;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    for (const char* key : {"lambdas", "horizon_s", "guard_s", "fifo_bits", "nonfifo_bits",
                            "nonfifo_rate", "fifo_deadline_s", "trials", "seed", "model"})
        if (!j.contains(key)) throw validation_error(std::string("config: missing field '") + key + "'");
    c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.horizon_s = j.at("horizon_s").get<double>();
    c.guard_s = j.at("guard_s").get<double>();
    c.fifo_bits = j.at("fifo_bits").get<double>();
    c.nonfifo_bits_sweep = j.at("nonfifo_bits").get<std::vector<double>>();
    c.nonfifo_rate = j.at("nonfifo_rate").get<double>();
    c.fifo_deadline_s = j.at("fifo_deadline_s").get<double>();
    c.trials = j.at("trials").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.model = model_from_json(j.at("model"));
    c.validate();
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    return {{"lambdas", c.lambdas},
            {"horizon_s", c.horizon_s},
            {"guard_s", c.guard_s},
            {"fifo_bits", c.fifo_bits},
            {"nonfifo_bits", c.nonfifo_bits_sweep},
            {"nonfifo_rate", c.nonfifo_rate},
            {"fifo_deadline_s", c.fifo_deadline_s},
            {"trials", c.trials},
            {"seed", c.seed},
            {"model", model_to_json(c.model)}};
}

}  // namespace tautsched

#endif
