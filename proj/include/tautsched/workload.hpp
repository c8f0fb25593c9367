#ifndef TAUTSCHED_WORKLOAD_HPP
#define TAUTSCHED_WORKLOAD_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tautsched/common.hpp"
#include "tautsched/energy_model.hpp"
#include "tautsched/nonfifo.hpp"
#include "tautsched/online.hpp"
#include "tautsched/packet.hpp"

namespace tautsched {

/// Monte-Carlo comparison setup: Poisson FIFO traffic with one injected
/// late-deadline packet, evaluated for several arrival rates and a sweep
/// of the injected packet's size.
struct ExperimentConfig {
    std::vector<double> lambdas{2.0, 3.0};          // FIFO packets/s
    double horizon_s = 40.0;                        // T
    double guard_s = 2.0;                           // arrival-free tail
    double fifo_bits = 8192.0;                      // 1 KB
    std::vector<double> nonfifo_bits_sweep;         // B_non values
    double nonfifo_rate = 0.025;                    // packets/s
    double fifo_deadline_s = 4.0;
    int trials = 1000;
    std::uint64_t seed = 1;
    EnergyModel model = EnergyModel::bandlimited_shannon(1000.0, 1.0, 2.0);

    static ExperimentConfig paper_defaults() {
        ExperimentConfig c;
        for (int k = 1; k <= 20; ++k) c.nonfifo_bits_sweep.push_back(k * 0.1 * 8192.0);
        return c;
    }

    void validate() const {
        if (lambdas.empty()) throw validation_error("config: lambdas empty");
        for (double l : lambdas)
            if (!(l > 0.0)) throw validation_error("config: lambda must be positive");
        if (!(horizon_s > 0.0)) throw validation_error("config: horizon_s must be positive");
        if (!(guard_s >= 0.0) || guard_s >= horizon_s)
            throw validation_error("config: guard_s must lie in [0, horizon)");
        if (!(fifo_bits > 0.0)) throw validation_error("config: fifo_bits must be positive");
        if (nonfifo_bits_sweep.empty()) throw validation_error("config: nonfifo_bits empty");
        for (double b : nonfifo_bits_sweep)
            if (!(b > 0.0)) throw validation_error("config: nonfifo_bits must be positive");
        if (!(nonfifo_rate > 0.0)) throw validation_error("config: nonfifo_rate must be positive");
        if (!(fifo_deadline_s > 0.0)) throw validation_error("config: fifo_deadline_s must be positive");
        if (trials < 1) throw validation_error("config: trials must be >= 1");
    }
};

/// Deterministic uniform/exponential sampling on top of mt19937_64; the
/// standard distributions are implementation-defined, these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    std::mt19937_64 gen_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0x517CC1B727220A95ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct WorkloadParams {
    double lambda = 2.0;
    double nonfifo_bits = 8192.0;
    double horizon_s = 40.0;
    double guard_s = 2.0;
    double fifo_bits = 8192.0;
    double nonfifo_rate = 0.025;
    double fifo_deadline_s = 4.0;
};

struct GeneratedWorkload {
    PacketSequence sequence;
    std::size_t nonfifo_index = 0;
    int resamples = 0;
};

/// Draws Poisson FIFO arrivals on [0, T-guard] with fixed relative
/// deadlines (clamped to T at the tail), then injects the first valid
/// packet of an independent low-rate stream as the non-FIFO packet: its
/// deadline bisects [arrival, deadline of the latest FIFO packet before
/// it]. Candidates that produce no violation or fall outside the
/// single-violation class are skipped and counted. Returns nullopt when
/// the draw admits no valid injection.
inline std::optional<GeneratedWorkload> generate_workload(const WorkloadParams& p,
                                                          std::uint64_t seed) {
    if (!(p.nonfifo_bits > 0.0)) throw validation_error("generate_workload: nonfifo_bits must be positive");
    Rng rng(seed);

    std::vector<double> arr;
    for (double t = rng.exponential(p.lambda); t < p.horizon_s - p.guard_s;
         t += rng.exponential(p.lambda))
        arr.push_back(t);
    if (arr.empty()) return std::nullopt;

    std::vector<double> dls(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        dls[i] = std::min(arr[i] + p.fifo_deadline_s, p.horizon_s);
    for (std::size_t i = arr.size() - 1; i-- > 0;) {
        if (dls[i] >= dls[i + 1]) dls[i] = dls[i + 1] - 1e-6;
        if (dls[i] <= arr[i]) return std::nullopt;  // clamping squeezed a window shut
    }

    int resamples = 0;
    double tn = 0.0;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        tn += rng.exponential(p.nonfifo_rate);
        if (tn >= p.horizon_s - p.guard_s) return std::nullopt;

        std::size_t prev = arr.size();
        for (std::size_t i = 0; i < arr.size() && arr[i] < tn; ++i) prev = i;
        bool valid = prev != arr.size() && tn != arr[prev + 1 < arr.size() ? prev + 1 : prev] &&
                     tn < dls[prev];
        double dn = valid ? 0.5 * (tn + dls[prev]) : 0.0;
        if (valid) {
            for (int guard = 0; guard < 4; ++guard) {
                bool collide = false;
                for (double d : dls) collide = collide || d == dn;
                if (!collide) break;
                dn -= 1e-6;
            }
            if (dn <= tn) valid = false;
        }
        if (!valid) {
            ++resamples;
            continue;
        }

        std::vector<Packet> packets;
        packets.reserve(arr.size() + 1);
        int id = 0;
        for (std::size_t i = 0; i <= prev; ++i) packets.push_back({++id, p.fifo_bits, arr[i], dls[i]});
        std::size_t nf_index = packets.size();
        packets.push_back({++id, p.nonfifo_bits, tn, dn});
        for (std::size_t i = prev + 1; i < arr.size(); ++i)
            packets.push_back({++id, p.fifo_bits, arr[i], dls[i]});

        GeneratedWorkload out{PacketSequence::from(std::move(packets)), nf_index, resamples};
        if (!detect_non_fifo(out.sequence)) return std::nullopt;  // paranoia; class checks above
        return out;
    }
    return std::nullopt;
}

inline const char* const kSchedulerNames[4] = {"nonfifo_offline", "fifo_offline", "nonfifo_online",
                                               "fifo_online"};

struct ResultRow {
    double lambda = 0.0;
    double b_non_bits = 0.0;
    std::string scheduler;
    double mean_energy_j = 0.0;
    double stddev = 0.0;
    int trials_used = 0;
    int infeasible_count = 0;
};

struct ComparisonResult {
    std::vector<ResultRow> rows;

    const ResultRow* find(double lambda, double b_non, const std::string& scheduler) const {
        for (const auto& r : rows)
            if (r.lambda == lambda && r.b_non_bits == b_non && r.scheduler == scheduler) return &r;
        return nullptr;
    }

    /// Offline energy saving of the split-aware scheduler vs the FIFO one.
    double offline_savings(double lambda, double b_non) const {
        const ResultRow* nf = find(lambda, b_non, "nonfifo_offline");
        const ResultRow* f = find(lambda, b_non, "fifo_offline");
        if (!nf || !f || f->mean_energy_j <= 0.0) return 0.0;
        return 1.0 - nf->mean_energy_j / f->mean_energy_j;
    }
};

/// Runs the full Monte-Carlo table. Trials are seeded per (lambda, trial)
/// only, so the whole size sweep sees common random numbers. Per-trial
/// optimality dominances are asserted; a violation is a bug, not noise.
inline ComparisonResult run_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    ComparisonResult result;
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        double lambda = cfg.lambdas[li];
        for (double b_non : cfg.nonfifo_bits_sweep) {
            double sum[4] = {0, 0, 0, 0}, sumsq[4] = {0, 0, 0, 0};
            int used = 0, infeasible = 0;
            for (int trial = 0; trial < cfg.trials; ++trial) {
                WorkloadParams params{lambda,          b_non,
                                      cfg.horizon_s,   cfg.guard_s,
                                      cfg.fifo_bits,   cfg.nonfifo_rate,
                                      cfg.fifo_deadline_s};
                auto gw = generate_workload(params, mix_seed(cfg.seed, li, trial));
                if (!gw) {
                    ++infeasible;
                    continue;
                }
                const PacketSequence& seq = gw->sequence;
                double e[4];
                e[0] = schedule_energy(cfg.model, schedule_non_fifo(seq, cfg.model).schedule);
                e[1] = schedule_energy(cfg.model, fifo_baseline(seq));
                e[2] = schedule_energy(cfg.model, run_online(seq, OnlinePolicy::Optimal).schedule);
                e[3] = schedule_energy(cfg.model, run_online(seq, OnlinePolicy::FifoOrder).schedule);
                if (!(std::isfinite(e[0]) && std::isfinite(e[1]) && std::isfinite(e[2]) &&
                      std::isfinite(e[3]))) {
                    ++infeasible;  // demanded power exceeds the model's representable range
                    continue;
                }
                if (e[0] > e[1] + 1e-9 * (1.0 + e[1]))
                    throw std::logic_error("dominance violated: optimal offline above FIFO offline");
                if (e[0] > e[2] + 1e-9 * (1.0 + e[2]))
                    throw std::logic_error("dominance violated: offline optimum above online");
                for (int s = 0; s < 4; ++s) {
                    sum[s] += e[s];
                    sumsq[s] += e[s] * e[s];
                }
                ++used;
            }
            for (int s = 0; s < 4; ++s) {
                ResultRow row;
                row.lambda = lambda;
                row.b_non_bits = b_non;
                row.scheduler = kSchedulerNames[s];
                row.trials_used = used;
                row.infeasible_count = infeasible;
                if (used > 0) row.mean_energy_j = sum[s] / used;
                if (used > 1) {
                    double var = (sumsq[s] - sum[s] * sum[s] / used) / (used - 1);
                    row.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
                }
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

inline void write_results_csv(std::ostream& os, const ComparisonResult& result) {
    os << "lambda,b_non_bits,scheduler,mean_energy_j,stddev,trials,infeasible_count\n";
    char buf[256];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%s,%.10g,%.10g,%d,%d\n", r.lambda,
                      r.b_non_bits, r.scheduler.c_str(), r.mean_energy_j, r.stddev, r.trials_used,
                      r.infeasible_count);
        os << buf;
    }
}

/// One line per swept size with the four mean-energy columns; plot-ready.
inline void write_plot_csv(std::ostream& os, const ComparisonResult& result, double lambda) {
    os << "b_non_bits,nonfifo_offline,fifo_offline,nonfifo_online,fifo_online\n";
    std::vector<double> sizes;
    for (const auto& r : result.rows)
        if (r.lambda == lambda &&
            (sizes.empty() || std::find(sizes.begin(), sizes.end(), r.b_non_bits) == sizes.end()))
            sizes.push_back(r.b_non_bits);
    char buf[256];
    for (double b : sizes) {
        double e[4] = {0, 0, 0, 0};
        for (int s = 0; s < 4; ++s) {
            const ResultRow* row = result.find(lambda, b, kSchedulerNames[s]);
            if (row) e[s] = row->mean_energy_j;
        }
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g\n", b, e[0], e[1], e[2], e[3]);
        os << buf;
    }
}

}  // namespace tautsched

#endif
