// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tautsched/tautsched.hpp"

using namespace tautsched;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int k, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s - %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failures;
}

const EnergyModel kUnit = EnergyModel::unit_shannon(1.0);

void criterion_1_taut_string_optimality() {
    Timer timer;
    Rng rng(1001);
    int n = 0;
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
        PacketSequence seq = tshelp::random_fifo(rng, 6);
        double taut = schedule_energy(kUnit, schedule_fifo(seq));
        double oracle = discrete_convex_oracle(seq, kUnit, 4000);
        double gap = std::abs(taut - oracle) / std::max(oracle, 1e-300);
        worst = std::max(worst, gap);
        ok = ok && gap <= 5e-3;
        ++n;
    }
    double secs = timer.seconds();
    ok = ok && secs < 60.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d FIFO instances vs discretized program: worst gap %.3g (<=0.5%%), %.1f s (<60 s)",
                  n, worst, secs);
    report(1, ok, buf);
}

struct CascadeBattle {
    int n = 0;
    int class_exact = 0;
    int class_tied = 0;
    double worst_gap = -1.0;
    double worst_lower_violation = 0.0;
    int p3_count = 0;
    double worst_rate_mismatch = 0.0;
    bool energy_ok = true;
    bool class_ok = true;
    bool lower_ok = true;
    bool equal_rate_ok = true;
    double seconds = 0.0;
};

CascadeBattle run_cascade_battle() {
    CascadeBattle b;
    Timer timer;
    Rng rng(2002);
    for (int t = 0; t < 500; ++t) {
        auto [seq, j] = tshelp::random_nonfifo(rng, 6);
        NonFifoDecision d = schedule_non_fifo(seq, kUnit);
        double energy = schedule_energy(kUnit, d.schedule);
        GridSplitResult oracle = grid_split_oracle(seq, j, kUnit, 2001);

        double gap = energy / oracle.energy - 1.0;
        b.worst_gap = std::max(b.worst_gap, gap);
        if (!(energy <= oracle.energy * (1.0 + 1e-6))) b.energy_ok = false;

        bool tied = energy <= oracle.energy * (1.0 + 1e-9);
        bool exact = (d.possibility == Possibility::P1 && oracle.at_lower_endpoint()) ||
                     (d.possibility == Possibility::P2 && oracle.at_upper_endpoint()) ||
                     ((d.possibility == Possibility::P3 || d.possibility == Possibility::P4) &&
                      oracle.interior());
        if (exact)
            ++b.class_exact;
        else if (tied)
            ++b.class_tied;  // flat optimum: endpoint and interior coincide in energy
        else
            b.class_ok = false;

        // merged relaxation lower-bounds the optimum
        const auto& p = seq.packets();
        std::vector<Packet> merged(p.begin(), p.end());
        merged[j - 1].size_bits += p[j].size_bits;
        merged.erase(merged.begin() + static_cast<long>(j));
        double lower = schedule_energy(kUnit, schedule_fifo(PacketSequence::derived(merged)));
        b.worst_lower_violation = std::max(b.worst_lower_violation, lower - energy);
        if (!(energy >= lower - 1e-9)) b.lower_ok = false;

        if (d.possibility == Possibility::P3) {
            ++b.p3_count;
            auto sr = split_and_reorder(seq, j, d.split_bits);
            Schedule sch = attribute_edf(d.schedule.segments, sr.sequence);
            double r1 = *sch.packet_final_rate(*sr.sub1_id);
            double r2 = *sch.packet_final_rate(*sr.sub2_id);
            double mismatch = std::abs(r1 - r2) / std::max(r1, 1e-300);
            b.worst_rate_mismatch = std::max(b.worst_rate_mismatch, mismatch);
            if (mismatch > 1e-9) b.equal_rate_ok = false;
        }
        ++b.n;
    }
    b.seconds = timer.seconds();
    return b;
}

void criteria_2_to_4(const CascadeBattle& b) {
    char buf[200];
    bool ok2 = b.energy_ok && b.class_ok && b.seconds < 300.0;
    std::snprintf(buf, sizeof(buf),
                  "%d instances vs 2001-point grid: worst rel gap %.3g (<=1e-6), classes %d exact + %d energy-tied, %.1f s (<5 min)",
                  b.n, b.worst_gap, b.class_exact, b.class_tied, b.seconds);
    report(2, ok2, buf);

    std::snprintf(buf, sizeof(buf), "equal-rate property on %d P3 firings: worst relative mismatch %.3g (<=1e-9)",
                  b.p3_count, b.worst_rate_mismatch);
    report(3, b.equal_rate_ok && b.p3_count > 0, buf);

    std::snprintf(buf, sizeof(buf), "merged relaxation lower bound: worst violation %.3g (<=1e-9)",
                  std::max(b.worst_lower_violation, 0.0));
    report(4, b.lower_ok, buf);
}

void criterion_5_worked_golden() {
    // Golden values certified by grid_split_oracle before freezing: the
    // optimum reserves the late packet's window (P4) with split 2/3 and
    // energy 3*2^(4/3). The spec sheet's prose quotes (P3, split 0.5,
    // constant rate 0.75, energy 7.3137) for this instance, but that plan
    // moves only 0.75 bits through the late packet's window, short of its
    // 1-bit size, so the oracle rejects it; the certified optimum below is
    // what the oracle and the feasibility checker agree on.
    auto seq = tshelp::make_seq({{2, 0, 4}, {1, 1, 2}});
    bool ok = true;
    std::string detail;

    GridSplitResult oracle = grid_split_oracle(seq, 1, kUnit, 2001);
    NonFifoDecision d = schedule_non_fifo(seq, kUnit);
    double energy = schedule_energy(kUnit, d.schedule);
    const double golden_energy = 3.0 * std::pow(2.0, 4.0 / 3.0);

    ok = ok && d.possibility == Possibility::P4;
    ok = ok && std::abs(d.split_bits - 2.0 / 3.0) <= 1e-9;
    ok = ok && std::abs(energy - golden_energy) <= 1e-9 * golden_energy;
    ok = ok && energy <= oracle.energy * (1.0 + 1e-6);
    ok = ok && std::abs(oracle.split_bits - 2.0 / 3.0) <= 2.0 / 2000.0 + 1e-12;
    ok = ok && d.schedule.segments.size() == 3 &&
         std::abs(d.schedule.segments[0].rate - 2.0 / 3.0) <= 1e-9 &&
         std::abs(d.schedule.segments[1].rate - 1.0) <= 1e-9 &&
         std::abs(d.schedule.segments[2].rate - 2.0 / 3.0) <= 1e-9;
    ok = ok && is_feasible(d.schedule, seq).ok;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "worked instance: %s split %.9g energy %.9g vs oracle %.9g (certified golden)",
                  to_string(d.possibility), d.split_bits, energy, oracle.energy);
    report(5, ok, buf);
}

struct TrendOutcome {
    ComparisonResult table;
    double seconds = 0.0;
    bool dominance_ok = true;
    std::string dominance_msg;
};

TrendOutcome run_trend_experiment(const ExperimentConfig& cfg) {
    TrendOutcome out;
    Timer timer;
    try {
        out.table = run_comparison(cfg);
    } catch (const std::logic_error& e) {
        out.dominance_ok = false;
        out.dominance_msg = e.what();
    }
    out.seconds = timer.seconds();
    return out;
}

void criterion_6_trends(const ExperimentConfig& cfg, const TrendOutcome& outcome) {
    char buf[320];
    if (!outcome.dominance_ok) {
        std::snprintf(buf, sizeof(buf), "per-trial dominance assertion fired: %s",
                      outcome.dominance_msg.c_str());
        report(6, false, buf);
        return;
    }
    const ComparisonResult& r = outcome.table;

    // (a) mean-level dominance in every cell
    bool mean_dom = true;
    for (double lambda : cfg.lambdas) {
        for (double b : cfg.nonfifo_bits_sweep) {
            const auto* nf = r.find(lambda, b, "nonfifo_offline");
            const auto* f = r.find(lambda, b, "fifo_offline");
            const auto* nfo = r.find(lambda, b, "nonfifo_online");
            const auto* fo = r.find(lambda, b, "fifo_online");
            if (!nf || !f || !nfo || !fo || nf->trials_used == 0) {
                mean_dom = false;
                continue;
            }
            mean_dom = mean_dom && nf->mean_energy_j <= f->mean_energy_j * (1.0 + 1e-9);
            mean_dom = mean_dom && nf->mean_energy_j <= nfo->mean_energy_j * (1.0 + 1e-9);
            mean_dom = mean_dom && nfo->mean_energy_j <= fo->mean_energy_j * (1.0 + 1e-9);
        }
    }

    // (b) headline savings at B_non = 2 KB, lambda = 2
    double savings = r.offline_savings(2.0, 16384.0);
    bool band_ok = savings >= 0.25 && savings <= 0.55;

    // (c) savings nondecreasing across the sweep, one small inversion allowed
    int inversions = 0;
    double worst_inversion = 0.0;
    for (double lambda : cfg.lambdas) {
        for (std::size_t i = 1; i < cfg.nonfifo_bits_sweep.size(); ++i) {
            double prev = r.offline_savings(lambda, cfg.nonfifo_bits_sweep[i - 1]);
            double cur = r.offline_savings(lambda, cfg.nonfifo_bits_sweep[i]);
            if (cur < prev) {
                ++inversions;
                worst_inversion = std::max(worst_inversion, prev - cur);
            }
        }
    }
    bool mono_ok = inversions <= 1 && worst_inversion <= 0.01;

    // (d) every mean rises with the arrival rate
    bool lambda_ok = true;
    for (double b : cfg.nonfifo_bits_sweep)
        for (const char* name : kSchedulerNames) {
            const auto* a = r.find(2.0, b, name);
            const auto* c = r.find(3.0, b, name);
            if (!a || !c || !(c->mean_energy_j > a->mean_energy_j)) lambda_ok = false;
        }

    bool ok = mean_dom && band_ok && mono_ok && lambda_ok && outcome.seconds < 900.0;
    std::snprintf(buf, sizeof(buf),
                  "means dominance %s; savings@2KB,l2 %.1f%% in [25,55]; inversions %d (worst %.2fpp); "
                  "lambda growth %s; %.0f s (<15 min)",
                  mean_dom ? "ok" : "VIOLATED", 100.0 * savings, inversions,
                  100.0 * worst_inversion, lambda_ok ? "ok" : "VIOLATED", outcome.seconds);
    report(6, ok, buf);
}

void criterion_7_online_sanity(const TrendOutcome& outcome) {
    // Per-trial online >= offline is asserted inside run_comparison; the
    // trend run completing without the assertion firing covers the trials.
    bool ok = outcome.dominance_ok;

    // single-arrival streams: equality with the offline optimum
    Rng rng(7007);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        double bits = 0.5 + 4.0 * rng.uniform01();
        double arrival = rng.uniform01();
        double deadline = arrival + 0.5 + 3.0 * rng.uniform01();
        std::vector<Packet> pk{{1, bits, arrival, deadline}};
        PacketSequence seq = PacketSequence::from(pk);
        double off = schedule_energy(kUnit, schedule_fifo(seq));
        double on = schedule_energy(kUnit, run_online(seq).schedule);
        worst = std::max(worst, std::abs(on - off) / std::max(off, 1e-300));
        if (on < off - 1e-9 * (1.0 + off)) ok = false;
    }
    ok = ok && worst <= 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "per-trial online >= offline held across the trend run; single-arrival equality worst rel diff %.3g (<=1e-9)",
                  worst);
    report(7, ok, buf);
}

void criterion_8_determinism(const ExperimentConfig& cfg, const TrendOutcome& first) {
    Timer timer;
    ComparisonResult again = run_comparison(cfg);
    std::ostringstream a, b;
    write_results_csv(a, first.table);
    write_results_csv(b, again);
    bool ok = first.dominance_ok && a.str() == b.str() && !a.str().empty();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "repeated run byte-identical results.csv (%zu bytes), %.0f s",
                  a.str().size(), timer.seconds());
    report(8, ok, buf);
}

}  // namespace

int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);

    criterion_1_taut_string_optimality();
    CascadeBattle battle = run_cascade_battle();
    criteria_2_to_4(battle);
    criterion_5_worked_golden();

    ExperimentConfig cfg = ExperimentConfig::paper_defaults();
    cfg.trials = 1000;
    cfg.seed = 1;
    TrendOutcome outcome = run_trend_experiment(cfg);
    criterion_6_trends(cfg, outcome);
    criterion_7_online_sanity(outcome);
    criterion_8_determinism(cfg, outcome);

    std::printf("%s (%d criteria failed)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                failures);
    return failures;
}
