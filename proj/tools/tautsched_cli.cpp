// Command-line front end: schedule workload files, verify schedules against
// the brute-force oracles, and run the Monte-Carlo comparison experiment.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tautsched/tautsched.hpp"

namespace ts = tautsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitGap = 3;

ts::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    ts::json j;
    in >> j;
    return j;
}

ts::EnergyModel load_model(const std::string& path) {
    if (path.empty()) return ts::EnergyModel::unit_shannon();
    return ts::model_from_json(load_json(path));
}

int cmd_schedule(const std::string& workload_path, const std::string& model_path, bool online,
                 const std::string& policy, const std::string& trace_path) {
    ts::PacketSequence seq = ts::workload_from_json(load_json(workload_path));
    ts::EnergyModel model = load_model(model_path);

    ts::json out;
    if (online) {
        auto pol = policy == "fifo" ? ts::OnlinePolicy::FifoOrder : ts::OnlinePolicy::Optimal;
        ts::OnlineResult res = ts::run_online(seq, pol);
        out["mode"] = policy == "fifo" ? "online_fifo" : "online";
        out["energy_joules"] = ts::schedule_energy(model, res.schedule);
        out["edf_fallbacks"] = res.edf_fallbacks;
        out["deadline_misses"] = res.deadline_misses;
        out["schedule"] = ts::schedule_to_json(res.schedule);
        if (!trace_path.empty()) {
            std::ofstream tr(trace_path);
            ts::write_event_csv(tr, res.events);
        }
    } else if (auto j = ts::detect_non_fifo(seq)) {
        (void)j;
        ts::NonFifoDecision d = ts::schedule_non_fifo(seq, model);
        out = ts::decision_to_json(d, ts::schedule_energy(model, d.schedule));
        out["mode"] = "offline_nonfifo";
    } else {
        ts::Schedule sch = ts::schedule_fifo(seq);
        out["mode"] = "offline_fifo";
        out["energy_joules"] = ts::schedule_energy(model, sch);
        out["schedule"] = ts::schedule_to_json(sch);
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& workload_path, const std::string& model_path, int grid, int dt,
               const std::string& check_schedule_path) {
    ts::PacketSequence seq = ts::workload_from_json(load_json(workload_path));
    ts::EnergyModel model = load_model(model_path);

    if (!check_schedule_path.empty()) {
        ts::Schedule sch = ts::schedule_from_json(load_json(check_schedule_path));
        ts::FeasibilityReport rep = ts::is_feasible(sch, seq);
        if (!rep.ok) {
            std::printf("schedule INFEASIBLE at t=%.9g: %s\n", rep.time_s, rep.reason.c_str());
            return kExitInfeasible;
        }
        std::printf("schedule feasible; energy %.12g J\n", ts::schedule_energy(model, sch));
        return kExitOk;
    }

    double cascade_energy = 0.0;
    double grid_energy = 0.0;
    bool have_grid = false;
    ts::PacketSequence fifo_view = seq;

    if (auto j = ts::detect_non_fifo(seq)) {
        ts::NonFifoDecision d = ts::schedule_non_fifo(seq, model);
        cascade_energy = ts::schedule_energy(model, d.schedule);
        ts::GridSplitResult g = ts::grid_split_oracle(seq, *j, model, grid);
        grid_energy = g.energy;
        have_grid = true;
        fifo_view = ts::split_and_reorder(seq, *j, d.split_bits).sequence;
        std::printf("cascade: possibility %s, split %.9g bits, energy %.12g J\n",
                    ts::to_string(d.possibility), d.split_bits, cascade_energy);
        std::printf("grid oracle (%d points): split %.9g bits, energy %.12g J\n", grid,
                    g.split_bits, grid_energy);
    } else {
        cascade_energy = ts::schedule_energy(model, ts::schedule_fifo(seq));
        std::printf("taut string: energy %.12g J\n", cascade_energy);
    }

    double discrete_energy = ts::discrete_convex_oracle(fifo_view, model, dt);
    std::printf("discrete oracle (%d steps): energy %.12g J\n", dt, discrete_energy);

    double worst_gap = 0.0;
    if (have_grid) {
        double gap = (cascade_energy - grid_energy) / std::max(grid_energy, 1e-300);
        std::printf("gap vs grid oracle: %.3g relative\n", gap);
        worst_gap = std::max(worst_gap, gap);
    }
    double gap_d = std::abs(cascade_energy - discrete_energy) / std::max(discrete_energy, 1e-300);
    std::printf("gap vs discrete oracle: %.3g relative\n", gap_d);
    worst_gap = std::max(worst_gap, gap_d);

    if (worst_gap > 1e-4) {
        std::printf("VERIFY FAILED: gap %.3g exceeds 1e-4\n", worst_gap);
        return kExitGap;
    }
    std::printf("verify OK\n");
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<int> trials, std::optional<std::uint64_t> seed) {
    ts::ExperimentConfig cfg = ts::config_from_json(load_json(config_path));
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    cfg.validate();

    ts::ComparisonResult result = ts::run_comparison(cfg);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream os(out_dir + "/results.csv");
        ts::write_results_csv(os, result);
    }
    for (double lambda : cfg.lambdas) {
        char name[64];
        std::snprintf(name, sizeof(name), "/plot_lambda_%g.csv", lambda);
        std::ofstream os(out_dir + name);
        ts::write_plot_csv(os, result, lambda);
    }

    std::printf("lambda  b_non_bits  nonfifo_off  fifo_off  nonfifo_on  fifo_on  savings%%\n");
    for (double lambda : cfg.lambdas) {
        for (double b : cfg.nonfifo_bits_sweep) {
            const auto* r0 = result.find(lambda, b, "nonfifo_offline");
            const auto* r1 = result.find(lambda, b, "fifo_offline");
            const auto* r2 = result.find(lambda, b, "nonfifo_online");
            const auto* r3 = result.find(lambda, b, "fifo_online");
            std::printf("%-7g %-11g %-12.6g %-9.6g %-11.6g %-8.6g %5.1f\n", lambda, b,
                        r0->mean_energy_j, r1->mean_energy_j, r2->mean_energy_j, r3->mean_energy_j,
                        100.0 * result.offline_savings(lambda, b));
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-energy transmission scheduling"};
    app.require_subcommand(1);

    std::string workload_path, model_path, config_path, out_dir = ".", trace_path, policy = "optimal",
                check_schedule_path;
    bool online = false;
    int grid = 2001, dt = 4000;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;

    auto* sched = app.add_subcommand("schedule", "compute a minimum-energy schedule");
    sched->add_option("workload", workload_path, "workload JSON file")->required();
    sched->add_option("--model", model_path, "energy model JSON file");
    sched->add_flag("--online", online, "run the causal online policy");
    sched->add_option("--policy", policy, "online policy: optimal|fifo")
        ->check(CLI::IsMember({"optimal", "fifo"}));
    sched->add_option("--trace", trace_path, "write online event trace CSV here");

    auto* verify = app.add_subcommand("verify", "check schedules against brute-force oracles");
    verify->add_option("workload", workload_path, "workload JSON file")->required();
    verify->add_option("--model", model_path, "energy model JSON file");
    verify->add_option("--grid", grid, "split-factor grid points");
    verify->add_option("--dt", dt, "discrete oracle time steps");
    verify->add_option("--check-schedule", check_schedule_path, "feasibility-check this schedule JSON");

    auto* sim = app.add_subcommand("simulate", "run the Monte-Carlo comparison");
    sim->add_option("config", config_path, "experiment config JSON file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--trials", trials, "override trial count");
    sim->add_option("--seed", seed, "override RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sched->parsed()) return cmd_schedule(workload_path, model_path, online, policy, trace_path);
        if (verify->parsed()) return cmd_verify(workload_path, model_path, grid, dt, check_schedule_path);
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, trials, seed);
    } catch (const ts::infeasible_error& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const ts::unsupported_error& e) {
        std::fprintf(stderr, "unsupported input: %s\n", e.what());
        return kExitInfeasible;
    } catch (const ts::validation_error& e) {
        // Config problems are input errors; workload semantics are infeasibilities.
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return sim->parsed() ? kExitParse : kExitInfeasible;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    }
    return kExitOk;
}
