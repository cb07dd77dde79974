// araim: conditional false-alert studies and solution-separation protection levels.

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace araim::cli;

void add_common(CLI::App& cmd, CommonOptions& common) {
    cmd.add_option("--out", common.out, "Output path prefix")->required();
    cmd.add_option("--threads", common.threads, "Worker threads (0 = all cores)");
    cmd.add_flag("--timestamp", common.timestamp, "Record wall-clock time in the manifest");
}

void add_integrity(CLI::App& cmd, IntegrityOptions& opts) {
    cmd.add_option("--budget", opts.budget, "Budget file (defaults to the built-in fixture)")->check(CLI::ExistingFile);
    cmd.add_option("--pfa-mode", opts.pfa_mode, "Per-sample P_FA allocation")
        ->check(CLI::IsMember({"white", "common", "corr_common", "cond"}));
    cmd.add_option("--ccorr", opts.c_corr, "Correction coefficient for cond mode");
    cmd.add_option("--pmd", opts.p_md, "Missed-detection probability");
    cmd.add_option("--pfa-total", opts.pfa_total, "False-alert budget per window");
    cmd.add_option("--window", opts.window, "Window length, seconds");
    cmd.add_option("--dt", opts.dt, "Sampling interval, seconds");
    cmd.add_option("--val", opts.val, "Vertical alert limit, meters");
}

// Adds an option that accepts counts in scientific notation ("5e8").
template <class Count>
void add_count(CLI::App& cmd, const std::string& name, Count& target, const std::string& help) {
    cmd.add_option_function<std::string>(
           name, [&target](const std::string& v) { target = static_cast<Count>(parse_count(v)); }, help)
        ->default_str(std::to_string(target));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARAIM false-alert allocation under time-correlated noise"};
    app.require_subcommand(1);

    PfaOptions pfa;
    auto* pfa_cmd = app.add_subcommand("pfa", "Survivor Monte-Carlo of the conditional P_FA and c_corr");
    add_common(*pfa_cmd, pfa.common);
    pfa_cmd->add_option("--tau", pfa.tau, "Noise time constant, seconds")->required();
    pfa_cmd->add_option("--dt", pfa.dt, "Sampling interval, seconds");
    pfa_cmd->add_option("--qvar", pfa.q_var, "Driving-noise variance");
    pfa_cmd->add_option("--pout0", pfa.pout0, "Unconditional exit probability P_OUT,0")->required();
    add_count(*pfa_cmd, "--kend", pfa.kend, "Number of propagated steps");
    add_count(*pfa_cmd, "--samples", pfa.samples, "Monte-Carlo samples (accepts 5e8)");
    add_count(*pfa_cmd, "--batch", pfa.batch, "Samples per batch");
    pfa_cmd->add_option("--seed", pfa.seed, "Random seed");

    VplOptions vpl;
    auto* vpl_cmd = app.add_subcommand("vpl", "Thresholds and vertical protection levels per epoch");
    add_common(*vpl_cmd, vpl.common);
    add_integrity(*vpl_cmd, vpl.integrity);
    vpl_cmd->add_option("--geometry", vpl.geometry, "Geometry table")->required()->check(CLI::ExistingFile);
    vpl_cmd->add_option("--measurements", vpl.measurements, "Pseudorange errors epoch_id,sat_id,delta_rho_m")
        ->check(CLI::ExistingFile);

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Availability sweep over synthetic constellations");
    add_common(*sweep_cmd, sweep.common);
    add_integrity(*sweep_cmd, sweep.integrity);
    add_count(*sweep_cmd, "--epochs", sweep.epochs, "Number of synthetic epochs");
    sweep_cmd->add_option("--seed", sweep.seed, "Random seed");
    sweep_cmd->add_option("--sats", sweep.sats, "Satellites per epoch");
    sweep_cmd->add_option("--mask", sweep.mask, "Mask angle, degrees (defaults to the budget)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "End-to-end windowed false-alert simulation");
    add_common(*sim_cmd, sim.common);
    add_integrity(*sim_cmd, sim.integrity);
    sim_cmd->add_option("--geometry", sim.geometry, "Geometry table")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--epoch", sim.epoch, "Epoch id (defaults to the first usable)");
    sim_cmd->add_option("--tau", sim.tau, "Gauss-Markov time constant, seconds (omit for white noise)");
    add_count(*sim_cmd, "--windows", sim.windows, "Number of windows");
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    add_count(*sim_cmd, "--batch", sim.batch, "Windows per batch");
    sim_cmd->add_option("--confidence", sim.confidence, "Binomial interval confidence");
    sim_cmd->add_option("--noise-scale", sim.noise_scale, "Scale on simulated noise sigma");

    ValidateOptions val;
    auto* val_cmd = app.add_subcommand("validate", "Analytic versus Monte-Carlo check of P_OUT,1");
    add_common(*val_cmd, val.common);
    add_count(*val_cmd, "--samples", val.samples, "Monte-Carlo samples per case");
    add_count(*val_cmd, "--batch", val.batch, "Samples per batch");
    val_cmd->add_option("--seed", val.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (pfa_cmd->parsed()) {
        return run_pfa(pfa, std::cerr);
    }
    if (vpl_cmd->parsed()) {
        return run_vpl(vpl, std::cerr);
    }
    if (sweep_cmd->parsed()) {
        return run_sweep(sweep, std::cerr);
    }
    if (sim_cmd->parsed()) {
        return run_simulate(sim, std::cerr);
    }
    return run_validate(val, std::cerr);
}
