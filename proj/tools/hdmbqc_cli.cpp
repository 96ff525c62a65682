#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "hdmbqc/presets.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("HDMBQC_OUT");
    return env && *env ? env : ".";
}

struct CommonArgs {
    std::string preset_path;
    hdmbqc::RunOptions opts;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_preset = true) {
    auto* preset = cmd->add_option("-p,--preset", args.preset_path, "preset JSON file");
    if (needs_preset) preset->required();
    cmd->add_option("-o,--out", args.opts.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the preset RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

int run(const CommonArgs& args, int (*fn)(const hdmbqc::ExperimentPreset&, const hdmbqc::RunOptions&,
                                          std::ostream&)) {
    auto preset = hdmbqc::load_preset(args.preset_path);
    hdmbqc::RunOptions opts = args.opts;
    if (args.seed_set) opts.seed = args.seed;
    return fn(preset, opts, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon high-dimensional cluster-state toolkit"};
    app.require_subcommand(1);

    CommonArgs build_args, witness_args, rotate_args, schedule_args, design_args, recon_args;
    build_args.opts.out_dir = witness_args.opts.out_dir = rotate_args.opts.out_dir =
        schedule_args.opts.out_dir = design_args.opts.out_dir = recon_args.opts.out_dir =
            default_out_dir();

    auto* build = app.add_subcommand("build-state", "compile and simulate a cluster-state preset");
    add_common(build, build_args);

    auto* witness = app.add_subcommand("witness", "evaluate the entanglement witness of a preset");
    add_common(witness, witness_args);
    witness->add_flag("--exact-only", witness_args.opts.exact_only, "skip the count-based estimate");
    witness->add_option("--bootstrap", witness_args.opts.bootstrap, "bootstrap resamples");

    auto* rotate = app.add_subcommand("rotate", "sweep measurement-based single-qubit rotations");
    add_common(rotate, rotate_args);

    auto* schedule = app.add_subcommand("schedule", "compute qubit and photon measurement rounds");
    add_common(schedule, schedule_args);

    auto* design = app.add_subcommand("mplc-design", "optimize phase masks for a mode transformation");
    add_common(design, design_args);

    auto* recon = app.add_subcommand("mplc-reconstruct", "intensity-only transfer-matrix recovery");
    add_common(recon, recon_args);

    double dim = 0, rate = 0, rate_in = 0, rate_out = 0;
    auto* metrics = app.add_subcommand("metrics", "resource-rate and loss figures");
    metrics->add_option("--dim", dim, "Hilbert-space dimension");
    metrics->add_option("--rate", rate, "detection rate in Hz");
    metrics->add_option("--rate-in", rate_in, "coincidence rate before the converter");
    metrics->add_option("--rate-out", rate_out, "coincidence rate after the converter");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run(build_args, hdmbqc::run_build_state);
        if (witness->parsed()) return run(witness_args, hdmbqc::run_witness);
        if (rotate->parsed()) return run(rotate_args, hdmbqc::run_rotation_sweep);
        if (schedule->parsed()) return run(schedule_args, hdmbqc::run_schedule);
        if (design->parsed()) return run(design_args, hdmbqc::run_mplc_design);
        if (recon->parsed()) return run(recon_args, hdmbqc::run_mplc_reconstruct);
        if (metrics->parsed()) {
            if (dim > 0) {
                const auto rr = hdmbqc::eqrr(dim, rate);
                std::cout << "eqrr " << hdmbqc::format_double(rr.rate_hz) << " Hz, "
                          << hdmbqc::format_double(rr.equivalent_qubits) << " equivalent qubits\n";
            }
            if (rate_in > 0) {
                std::cout << "loss " << hdmbqc::format_double(hdmbqc::loss_db(rate_in, rate_out))
                          << " dB\n";
            }
            if (dim <= 0 && rate_in <= 0) {
                std::cerr << "metrics: pass --dim/--rate or --rate-in/--rate-out\n";
                return 1;
            }
            return 0;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
