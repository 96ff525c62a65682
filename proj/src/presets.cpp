#include "hdmbqc/presets.hpp"

#include <filesystem>
#include <random>

namespace hdmbqc {
namespace {

std::string out_path(const RunOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

EncodingSpec preset_spec(const ExperimentPreset& preset) {
    if (preset.encoding) return *preset.encoding;
    if (preset.graph) return spec_for_graph(*preset.graph);
    throw std::runtime_error("preset '" + preset.name + "' carries no encoding");
}

}  // namespace

GraphState canonical_cluster8() {
    return GraphState::make(
        2, 8,
        {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 7, 1}, {1, 6, 1}, {2, 5, 1}, {3, 4, 1}},
        {Photon::A, Photon::A, Photon::A, Photon::A, Photon::B, Photon::B, Photon::B, Photon::B},
        {true, false, false, true, false, true, true, false});
}

GraphState canonical_qudit5() {
    return GraphState::make(5, 4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}},
                            {Photon::B, Photon::A, Photon::A, Photon::B},
                            {true, false, false, true});
}

GraphState ring8_graph() {
    return GraphState::make(
        2, 8,
        {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {5, 6, 1}, {6, 7, 1}, {0, 7, 1}},
        {Photon::A, Photon::B, Photon::B, Photon::A, Photon::A, Photon::B, Photon::B, Photon::A});
}

DependencyGraph rotation_dependency() {
    return DependencyGraph::make(5, {{0, {1}}, {1, {2}}, {2, {3, 4}}});
}

PhotonAllocation rotation_allocation() { return PhotonAllocation::make({0, 0, 0, 0, 1}); }

ExperimentPreset preset_from_json(const json& j, const std::string& base_dir) {
    ExperimentPreset preset;
    preset.name = j.at("name").get<std::string>();
    const std::string kind = j.value("kind", "cluster");
    if (kind == "cluster")
        preset.kind = PresetKind::cluster;
    else if (kind == "rotation-sweep")
        preset.kind = PresetKind::rotation_sweep;
    else if (kind == "schedule")
        preset.kind = PresetKind::schedule;
    else if (kind == "mplc-design")
        preset.kind = PresetKind::mplc_design;
    else if (kind == "mplc-reconstruct")
        preset.kind = PresetKind::mplc_reconstruct;
    else
        throw std::runtime_error("preset kind '" + kind + "' is unknown");

    if (j.contains("encoding")) preset.encoding = encoding_from_json(j.at("encoding"));
    if (j.contains("graph")) preset.graph = graph_from_json(j.at("graph"));
    if (j.contains("graph_file")) {
        const auto path = std::filesystem::path(base_dir) / j.at("graph_file").get<std::string>();
        preset.graph = graph_from_json(json::parse(read_text_file(path.string())));
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        preset.noise.white_noise = n.value("white_noise", 0.0);
        preset.noise.mean_counts = n.value("mean_counts", 0.0);
        preset.noise.seed = n.value("seed", 1ULL);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        preset.sweep.alpha_steps = s.value("alpha_steps", 16);
        preset.sweep.beta_steps = s.value("beta_steps", 16);
        if (preset.sweep.alpha_steps < 1 || preset.sweep.beta_steps < 1)
            throw std::runtime_error("preset sweep grids must be non-empty");
    }
    if (j.contains("mplc")) {
        const auto& m = j.at("mplc");
        auto& g = preset.mplc.geometry;
        g.rows = m.value("rows", g.rows);
        g.cols = m.value("cols", g.cols);
        g.pitch_um = m.value("pitch_um", g.pitch_um);
        g.wavelength_nm = m.value("wavelength_nm", g.wavelength_nm);
        g.plane_spacing_mm = m.value("plane_spacing_mm", g.plane_spacing_mm);
        g.final_distance_mm = m.value("final_distance_mm", g.final_distance_mm);
        g.angle_cap = m.value("angle_cap", g.angle_cap);
        preset.mplc.n_planes = m.value("n_planes", preset.mplc.n_planes);
        preset.mplc.n_iters = m.value("n_iters", preset.mplc.n_iters);
        preset.mplc.spot_pitch_um = m.value("spot_pitch_um", preset.mplc.spot_pitch_um);
        preset.mplc.spot_waist_um = m.value("spot_waist_um", preset.mplc.spot_waist_um);
    }
    if (j.contains("dependencies")) preset.dependencies = dependency_from_json(j.at("dependencies"));
    if (j.contains("allocation")) preset.allocation = allocation_from_json(j.at("allocation"));
    return preset;
}

ExperimentPreset load_preset(const std::string& path) {
    const auto base = std::filesystem::path(path).parent_path().string();
    return preset_from_json(json::parse(read_text_file(path)), base.empty() ? "." : base);
}

int run_build_state(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    if (!preset.graph) throw std::runtime_error("build-state: preset has no graph");
    const GraphState g = resolve_frames(*preset.graph);
    const EncodingSpec spec = preset_spec(preset);
    const auto circuit = compile_graph(g, spec);
    const auto state = simulate_cluster(g, spec);
    write_text_file(out_path(opts, preset.name + "_circuit.json"), circuit_to_json(circuit).dump(2) + "\n");
    write_text_file(out_path(opts, preset.name + "_state.json"), state_to_json(state).dump(2) + "\n");
    const auto layout = circuit.layout;
    double worst = 0.0;
    for (const auto& term : stabilizers(g)) {
        const Cx e = term_expectation(state, term, g, layout);
        worst = std::max(worst, std::abs(e - Cx{1.0, 0.0}));
    }
    log << preset.name << ": built " << g.n_vertices << "-vertex d=" << g.d
        << " cluster state, max stabilizer deviation " << format_double(worst) << "\n";
    return worst < 1e-9 ? 0 : 1;
}

int run_witness(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    if (!preset.graph) throw std::runtime_error("witness: preset has no graph");
    const GraphState g = resolve_frames(*preset.graph);
    const EncodingSpec spec = preset_spec(preset);
    const auto state = simulate_cluster(g, spec);
    const auto exact = witness_exact(state, g);
    write_text_file(out_path(opts, preset.name + "_witness_exact.json"),
                    witness_to_json(exact).dump(2) + "\n");
    write_text_file(out_path(opts, preset.name + "_witness_exact_terms.csv"), witness_terms_csv(exact));

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", exact.value);
    log << preset.name << ": witness " << buf;

    const double p = preset.noise.white_noise;
    if (p > 0) log << ", mixture(" << format_double(p) << ") = " << format_double(witness_on_mixture(g, p));

    if (!opts.exact_only && preset.noise.mean_counts > 0) {
        const std::uint64_t seed = opts.seed.value_or(preset.noise.seed);
        const auto settings = mub_settings(g);
        const int M = spec.modes_per_photon();
        std::array<CoincidenceTable, 2> tables;
        for (int s = 0; s < 2; ++s) {
            auto rotated = apply_photon_unitary(state, Photon::A, settings[s].u_a);
            rotated = apply_photon_unitary(rotated, Photon::B, settings[s].u_b);
            Eigen::MatrixXd probs = coincidence_probs(rotated);
            if (p > 0)
                probs = (1.0 - p) * probs +
                        p * Eigen::MatrixXd::Constant(M, M, 1.0 / (static_cast<double>(M) * M));
            tables[s] = sample_counts(probs, preset.noise.mean_counts, seed + s);
            write_text_file(out_path(opts, preset.name + "_counts_setting" + std::to_string(s + 1) + ".csv"),
                            table_to_csv(tables[s]));
        }
        const auto estimated =
            witness_from_counts(tables[0], tables[1], g, settings, spec, opts.bootstrap, seed + 17);
        write_text_file(out_path(opts, preset.name + "_witness_counts.json"),
                        witness_to_json(estimated).dump(2) + "\n");
        write_text_file(out_path(opts, preset.name + "_witness_counts_terms.csv"),
                        witness_terms_csv(estimated));
        char b2[96];
        std::snprintf(b2, sizeof(b2), "%.3f +- %.3f", estimated.value, estimated.std_dev);
        log << ", from counts " << b2;
    }
    log << "\n";
    return 0;
}

int run_rotation_sweep(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    const int na = preset.sweep.alpha_steps;
    const int nb = preset.sweep.beta_steps;
    const Eigen::Vector2cd plus = Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
    const Eigen::Vector2cd plus_i = Eigen::Vector2cd(Cx{1, 0}, Cx{0, 1}) / std::sqrt(2.0);
    const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    const Eigen::Matrix2cd y = (Eigen::Matrix2cd() << 0, Cx{0, -1}, Cx{0, 1}, 0).finished();

    std::string csv = "alpha,beta,exp_z_xrot,exp_y_zrot\n";
    std::string branch_csv = "alpha,beta,branch,probability,fidelity\n";
    for (int ia = 0; ia < na; ++ia) {
        const double alpha = 2.0 * kPi * ia / na;
        for (int ib = 0; ib < nb; ++ib) {
            const double beta = 2.0 * kPi * ib / nb;
            const auto circuit = rotation_circuit(alpha, beta, 0.0);
            const auto pattern = rotation_pattern(alpha, beta, 0.0);
            const Eigen::Matrix2cd ideal = ideal_rotation(alpha, beta, 0.0);

            const auto bt_z = run_circuit_branches(circuit, plus_i, pattern);
            double exp_z = 0.0;
            for (size_t k = 0; k < bt_z.branches.size(); ++k) {
                const auto& br = bt_z.branches[k];
                if (br.zero_prob) continue;
                const Eigen::Vector2cd corrected = frame_corrected(br);
                exp_z += br.probability * (corrected.adjoint() * z * corrected)(0).real();
                const Eigen::Vector2cd target = ideal * plus_i;
                const double fid = std::norm(target.dot(corrected));
                branch_csv += format_double(alpha) + "," + format_double(beta) + "," +
                              std::to_string(k) + "," + format_double(br.probability) + "," +
                              format_double(fid) + "\n";
            }
            const auto bt_y = run_circuit_branches(circuit, plus, pattern);
            double exp_y = 0.0;
            for (const auto& br : bt_y.branches) {
                if (br.zero_prob) continue;
                const Eigen::Vector2cd corrected = frame_corrected(br);
                exp_y += br.probability * (corrected.adjoint() * y * corrected)(0).real();
            }
            csv += format_double(alpha) + "," + format_double(beta) + "," + format_double(exp_z) +
                   "," + format_double(exp_y) + "\n";
        }
    }
    write_text_file(out_path(opts, preset.name + "_sweep.csv"), csv);
    write_text_file(out_path(opts, preset.name + "_branches.csv"), branch_csv);
    log << preset.name << ": wrote " << na * nb << "-point rotation sweep\n";
    return 0;
}

int run_schedule(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    const DependencyGraph dep = preset.dependencies ? *preset.dependencies : rotation_dependency();
    const PhotonAllocation alloc = preset.allocation ? *preset.allocation : rotation_allocation();
    const auto verdict = check_allocation(dep, alloc);
    if (!verdict.valid) {
        const auto& c = *verdict.conflict;
        log << preset.name << ": allocation invalid, conflicting qubits (" << c[0] << "," << c[1]
            << "," << c[2] << "," << c[3] << ")\n";
        return 1;
    }
    const auto qr = qubit_rounds(dep);
    const auto pr = photon_rounds(dep, alloc);
    write_text_file(out_path(opts, preset.name + "_qubit_rounds.json"), schedule_to_json(qr).dump(2) + "\n");
    write_text_file(out_path(opts, preset.name + "_photon_rounds.json"), schedule_to_json(pr).dump(2) + "\n");
    write_text_file(out_path(opts, preset.name + "_qubit_rounds.dot"), schedule_to_dot(qr, dep));
    write_text_file(out_path(opts, preset.name + "_photon_rounds.dot"), schedule_to_dot(pr, dep, &alloc));
    log << preset.name << ": " << qr.rounds.size() << " qubit rounds vs " << pr.rounds.size()
        << " photon rounds\n";
    return 0;
}

int run_mplc_design(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    const auto& m = preset.mplc;
    const double gap = m.spot_pitch_um / 2.0;
    const std::vector<OpticalField> inputs{gaussian_spot(m.geometry, -gap, 0, m.spot_waist_um),
                                           gaussian_spot(m.geometry, gap, 0, m.spot_waist_um)};
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<OpticalField> targets(2, inputs[0]);
    targets[0].grid = s * (inputs[0].grid + inputs[1].grid);
    targets[1].grid = s * (inputs[0].grid - inputs[1].grid);
    const auto design = wavefront_match(inputs, targets, m.n_planes, m.n_iters, m.geometry);
    const auto tm = stack_matrix(design.stack, inputs, inputs);
    Matrix h2(2, 2);
    h2 << s, s, s, -s;
    const double frob = frobenius_fidelity(tm.a, h2);
    write_mask_bundle(out_path(opts, preset.name + "_masks"), design.stack);
    json report{{"schema", kSchemaVersion},
                {"planes", m.n_planes},
                {"iterations", m.n_iters},
                {"coupling_history", design.fidelity_history},
                {"frobenius_fidelity", frob},
                {"column_efficiency", tm.column_efficiency}};
    write_text_file(out_path(opts, preset.name + "_fidelity.json"), report.dump(2) + "\n");
    log << preset.name << ": " << m.n_planes << "-plane splitter, Frobenius fidelity "
        << format_double(frob) << "\n";
    return frob >= 0.99 ? 0 : 1;
}

int run_mplc_reconstruct(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    // synthetic characterization run: hidden 4x4 unitary, intensity-only data
    const std::uint64_t seed = opts.seed.value_or(preset.noise.seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const int M = 4;
    Matrix gauss(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) gauss(i, j) = Cx{normal(rng), normal(rng)};
    const Matrix truth = Eigen::HouseholderQR<Matrix>(gauss).householderQ();

    Eigen::MatrixXd singles = truth.cwiseAbs2();
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    std::vector<GsProbe> probes;
    for (int k = 0; k < 4 * M; ++k) {
        GsProbe probe;
        probe.input.resize(M);
        for (int j = 0; j < M; ++j) {
            const double phi = uni(rng);
            probe.input(j) = Cx{std::cos(phi), std::sin(phi)};
        }
        probe.intensities = (truth * probe.input).cwiseAbs2();
        probes.push_back(std::move(probe));
    }
    const auto result = gs_reconstruct(singles, probes);
    const double fid = frobenius_fidelity(row_gauged(result.transfer.a), row_gauged(truth));
    json report{{"schema", kSchemaVersion},
                {"row_gauged_fidelity", fid},
                {"residual", result.residual},
                {"iterations", result.iterations},
                {"probes", probes.size()},
                {"conditioning_warning", result.conditioning_warning}};
    write_text_file(out_path(opts, preset.name + "_reconstruction.json"), report.dump(2) + "\n");
    log << preset.name << ": row-gauged reconstruction fidelity " << format_double(fid) << "\n";
    return fid >= 0.999 ? 0 : 1;
}

int run_preset(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log) {
    switch (preset.kind) {
        case PresetKind::cluster: {
            const int rc = run_build_state(preset, opts, log);
            return rc != 0 ? rc : run_witness(preset, opts, log);
        }
        case PresetKind::rotation_sweep:
            return run_rotation_sweep(preset, opts, log);
        case PresetKind::schedule:
            return run_schedule(preset, opts, log);
        case PresetKind::mplc_design:
            return run_mplc_design(preset, opts, log);
        case PresetKind::mplc_reconstruct:
            return run_mplc_reconstruct(preset, opts, log);
    }
    return 1;
}

}  // namespace hdmbqc
