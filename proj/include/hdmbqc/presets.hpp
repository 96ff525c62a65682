#pragma once

#include <optional>
#include <ostream>

#include "hdmbqc/json_io.hpp"
#include "hdmbqc/metrics.hpp"

namespace hdmbqc {

// Eight-qubit comb: a four-qubit chain on photon A with one pendant partner
// each on photon B; frames on the two chain ends and mirrored on B.
GraphState canonical_cluster8();

// Four-qudit d=5 chain: the middle pair sits on photon A, the ends on photon
// B and carry the frames.
GraphState canonical_qudit5();

// Eight-vertex ring split across the photons in A/B blocks of two.
GraphState ring8_graph();

// Dependency structure of the measurement-based rotation: the four measured
// qubits form a chain and the output's frame update joins the final round.
DependencyGraph rotation_dependency();
PhotonAllocation rotation_allocation();  // qubits 0..3 on photon 0, qubit 4 on photon 1

struct NoiseSpec {
    double white_noise = 0.0;
    double mean_counts = 0.0;
    std::uint64_t seed = 1;
};

struct SweepSpec {
    int alpha_steps = 16;
    int beta_steps = 16;
};

struct MplcSpec {
    StackGeometry geometry;
    int n_planes = 3;
    int n_iters = 30;
    double spot_pitch_um = 300.0;
    double spot_waist_um = 100.0;
};

enum class PresetKind { cluster, rotation_sweep, schedule, mplc_design, mplc_reconstruct };

struct ExperimentPreset {
    std::string name;
    PresetKind kind = PresetKind::cluster;
    std::optional<EncodingSpec> encoding;
    std::optional<GraphState> graph;
    NoiseSpec noise;
    SweepSpec sweep;
    MplcSpec mplc;
    std::optional<DependencyGraph> dependencies;
    std::optional<PhotonAllocation> allocation;
};

// Loads a preset file; "graph_file" references are resolved relative to the
// preset's directory.
ExperimentPreset preset_from_json(const json& j, const std::string& base_dir = ".");
ExperimentPreset load_preset(const std::string& path);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool exact_only = false;   // skip the count-based witness
    int bootstrap = 1000;
};

// Pipeline entry points behind the CLI verbs; each writes CSV/JSON artifacts
// into out_dir and prints a one-line summary.  Nonzero return means a
// validation failure.
int run_build_state(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);
int run_witness(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);
int run_rotation_sweep(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);
int run_schedule(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);
int run_mplc_design(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);
int run_mplc_reconstruct(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);

// Dispatch on the preset kind.
int run_preset(const ExperimentPreset& preset, const RunOptions& opts, std::ostream& log);

}  // namespace hdmbqc
