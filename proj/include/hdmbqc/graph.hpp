#pragma once

#include <optional>
#include <vector>

#include "hdmbqc/pauli.hpp"
#include "hdmbqc/state.hpp"

namespace hdmbqc {

struct GraphEdge {
    int u = 0;
    int v = 0;
    int weight = 1;  // CZ^weight, weight in [1, d-1]
};

// Weighted qudit graph state over 2N vertices split across two photons.
//
// fourier_frame[v] marks vertices that carry the conjugate-transpose Fourier
// gate left over from the pair source; those gates are absorbed into the
// measurement bases rather than undone physically.  Exactly one endpoint of
// every cross-photon pair carries the flag.
struct GraphState {
    int d = 2;
    int n_vertices = 0;
    std::vector<GraphEdge> edges;
    std::vector<Photon> allocation;       // size n_vertices
    std::vector<bool> fourier_frame;      // size n_vertices (may start empty)

    static GraphState make(int d, int n_vertices, std::vector<GraphEdge> edges,
                           std::vector<Photon> allocation,
                           std::vector<bool> fourier_frame = {});

    std::vector<int> neighbors(int v) const;
    int edge_weight(int u, int v) const;  // 0 if absent
};

struct RealizabilityReport {
    bool realizable = false;
    // Perfect matching of cross-photon edges, as (A-vertex, B-vertex) pairs.
    std::vector<std::pair<int, int>> matching;
    // Offending edges (or an empty set when the failure is structural, e.g.
    // unbalanced allocation), plus a human-readable reason.
    std::vector<GraphEdge> violations;
    std::string reason;
};

// True iff cross-photon edges form a unit-weight perfect matching and every
// other edge is intra-photon — the class of graphs reachable from the pair
// source with per-photon linear optics.
RealizabilityReport check_two_photon_realizable(const GraphState& g);

// Vertex -> (photon, digit position) mapping used by compilation, stabilizer
// expectations and measurement settings.  Photon A's vertices get positions
// in ascending vertex order; each B vertex inherits its matched partner's
// position, so the source state is diagonal over equal mode labels.
struct ModeLayout {
    std::vector<int> position;                  // per vertex
    std::vector<std::pair<int, int>> pairing;   // (A-vertex, B-vertex)

    static ModeLayout from(const GraphState& g, const RealizabilityReport& report);
};

// Chooses fourier_frame flags (one endpoint per pair, never both ends of an
// intra-photon edge) for graphs that do not specify them.  Preference: frame
// the endpoint with the smaller intra-photon degree, the B side on ties; a
// 2-SAT fallback handles graphs the greedy pass cannot.
std::vector<bool> derive_frames(const GraphState& g, const RealizabilityReport& report);

// Returns g unchanged when frames are present, otherwise a copy with
// derive_frames applied.  Deterministic, so separate calls agree.
GraphState resolve_frames(const GraphState& g);

struct CompileError : std::runtime_error {
    explicit CompileError(const std::string& what, RealizabilityReport report = {})
        : std::runtime_error(what), report(std::move(report)) {}
    RealizabilityReport report;
};

// Per-photon mode operations realizing the graph from the source state:
// apply the permutations first, then the phases (the two commute here, since
// phases only read unframed digits and relabels only write framed ones).
struct CompiledCircuit {
    std::vector<std::pair<int, int>> pairing;
    std::vector<double> phases_a, phases_b;
    std::vector<int> perm_a, perm_b;
    std::vector<int> frame_ops;  // vertices whose Fourier gate moves into the measurement basis
    ModeLayout layout;
};

// Intra-photon edge (u,v,w) between unframed vertices becomes a mode phase
// w*q_u*q_v*2*pi/d; an edge with exactly one framed endpoint becomes the
// relabeling digit_framed += w*digit_other (mod d).  Edges with two framed
// endpoints are not expressible as phases or relabels and raise CompileError.
CompiledCircuit compile_graph(const GraphState& g, const EncodingSpec& spec);

// Frame-corrected stabilizer generators: S_k = X_k prod_j Z_j^{w_kj},
// conjugated by the Fourier gate on every framed vertex.
std::vector<StabilizerTerm> stabilizers(const GraphState& g);

// Source state -> compiled permutations -> compiled phases.  Every term from
// stabilizers() has expectation 1 on the result.
TwoPhotonState simulate_cluster(const GraphState& g, const EncodingSpec& spec);

// <state| phase * tensor X^x Z^z |state> with vertices mapped onto photon
// digits through the layout.
Cx term_expectation(const TwoPhotonState& state, const StabilizerTerm& term,
                    const GraphState& g, const ModeLayout& layout);

// Spec consistent with the graph (d, N = n_vertices/2) and a bare grid.
EncodingSpec spec_for_graph(const GraphState& g);

}  // namespace hdmbqc
