#pragma once

#include <optional>

#include "hdmbqc/graph.hpp"

namespace hdmbqc {

struct PatternError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MeasBasis { Z, Equatorial };

// One measured qubit of an MBQC pattern.  Equatorial qubits are measured in
// the basis {(|0> + e^{i f*theta}|1>)/sqrt2, (|0> - e^{i f*theta}|1>)/sqrt2}
// (outcomes +1 / -1), where the sign f = base_sign * prod_{i in deps} m_i is
// set by earlier outcomes.  Z-basis qubits are never adapted.
struct PatternQubit {
    MeasBasis basis = MeasBasis::Equatorial;
    double angle = 0.0;
    std::vector<int> deps;  // 0-based indices of strictly earlier qubits
    int base_sign = 1;      // +1 or -1

    int sign_for(const std::vector<int>& outcomes) const;  // outcomes as +-1
};

// Qubits listed in measurement order; qubit j is encoded on digit j of the
// photon's mode index.
struct MeasurementPattern {
    std::vector<PatternQubit> qubits;

    static MeasurementPattern make(std::vector<PatternQubit> qubits, int cap = 10);
    int size() const { return static_cast<int>(qubits.size()); }
};

// The passive linear-optic circuit equivalent of measuring the pattern with
// classical feedforward: per equatorial qubit one conditional phase layer
// (angle -f*theta on modes with that digit equal to 1, f read off the mode's
// earlier digits through m_i = (-1)^{q_i}) followed by M/2 parallel 50:50
// beam splitters pairing the digit.  Row k of the matrix is exactly the
// product bra of the adapted projectors along outcome branch m(k).
struct FeedforwardCircuit {
    struct Layer {
        int digit = 0;
        std::vector<double> phases;  // per mode, applied before the splitters
    };
    Matrix matrix;
    std::vector<Layer> layers;

    int depth() const { return static_cast<int>(layers.size()); }
};

FeedforwardCircuit build_intra_feedforward(const MeasurementPattern& pattern);

// Canonical four-qubit pattern realizing the rotation R_x(gamma) R_z(beta)
// R_x(alpha) on a five-qubit chain: angles (0, alpha, beta, gamma) with sign
// functions (+1, -m1, -m2, -m1*m3).
MeasurementPattern rotation_pattern(double alpha, double beta, double gamma);

// 16x16 circuit for the rotation pattern; the beam-splitter layout is
// independent of the angles.
FeedforwardCircuit rotation_circuit(double alpha, double beta, double gamma);

// R_x(gamma) R_z(beta) R_x(alpha)2x2 matrix, R_a(t) = exp(-i t a/2).
Eigen::Matrix2cd ideal_rotation(double alpha, double beta, double gamma);

// One outcome branch of a measured chain.
struct Branch {
    double probability = 0.0;
    Eigen::Vector2cd state = Eigen::Vector2cd::Zero();  // normalized unless zero_prob
    bool zero_prob = false;
    int pauli_x = 0, pauli_z = 0;  // byproduct word: output = X^x Z^z * (ideal)
    bool word_valid = false;       // words are defined for all-equatorial patterns
};

// Branches indexed by the outcome string read as a mode index:
// m_i = (-1)^{q_i} for digit q_i of the index.
struct BranchTable {
    std::vector<Branch> branches;

    const Branch& at_outcomes(const std::vector<int>& outcomes) const;  // +-1 entries
};

// Ground-truth sequential semantics on an (N+1)-qubit chain with the input
// state on qubit 1: measure qubit by qubit, adapting the equatorial signs to
// earlier outcomes, and collect every branch of the output qubit.
BranchTable adaptive_oracle(const MeasurementPattern& pattern, const Eigen::Vector2cd& input);

// Mode-encoded branch analysis: chain state reshaped to 2^N x 2, circuit
// applied to the photon's modes, one branch per output mode.
BranchTable run_circuit_branches(const FeedforwardCircuit& circuit, const Eigen::Vector2cd& input,
                                 const MeasurementPattern& pattern);

// Z^z X^x applied to the branch state (undoes the byproduct up to phase).
Eigen::Vector2cd frame_corrected(const Branch& branch);

// Statevector of the CZ chain on |input> (x) |+>^{n-1}, big-endian digits.
Vector chain_state(const Eigen::Vector2cd& input, int n_qubits);

enum class RemovalBasis { Z, Y };

// The five-qubit chain obtained from the simulated eight-qubit cluster by
// projecting two photon-B qubits out of the graph and measuring the last one
// to set the input state: Z leaves |+> on the chain head, Y leaves
// (|0>+i|1>)/sqrt2.  The two head/tail chain qubits keep their Fourier frame.
struct ChainPreparation {
    Matrix state;  // 16 x 2, normalized
    Eigen::Vector2cd input;
    double removal_probability = 0.0;  // the two graph-removal projections
    double input_probability = 0.0;    // the input-setting projection
    double total_probability = 0.0;
};

ChainPreparation derive_chain_from_cluster(const TwoPhotonState& state, const GraphState& g,
                                           RemovalBasis input_basis);

// Lab-frame chain state (Fourier frames on chain qubits 1 and 4) reshaped to
// 16 x 2, for fidelity checks against derive_chain_from_cluster.
Matrix framed_chain_matrix(const Eigen::Vector2cd& input);

}  // namespace hdmbqc
