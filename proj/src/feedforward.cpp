#include "hdmbqc/feedforward.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace hdmbqc {
namespace {

int digit_of(int mode, int digit, int n_digits) { return (mode >> (n_digits - 1 - digit)) & 1; }

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

// H embedded at one digit of an N-qubit mode index.
Matrix splitter_layer(int digit, int n) {
    const int M = 1 << n;
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u = Matrix::Zero(M, M);
    const int bit = 1 << (n - 1 - digit);
    for (int m = 0; m < M; ++m) {
        const int base = m & ~bit;
        if (m & bit) {
            u(base, m) = s;
            u(base | bit, m) = -s;
        } else {
            u(base, m) = s;
            u(base | bit, m) = s;
        }
    }
    return u;
}

void structural_word(int branch, int n, int* x, int* z) {
    // Each teleport step contributes X^{s_j}, conjugated through the later
    // splitters; bits land on X for qubits with the parity of the last one.
    *x = 0;
    *z = 0;
    for (int j = 0; j < n; ++j) {
        const int s = digit_of(branch, j, n);
        if (((n - 1 - j) % 2) == 0)
            *x ^= s;
        else
            *z ^= s;
    }
}

}  // namespace

int PatternQubit::sign_for(const std::vector<int>& outcomes) const {
    int f = base_sign;
    for (int i : deps) f *= outcomes.at(i);
    return f;
}

MeasurementPattern MeasurementPattern::make(std::vector<PatternQubit> qubits, int cap) {
    if (qubits.empty()) throw PatternError("pattern must measure at least one qubit");
    if (static_cast<int>(qubits.size()) > cap)
        throw PatternError("pattern exceeds the configured qubit cap");
    for (size_t j = 0; j < qubits.size(); ++j) {
        const auto& q = qubits[j];
        if (q.base_sign != 1 && q.base_sign != -1) throw PatternError("base_sign must be +-1");
        if (q.basis == MeasBasis::Z && !q.deps.empty())
            throw PatternError("Z-basis measurements are not adapted");
        for (int dep : q.deps)
            if (dep < 0 || dep >= static_cast<int>(j))
                throw PatternError("dependency of qubit " + std::to_string(j) +
                                   " does not reference a strictly earlier qubit");
    }
    return MeasurementPattern{std::move(qubits)};
}

FeedforwardCircuit build_intra_feedforward(const MeasurementPattern& pattern) {
    const int n = pattern.size();
    const int M = 1 << n;
    FeedforwardCircuit circuit;
    circuit.matrix = Matrix::Identity(M, M);
    for (int j = 0; j < n; ++j) {
        const auto& q = pattern.qubits[j];
        if (q.basis == MeasBasis::Z) continue;
        FeedforwardCircuit::Layer layer;
        layer.digit = j;
        layer.phases.assign(M, 0.0);
        Vector diag(M);
        for (int m = 0; m < M; ++m) {
            double phi = 0.0;
            if (digit_of(m, j, n) == 1) {
                int f = q.base_sign;
                for (int dep : q.deps)
                    if (digit_of(m, dep, n) == 1) f = -f;  // m_i = (-1)^{q_i}
                phi = -f * q.angle;
            }
            layer.phases[m] = phi;
            diag(m) = Cx{std::cos(phi), std::sin(phi)};
        }
        circuit.matrix = splitter_layer(j, n) * (diag.asDiagonal() * circuit.matrix).eval();
        circuit.layers.push_back(std::move(layer));
    }
    return circuit;
}

MeasurementPattern rotation_pattern(double alpha, double beta, double gamma) {
    std::vector<PatternQubit> qubits(4);
    qubits[0] = {MeasBasis::Equatorial, 0.0, {}, 1};
    qubits[1] = {MeasBasis::Equatorial, alpha, {0}, -1};
    qubits[2] = {MeasBasis::Equatorial, beta, {1}, -1};
    qubits[3] = {MeasBasis::Equatorial, gamma, {0, 2}, -1};
    return MeasurementPattern::make(std::move(qubits));
}

FeedforwardCircuit rotation_circuit(double alpha, double beta, double gamma) {
    return build_intra_feedforward(rotation_pattern(alpha, beta, gamma));
}

Eigen::Matrix2cd ideal_rotation(double alpha, double beta, double gamma) {
    auto rx = [](double t) {
        Eigen::Matrix2cd m;
        const Cx i{0.0, 1.0};
        m << std::cos(t / 2), -i * std::sin(t / 2), -i * std::sin(t / 2), std::cos(t / 2);
        return m;
    };
    auto rz = [](double t) {
        Eigen::Matrix2cd m;
        m << std::exp(Cx{0.0, -t / 2}), 0, 0, std::exp(Cx{0.0, t / 2});
        return m;
    };
    return rx(gamma) * rz(beta) * rx(alpha);
}

const Branch& BranchTable::at_outcomes(const std::vector<int>& outcomes) const {
    int k = 0;
    for (int m : outcomes) k = (k << 1) | (m == 1 ? 0 : 1);
    return branches.at(k);
}

Vector chain_state(const Eigen::Vector2cd& input, int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("chain_state: need at least one qubit");
    const int dim = 1 << n_qubits;
    Vector psi(dim);
    const double s = std::pow(2.0, -0.5 * (n_qubits - 1));
    for (int idx = 0; idx < dim; ++idx) {
        int cz_parity = 0;
        for (int j = 0; j + 1 < n_qubits; ++j)
            cz_parity ^= digit_of(idx, j, n_qubits) & digit_of(idx, j + 1, n_qubits);
        psi(idx) = input(digit_of(idx, 0, n_qubits)) * s * (cz_parity ? -1.0 : 1.0);
    }
    return psi;
}

BranchTable adaptive_oracle(const MeasurementPattern& pattern, const Eigen::Vector2cd& input) {
    const int n = pattern.size();
    const bool all_equatorial = std::all_of(pattern.qubits.begin(), pattern.qubits.end(),
                                            [](const PatternQubit& q) { return q.basis == MeasBasis::Equatorial; });
    BranchTable table;
    table.branches.resize(1 << n);
    const Vector base = chain_state(input, n + 1);
    for (int k = 0; k < (1 << n); ++k) {
        std::vector<int> outcomes(n);
        for (int j = 0; j < n; ++j) outcomes[j] = digit_of(k, j, n) ? -1 : 1;
        Vector v = base;
        for (int j = 0; j < n; ++j) {
            const auto& q = pattern.qubits[j];
            Eigen::Vector2cd bra;
            if (q.basis == MeasBasis::Z) {
                bra = outcomes[j] == 1 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
            } else {
                const double theta = q.sign_for(outcomes) * q.angle;
                bra << 1.0, static_cast<double>(outcomes[j]) * Cx{std::cos(theta), std::sin(theta)};
                bra /= std::sqrt(2.0);
            }
            const int half = static_cast<int>(v.size()) / 2;
            Vector next(half);
            for (int r = 0; r < half; ++r)
                next(r) = std::conj(bra(0)) * v(r) + std::conj(bra(1)) * v(half + r);
            v = std::move(next);
        }
        Branch& branch = table.branches[k];
        branch.probability = v.squaredNorm();
        branch.word_valid = all_equatorial;
        if (all_equatorial) structural_word(k, n, &branch.pauli_x, &branch.pauli_z);
        if (branch.probability <= 1e-14) {
            branch.zero_prob = true;
            branch.probability = std::max(branch.probability, 0.0);
        } else {
            branch.state = Eigen::Vector2cd(v(0), v(1)) / std::sqrt(branch.probability);
        }
    }
    return table;
}

BranchTable run_circuit_branches(const FeedforwardCircuit& circuit, const Eigen::Vector2cd& input,
                                 const MeasurementPattern& pattern) {
    const int n = pattern.size();
    const int M = 1 << n;
    if (circuit.matrix.rows() != M)
        throw std::invalid_argument("run_circuit_branches: circuit does not match the pattern size");
    const bool all_equatorial = std::all_of(pattern.qubits.begin(), pattern.qubits.end(),
                                            [](const PatternQubit& q) { return q.basis == MeasBasis::Equatorial; });
    const Vector psi = chain_state(input, n + 1);
    Matrix mat(M, 2);
    for (int r = 0; r < M; ++r) {
        mat(r, 0) = psi(2 * r);
        mat(r, 1) = psi(2 * r + 1);
    }
    mat = circuit.matrix * mat;
    BranchTable table;
    table.branches.resize(M);
    for (int k = 0; k < M; ++k) {
        Branch& branch = table.branches[k];
        branch.probability = mat.row(k).squaredNorm();
        branch.word_valid = all_equatorial;
        if (all_equatorial) structural_word(k, n, &branch.pauli_x, &branch.pauli_z);
        if (branch.probability <= 1e-14) {
            branch.zero_prob = true;
            branch.probability = std::max(branch.probability, 0.0);
        } else {
            branch.state = Eigen::Vector2cd(mat(k, 0), mat(k, 1)) / std::sqrt(branch.probability);
        }
    }
    return table;
}

Eigen::Vector2cd frame_corrected(const Branch& branch) {
    Eigen::Vector2cd v = branch.state;
    if (branch.pauli_x) v = pauli_x() * v;
    if (branch.pauli_z) v = pauli_z() * v;
    return v;
}

namespace {

// Removes B digit `pos` from the column index by projecting onto `onto`.
Matrix project_b_digit(const Matrix& amp, int pos, int n_digits, const Eigen::Vector2cd& onto) {
    const int inner = 1 << (n_digits - 1 - pos);
    const int cols = static_cast<int>(amp.cols());
    Matrix out(amp.rows(), cols / 2);
    for (int outer = 0; outer < cols / (2 * inner); ++outer) {
        for (int in = 0; in < inner; ++in) {
            const int c0 = outer * 2 * inner + in;
            const int c1 = c0 + inner;
            out.col(outer * inner + in) =
                std::conj(onto(0)) * amp.col(c0) + std::conj(onto(1)) * amp.col(c1);
        }
    }
    return out;
}

void require_canonical_cluster8(const GraphState& g) {
    const std::set<std::tuple<int, int, int>> expected{
        {0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 7, 1}, {1, 6, 1}, {2, 5, 1}, {3, 4, 1}};
    std::set<std::tuple<int, int, int>> actual;
    for (const auto& e : g.edges) actual.insert({e.u, e.v, e.weight});
    bool ok = g.d == 2 && g.n_vertices == 8 && actual == expected;
    if (ok)
        for (int v = 0; v < 8; ++v)
            ok = ok && (g.allocation[v] == (v < 4 ? Photon::A : Photon::B));
    const std::vector<bool> frames{true, false, false, true, false, true, true, false};
    ok = ok && !g.fourier_frame.empty() && g.fourier_frame == frames;
    if (!ok)
        throw std::invalid_argument(
            "derive_chain_from_cluster: expected the canonical eight-qubit comb graph");
}

}  // namespace

ChainPreparation derive_chain_from_cluster(const TwoPhotonState& state, const GraphState& g,
                                           RemovalBasis input_basis) {
    require_canonical_cluster8(g);
    if (state.spec.modes_per_photon() != 16)
        throw std::invalid_argument("derive_chain_from_cluster: state must have 16 modes per photon");
    const Eigen::Vector2cd plus = Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
    // photon B digits: 0 = chain-input setter, 1 and 2 = removed vertices,
    // 3 = the surviving output qubit
    Matrix amp = project_b_digit(state.amp, 2, 4, plus);
    amp = project_b_digit(amp, 1, 3, plus);
    ChainPreparation prep;
    prep.removal_probability = amp.squaredNorm();
    Eigen::Vector2cd setter;
    if (input_basis == RemovalBasis::Z) {
        setter = Eigen::Vector2cd(1, 0);
        prep.input = plus;
    } else {
        setter = Eigen::Vector2cd(Cx{1.0, 0.0}, Cx{0.0, 1.0}) / std::sqrt(2.0);
        prep.input = Eigen::Vector2cd(Cx{1.0, 0.0}, Cx{0.0, 1.0}) / std::sqrt(2.0);
    }
    amp = project_b_digit(amp, 0, 2, setter);
    prep.total_probability = amp.squaredNorm();
    prep.input_probability =
        prep.removal_probability > 0 ? prep.total_probability / prep.removal_probability : 0.0;
    if (prep.total_probability <= 0)
        throw std::runtime_error("derive_chain_from_cluster: projection annihilated the state");
    prep.state = amp / std::sqrt(prep.total_probability);
    return prep;
}

Matrix framed_chain_matrix(const Eigen::Vector2cd& input) {
    Vector psi = chain_state(input, 5);
    const Matrix h = fourier_gate(2);
    const auto spec = EncodingSpec::make_bare(2, 5);
    psi = embed_digit_op(h, 0, spec) * psi;
    psi = embed_digit_op(h, 3, spec) * psi;
    Matrix mat(16, 2);
    for (int r = 0; r < 16; ++r) {
        mat(r, 0) = psi(2 * r);
        mat(r, 1) = psi(2 * r + 1);
    }
    return mat;
}

}  // namespace hdmbqc
