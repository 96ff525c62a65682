#include "hdmbqc/state.hpp"

#include <random>

namespace hdmbqc {

void TwoPhotonState::validate() const {
    const int M = spec.modes_per_photon();
    if (amp.rows() != M || amp.cols() != M)
        throw std::invalid_argument("TwoPhotonState: amplitude matrix does not match spec");
    if (std::abs(amp.norm() - 1.0) > kNormTol)
        throw std::invalid_argument("TwoPhotonState: state is not normalized");
}

ModeUnitary ModeUnitary::from(Matrix m, double tol) {
    ModeUnitary u{std::move(m), tol};
    if (!is_unitary(u.matrix, tol)) throw std::invalid_argument("ModeUnitary: matrix is not unitary");
    return u;
}

TwoPhotonState spdc_state(const EncodingSpec& spec) {
    const int M = spec.modes_per_photon();
    TwoPhotonState state{Matrix::Identity(M, M) / std::sqrt(static_cast<double>(M)), spec};
    return state;
}

TwoPhotonState apply_photon_unitary(const TwoPhotonState& state, Photon photon, const ModeUnitary& u) {
    const int M = state.spec.modes_per_photon();
    if (u.matrix.rows() != M || u.matrix.cols() != M)
        throw std::invalid_argument("apply_photon_unitary: dimension mismatch");
    if (!is_unitary(u.matrix, u.tolerance))
        throw std::invalid_argument("apply_photon_unitary: matrix is not unitary");
    TwoPhotonState out = state;
    if (photon == Photon::A)
        out.amp = u.matrix * state.amp;
    else
        out.amp = state.amp * u.matrix.transpose();
    return out;
}

TwoPhotonState apply_mode_phases(const TwoPhotonState& state, Photon photon,
                                 const std::vector<double>& phases) {
    const int M = state.spec.modes_per_photon();
    if (static_cast<int>(phases.size()) != M)
        throw std::invalid_argument("apply_mode_phases: phase vector length must be M");
    Vector diag(M);
    for (int i = 0; i < M; ++i) diag(i) = Cx{std::cos(phases[i]), std::sin(phases[i])};
    TwoPhotonState out = state;
    if (photon == Photon::A)
        out.amp = diag.asDiagonal() * state.amp;
    else
        out.amp = state.amp * diag.asDiagonal();
    return out;
}

TwoPhotonState apply_mode_permutation(const TwoPhotonState& state, Photon photon,
                                      const std::vector<int>& perm) {
    const int M = state.spec.modes_per_photon();
    if (static_cast<int>(perm.size()) != M)
        throw std::invalid_argument("apply_mode_permutation: permutation length must be M");
    std::vector<bool> seen(M, false);
    for (int v : perm) {
        if (v < 0 || v >= M || seen[v]) throw std::invalid_argument("apply_mode_permutation: not a bijection");
        seen[v] = true;
    }
    TwoPhotonState out = state;
    if (photon == Photon::A) {
        for (int i = 0; i < M; ++i) out.amp.row(perm[i]) = state.amp.row(i);
    } else {
        for (int j = 0; j < M; ++j) out.amp.col(perm[j]) = state.amp.col(j);
    }
    return out;
}

Eigen::MatrixXd coincidence_probs(const TwoPhotonState& state) {
    state.validate();
    return state.amp.cwiseAbs2();
}

CoincidenceTable sample_counts(const Eigen::MatrixXd& probs, double mean_total, std::uint64_t seed) {
    if (mean_total < 0) throw std::domain_error("sample_counts: mean_total must be non-negative");
    CoincidenceTable table;
    table.seed = seed;
    table.counts.setZero(probs.rows(), probs.cols());
    std::mt19937_64 rng(seed);
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        for (Eigen::Index j = 0; j < probs.cols(); ++j) {
            const double lambda = mean_total * probs(i, j);
            if (lambda <= 0.0) continue;
            std::poisson_distribution<std::int64_t> poisson(lambda);
            const std::int64_t n = poisson(rng);
            table.counts(i, j) = n;
            table.total += n;
        }
    }
    return table;
}

double state_fidelity(const TwoPhotonState& state, const TwoPhotonState& target) {
    if (state.amp.rows() != target.amp.rows() || state.amp.cols() != target.amp.cols())
        throw std::invalid_argument("state_fidelity: dimension mismatch");
    const Cx overlap = (target.amp.conjugate().cwiseProduct(state.amp)).sum();
    return std::norm(overlap);
}

Matrix embed_digit_op(const Matrix& op, int pos, const EncodingSpec& spec) {
    const int d = spec.d;
    if (op.rows() != d || op.cols() != d) throw std::invalid_argument("embed_digit_op: operator must be d x d");
    if (pos < 0 || pos >= spec.N) throw std::out_of_range("embed_digit_op: digit position out of range");
    const int M = spec.modes_per_photon();
    int inner = 1;  // stride of the digit at `pos`
    for (int p = pos + 1; p < spec.N; ++p) inner *= d;
    const int outer = M / (inner * d);
    Matrix full = Matrix::Zero(M, M);
    for (int o = 0; o < outer; ++o)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                if (op(a, b) != Cx{0.0, 0.0})
                    for (int in = 0; in < inner; ++in)
                        full((o * d + a) * inner + in, (o * d + b) * inner + in) = op(a, b);
    return full;
}

}  // namespace hdmbqc
