#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hdmbqc/encoding.hpp"

namespace hdmbqc {

enum class Photon { A, B };

// Pure two-photon state over the M x M joint spatial modes.  Row index is
// photon A's mode label, column index photon B's.  Frobenius norm is 1.
struct TwoPhotonState {
    Matrix amp;
    EncodingSpec spec;

    void validate() const;
};

// M x M linear-optic unitary acting on one photon's modes.
struct ModeUnitary {
    Matrix matrix;
    double tolerance = kUnitaryTol;

    static ModeUnitary from(Matrix m, double tol = kUnitaryTol);
};

// Mode-resolved coincidence counts with Poisson statistics.
struct CoincidenceTable {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::int64_t total = 0;
    std::uint64_t seed = 0;
};

// |psi> = (1/sqrt(M)) sum_i |ii>, the momentum-conserving photon-pair state.
// Equals the N-fold tensor product of d-dimensional maximally entangled pairs.
TwoPhotonState spdc_state(const EncodingSpec& spec);

// amp' = u*amp (photon A) or amp*u^T (photon B).
TwoPhotonState apply_photon_unitary(const TwoPhotonState& state, Photon photon, const ModeUnitary& u);

// Diagonal special case of apply_photon_unitary with diag(exp(i*phases)).
TwoPhotonState apply_mode_phases(const TwoPhotonState& state, Photon photon,
                                 const std::vector<double>& phases);

// Relabels modes: new label = perm[old label]; rows (photon A) or columns
// (photon B) are reordered accordingly.
TwoPhotonState apply_mode_permutation(const TwoPhotonState& state, Photon photon,
                                      const std::vector<int>& perm);

// Born-rule coincidence probabilities p[i][j] = |amp[i][j]|^2.
Eigen::MatrixXd coincidence_probs(const TwoPhotonState& state);

// Each cell drawn independently from Poisson(mean_total * p[i][j]).
CoincidenceTable sample_counts(const Eigen::MatrixXd& probs, double mean_total, std::uint64_t seed);

// |<target|state>|^2 with the Frobenius inner product of amplitude matrices.
double state_fidelity(const TwoPhotonState& state, const TwoPhotonState& target);

// Embeds a single-qudit operator acting on digit position `pos` into the full
// M x M mode operator (big-endian digit order, position 0 most significant).
Matrix embed_digit_op(const Matrix& op, int pos, const EncodingSpec& spec);

}  // namespace hdmbqc
