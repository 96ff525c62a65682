#pragma once

#include <string>
#include <vector>

#include "hdmbqc/common.hpp"

namespace hdmbqc {

// One tensor factor of a generalized Pauli string, in the canonical order
// X^x Z^z with x, z in [0, d-1].  Conventions: X|j> = |j+1 mod d>,
// Z|j> = omega^j |j>, omega = exp(2*pi*i/d).
struct PauliFactor {
    int x = 0;
    int z = 0;
};

// phase * tensor_{v} X_v^{x_v} Z_v^{z_v} over n qudits.
//
// Multiplication tracks the commutation phase Z^z X^x = omega^{xz} X^x Z^z,
// so products of stabilizer generators come out with their exact scalars.
struct StabilizerTerm {
    int d = 2;
    std::vector<PauliFactor> factors;
    Cx phase{1.0, 0.0};

    static StabilizerTerm identity(int d, int n_qudits);

    bool is_identity() const;
    StabilizerTerm multiplied_by(const StabilizerTerm& rhs) const;
    StabilizerTerm to_power(int p) const;
    StabilizerTerm adjoint() const;
    // Conjugation by the Fourier gate on vertex v: X -> Z^{-1}, Z -> X.
    // Used to rewrite graph stabilizers into the lab frame where some
    // vertices carry the conjugate-transpose Fourier gate from the source.
    StabilizerTerm fourier_conjugated(int v) const;

    // d x d matrix of one factor.
    Matrix factor_matrix(int v) const;

    // Canonical text form, e.g. "X0.Z1^2" ("I" for the identity).  Phase is
    // not part of the label.
    std::string label() const;
};

// Key for deduplicating a term with its adjoint: the lexicographically
// smaller of label() and adjoint().label().
std::string conjugation_canonical_label(const StabilizerTerm& term);

}  // namespace hdmbqc
