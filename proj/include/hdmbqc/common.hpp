#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hdmbqc {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

// Default numerical tolerances used across the library.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

// omega(d, k) = exp(2*pi*i*k/d), the primitive d-th root of unity to power k.
inline Cx omega(int d, long long k = 1) {
    const double angle = 2.0 * kPi * static_cast<double>(((k % d) + d) % d) / d;
    return {std::cos(angle), std::sin(angle)};
}

// d-dimensional Fourier gate F with F[k][j] = omega^{jk}/sqrt(d).
// Satisfies F X F^dag = Z and F Z F^dag = X^dag for the generalized Paulis
// X|j> = |j+1 mod d>, Z|j> = omega^j |j>.  For d=2 this is the Hadamard.
Matrix fourier_gate(int d);

bool is_unitary(const Matrix& u, double tol = kUnitaryTol);

}  // namespace hdmbqc
