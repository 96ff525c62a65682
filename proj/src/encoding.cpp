#include "hdmbqc/encoding.hpp"

#include <cmath>

namespace hdmbqc {

Matrix fourier_gate(int d) {
    if (d < 2) throw std::invalid_argument("fourier_gate: d must be >= 2");
    Matrix f(d, d);
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) f(k, j) = omega(d, static_cast<long long>(j) * k) * s;
    return f;
}

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    Matrix g = u * u.adjoint();
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff() <= tol;
}

void ApertureGrid::validate(int total_modes) const {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("ApertureGrid: rows/cols must be positive");
    if (rows * cols != total_modes)
        throw std::invalid_argument("ApertureGrid: rows*cols must equal 2*M (" +
                                    std::to_string(rows * cols) + " != " + std::to_string(total_modes) + ")");
    if (!(pitch_um > 2.0 * radius_um))
        throw std::invalid_argument("ApertureGrid: pitch must exceed the aperture diameter");
}

std::pair<double, double> ApertureGrid::center_um(int i) const {
    if (i < 0 || i >= rows * cols) throw std::out_of_range("ApertureGrid: aperture index out of range");
    const int r = i / cols;
    const int c = i % cols;
    const double x = (c - 0.5 * (cols - 1)) * pitch_um;
    const double y = (r - 0.5 * (rows - 1)) * pitch_um;
    return {x, y};
}

EncodingSpec EncodingSpec::make(int d, int N, ApertureGrid grid) {
    if (d < 2) throw std::invalid_argument("EncodingSpec: d must be >= 2");
    if (N < 1) throw std::invalid_argument("EncodingSpec: N must be >= 1");
    long long m = 1;
    for (int i = 0; i < N; ++i) {
        m *= d;
        if (m > (1 << 20)) throw std::invalid_argument("EncodingSpec: d^N too large");
    }
    EncodingSpec spec;
    spec.d = d;
    spec.N = N;
    spec.modes_ = static_cast<int>(m);
    grid.validate(2 * spec.modes_);
    spec.grid = grid;
    return spec;
}

EncodingSpec EncodingSpec::make_bare(int d, int N) {
    long long m = 1;
    for (int i = 0; i < N; ++i) m *= d;
    ApertureGrid grid{2, static_cast<int>(m), 300.0, 100.0};
    return make(d, N, grid);
}

QuditString index_to_digits(int m, const EncodingSpec& spec) {
    const int M = spec.modes_per_photon();
    if (m < 0 || m >= M) throw std::out_of_range("index_to_digits: mode index out of range");
    QuditString q;
    q.digits.assign(spec.N, 0);
    for (int p = spec.N - 1; p >= 0; --p) {
        q.digits[p] = m % spec.d;
        m /= spec.d;
    }
    return q;
}

int digits_to_index(const QuditString& q, const EncodingSpec& spec) {
    if (static_cast<int>(q.digits.size()) != spec.N)
        throw std::invalid_argument("digits_to_index: digit count must equal N");
    int m = 0;
    for (int p = 0; p < spec.N; ++p) {
        const int v = q.digits[p];
        if (v < 0 || v >= spec.d) throw std::domain_error("digits_to_index: digit out of [0, d-1]");
        m = m * spec.d + v;
    }
    return m;
}

int partner_aperture(int i, const ApertureGrid& grid) {
    const int total = grid.rows * grid.cols;
    if (i < 0 || i >= total) throw std::out_of_range("partner_aperture: index out of range");
    const int r = i / grid.cols;
    const int c = i % grid.cols;
    // point reflection through the grid center; for row-major flattening this
    // is 2M-1-i
    return (grid.rows - 1 - r) * grid.cols + (grid.cols - 1 - c);
}

}  // namespace hdmbqc
