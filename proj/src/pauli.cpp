#include "hdmbqc/pauli.hpp"

#include <algorithm>

namespace hdmbqc {

StabilizerTerm StabilizerTerm::identity(int d, int n_qudits) {
    StabilizerTerm t;
    t.d = d;
    t.factors.assign(n_qudits, PauliFactor{});
    return t;
}

bool StabilizerTerm::is_identity() const {
    return std::all_of(factors.begin(), factors.end(),
                       [](const PauliFactor& f) { return f.x == 0 && f.z == 0; });
}

StabilizerTerm StabilizerTerm::multiplied_by(const StabilizerTerm& rhs) const {
    if (rhs.d != d || rhs.factors.size() != factors.size())
        throw std::invalid_argument("StabilizerTerm: incompatible operands");
    StabilizerTerm out = *this;
    out.phase = phase * rhs.phase;
    for (size_t v = 0; v < factors.size(); ++v) {
        const auto& a = factors[v];
        const auto& b = rhs.factors[v];
        // (X^ax Z^az)(X^bx Z^bz) = omega^{az*bx} X^{ax+bx} Z^{az+bz}
        out.phase *= omega(d, static_cast<long long>(a.z) * b.x);
        out.factors[v].x = (a.x + b.x) % d;
        out.factors[v].z = (a.z + b.z) % d;
    }
    return out;
}

StabilizerTerm StabilizerTerm::to_power(int p) const {
    if (p < 0) throw std::domain_error("StabilizerTerm: negative power");
    StabilizerTerm out = identity(d, static_cast<int>(factors.size()));
    for (int i = 0; i < p; ++i) out = out.multiplied_by(*this);
    return out;
}

StabilizerTerm StabilizerTerm::adjoint() const {
    // (phase X^x Z^z)^dag = conj(phase) Z^{-z} X^{-x}
    //                     = conj(phase) omega^{xz} X^{-x} Z^{-z}
    StabilizerTerm out = *this;
    out.phase = std::conj(phase);
    for (auto& f : out.factors) {
        out.phase *= omega(d, static_cast<long long>(f.x) * f.z);
        f.x = (d - f.x) % d;
        f.z = (d - f.z) % d;
    }
    return out;
}

StabilizerTerm StabilizerTerm::fourier_conjugated(int v) const {
    // F^dag X F = Z^{-1}, F^dag Z F = X, hence
    // F^dag (X^x Z^z) F = Z^{-x} X^z = omega^{-xz} X^z Z^{-x}.
    StabilizerTerm out = *this;
    auto& f = out.factors.at(v);
    out.phase *= omega(d, -static_cast<long long>(f.x) * f.z);
    const int nx = f.z;
    const int nz = (d - f.x) % d;
    f.x = nx;
    f.z = nz;
    return out;
}

Matrix StabilizerTerm::factor_matrix(int v) const {
    const auto& f = factors.at(v);
    Matrix m = Matrix::Zero(d, d);
    // (X^x Z^z)|j> = omega^{zj} |j+x>
    for (int j = 0; j < d; ++j) m((j + f.x) % d, j) = omega(d, static_cast<long long>(f.z) * j);
    return m;
}

std::string StabilizerTerm::label() const {
    std::string out;
    for (size_t v = 0; v < factors.size(); ++v) {
        const auto& f = factors[v];
        auto append = [&](char op, int p) {
            if (p == 0) return;
            if (!out.empty()) out += '.';
            out += op;
            out += std::to_string(v);
            if (p > 1) out += '^' + std::to_string(p);
        };
        append('X', f.x);
        append('Z', f.z);
    }
    return out.empty() ? "I" : out;
}

std::string conjugation_canonical_label(const StabilizerTerm& term) {
    return std::min(term.label(), term.adjoint().label());
}

}  // namespace hdmbqc
