#pragma once

// Shared test-only oracles: a full-Hilbert-space statevector route for
// operator expectations (independent of the per-photon matrix path in the
// library), a generator of random two-photon-realizable graphs, and the
// reference witness operator strings for the two canonical states.

#include <random>
#include <set>
#include <string>

#include "hdmbqc/graph.hpp"

namespace hdmbqc::testing {

// witness product strings for the eight-qubit comb, split by the parity
// class whose stabilizers generate them (identity omitted)
inline const std::set<std::string> kCombStringsEvenClass{
    "Z0.Z1.X2.X4.X5.Z6.Z7", "Z0.Z1.X2.X3.X5.Z6.Z7", "Z0.X3.X4.Z6.Z7", "Z0.Z6.Z7",
    "Z0.X2.X4.X5.Z7",       "Z0.X2.X3.X5.Z7",       "Z0.Z1.X3.X4.Z7", "Z0.Z1.Z7",
    "X2.X4.X5.Z6",          "X2.X3.X5.Z6",          "Z1.X3.X4.Z6",    "Z1.Z6",
    "Z1.X2.X4.X5",          "Z1.X2.X3.X5",          "X3.X4"};
inline const std::set<std::string> kCombStringsOddClass{
    "X1.Z2.Z3.Z4.Z5.X6.X7", "X1.Z5.X6.X7", "X1.Z3.Z4.X6.X7", "X1.Z2.X6.X7",
    "X0.Z3.Z4.Z5.X7",       "X0.Z2.Z5.X7", "X0.Z2.Z3.Z4.X7", "X0.X7",
    "X0.X1.Z2.Z3.Z4.Z5.X6", "X0.X1.Z5.X6", "X0.X1.Z3.Z4.X6", "X0.X1.Z2.X6",
    "Z3.Z4.Z5",             "Z2.Z5",       "Z2.Z3.Z4"};

// conjugate-pair representatives of the d=5 chain witness strings, as they
// appear with a real-part prefactor
inline const std::set<std::string> kQuditChainStrings{
    "Z0^4.Z1^2.X2.X3",     "Z0^4.Z1^3.X2^2.X3^2", "Z0^4.Z1^4.X2^3.X3^3", "Z0^4.X2^4.X3^4",
    "Z0^3.Z1^3.X2.X3",     "Z0^3.Z1^4.X2^2.X3^2", "Z0^3.X2^3.X3^3",      "Z0^3.Z1.X2^4.X3^4",
    "Z1.X2.X3",            "Z1^2.X2^2.X3^2",      "Z0^4.Z1",             "Z0^3.Z1^2",
    "Z2.Z3^4",             "Z2^2.Z3^3",           "X0.X1.Z2^2.Z3^4",     "X0.X1.Z2^3.Z3^3",
    "X0.X1.Z2^4.Z3^2",     "X0.X1.Z3",            "X0.X1.Z2",            "X0^2.X1^2.Z2^3.Z3^4",
    "X0^2.X1^2.Z2^4.Z3^3", "X0^2.X1^2.Z3^2",      "X0^2.X1^2.Z2.Z3",     "X0^2.X1^2.Z2^2"};

// Reindexes the two-photon amplitude matrix into a 2N-qudit statevector
// ordered by vertex index (big-endian).
inline Vector to_full_vector(const TwoPhotonState& state, const GraphState& g,
                             const ModeLayout& layout) {
    const auto& spec = state.spec;
    const int M = spec.modes_per_photon();
    long long dim = 1;
    for (int v = 0; v < g.n_vertices; ++v) dim *= g.d;
    Vector psi = Vector::Zero(dim);
    std::vector<long long> stride(g.n_vertices);
    long long s = 1;
    for (int v = g.n_vertices - 1; v >= 0; --v) {
        stride[v] = s;
        s *= g.d;
    }
    for (int a = 0; a < M; ++a) {
        const auto da = index_to_digits(a, spec);
        for (int b = 0; b < M; ++b) {
            const auto db = index_to_digits(b, spec);
            long long idx = 0;
            for (int v = 0; v < g.n_vertices; ++v) {
                const int value = g.allocation[v] == Photon::A ? da.digits[layout.position[v]]
                                                               : db.digits[layout.position[v]];
                idx += value * stride[v];
            }
            psi(idx) = state.amp(a, b);
        }
    }
    return psi;
}

// <psi| term |psi> by applying each single-qudit factor along its axis.
inline Cx full_vector_expectation(const Vector& psi, const StabilizerTerm& term, int d) {
    const int n = static_cast<int>(term.factors.size());
    Vector out = psi;
    long long stride = 1;
    std::vector<long long> strides(n);
    for (int v = n - 1; v >= 0; --v) {
        strides[v] = stride;
        stride *= d;
    }
    for (int v = 0; v < n; ++v) {
        const auto& f = term.factors[v];
        if (f.x == 0 && f.z == 0) continue;
        Vector next = Vector::Zero(out.size());
        for (long long idx = 0; idx < out.size(); ++idx) {
            if (out(idx) == Cx{0.0, 0.0}) continue;
            const int j = static_cast<int>((idx / strides[v]) % d);
            const long long target = idx + (static_cast<long long>((j + f.x) % d) - j) * strides[v];
            next(target) += omega(d, static_cast<long long>(f.z) * j) * out(idx);
        }
        out = std::move(next);
    }
    return term.phase * psi.dot(out);
}

inline GraphState random_realizable_graph(std::mt19937_64& rng, int d, int n_per_photon) {
    const int n = 2 * n_per_photon;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<Photon> alloc(n, Photon::B);
        std::vector<int> a_side, b_side;
        for (int i = 0; i < n_per_photon; ++i) {
            alloc[order[i]] = Photon::A;
            a_side.push_back(order[i]);
        }
        for (int i = n_per_photon; i < n; ++i) b_side.push_back(order[i]);
        std::shuffle(b_side.begin(), b_side.end(), rng);
        std::vector<GraphEdge> edges;
        for (int i = 0; i < n_per_photon; ++i) edges.push_back({a_side[i], b_side[i], 1});
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uniform_int_distribution<int> weight(1, d - 1);
        auto add_intra = [&](const std::vector<int>& side) {
            for (size_t i = 0; i < side.size(); ++i)
                for (size_t j = i + 1; j < side.size(); ++j)
                    if (uni(rng) < 0.4) edges.push_back({side[i], side[j], weight(rng)});
        };
        add_intra(a_side);
        add_intra(b_side);
        auto g = GraphState::make(d, n, std::move(edges), std::move(alloc));
        try {
            return resolve_frames(g);
        } catch (const CompileError&) {
            // frame assignment impossible for this draw; try another
        }
    }
    throw std::runtime_error("random_realizable_graph: no valid draw in 64 attempts");
}

}  // namespace hdmbqc::testing
