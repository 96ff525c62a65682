#include "hdmbqc/graph.hpp"

#include <algorithm>
#include <set>

namespace hdmbqc {
namespace {

// Tiny 2-SAT (implication graph + Tarjan SCC).  Literal encoding: variable i
// is true at 2i, false at 2i+1.
class TwoSat {
  public:
    explicit TwoSat(int n) : n_(n), adj_(2 * n) {}

    void add_clause(int a, bool av, int b, bool bv) {
        // (a=av) or (b=bv)
        adj_[lit(a, !av)].push_back(lit(b, bv));
        adj_[lit(b, !bv)].push_back(lit(a, av));
    }

    std::optional<std::vector<bool>> solve() {
        index_.assign(2 * n_, -1);
        low_.assign(2 * n_, 0);
        comp_.assign(2 * n_, -1);
        on_stack_.assign(2 * n_, false);
        for (int v = 0; v < 2 * n_; ++v)
            if (index_[v] < 0) strongconnect(v);
        std::vector<bool> result(n_);
        for (int i = 0; i < n_; ++i) {
            if (comp_[lit(i, true)] == comp_[lit(i, false)]) return std::nullopt;
            result[i] = comp_[lit(i, true)] < comp_[lit(i, false)];
        }
        return result;
    }

  private:
    static int lit(int var, bool value) { return 2 * var + (value ? 0 : 1); }

    void strongconnect(int v) {
        // iterative Tarjan
        struct Frame { int v; size_t edge; };
        std::vector<Frame> stack{{v, 0}};
        while (!stack.empty()) {
            auto& f = stack.back();
            if (f.edge == 0) {
                index_[f.v] = low_[f.v] = counter_++;
                scc_stack_.push_back(f.v);
                on_stack_[f.v] = true;
            }
            if (f.edge < adj_[f.v].size()) {
                const int w = adj_[f.v][f.edge++];
                if (index_[w] < 0) {
                    stack.push_back({w, 0});
                } else if (on_stack_[w]) {
                    low_[f.v] = std::min(low_[f.v], index_[w]);
                }
            } else {
                if (low_[f.v] == index_[f.v]) {
                    while (true) {
                        const int w = scc_stack_.back();
                        scc_stack_.pop_back();
                        on_stack_[w] = false;
                        comp_[w] = n_comps_;
                        if (w == f.v) break;
                    }
                    ++n_comps_;
                }
                const int done = f.v;
                stack.pop_back();
                if (!stack.empty()) low_[stack.back().v] = std::min(low_[stack.back().v], low_[done]);
            }
        }
    }

    int n_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> index_, low_, comp_;
    std::vector<bool> on_stack_;
    std::vector<int> scc_stack_;
    int counter_ = 0;
    int n_comps_ = 0;
};

bool frames_valid(const GraphState& g, const std::vector<bool>& frames,
                  const std::vector<std::pair<int, int>>& matching) {
    for (const auto& [a, b] : matching)
        if (frames[a] == frames[b]) return false;
    for (const auto& e : g.edges)
        if (g.allocation[e.u] == g.allocation[e.v] && frames[e.u] && frames[e.v]) return false;
    return true;
}

}  // namespace

GraphState GraphState::make(int d, int n_vertices, std::vector<GraphEdge> edges,
                            std::vector<Photon> allocation, std::vector<bool> fourier_frame) {
    if (d < 2) throw std::invalid_argument("GraphState: d must be >= 2");
    if (n_vertices < 2) throw std::invalid_argument("GraphState: need at least two vertices");
    if (static_cast<int>(allocation.size()) != n_vertices)
        throw std::invalid_argument("GraphState: allocation must cover every vertex");
    if (!fourier_frame.empty() && static_cast<int>(fourier_frame.size()) != n_vertices)
        throw std::invalid_argument("GraphState: frame flags must cover every vertex");
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges) {
        if (e.u < 0 || e.u >= n_vertices || e.v < 0 || e.v >= n_vertices)
            throw std::invalid_argument("GraphState: edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("GraphState: self-loops are not allowed");
        if (e.weight < 1 || e.weight >= d)
            throw std::invalid_argument("GraphState: edge weight must lie in [1, d-1]");
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!seen.insert({e.u, e.v}).second)
            throw std::invalid_argument("GraphState: duplicate edge");
    }
    GraphState g;
    g.d = d;
    g.n_vertices = n_vertices;
    g.edges = std::move(edges);
    g.allocation = std::move(allocation);
    g.fourier_frame = std::move(fourier_frame);
    return g;
}

std::vector<int> GraphState::neighbors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges) {
        if (e.u == v) out.push_back(e.v);
        if (e.v == v) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int GraphState::edge_weight(int u, int v) const {
    for (const auto& e : edges)
        if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) return e.weight;
    return 0;
}

RealizabilityReport check_two_photon_realizable(const GraphState& g) {
    RealizabilityReport report;
    const int n_a = static_cast<int>(std::count(g.allocation.begin(), g.allocation.end(), Photon::A));
    const int n_b = g.n_vertices - n_a;
    if (n_a != n_b) {
        report.reason = "allocation is unbalanced (" + std::to_string(n_a) + " vs " +
                        std::to_string(n_b) + " vertices per photon)";
        return report;
    }
    std::vector<std::vector<GraphEdge>> cross(g.n_vertices);
    for (const auto& e : g.edges) {
        if (g.allocation[e.u] != g.allocation[e.v]) {
            cross[e.u].push_back(e);
            cross[e.v].push_back(e);
        }
    }
    bool ok = true;
    for (int v = 0; v < g.n_vertices; ++v) {
        if (cross[v].size() != 1) {
            ok = false;
            for (const auto& e : cross[v]) report.violations.push_back(e);
            if (cross[v].empty())
                report.reason = "vertex " + std::to_string(v) + " has no cross-photon edge";
            else
                report.reason = "vertex " + std::to_string(v) + " has multiple cross-photon edges";
        } else if (cross[v][0].weight != 1) {
            ok = false;
            report.violations.push_back(cross[v][0]);
            report.reason = "cross-photon edge must have unit weight";
        }
    }
    if (!ok) {
        std::sort(report.violations.begin(), report.violations.end(),
                  [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
        report.violations.erase(std::unique(report.violations.begin(), report.violations.end(),
                                            [](const GraphEdge& a, const GraphEdge& b) {
                                                return a.u == b.u && a.v == b.v;
                                            }),
                                report.violations.end());
        return report;
    }
    for (int v = 0; v < g.n_vertices; ++v) {
        if (g.allocation[v] != Photon::A) continue;
        const auto& e = cross[v][0];
        report.matching.emplace_back(v, e.u == v ? e.v : e.u);
    }
    report.realizable = true;
    return report;
}

ModeLayout ModeLayout::from(const GraphState& g, const RealizabilityReport& report) {
    if (!report.realizable) throw std::invalid_argument("ModeLayout: graph is not realizable");
    ModeLayout layout;
    layout.position.assign(g.n_vertices, -1);
    layout.pairing = report.matching;  // matching is already in ascending A order
    for (size_t p = 0; p < layout.pairing.size(); ++p) {
        layout.position[layout.pairing[p].first] = static_cast<int>(p);
        layout.position[layout.pairing[p].second] = static_cast<int>(p);
    }
    return layout;
}

std::vector<bool> derive_frames(const GraphState& g, const RealizabilityReport& report) {
    if (!report.realizable) throw CompileError("derive_frames: graph is not realizable", report);
    std::vector<int> intra_deg(g.n_vertices, 0);
    for (const auto& e : g.edges)
        if (g.allocation[e.u] == g.allocation[e.v]) {
            ++intra_deg[e.u];
            ++intra_deg[e.v];
        }
    std::vector<bool> frames(g.n_vertices, false);
    for (const auto& [a, b] : report.matching) {
        const bool frame_a = intra_deg[a] < intra_deg[b];  // tie goes to the B side
        frames[frame_a ? a : b] = true;
    }
    if (frames_valid(g, frames, report.matching)) return frames;

    // Greedy preference failed; fall back to 2-SAT over per-pair choices.
    const int n_pairs = static_cast<int>(report.matching.size());
    std::vector<int> pair_of(g.n_vertices, -1);
    for (int p = 0; p < n_pairs; ++p) {
        pair_of[report.matching[p].first] = p;
        pair_of[report.matching[p].second] = p;
    }
    TwoSat sat(n_pairs);  // variable true = frame on the A-side endpoint
    for (const auto& e : g.edges) {
        if (g.allocation[e.u] != g.allocation[e.v]) continue;
        const bool on_a = g.allocation[e.u] == Photon::A;
        // both endpoints of an intra edge framed is forbidden
        sat.add_clause(pair_of[e.u], !on_a, pair_of[e.v], !on_a);
    }
    auto solution = sat.solve();
    if (!solution)
        throw CompileError("derive_frames: no frame assignment avoids doubly framed intra edges", report);
    frames.assign(g.n_vertices, false);
    for (int p = 0; p < n_pairs; ++p)
        frames[(*solution)[p] ? report.matching[p].first : report.matching[p].second] = true;
    return frames;
}

GraphState resolve_frames(const GraphState& g) {
    if (!g.fourier_frame.empty()) return g;
    GraphState out = g;
    out.fourier_frame = derive_frames(g, check_two_photon_realizable(g));
    return out;
}

CompiledCircuit compile_graph(const GraphState& g_in, const EncodingSpec& spec) {
    auto report = check_two_photon_realizable(g_in);
    if (!report.realizable)
        throw CompileError("compile_graph: " + report.reason, report);
    const GraphState g = resolve_frames(g_in);
    if (g.d != spec.d || g.n_vertices != 2 * spec.N)
        throw CompileError("compile_graph: encoding spec does not match the graph");
    for (const auto& [a, b] : report.matching)
        if (g.fourier_frame[a] == g.fourier_frame[b])
            throw CompileError("compile_graph: each pair must have exactly one framed endpoint", report);

    CompiledCircuit circuit;
    circuit.layout = ModeLayout::from(g, report);
    circuit.pairing = report.matching;
    const int M = spec.modes_per_photon();
    circuit.phases_a.assign(M, 0.0);
    circuit.phases_b.assign(M, 0.0);
    for (int v = 0; v < g.n_vertices; ++v)
        if (g.fourier_frame[v]) circuit.frame_ops.push_back(v);

    // relabel_shift[photon][target_pos][source_pos] accumulates CZ^w edges
    // compiled through a framed endpoint
    std::vector<std::vector<std::vector<int>>> shifts(
        2, std::vector<std::vector<int>>(spec.N, std::vector<int>(spec.N, 0)));

    for (const auto& e : g.edges) {
        if (g.allocation[e.u] != g.allocation[e.v]) continue;
        const int photon = g.allocation[e.u] == Photon::A ? 0 : 1;
        const int pu = circuit.layout.position[e.u];
        const int pv = circuit.layout.position[e.v];
        const bool fu = g.fourier_frame[e.u];
        const bool fv = g.fourier_frame[e.v];
        if (fu && fv)
            throw CompileError("compile_graph: intra edge (" + std::to_string(e.u) + "," +
                                   std::to_string(e.v) + ") has two framed endpoints",
                               report);
        auto& phases = photon == 0 ? circuit.phases_a : circuit.phases_b;
        if (!fu && !fv) {
            for (int m = 0; m < M; ++m) {
                const auto q = index_to_digits(m, spec);
                phases[m] += e.weight * q.digits[pu] * q.digits[pv] * 2.0 * kPi / spec.d;
            }
        } else {
            const int target = fu ? pu : pv;
            const int source = fu ? pv : pu;
            shifts[photon][target][source] += e.weight;
        }
    }

    auto build_perm = [&](int photon) {
        std::vector<int> perm(M);
        for (int m = 0; m < M; ++m) {
            auto q = index_to_digits(m, spec);
            auto digits = q.digits;
            for (int t = 0; t < spec.N; ++t) {
                int shift = 0;
                for (int s = 0; s < spec.N; ++s) shift += shifts[photon][t][s] * q.digits[s];
                digits[t] = (digits[t] + shift) % spec.d;
            }
            perm[m] = digits_to_index(QuditString{digits}, spec);
        }
        return perm;
    };
    circuit.perm_a = build_perm(0);
    circuit.perm_b = build_perm(1);
    return circuit;
}

std::vector<StabilizerTerm> stabilizers(const GraphState& g) {
    std::vector<StabilizerTerm> terms;
    terms.reserve(g.n_vertices);
    const std::vector<bool> frames =
        g.fourier_frame.empty() ? std::vector<bool>(g.n_vertices, false) : g.fourier_frame;
    for (int k = 0; k < g.n_vertices; ++k) {
        StabilizerTerm t = StabilizerTerm::identity(g.d, g.n_vertices);
        t.factors[k].x = 1;
        for (const auto& e : g.edges) {
            if (e.u == k) t.factors[e.v].z = (t.factors[e.v].z + e.weight) % g.d;
            if (e.v == k) t.factors[e.u].z = (t.factors[e.u].z + e.weight) % g.d;
        }
        for (int v = 0; v < g.n_vertices; ++v)
            if (frames[v]) t = t.fourier_conjugated(v);
        terms.push_back(std::move(t));
    }
    return terms;
}

TwoPhotonState simulate_cluster(const GraphState& g, const EncodingSpec& spec) {
    const auto circuit = compile_graph(g, spec);
    TwoPhotonState state = spdc_state(spec);
    state = apply_mode_permutation(state, Photon::A, circuit.perm_a);
    state = apply_mode_permutation(state, Photon::B, circuit.perm_b);
    state = apply_mode_phases(state, Photon::A, circuit.phases_a);
    state = apply_mode_phases(state, Photon::B, circuit.phases_b);
    return state;
}

Cx term_expectation(const TwoPhotonState& state, const StabilizerTerm& term,
                    const GraphState& g, const ModeLayout& layout) {
    const auto& spec = state.spec;
    const int M = spec.modes_per_photon();
    Matrix op_a = Matrix::Identity(M, M);
    Matrix op_b = Matrix::Identity(M, M);
    for (int v = 0; v < g.n_vertices; ++v) {
        const auto& f = term.factors[v];
        if (f.x == 0 && f.z == 0) continue;
        Matrix embedded = embed_digit_op(term.factor_matrix(v), layout.position[v], spec);
        if (g.allocation[v] == Photon::A)
            op_a = embedded * op_a;
        else
            op_b = embedded * op_b;
    }
    const Matrix transformed = op_a * state.amp * op_b.transpose();
    return term.phase * state.amp.conjugate().cwiseProduct(transformed).sum();
}

EncodingSpec spec_for_graph(const GraphState& g) {
    return EncodingSpec::make_bare(g.d, g.n_vertices / 2);
}

}  // namespace hdmbqc
