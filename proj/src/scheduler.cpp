#include "hdmbqc/scheduler.hpp"

#include <algorithm>
#include <array>

namespace hdmbqc {
namespace {

// Finds a directed cycle in adjacency `adj` restricted to `alive`, for error
// reporting.  Assumes one exists.
std::vector<int> find_cycle(const std::vector<std::set<int>>& adj, const std::vector<bool>& alive) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> state(n, 0);  // 0 unseen, 1 on path, 2 done
    std::vector<int> parent(n, -1);
    for (int start = 0; start < n; ++start) {
        if (!alive[start] || state[start] != 0) continue;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            const int v = stack.back();
            if (state[v] == 0) state[v] = 1;
            bool advanced = false;
            for (int w : adj[v]) {
                if (!alive[w]) continue;
                if (state[w] == 1) {
                    std::vector<int> cycle{w};
                    for (int u = v; u != w && u >= 0; u = parent[u]) cycle.push_back(u);
                    std::reverse(cycle.begin(), cycle.end());
                    return cycle;
                }
                if (state[w] == 0) {
                    parent[w] = v;
                    stack.push_back(w);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

}  // namespace

DependencyGraph DependencyGraph::make(int n_qubits, const std::map<int, std::set<int>>& forward_cones) {
    if (n_qubits < 1) throw std::invalid_argument("DependencyGraph: need at least one qubit");
    DependencyGraph dep;
    dep.n_ = n_qubits;
    dep.fc_.assign(n_qubits, {});
    for (const auto& [q, cone] : forward_cones) {
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("DependencyGraph: qubit out of range");
        for (int r : cone) {
            if (r < 0 || r >= n_qubits) throw std::invalid_argument("DependencyGraph: cone member out of range");
            if (r == q) throw OrderViolationError("DependencyGraph: qubit depends on itself", {q});
            dep.fc_[q].insert(r);
        }
    }
    // transitive closure; reject cycles
    dep.closure_.assign(n_qubits, std::vector<bool>(n_qubits, false));
    for (int q = 0; q < n_qubits; ++q)
        for (int r : dep.fc_[q]) dep.closure_[q][r] = true;
    for (int k = 0; k < n_qubits; ++k)
        for (int i = 0; i < n_qubits; ++i)
            if (dep.closure_[i][k])
                for (int j = 0; j < n_qubits; ++j)
                    if (dep.closure_[k][j]) dep.closure_[i][j] = true;
    for (int q = 0; q < n_qubits; ++q) {
        if (dep.closure_[q][q]) {
            const auto cycle = find_cycle(dep.fc_, std::vector<bool>(n_qubits, true));
            std::string names;
            for (int v : cycle) names += (names.empty() ? "" : " -> ") + std::to_string(v);
            throw OrderViolationError("DependencyGraph: dependency cycle " + names, cycle);
        }
    }
    return dep;
}

PhotonAllocation PhotonAllocation::make(std::vector<int> photon_of) {
    if (photon_of.empty()) throw std::invalid_argument("PhotonAllocation: empty map");
    PhotonAllocation alloc;
    alloc.photon_of = std::move(photon_of);
    for (int p : alloc.photon_of) {
        if (p < 0) throw std::invalid_argument("PhotonAllocation: photon ids must be non-negative");
        alloc.n_photons = std::max(alloc.n_photons, p + 1);
    }
    return alloc;
}

std::vector<std::vector<int>> PhotonAllocation::members() const {
    std::vector<std::vector<int>> out(n_photons);
    for (size_t q = 0; q < photon_of.size(); ++q) out[photon_of[q]].push_back(static_cast<int>(q));
    return out;
}

Schedule qubit_rounds(const DependencyGraph& dep) {
    const int n = dep.size();
    std::vector<bool> pending(n, true);
    Schedule schedule{ScheduleKind::qubit, {}};
    int left = n;
    while (left > 0) {
        std::vector<int> round;
        for (int q = 0; q < n; ++q) {
            if (!pending[q]) continue;
            bool minimal = true;
            for (int p = 0; p < n && minimal; ++p)
                if (pending[p] && dep.before(p, q)) minimal = false;
            if (minimal) round.push_back(q);
        }
        for (int q : round) pending[q] = false;
        left -= static_cast<int>(round.size());
        schedule.rounds.push_back(std::move(round));
    }
    return schedule;
}

std::vector<std::set<int>> photon_forward_cones(const DependencyGraph& dep,
                                                const PhotonAllocation& alloc) {
    if (static_cast<int>(alloc.photon_of.size()) != dep.size())
        throw std::invalid_argument("photon_forward_cones: allocation size mismatch");
    std::vector<std::set<int>> cones(alloc.n_photons);
    for (int q = 0; q < dep.size(); ++q)
        for (int r : dep.cone(q))
            if (alloc.photon_of[r] != alloc.photon_of[q]) cones[alloc.photon_of[q]].insert(alloc.photon_of[r]);
    return cones;
}

AllocationVerdict check_allocation(const DependencyGraph& dep, const PhotonAllocation& alloc) {
    if (static_cast<int>(alloc.photon_of.size()) != dep.size())
        throw std::invalid_argument("check_allocation: allocation size mismatch");
    const int n = dep.size();
    // first ordered qubit pair per ordered photon pair, in deterministic scan
    // order, so conflict witnesses are reproducible
    std::map<std::pair<int, int>, std::pair<int, int>> first_pair;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (!dep.before(a, b)) continue;
            const int pa = alloc.photon_of[a];
            const int pb = alloc.photon_of[b];
            if (pa == pb) continue;
            first_pair.try_emplace({pa, pb}, a, b);
        }
    }
    for (const auto& [photons, qubits] : first_pair) {
        const auto reverse = first_pair.find({photons.second, photons.first});
        if (reverse != first_pair.end()) {
            // (i, j): q_i before q_j; (k, l): q_l before q_k, with i,k on the
            // first photon and j,l on the second
            return {false, std::array<int, 4>{qubits.first, qubits.second, reverse->second.second,
                                              reverse->second.first}};
        }
    }
    return {true, std::nullopt};
}

Schedule photon_rounds(const DependencyGraph& dep, const PhotonAllocation& alloc) {
    const auto verdict = check_allocation(dep, alloc);
    if (!verdict.valid)
        throw AllocationError("photon_rounds: qubit pairs disagree on the photon order",
                              *verdict.conflict);
    const auto cones = photon_forward_cones(dep, alloc);
    const int n = alloc.n_photons;
    std::vector<bool> pending(n, false);
    for (int p : alloc.photon_of) pending[p] = true;
    Schedule schedule{ScheduleKind::photon, {}};
    int left = static_cast<int>(std::count(pending.begin(), pending.end(), true));
    while (left > 0) {
        std::vector<int> round;
        for (int p = 0; p < n; ++p) {
            if (!pending[p]) continue;
            bool minimal = true;
            for (int q = 0; q < n && minimal; ++q)
                if (pending[q] && q != p && cones[q].count(p)) minimal = false;
            if (minimal) round.push_back(p);
        }
        if (round.empty()) {
            const auto cycle = find_cycle(cones, pending);
            std::string names;
            for (int v : cycle) names += (names.empty() ? "" : " -> ") + std::to_string(v);
            throw OrderViolationError("photon_rounds: cyclic photon order " + names, cycle);
        }
        for (int p : round) pending[p] = false;
        left -= static_cast<int>(round.size());
        schedule.rounds.push_back(std::move(round));
    }
    return schedule;
}

}  // namespace hdmbqc
