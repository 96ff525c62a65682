#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <stdexcept>

namespace hdmbqc {

struct OrderViolationError : std::runtime_error {
    OrderViolationError(const std::string& what, std::vector<int> cycle)
        : std::runtime_error(what), cycle(std::move(cycle)) {}
    std::vector<int> cycle;
};

// Measurement-adaptivity structure: fc[q] is the set of qubits whose basis
// depends directly on q's outcome.  The induced relation "measured before"
// is the transitive closure; construction rejects cyclic inputs.
class DependencyGraph {
  public:
    static DependencyGraph make(int n_qubits, const std::map<int, std::set<int>>& forward_cones);

    int size() const { return n_; }
    const std::set<int>& cone(int q) const { return fc_.at(q); }
    // q measured strictly before r (transitive closure of the cones)
    bool before(int q, int r) const { return closure_[q][r]; }

  private:
    int n_ = 0;
    std::vector<std::set<int>> fc_;
    std::vector<std::vector<bool>> closure_;
};

struct PhotonAllocation {
    std::vector<int> photon_of;  // per qubit
    int n_photons = 0;

    static PhotonAllocation make(std::vector<int> photon_of);
    std::vector<std::vector<int>> members() const;
};

enum class ScheduleKind { qubit, photon };

struct Schedule {
    ScheduleKind kind = ScheduleKind::qubit;
    std::vector<std::vector<int>> rounds;  // disjoint, covering, forward-only
};

// Iterative minimal-element peeling; the round count equals the longest
// chain of the order.
Schedule qubit_rounds(const DependencyGraph& dep);

// Photons holding a qubit inside the forward cone of any of photon p's
// qubits (direct cones, p itself excluded).
std::vector<std::set<int>> photon_forward_cones(const DependencyGraph& dep,
                                                const PhotonAllocation& alloc);

// Qubit quadruple (i, j, k, l) with q_i in p_n before q_j in p_m and
// q_l in p_m before q_k in p_n — the two qubit pairs disagree about which
// photon is measured first.
struct AllocationVerdict {
    bool valid = false;
    std::optional<std::array<int, 4>> conflict;
};

// Checks that no photon pair receives contradictory orders from its qubits
// (quantified over the transitive closure of the qubit order).  Note this
// pairwise condition does not rule out directed cycles through three or more
// photons; photon_rounds detects those separately.
AllocationVerdict check_allocation(const DependencyGraph& dep, const PhotonAllocation& alloc);

struct AllocationError : std::runtime_error {
    AllocationError(const std::string& what, std::array<int, 4> conflict)
        : std::runtime_error(what), conflict(conflict) {}
    std::array<int, 4> conflict{};
};

// Peeling on the photon order induced by the qubit order.  Requires a valid
// allocation; a cyclic photon order (possible despite pairwise validity)
// raises OrderViolationError naming the cycle.
Schedule photon_rounds(const DependencyGraph& dep, const PhotonAllocation& alloc);

}  // namespace hdmbqc
