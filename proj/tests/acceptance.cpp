// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "hdmbqc/feedforward.hpp"
#include "hdmbqc/metrics.hpp"
#include "hdmbqc/mplc.hpp"
#include "hdmbqc/presets.hpp"
#include "hdmbqc/scheduler.hpp"
#include "hdmbqc/witness.hpp"
#include "test_support.hpp"

using namespace hdmbqc;

namespace {

struct Criterion {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

int failures = 0;

void report(int index, const std::string& name, double budget_s,
            const std::function<void(Criterion&)>& body) {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& err) {
        c.require(false, std::string("exception: ") + err.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(elapsed < budget_s, "runtime budget exceeded");
    std::printf("criterion %d (%s): %s [%.2fs < %.0fs]%s%s\n", index, name.c_str(),
                c.ok ? "PASS" : "FAIL", elapsed, budget_s, c.ok ? "" : " - ",
                c.ok ? "" : c.detail.c_str());
    if (!c.ok) ++failures;
}

double vec_fidelity(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace

int main() {
    // 1: ideal witnesses hit the floor; the white-noise mixture crossing sits
    // at the derived fraction
    report(1, "ideal-state witnesses", 5.0, [](Criterion& c) {
        const auto comb = canonical_cluster8();
        const auto comb_report = witness_exact(simulate_cluster(comb, spec_for_graph(comb)), comb);
        c.require(std::abs(comb_report.value - (-1.0)) < 1e-9, "eight-qubit witness off the floor");

        const auto chain = canonical_qudit5();
        const auto chain_report =
            witness_exact(simulate_cluster(chain, spec_for_graph(chain)), chain);
        c.require(std::abs(chain_report.value - (-1.0)) < 1e-9, "four-qudit witness off the floor");

        const double crossing = witness_zero_crossing(comb);
        c.require(std::abs(crossing - 1.0 / 3.75) < 1e-6, "mixture zero crossing misplaced");
    });

    // 2: fuzzed realizable graphs keep every frame-corrected stabilizer at
    // unit expectation
    report(2, "stabilizer suite", 60.0, [](Criterion& c) {
        std::mt19937_64 rng(0xACCE97);
        const int dims[3] = {2, 3, 5};
        for (int trial = 0; trial < 200; ++trial) {
            const int d = dims[trial % 3];
            const int n = 1 + static_cast<int>(rng() % 3);
            const auto g = testing::random_realizable_graph(rng, d, n);
            const auto state = simulate_cluster(g, spec_for_graph(g));
            const auto layout = ModeLayout::from(g, check_two_photon_realizable(g));
            for (const auto& term : stabilizers(g)) {
                const Cx e = term_expectation(state, term, g, layout);
                c.require(std::abs(e - Cx{1.0, 0.0}) < 1e-10, "stabilizer expectation drifted");
            }
        }
    });

    // 3: the two measurement settings jointly cover the published operator
    // strings, and the measurement route matches the operator route per term
    report(3, "witness term coverage", 30.0, [](Criterion& c) {
        {
            const auto g = canonical_cluster8();
            const auto expansion = witness_terms(g);
            const size_t total =
                expansion.class_terms[0].size() + expansion.class_terms[1].size();
            c.require(total == 32, "eight-qubit expansion must hold 32 strings");
            std::set<std::string> nonid[2];
            int identities = 0;
            for (int cls = 0; cls < 2; ++cls)
                for (const auto& t : expansion.class_terms[cls]) {
                    if (t.is_identity())
                        ++identities;
                    else
                        nonid[cls].insert(t.label());
                }
            c.require(identities == 2, "one identity per product");
            c.require(nonid[0] == testing::kCombStringsEvenClass &&
                          nonid[1] == testing::kCombStringsOddClass,
                      "eight-qubit strings differ from the published set");
        }
        {
            const auto g = canonical_qudit5();
            const auto expansion = witness_terms(g);
            std::set<std::string> canonical;
            int listed = 0;
            for (int cls = 0; cls < 2; ++cls)
                for (const auto& t : expansion.class_terms[cls]) {
                    canonical.insert(conjugation_canonical_label(t));
                    if (!t.is_identity() &&
                        (testing::kQuditChainStrings.count(t.label()) ||
                         testing::kQuditChainStrings.count(t.adjoint().label())))
                        ++listed;
                }
            c.require(listed == 48, "every four-qudit string must match a published representative");
            c.require(canonical.size() == 25,
                      "four-qudit witness must reduce to 25 distinct strings (identity included)");
        }
        // per-term: estimates from exact probabilities in each setting agree
        // with direct operator expectations
        for (const GraphState& g : {canonical_cluster8(), canonical_qudit5()}) {
            const auto spec = spec_for_graph(g);
            const auto state = simulate_cluster(g, spec);
            const auto settings = mub_settings(g);
            const auto expansion = witness_terms(g);
            const auto layout = ModeLayout::from(g, check_two_photon_realizable(g));
            for (int s = 0; s < 2; ++s) {
                auto rotated = apply_photon_unitary(state, Photon::A, settings[s].u_a);
                rotated = apply_photon_unitary(rotated, Photon::B, settings[s].u_b);
                const auto est = estimate_setting_terms(coincidence_probs(rotated), settings[s],
                                                        expansion, g, layout, spec);
                for (size_t t = 0; t < est.size(); ++t) {
                    const Cx direct =
                        term_expectation(state, expansion.class_terms[s][t], g, layout);
                    c.require(std::abs(est[t] - direct) < 1e-10,
                              "setting estimate deviates from the operator expectation");
                }
            }
        }
    });

    // 4: the passive circuit reproduces adaptive measurement branch by
    // branch, and the rotation chain realizes the target rotation exactly
    report(4, "intra-feedforward equivalence", 30.0, [](Criterion& c) {
        std::mt19937_64 rng(0xFEEDF);
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> normal;
        auto random_state = [&] {
            Eigen::Vector2cd v{Cx{normal(rng), normal(rng)}, Cx{normal(rng), normal(rng)}};
            return (v / v.norm()).eval();
        };
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 4);
            std::vector<PatternQubit> qubits(n);
            for (int j = 0; j < n; ++j) {
                if (uni(rng) < 0.2) {
                    qubits[j] = {MeasBasis::Z, 0.0, {}, 1};
                    continue;
                }
                PatternQubit q;
                q.basis = MeasBasis::Equatorial;
                q.angle = angle(rng);
                q.base_sign = uni(rng) < 0.5 ? 1 : -1;
                for (int i = 0; i < j; ++i)
                    if (uni(rng) < 0.4) q.deps.push_back(i);
                qubits[j] = std::move(q);
            }
            const auto pattern = MeasurementPattern::make(std::move(qubits));
            const auto circuit = build_intra_feedforward(pattern);
            c.require(is_unitary(circuit.matrix, 1e-10), "synthesized circuit not unitary");
            c.require(circuit.depth() <= pattern.size(), "depth bound violated");
            const auto input = random_state();
            const auto oracle = adaptive_oracle(pattern, input);
            const auto measured = run_circuit_branches(circuit, input, pattern);
            for (size_t k = 0; k < oracle.branches.size(); ++k) {
                const auto& a = oracle.branches[k];
                const auto& b = measured.branches[k];
                c.require(std::abs(a.probability - b.probability) <= 1e-10,
                          "branch probability mismatch");
                if (!a.zero_prob && !b.zero_prob)
                    c.require(vec_fidelity(a.state, b.state) >= 1.0 - 1e-10,
                              "branch state mismatch");
            }
        }

        // rotation chain: every branch realizes R_z(beta) R_x(alpha), making
        // the output expectations exact sinusoids at unit visibility
        const Eigen::Vector2cd plus = Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
        const Eigen::Vector2cd plus_i = Eigen::Vector2cd(Cx{1, 0}, Cx{0, 1}) / std::sqrt(2.0);
        const Eigen::Matrix2cd pauli_z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
        const Eigen::Matrix2cd pauli_y =
            (Eigen::Matrix2cd() << 0, Cx{0, -1}, Cx{0, 1}, 0).finished();
        for (int step = 0; step < 16; ++step) {
            const double alpha = 2.0 * kPi * step / 16;
            const double beta = 2.0 * kPi * ((step * 5) % 16) / 16;
            const auto pattern = rotation_pattern(alpha, beta, 0.0);
            const auto circuit = rotation_circuit(alpha, beta, 0.0);

            const auto branches_z = run_circuit_branches(circuit, plus_i, pattern);
            const Eigen::Vector2cd target_z = ideal_rotation(alpha, beta, 0.0) * plus_i;
            double exp_z = 0.0;
            for (const auto& br : branches_z.branches) {
                c.require(!br.zero_prob && std::abs(br.probability - 1.0 / 16) < 1e-10,
                          "rotation branch probabilities must be uniform");
                const auto corrected = frame_corrected(br);
                c.require(vec_fidelity(corrected, target_z) >= 1.0 - 1e-10,
                          "rotation branch misses the target state");
                exp_z += br.probability * (corrected.adjoint() * pauli_z * corrected)(0).real();
            }
            c.require(std::abs(exp_z - std::sin(alpha)) < 1e-9, "x-rotation sinusoid broken");

            const auto branches_y = run_circuit_branches(circuit, plus, pattern);
            double exp_y = 0.0;
            for (const auto& br : branches_y.branches) {
                const auto corrected = frame_corrected(br);
                exp_y += br.probability * (corrected.adjoint() * pauli_y * corrected)(0).real();
            }
            c.require(std::abs(exp_y - std::sin(beta)) < 1e-9, "z-rotation sinusoid broken");
        }
    });

    // 5: measurement scheduling
    report(5, "scheduler", 10.0, [](Criterion& c) {
        const auto dep = rotation_dependency();
        const auto alloc = rotation_allocation();
        c.require(qubit_rounds(dep).rounds.size() == 4, "rotation gate needs four qubit rounds");
        c.require(photon_rounds(dep, alloc).rounds.size() == 2,
                  "rotation gate must collapse to two photon rounds");

        const auto conflict_dep = DependencyGraph::make(3, {{0, {1}}, {1, {2}}});
        const auto conflict_alloc = PhotonAllocation::make({0, 1, 0});
        const auto verdict = check_allocation(conflict_dep, conflict_alloc);
        c.require(!verdict.valid, "conflicting allocation must be rejected");
        c.require(verdict.conflict &&
                      *verdict.conflict == std::array<int, 4>{0, 1, 2, 1},
                  "conflict witness quadruple incorrect");

        std::mt19937_64 rng(0x5CED);
        std::uniform_real_distribution<double> uni(0, 1);
        int checked = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const int n = 3 + static_cast<int>(rng() % 6);
            std::map<int, std::set<int>> cones;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    if (uni(rng) < 0.25) cones[a].insert(b);
            const auto d = DependencyGraph::make(n, cones);
            std::vector<int> photon_of(n);
            for (int q = 0; q < n; ++q) photon_of[q] = static_cast<int>(rng() % 3);
            const auto a = PhotonAllocation::make(photon_of);
            if (!check_allocation(d, a).valid) continue;
            Schedule schedule;
            try {
                schedule = photon_rounds(d, a);
            } catch (const OrderViolationError&) {
                continue;
            }
            ++checked;
            std::map<int, int> round_of;
            for (size_t t = 0; t < schedule.rounds.size(); ++t)
                for (int p : schedule.rounds[t]) round_of[p] = static_cast<int>(t);
            for (int q = 0; q < d.size(); ++q)
                for (int r : d.cone(q)) {
                    if (a.photon_of[q] == a.photon_of[r]) continue;
                    c.require(round_of.at(a.photon_of[q]) < round_of.at(a.photon_of[r]),
                              "dependency crosses photon rounds backward");
                }
        }
        c.require(checked > 100, "fuzz produced too few valid allocations");
    });

    // 6: quantitative mask design and intensity-only reconstruction
    report(6, "mplc quantitative", 60.0, [](Criterion& c) {
        StackGeometry geom;
        geom.rows = 128;
        const std::vector<OpticalField> inputs{gaussian_spot(geom, -150, 0, 150),
                                               gaussian_spot(geom, 150, 0, 150)};
        std::vector<OpticalField> targets(2, inputs[0]);
        const double s = 1 / std::sqrt(2.0);
        targets[0].grid = s * (inputs[0].grid + inputs[1].grid);
        targets[1].grid = s * (inputs[0].grid - inputs[1].grid);
        const auto design = wavefront_match(inputs, targets, 3, 30, geom);
        for (size_t i = 1; i < design.fidelity_history.size(); ++i)
            c.require(design.fidelity_history[i] >= design.fidelity_history[i - 1] - 1e-6,
                      "optimizer fidelity decreased across sweeps");
        Matrix h2(2, 2);
        h2 << s, s, s, -s;
        const double frob = frobenius_fidelity(stack_matrix(design.stack, inputs, inputs).a, h2);
        c.require(frob >= 0.998, "three-plane splitter fidelity " + format_double(frob) +
                                     " below 0.998");

        std::mt19937_64 rng(0x6A11);
        std::normal_distribution<double> normal;
        Matrix gauss(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) gauss(i, j) = Cx{normal(rng), normal(rng)};
        const Matrix truth = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
        std::uniform_real_distribution<double> uni(-kPi, kPi);
        std::vector<GsProbe> probes;
        for (int k = 0; k < 16; ++k) {
            GsProbe probe;
            probe.input.resize(4);
            for (int j = 0; j < 4; ++j) {
                const double phi = uni(rng);
                probe.input(j) = Cx{std::cos(phi), std::sin(phi)};
            }
            probe.intensities = (truth * probe.input).cwiseAbs2();
            probes.push_back(std::move(probe));
        }
        const auto recon = gs_reconstruct(truth.cwiseAbs2(), probes);
        const double gs_fid = frobenius_fidelity(recon.transfer.a, row_gauged(truth));
        c.require(gs_fid >= 0.999,
                  "reconstruction fidelity " + format_double(gs_fid) + " below 0.999");
    });

    // 7: separable measurement stacks use 3/5/<=7 planes at high fidelity
    report(7, "plane scaling", 300.0, [](Criterion& c) {
        StackGeometry geom;
        geom.rows = 128;
        Matrix h2(2, 2);
        const double s = 1 / std::sqrt(2.0);
        h2 << s, s, s, -s;
        std::vector<int> counts;
        for (int n = 1; n <= 3; ++n) {
            const auto ms = compile_measurement_stack(std::vector<Matrix>(n, h2), geom);
            counts.push_back(ms.plane_count);
            c.require(ms.fidelity >= 0.98, "measurement stack fidelity " +
                                               format_double(ms.fidelity) + " below 0.98 at n = " +
                                               std::to_string(n));
        }
        c.require(counts[0] == 3 && counts[1] == 5 && counts[2] <= 7,
                  "plane counts must be 3, 5, <=7");
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < 3; ++i) {
            const double x = i + 1, y = counts[i];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / 3;
        for (int i = 0; i < 3; ++i)
            c.require(std::abs(counts[i] - (slope * (i + 1) + intercept)) < 1.0,
                      "plane counts deviate from a line");
    });

    // 8: headline resource figures
    report(8, "metrics", 5.0, [](Criterion& c) {
        const auto rr = eqrr(625, 100);
        c.require(std::abs(rr.rate_hz - 6.25e4) < 1e-9, "resource rate wrong");
        c.require(std::abs(rr.equivalent_qubits - 9.28) < 0.01, "equivalent qubits wrong");
        c.require(std::abs(eqrr(256, 130).rate_hz - 3.328e4) < 1e-9, "comb resource rate wrong");
        c.require(std::abs(loss_db(1.0, std::pow(10.0, -1.82)) - (-9.1)) < 0.05,
                  "loss figure -9.1 dB not recovered");
        c.require(std::abs(loss_db(1.0, std::pow(10.0, -2.08)) - (-10.4)) < 0.05,
                  "loss figure -10.4 dB not recovered");
    });

    // 9: free-space propagation against the closed-form beam expansion
    report(9, "propagation oracle", 5.0, [](Criterion& c) {
        StackGeometry geom;
        geom.rows = 320;
        geom.cols = 320;
        geom.pitch_um = 8.0;
        const double w0 = 80.0;
        const double rayleigh_mm = kPi * w0 * w0 / (geom.wavelength_nm * 1e-3) * 1e-3;
        const auto spot = gaussian_spot(geom, 0, 0, w0);
        for (double z = 0.0; z <= 200.0; z += 20.0) {
            const auto out = propagate(spot, z, geom.angle_cap);
            const auto [wx, wy] = beam_radius_um(out);
            const double expected = w0 * std::sqrt(1.0 + (z / rayleigh_mm) * (z / rayleigh_mm));
            c.require(std::abs(wx - expected) / expected < 0.005, "beam waist drifted off the curve");
            c.require(std::abs(wy - expected) / expected < 0.005, "beam waist drifted off the curve");
        }
    });

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
