#pragma once

#include <array>

#include "hdmbqc/graph.hpp"

namespace hdmbqc {

struct UnsupportedGraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// W = (d+1)/(d-1) - d/(d-1) * (P_0 + P_1), where P_c is the product over the
// vertices of parity class c of the stabilizer projectors (1/d) sum_{p=1..d}
// S_k^p.  Each product expands into d^N operator strings (one of them the
// identity), each carrying coefficient 1/d^N.  At d=2 this reduces to
// 3 - 2*(prod (S_k+1)/2 + prod (S_k+1)/2).
struct WitnessExpansion {
    int d = 2;
    double constant = 0.0;        // (d+1)/(d-1)
    double product_coeff = 0.0;   // d/(d-1)
    double term_coeff = 0.0;      // 1/d^N within each product
    std::array<std::vector<StabilizerTerm>, 2> class_terms;

    double mixed_state_value() const;  // value on the maximally mixed state
};

// Expands the witness for a graph whose vertex-index parity classes form a
// proper two-coloring; otherwise throws UnsupportedGraphError.
WitnessExpansion witness_terms(const GraphState& g);

struct WitnessTermReport {
    std::string label;
    Cx value;
    double std_dev = 0.0;
};

enum class WitnessMode { exact, two_mub_counts };

struct WitnessReport {
    double value = 0.0;
    double std_dev = 0.0;
    double imag_residual = 0.0;
    std::vector<WitnessTermReport> per_term;
    WitnessMode setting_used = WitnessMode::exact;
};

// One of the two mutually unbiased measurement settings: vertices of the
// evaluated class are read out through the Fourier gate unless their frame
// already supplies it; everything else is measured in the mode basis.
struct MubSetting {
    std::string label;
    int class_index = 0;
    std::vector<bool> basis_x;  // per vertex
    ModeUnitary u_a, u_b;
};

std::array<MubSetting, 2> mub_settings(const GraphState& g);

// Exact witness from the state: every expanded operator string is evaluated
// as an operator expectation.
WitnessReport witness_exact(const TwoPhotonState& state, const GraphState& g);

// Per-term estimates from a weight matrix (counts or probabilities) recorded
// under `setting`: each mode pair contributes omega^{sum_v pow_v * digit_v}.
// Weights are normalized by their sum.  Terms of the other class come back
// as NaN.
std::vector<Cx> estimate_setting_terms(const Eigen::MatrixXd& weights, const MubSetting& setting,
                                       const WitnessExpansion& expansion, const GraphState& g,
                                       const ModeLayout& layout, const EncodingSpec& spec);

// Witness estimate from coincidence counts taken in the two settings, with a
// nonparametric multinomial bootstrap (seeded) for the error bars.
WitnessReport witness_from_counts(const CoincidenceTable& table1, const CoincidenceTable& table2,
                                  const GraphState& g, const std::array<MubSetting, 2>& settings,
                                  const EncodingSpec& spec, int n_bootstrap = 1000,
                                  std::uint64_t seed = 0x5deece66dULL);

// (1-p) * witness(ideal) + p * witness(maximally mixed), by linearity of the
// expectation values.  Monotone increasing in p.
double witness_on_mixture(const GraphState& g, double p);

// White-noise fraction at which the mixture witness crosses zero.
double witness_zero_crossing(const GraphState& g);

}  // namespace hdmbqc
