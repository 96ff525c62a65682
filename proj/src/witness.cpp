#include "hdmbqc/witness.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace hdmbqc {
namespace {

std::vector<int> class_vertices(const GraphState& g, int parity) {
    std::vector<int> out;
    for (int v = parity; v < g.n_vertices; v += 2) out.push_back(v);
    return out;
}

void require_parity_two_colorable(const GraphState& g) {
    for (const auto& e : g.edges)
        if (e.u % 2 == e.v % 2)
            throw UnsupportedGraphError("witness: edge (" + std::to_string(e.u) + "," +
                                        std::to_string(e.v) +
                                        ") joins vertices of equal index parity");
}

std::vector<std::vector<int>> digit_table(const EncodingSpec& spec) {
    std::vector<std::vector<int>> digits(spec.modes_per_photon());
    for (int m = 0; m < spec.modes_per_photon(); ++m) digits[m] = index_to_digits(m, spec).digits;
    return digits;
}

// Multinomial resample of `counts` conditioned on its total, via sequential
// conditional binomials.
Eigen::MatrixXd resample_counts(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
                                std::int64_t total, std::mt19937_64& rng) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
    std::int64_t remaining = total;
    double mass_left = static_cast<double>(total);
    for (Eigen::Index i = 0; i < counts.rows() && remaining > 0; ++i) {
        for (Eigen::Index j = 0; j < counts.cols() && remaining > 0; ++j) {
            const double w = static_cast<double>(counts(i, j));
            if (w <= 0.0) continue;
            double p = w / mass_left;
            std::int64_t n;
            if (p >= 1.0) {
                n = remaining;
            } else {
                std::binomial_distribution<std::int64_t> binom(remaining, p);
                n = binom(rng);
            }
            out(i, j) = static_cast<double>(n);
            remaining -= n;
            mass_left -= w;
        }
    }
    return out;
}

double assemble_value(const WitnessExpansion& expansion,
                      const std::array<std::vector<Cx>, 2>& term_values, double* imag_residual) {
    Cx sum = 0.0;
    for (int c = 0; c < 2; ++c) {
        Cx class_sum = 0.0;
        for (const auto& v : term_values[c]) class_sum += v;
        sum += expansion.term_coeff * class_sum;
    }
    const Cx value = expansion.constant - expansion.product_coeff * sum;
    if (imag_residual) *imag_residual = std::abs(value.imag());
    return value.real();
}

}  // namespace

double WitnessExpansion::mixed_state_value() const {
    // only the identity string of each product survives on the mixed state
    return constant - product_coeff * 2.0 * term_coeff;
}

WitnessExpansion witness_terms(const GraphState& g) {
    require_parity_two_colorable(g);
    const GraphState gr = resolve_frames(g);
    const auto gens = stabilizers(gr);
    WitnessExpansion expansion;
    expansion.d = g.d;
    expansion.constant = static_cast<double>(g.d + 1) / (g.d - 1);
    expansion.product_coeff = static_cast<double>(g.d) / (g.d - 1);
    const int n_class = g.n_vertices / 2;
    double dn = 1.0;
    for (int i = 0; i < n_class; ++i) dn *= g.d;
    expansion.term_coeff = 1.0 / dn;
    for (int c = 0; c < 2; ++c) {
        const auto verts = class_vertices(g, c);
        // precompute generator powers S_k^p, p = 1..d (p = d is the identity)
        std::vector<std::vector<StabilizerTerm>> powers;
        for (int v : verts) {
            std::vector<StabilizerTerm> pw;
            for (int p = 1; p <= g.d; ++p) pw.push_back(gens[v].to_power(p));
            powers.push_back(std::move(pw));
        }
        std::vector<int> odometer(verts.size(), 0);
        while (true) {
            StabilizerTerm term = StabilizerTerm::identity(g.d, g.n_vertices);
            for (size_t i = 0; i < verts.size(); ++i) term = term.multiplied_by(powers[i][odometer[i]]);
            expansion.class_terms[c].push_back(std::move(term));
            size_t i = 0;
            for (; i < odometer.size(); ++i) {
                if (++odometer[i] < g.d) break;
                odometer[i] = 0;
            }
            if (i == odometer.size()) break;
        }
    }
    return expansion;
}

std::array<MubSetting, 2> mub_settings(const GraphState& g) {
    require_parity_two_colorable(g);
    const GraphState gr = resolve_frames(g);
    const auto report = check_two_photon_realizable(gr);
    if (!report.realizable) throw UnsupportedGraphError("mub_settings: " + report.reason);
    const auto layout = ModeLayout::from(gr, report);
    const auto spec = spec_for_graph(gr);
    const Matrix fourier = fourier_gate(g.d);
    std::array<MubSetting, 2> settings;
    for (int c = 0; c < 2; ++c) {
        MubSetting s;
        s.label = c == 0 ? "setting1" : "setting2";
        s.class_index = c;
        s.basis_x.assign(g.n_vertices, false);
        const int M = spec.modes_per_photon();
        Matrix u_a = Matrix::Identity(M, M);
        Matrix u_b = Matrix::Identity(M, M);
        for (int v = 0; v < g.n_vertices; ++v) {
            const bool x_basis = (v % 2 == c) != gr.fourier_frame[v];
            s.basis_x[v] = x_basis;
            if (!x_basis) continue;
            const Matrix embedded = embed_digit_op(fourier, layout.position[v], spec);
            if (gr.allocation[v] == Photon::A)
                u_a = embedded * u_a;
            else
                u_b = embedded * u_b;
        }
        s.u_a = ModeUnitary::from(std::move(u_a));
        s.u_b = ModeUnitary::from(std::move(u_b));
        settings[c] = std::move(s);
    }
    return settings;
}

WitnessReport witness_exact(const TwoPhotonState& state, const GraphState& g) {
    const GraphState gr = resolve_frames(g);
    const auto report = check_two_photon_realizable(gr);
    if (!report.realizable) throw UnsupportedGraphError("witness_exact: " + report.reason);
    const auto layout = ModeLayout::from(gr, report);
    const auto expansion = witness_terms(gr);
    if (state.spec.modes_per_photon() != spec_for_graph(gr).modes_per_photon())
        throw std::invalid_argument("witness_exact: state dimension does not match the graph");
    WitnessReport out;
    std::array<std::vector<Cx>, 2> values;
    for (int c = 0; c < 2; ++c) {
        for (const auto& term : expansion.class_terms[c]) {
            const Cx v = term_expectation(state, term, gr, layout);
            values[c].push_back(v);
            out.per_term.push_back({term.label(), v, 0.0});
        }
    }
    out.value = assemble_value(expansion, values, &out.imag_residual);
    out.setting_used = WitnessMode::exact;
    return out;
}

std::vector<Cx> estimate_setting_terms(const Eigen::MatrixXd& weights, const MubSetting& setting,
                                       const WitnessExpansion& expansion, const GraphState& g,
                                       const ModeLayout& layout, const EncodingSpec& spec) {
    const double total = weights.sum();
    if (total <= 0.0) throw InsufficientDataError("estimate_setting_terms: table has no events");
    const int M = spec.modes_per_photon();
    const auto digits = digit_table(spec);
    const auto& terms = expansion.class_terms[setting.class_index];
    std::vector<Cx> out;
    out.reserve(terms.size());
    std::vector<int> ea(M), eb(M);
    for (const auto& term : terms) {
        std::fill(ea.begin(), ea.end(), 0);
        std::fill(eb.begin(), eb.end(), 0);
        for (int v = 0; v < g.n_vertices; ++v) {
            const auto& f = term.factors[v];
            int power;
            if (setting.basis_x[v]) {
                if (f.z != 0)
                    throw std::logic_error("estimate_setting_terms: Z power on an X-basis vertex");
                power = f.x;
            } else {
                if (f.x != 0)
                    throw std::logic_error("estimate_setting_terms: X power on a Z-basis vertex");
                power = f.z;
            }
            if (power == 0) continue;
            const int pos = layout.position[v];
            auto& e = g.allocation[v] == Photon::A ? ea : eb;
            for (int m = 0; m < M; ++m) e[m] = (e[m] + power * digits[m][pos]) % g.d;
        }
        Cx acc = 0.0;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                if (weights(i, j) != 0.0) acc += weights(i, j) * omega(g.d, ea[i] + eb[j]);
        out.push_back(term.phase * acc / total);
    }
    return out;
}

WitnessReport witness_from_counts(const CoincidenceTable& table1, const CoincidenceTable& table2,
                                  const GraphState& g, const std::array<MubSetting, 2>& settings,
                                  const EncodingSpec& spec, int n_bootstrap, std::uint64_t seed) {
    if (table1.total <= 0 || table2.total <= 0)
        throw InsufficientDataError("witness_from_counts: a coincidence table is empty");
    const GraphState gr = resolve_frames(g);
    const auto layout = ModeLayout::from(gr, check_two_photon_realizable(gr));
    const auto expansion = witness_terms(gr);

    const std::array<const CoincidenceTable*, 2> tables{&table1, &table2};
    std::array<std::vector<Cx>, 2> values;
    for (int c = 0; c < 2; ++c)
        values[c] = estimate_setting_terms(tables[c]->counts.cast<double>(), settings[c], expansion,
                                           gr, layout, spec);

    WitnessReport out;
    out.setting_used = WitnessMode::two_mub_counts;
    out.value = assemble_value(expansion, values, &out.imag_residual);

    // nonparametric bootstrap over the recorded events of each table
    std::mt19937_64 rng(seed);
    std::vector<double> value_samples;
    value_samples.reserve(n_bootstrap);
    std::array<std::vector<std::vector<Cx>>, 2> term_samples;
    for (int b = 0; b < n_bootstrap; ++b) {
        std::array<std::vector<Cx>, 2> sample_values;
        for (int c = 0; c < 2; ++c) {
            const Eigen::MatrixXd resampled = resample_counts(tables[c]->counts, tables[c]->total, rng);
            sample_values[c] = estimate_setting_terms(resampled, settings[c], expansion, gr, layout, spec);
            term_samples[c].push_back(sample_values[c]);
        }
        value_samples.push_back(assemble_value(expansion, sample_values, nullptr));
    }
    if (n_bootstrap > 1) {
        double mean = 0.0;
        for (double v : value_samples) mean += v;
        mean /= n_bootstrap;
        double var = 0.0;
        for (double v : value_samples) var += (v - mean) * (v - mean);
        out.std_dev = std::sqrt(var / (n_bootstrap - 1));
    }
    for (int c = 0; c < 2; ++c) {
        for (size_t t = 0; t < values[c].size(); ++t) {
            double std_dev = 0.0;
            if (n_bootstrap > 1) {
                Cx mean = 0.0;
                for (int b = 0; b < n_bootstrap; ++b) mean += term_samples[c][b][t];
                mean /= static_cast<double>(n_bootstrap);
                double var = 0.0;
                for (int b = 0; b < n_bootstrap; ++b) var += std::norm(term_samples[c][b][t] - mean);
                std_dev = std::sqrt(var / (n_bootstrap - 1));
            }
            out.per_term.push_back({expansion.class_terms[c][t].label(), values[c][t], std_dev});
        }
    }
    return out;
}

double witness_on_mixture(const GraphState& g, double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("witness_on_mixture: p must lie in [0, 1]");
    const GraphState gr = resolve_frames(g);
    const auto spec = spec_for_graph(gr);
    const double ideal = witness_exact(simulate_cluster(gr, spec), gr).value;
    const double mixed = witness_terms(gr).mixed_state_value();
    return (1.0 - p) * ideal + p * mixed;
}

double witness_zero_crossing(const GraphState& g) {
    const GraphState gr = resolve_frames(g);
    const auto spec = spec_for_graph(gr);
    const double ideal = witness_exact(simulate_cluster(gr, spec), gr).value;
    const double mixed = witness_terms(gr).mixed_state_value();
    if (ideal >= 0.0 || mixed <= 0.0)
        throw std::domain_error("witness_zero_crossing: mixture never changes sign");
    return -ideal / (mixed - ideal);
}

}  // namespace hdmbqc
