#pragma once

#include <stdexcept>

namespace hdmbqc {

struct ResourceRate {
    double rate_hz = 0.0;            // dim(H) * detection rate
    double equivalent_qubits = 0.0;  // log2(dim)
};

// Effective quantum resource rate: Hilbert-space dimension times detection
// rate, plus the equivalent qubit count.
ResourceRate eqrr(double hilbert_dim, double detection_rate_hz);

// 10*log10(sqrt(rate_out/rate_in)): per-arm loss inferred from the quadratic
// coincidence-rate drop.
double loss_db(double rate_in_hz, double rate_out_hz);

struct MetricsRecord {
    double hilbert_dim = 1.0;
    double rate_hz = 0.0;
    double eqrr_hz = 0.0;
    double loss_db = 0.0;

    static MetricsRecord make(double hilbert_dim, double rate_hz, double loss_db);
};

}  // namespace hdmbqc
