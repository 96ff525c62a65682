#include "hdmbqc/metrics.hpp"

#include <cmath>

namespace hdmbqc {

ResourceRate eqrr(double hilbert_dim, double detection_rate_hz) {
    if (hilbert_dim < 0 || detection_rate_hz < 0)
        throw std::domain_error("eqrr: inputs must be non-negative");
    return {hilbert_dim * detection_rate_hz, hilbert_dim > 0 ? std::log2(hilbert_dim) : 0.0};
}

double loss_db(double rate_in_hz, double rate_out_hz) {
    if (rate_in_hz <= 0) throw std::domain_error("loss_db: input rate must be positive");
    if (rate_out_hz < 0) throw std::domain_error("loss_db: output rate must be non-negative");
    return 10.0 * std::log10(std::sqrt(rate_out_hz / rate_in_hz));
}

MetricsRecord MetricsRecord::make(double hilbert_dim, double rate_hz, double loss) {
    if (loss > 0) throw std::domain_error("MetricsRecord: passive loss cannot be positive dB");
    MetricsRecord rec;
    rec.hilbert_dim = hilbert_dim;
    rec.rate_hz = rate_hz;
    rec.eqrr_hz = eqrr(hilbert_dim, rate_hz).rate_hz;
    rec.loss_db = loss;
    return rec;
}

}  // namespace hdmbqc
