#include "hdmbqc/mplc.hpp"

#include "hdmbqc/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <tuple>

#include <fftw3.h>

namespace hdmbqc {
namespace {

// Cached in-place transforms, one plan + scratch buffer per (shape, sign).
// Eigen arrays are column-major; planning with n0 = cols, n1 = rows makes the
// memory layout line up with FFTW's row-major expectation.
class FftCache {
  public:
    void run(Eigen::ArrayXXcd& a, int sign) {
        const Key key{static_cast<int>(a.rows()), static_cast<int>(a.cols()), sign};
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            Entry entry;
            entry.buffer.resize(a.rows(), a.cols());
            auto* data = reinterpret_cast<fftw_complex*>(entry.buffer.data());
            entry.plan = fftw_plan_dft_2d(key.cols, key.rows, data, data, sign, FFTW_MEASURE);
            it = plans_.emplace(key, std::move(entry)).first;
        }
        it->second.buffer = a;
        fftw_execute(it->second.plan);
        a = it->second.buffer;
        if (sign == FFTW_BACKWARD) a /= static_cast<double>(a.size());
    }

    ~FftCache() {
        for (auto& [key, entry] : plans_) fftw_destroy_plan(entry.plan);
    }

  private:
    struct Key {
        int rows, cols, sign;
        bool operator<(const Key& o) const {
            return std::tie(rows, cols, sign) < std::tie(o.rows, o.cols, o.sign);
        }
    };
    struct Entry {
        fftw_plan plan = nullptr;
        Eigen::ArrayXXcd buffer;
    };
    std::map<Key, Entry> plans_;
};

void fft2_inplace(Eigen::ArrayXXcd& a, int sign) {
    static thread_local FftCache cache;
    cache.run(a, sign);
}

double fft_freq(int index, int n, double pitch_um) {
    const int shifted = index < (n + 1) / 2 ? index : index - n;
    return static_cast<double>(shifted) / (n * pitch_um);  // cycles per um
}

Eigen::ArrayXXcd phase_to_complex(const Eigen::ArrayXXd& phase) {
    return phase.cos().cast<Cx>() + Cx{0.0, 1.0} * phase.sin().cast<Cx>();
}

}  // namespace

Cx OpticalField::overlap(const OpticalField& other) const {
    return (grid.conjugate() * other.grid).sum();
}

void StackGeometry::validate() const {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("StackGeometry: grid must be non-empty");
    if (pitch_um <= 0 || wavelength_nm <= 0)
        throw std::invalid_argument("StackGeometry: pitch and wavelength must be positive");
    if (plane_spacing_mm <= 0 || final_distance_mm < 0)
        throw std::invalid_argument("StackGeometry: distances must be positive");
    if (angle_cap <= 0 || angle_cap > 1)
        throw std::invalid_argument("StackGeometry: angle cap must lie in (0, 1]");
}

bool StackGeometry::compatible(const OpticalField& f) const {
    return f.grid.rows() == rows && f.grid.cols() == cols &&
           std::abs(f.pitch_um - pitch_um) < 1e-12 &&
           std::abs(f.wavelength_nm - wavelength_nm) < 1e-9;
}

OpticalField propagate(const OpticalField& field, double distance_mm, double angle_cap) {
    if (field.grid.size() == 0) throw std::invalid_argument("propagate: empty field");
    if (angle_cap <= 0 || angle_cap > 1) throw std::invalid_argument("propagate: bad angle cap");
    OpticalField out = field;
    if (distance_mm == 0.0) return out;
    const int rows = static_cast<int>(field.grid.rows());
    const int cols = static_cast<int>(field.grid.cols());
    const double lambda_um = field.wavelength_nm * 1e-3;
    const double k = 2.0 * kPi / lambda_um;
    const double f_cap = angle_cap * 0.5 / field.pitch_um;
    const double z_um = distance_mm * 1e3;
    fft2_inplace(out.grid, FFTW_FORWARD);
    for (int c = 0; c < cols; ++c) {
        const double fx = fft_freq(c, cols, field.pitch_um);
        for (int r = 0; r < rows; ++r) {
            const double fy = fft_freq(r, rows, field.pitch_um);
            if (std::abs(fx) > f_cap || std::abs(fy) > f_cap) {
                out.grid(r, c) = 0.0;
                continue;
            }
            const double kx = 2.0 * kPi * fx;
            const double ky = 2.0 * kPi * fy;
            const double kz_sq = k * k - kx * kx - ky * ky;
            if (kz_sq <= 0.0) {
                out.grid(r, c) = 0.0;
                out.sampling_warning = true;
                continue;
            }
            const double phase = std::sqrt(kz_sq) * z_um;
            out.grid(r, c) *= Cx{std::cos(phase), std::sin(phase)};
        }
    }
    fft2_inplace(out.grid, FFTW_BACKWARD);
    return out;
}

OpticalField gaussian_spot(const StackGeometry& geom, double x_um, double y_um, double waist_um) {
    geom.validate();
    if (waist_um <= 0) throw std::invalid_argument("gaussian_spot: waist must be positive");
    OpticalField f;
    f.pitch_um = geom.pitch_um;
    f.wavelength_nm = geom.wavelength_nm;
    f.grid.resize(geom.rows, geom.cols);
    for (int c = 0; c < geom.cols; ++c) {
        const double x = (c - 0.5 * (geom.cols - 1)) * geom.pitch_um - x_um;
        for (int r = 0; r < geom.rows; ++r) {
            const double y = (r - 0.5 * (geom.rows - 1)) * geom.pitch_um - y_um;
            f.grid(r, c) = std::exp(-(x * x + y * y) / (waist_um * waist_um));
        }
    }
    f.grid /= std::sqrt(f.power());
    return f;
}

std::pair<double, double> beam_radius_um(const OpticalField& field) {
    const double total = field.power();
    if (total <= 0) throw std::invalid_argument("beam_radius_um: empty field");
    double cx = 0, cy = 0;
    const int rows = static_cast<int>(field.grid.rows());
    const int cols = static_cast<int>(field.grid.cols());
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            const double w = std::norm(field.grid(r, c));
            cx += w * c;
            cy += w * r;
        }
    cx /= total;
    cy /= total;
    double vx = 0, vy = 0;
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            const double w = std::norm(field.grid(r, c));
            vx += w * (c - cx) * (c - cx);
            vy += w * (r - cy) * (r - cy);
        }
    vx = vx / total * field.pitch_um * field.pitch_um;
    vy = vy / total * field.pitch_um * field.pitch_um;
    return {2.0 * std::sqrt(vx), 2.0 * std::sqrt(vy)};
}

OpticalField apply_stack(const PlaneStack& stack, const OpticalField& input) {
    stack.geom.validate();
    if (!stack.geom.compatible(input)) throw std::invalid_argument("apply_stack: geometry mismatch");
    OpticalField f = input;
    for (int p = 0; p < stack.planes(); ++p) {
        f.grid *= phase_to_complex(stack.masks[p]);
        if (p + 1 < stack.planes()) f = propagate(f, stack.geom.plane_spacing_mm, stack.geom.angle_cap);
    }
    if (stack.geom.final_distance_mm != 0.0)
        f = propagate(f, stack.geom.final_distance_mm, stack.geom.angle_cap);
    return f;
}

namespace {

struct SweepFields {
    // per plane, per mode
    std::vector<std::vector<Eigen::ArrayXXcd>> fields;
};

// Backward fields on the after-mask side of every plane, for the current
// masks.  Back-propagation uses the adjoint transfer, so the plane-local
// overlap equals the full-stack coupling.
SweepFields backward_fields(const PlaneStack& stack, const std::vector<OpticalField>& targets) {
    const int P = stack.planes();
    SweepFields out;
    out.fields.assign(P, {});
    for (const auto& target : targets) {
        OpticalField b = propagate(target, -stack.geom.final_distance_mm, stack.geom.angle_cap);
        out.fields[P - 1].push_back(b.grid);
        for (int p = P - 2; p >= 0; --p) {
            b.grid *= phase_to_complex(stack.masks[p + 1]).conjugate();
            b = propagate(b, -stack.geom.plane_spacing_mm, stack.geom.angle_cap);
            out.fields[p].push_back(b.grid);
        }
    }
    return out;
}

SweepFields forward_fields(const PlaneStack& stack, const std::vector<OpticalField>& inputs) {
    const int P = stack.planes();
    SweepFields out;
    out.fields.assign(P, {});
    for (const auto& input : inputs) {
        OpticalField f = input;
        out.fields[0].push_back(f.grid);
        for (int p = 1; p < P; ++p) {
            f.grid *= phase_to_complex(stack.masks[p - 1]);
            f = propagate(f, stack.geom.plane_spacing_mm, stack.geom.angle_cap);
            out.fields[p].push_back(f.grid);
        }
    }
    return out;
}

// Coherent mask update at one plane; returns the post-update couplings.
// The plain sum over modes locks the realized transformation to the targets'
// complex phases (the target set is a unitary, so inter-mode phases matter).
// Each pointwise update maximizes Re sum_k c_k, making that quantity
// non-decreasing through every sweep.
std::vector<Cx> update_mask(Eigen::ArrayXXd& mask, const std::vector<Eigen::ArrayXXcd>& fwd,
                            const std::vector<Eigen::ArrayXXcd>& bwd) {
    const size_t K = fwd.size();
    Eigen::ArrayXXcd overlap_sum = Eigen::ArrayXXcd::Zero(mask.rows(), mask.cols());
    for (size_t k = 0; k < K; ++k) overlap_sum += bwd[k].conjugate() * fwd[k];
    mask = -overlap_sum.arg();
    const Eigen::ArrayXXcd updated = phase_to_complex(mask);
    std::vector<Cx> couplings(K);
    for (size_t k = 0; k < K; ++k) couplings[k] = (bwd[k].conjugate() * updated * fwd[k]).sum();
    return couplings;
}

double mean_coupling_sq(const std::vector<Cx>& couplings) {
    Cx sum = 0.0;
    for (const Cx& c : couplings) sum += c;
    const double mean = std::max(0.0, sum.real()) / couplings.size();
    return mean * mean;
}

}  // namespace

DesignResult wavefront_match(const std::vector<OpticalField>& inputs,
                             const std::vector<OpticalField>& targets, int n_planes, int n_iters,
                             const StackGeometry& geom) {
    if (n_planes < 1) throw std::invalid_argument("wavefront_match: need at least one plane");
    PlaneStack stack;
    stack.geom = geom;
    stack.masks.assign(n_planes, Eigen::ArrayXXd::Zero(geom.rows, geom.cols));
    return wavefront_refine(std::move(stack), inputs, targets, n_iters);
}

DesignResult wavefront_refine(PlaneStack input_stack, const std::vector<OpticalField>& inputs,
                              const std::vector<OpticalField>& targets, int n_iters) {
    const StackGeometry geom = input_stack.geom;
    geom.validate();
    if (inputs.empty() || targets.empty())
        throw std::invalid_argument("wavefront_match: mode lists must be non-empty");
    if (inputs.size() != targets.size())
        throw std::invalid_argument("wavefront_match: input and target counts differ");
    if (input_stack.planes() < 1 || n_iters < 1)
        throw std::invalid_argument("wavefront_match: need at least one plane and one iteration");
    for (const auto& f : inputs)
        if (!geom.compatible(f)) throw std::invalid_argument("wavefront_match: input geometry mismatch");
    for (const auto& f : targets)
        if (!geom.compatible(f)) throw std::invalid_argument("wavefront_match: target geometry mismatch");

    DesignResult result;
    result.stack = std::move(input_stack);
    auto& stack = result.stack;
    const size_t K = inputs.size();
    const int P = stack.planes();

    for (int iter = 0; iter < n_iters; ++iter) {
        {  // forward sweep against stored backward fields
            SweepFields bwd = backward_fields(stack, targets);
            std::vector<Eigen::ArrayXXcd> fwd(K);
            for (size_t k = 0; k < K; ++k) fwd[k] = inputs[k].grid;
            std::vector<Cx> couplings;
            for (int p = 0; p < P; ++p) {
                couplings = update_mask(stack.masks[p], fwd, bwd.fields[p]);
                if (p + 1 < P) {
                    const Eigen::ArrayXXcd mask_cx = phase_to_complex(stack.masks[p]);
                    for (size_t k = 0; k < K; ++k) {
                        OpticalField f{fwd[k] * mask_cx, geom.pitch_um, geom.wavelength_nm};
                        fwd[k] = propagate(f, geom.plane_spacing_mm, geom.angle_cap).grid;
                    }
                }
            }
            result.fidelity_history.push_back(mean_coupling_sq(couplings));
        }
        {  // backward sweep against stored forward fields
            SweepFields fwd = forward_fields(stack, inputs);
            std::vector<Eigen::ArrayXXcd> bwd(K);
            for (size_t k = 0; k < K; ++k)
                bwd[k] = propagate(targets[k], -geom.final_distance_mm, geom.angle_cap).grid;
            std::vector<Cx> couplings;
            for (int p = P - 1; p >= 0; --p) {
                couplings = update_mask(stack.masks[p], fwd.fields[p], bwd);
                if (p > 0) {
                    const Eigen::ArrayXXcd mask_cx = phase_to_complex(stack.masks[p]);
                    for (size_t k = 0; k < K; ++k) {
                        OpticalField b{bwd[k] * mask_cx.conjugate(), geom.pitch_um, geom.wavelength_nm};
                        bwd[k] = propagate(b, -geom.plane_spacing_mm, geom.angle_cap).grid;
                    }
                }
            }
            result.fidelity_history.push_back(mean_coupling_sq(couplings));
        }
    }
    result.final_fidelity = result.fidelity_history.back();
    return result;
}

TransferMatrix stack_matrix(const PlaneStack& stack, const std::vector<OpticalField>& inputs,
                            const std::vector<OpticalField>& output_projectors) {
    if (inputs.empty() || output_projectors.empty())
        throw std::invalid_argument("stack_matrix: mode lists must be non-empty");
    TransferMatrix tm;
    tm.a.resize(static_cast<Eigen::Index>(output_projectors.size()),
                static_cast<Eigen::Index>(inputs.size()));
    tm.column_efficiency.assign(inputs.size(), 0.0);
    for (size_t j = 0; j < inputs.size(); ++j) {
        const OpticalField out = apply_stack(stack, inputs[j]);
        for (size_t i = 0; i < output_projectors.size(); ++i) {
            if (!stack.geom.compatible(output_projectors[i]))
                throw std::invalid_argument("stack_matrix: projector geometry mismatch");
            tm.a(i, j) = output_projectors[i].overlap(out);
            tm.column_efficiency[j] += std::norm(tm.a(i, j));
        }
    }
    return tm;
}

double frobenius_fidelity(const Matrix& a, const Matrix& u) {
    if (a.rows() != u.rows() || a.cols() != u.cols())
        throw std::invalid_argument("frobenius_fidelity: shape mismatch");
    const double na = (a * a.adjoint()).trace().real();
    const double nu = (u * u.adjoint()).trace().real();
    if (na <= 0 || nu <= 0) throw std::domain_error("frobenius_fidelity: zero matrix");
    return std::abs((a * u.adjoint()).trace()) / std::sqrt(na * nu);
}

Matrix row_gauged(const Matrix& a) {
    Matrix out = a;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double top = out.row(i).cwiseAbs().maxCoeff();
        if (top <= 0) continue;
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            if (std::abs(out(i, j)) > 1e-9 * top) {
                out.row(i) *= std::conj(out(i, j)) / std::abs(out(i, j));
                break;
            }
        }
    }
    return out;
}

GsResult gs_reconstruct(const Eigen::MatrixXd& single_input_intensities,
                        const std::vector<GsProbe>& probes, int max_iters, double tol,
                        int restarts) {
    const Eigen::Index n_out = single_input_intensities.rows();
    const Eigen::Index n_in = single_input_intensities.cols();
    if ((single_input_intensities.array() < 0).any())
        throw std::invalid_argument("gs_reconstruct: negative intensity");
    if (probes.empty()) throw std::invalid_argument("gs_reconstruct: no probe data");
    const int K = static_cast<int>(probes.size());
    Matrix c_mat(K, n_in);
    Eigen::MatrixXd meas(K, n_out);
    for (int k = 0; k < K; ++k) {
        if (probes[k].input.size() != n_in || probes[k].intensities.size() != n_out)
            throw std::invalid_argument("gs_reconstruct: probe dimensions mismatch");
        c_mat.row(k) = probes[k].input.transpose();
        meas.row(k) = probes[k].intensities.cwiseMax(0.0).cwiseSqrt().transpose();
    }
    const Eigen::MatrixXd magnitudes = single_input_intensities.cwiseSqrt();
    Eigen::ColPivHouseholderQR<Matrix> qr(c_mat);

    GsResult result;
    result.conditioning_warning = K < 2 * n_in;
    result.transfer.a = Matrix::Zero(n_out, n_in);
    result.null_rows.assign(n_out, false);
    std::mt19937_64 rng(0x6a09e667f3bcc908ULL);
    std::uniform_real_distribution<double> uni(-kPi, kPi);

    double total_residual = 0.0;
    int worst_iters = 0;
    for (Eigen::Index i = 0; i < n_out; ++i) {
        const Eigen::VectorXd mag = magnitudes.row(i);
        const Eigen::VectorXd target_mag = meas.col(i);
        if (mag.maxCoeff() <= 0 && target_mag.maxCoeff() <= 0) {
            result.null_rows[i] = true;
            continue;
        }
        const double scale = std::max(target_mag.norm(), 1e-300);
        Vector best_row = Vector::Zero(n_in);
        double best_residual = std::numeric_limits<double>::infinity();
        int best_iters = 0;
        for (int attempt = 0; attempt < std::max(1, restarts); ++attempt) {
            Vector row(n_in);
            for (Eigen::Index j = 0; j < n_in; ++j) {
                const double phase = attempt == 0 ? 0.0 : uni(rng);
                row(j) = mag(j) * Cx{std::cos(phase), std::sin(phase)};
            }
            double prev = std::numeric_limits<double>::infinity();
            int used = 0;
            for (int it = 0; it < max_iters; ++it) {
                ++used;
                Vector s = c_mat * row;
                for (int k = 0; k < K; ++k) {
                    const double m = std::abs(s(k));
                    s(k) = m > 0 ? s(k) / m * target_mag(k) : Cx{target_mag(k), 0.0};
                }
                const Vector fit = qr.solve(s);
                for (Eigen::Index j = 0; j < n_in; ++j) {
                    const double m = std::abs(fit(j));
                    row(j) = m > 0 ? fit(j) / m * mag(j) : Cx{mag(j), 0.0};
                }
                const double residual = ((c_mat * row).cwiseAbs() - target_mag).norm() / scale;
                if (std::abs(prev - residual) < tol) {
                    prev = residual;
                    break;
                }
                prev = residual;
            }
            if (prev < best_residual) {
                best_residual = prev;
                best_row = row;
                best_iters = used;
            }
        }
        result.transfer.a.row(i) = best_row.transpose();
        total_residual = std::max(total_residual, best_residual);
        worst_iters = std::max(worst_iters, best_iters);
    }
    result.transfer.a = row_gauged(result.transfer.a);
    result.residual = total_residual;
    result.iterations = worst_iters;
    result.transfer.column_efficiency.assign(n_in, 0.0);
    for (Eigen::Index j = 0; j < n_in; ++j)
        result.transfer.column_efficiency[j] = result.transfer.a.col(j).squaredNorm();
    return result;
}

MeasurementStack compile_measurement_stack(const std::vector<Matrix>& qudit_bases,
                                           const StackGeometry& geom, double spot_pitch_um,
                                           double spot_waist_um, int planes_per_layer,
                                           int n_iters) {
    geom.validate();
    if (qudit_bases.empty()) throw std::invalid_argument("compile_measurement_stack: no bases");
    const int d = static_cast<int>(qudit_bases[0].rows());
    const int N = static_cast<int>(qudit_bases.size());
    for (const auto& u : qudit_bases) {
        if (u.rows() != d || u.cols() != d)
            throw std::invalid_argument("compile_measurement_stack: bases must share one qudit dimension");
        if (!is_unitary(u)) throw std::invalid_argument("compile_measurement_stack: basis is not unitary");
    }
    if (planes_per_layer < 2)
        throw std::invalid_argument("compile_measurement_stack: need at least two planes per layer");
    const auto spec = EncodingSpec::make_bare(d, N);
    const int M = spec.modes_per_photon();

    // static spot grid: leading digits index rows, trailing digits columns
    int row_modes = 1;
    for (int i = 0; i < N / 2; ++i) row_modes *= d;
    const int col_modes = M / row_modes;
    MeasurementStack ms;
    for (int m = 0; m < M; ++m) {
        const int r = m / col_modes;
        const int c = m % col_modes;
        const double x = (c - 0.5 * (col_modes - 1)) * spot_pitch_um;
        const double y = (r - 0.5 * (row_modes - 1)) * spot_pitch_um;
        ms.modes.push_back(gaussian_spot(geom, x, y, spot_waist_um));
    }
    auto combine = [&](const Matrix& op) {
        std::vector<OpticalField> fields;
        for (int m = 0; m < M; ++m) {
            OpticalField t = ms.modes[0];
            t.grid.setZero();
            for (int mp = 0; mp < M; ++mp) {
                const Cx w = op(mp, m);
                if (w != Cx{0.0, 0.0}) t.grid += w * ms.modes[mp].grid;
            }
            fields.push_back(std::move(t));
        }
        return fields;
    };

    ms.target = Matrix::Identity(M, M);
    ms.stack.geom = geom;
    for (int j = 0; j < N; ++j) {
        const Matrix layer_target = embed_digit_op(qudit_bases[j], j, spec);
        ms.target = layer_target * ms.target;
        StackGeometry layer_geom = geom;
        layer_geom.final_distance_mm = (j + 1 == N) ? geom.final_distance_mm : 0.0;
        const DesignResult layer =
            wavefront_match(ms.modes, combine(layer_target), planes_per_layer, n_iters, layer_geom);
        if (ms.stack.masks.empty()) {
            ms.stack.masks = layer.stack.masks;
        } else {
            ms.stack.masks.back() += layer.stack.masks.front();  // shared boundary plane
            for (int p = 1; p < planes_per_layer; ++p) ms.stack.masks.push_back(layer.stack.masks[p]);
        }
    }
    // joint polish in short bursts, keeping the best-scoring checkpoint (the
    // coupling objective and the Frobenius score drift apart near the top)
    const auto full_targets = combine(ms.target);
    ms.fidelity = frobenius_fidelity(stack_matrix(ms.stack, ms.modes, ms.modes).a, ms.target);
    PlaneStack best = ms.stack;
    PlaneStack current = ms.stack;
    const int chunk = 5;
    for (int done = 0; done < n_iters; done += chunk) {
        current = wavefront_refine(std::move(current), ms.modes, full_targets,
                                   std::min(chunk, n_iters - done))
                      .stack;
        const double fid =
            frobenius_fidelity(stack_matrix(current, ms.modes, ms.modes).a, ms.target);
        if (fid > ms.fidelity) {
            ms.fidelity = fid;
            best = current;
        }
    }
    ms.stack = std::move(best);
    ms.plane_count = ms.stack.planes();
    return ms;
}

}  // namespace hdmbqc
