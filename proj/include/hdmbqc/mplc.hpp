#pragma once

#include <vector>

#include "hdmbqc/common.hpp"

namespace hdmbqc {

// Sampled scalar field on a regular pixel grid.
struct OpticalField {
    Eigen::ArrayXXcd grid;  // rows x cols
    double pitch_um = 12.5;
    double wavelength_nm = 810.0;
    bool sampling_warning = false;  // evanescent content reached the band

    double power() const { return grid.abs2().sum(); }
    Cx overlap(const OpticalField& other) const;  // <this|other>
};

struct StackGeometry {
    int rows = 64;
    int cols = 160;
    double pitch_um = 12.5;
    double wavelength_nm = 810.0;
    double plane_spacing_mm = 87.0;   // unfolded double bounce of the reflective setup
    double final_distance_mm = 43.5;  // last mask to the output plane
    double angle_cap = 0.15;          // fraction of the Nyquist angular range

    void validate() const;
    bool compatible(const OpticalField& f) const;
};

// Ordered phase masks with their propagation geometry.
struct PlaneStack {
    std::vector<Eigen::ArrayXXd> masks;  // radians, rows x cols each
    StackGeometry geom;

    int planes() const { return static_cast<int>(masks.size()); }
};

// Band-limited angular-spectrum propagation over a signed distance; the
// frequency cap keeps the transfer unitary inside the band, so energy there
// is conserved and propagate(-z) inverts propagate(z).
OpticalField propagate(const OpticalField& field, double distance_mm, double angle_cap = 0.15);

// Unit-power Gaussian spot (amplitude waist w) centered at (x, y) from the
// grid center.
OpticalField gaussian_spot(const StackGeometry& geom, double x_um, double y_um, double waist_um);

// Intensity second-moment beam radius (2 sigma), per transverse axis.
std::pair<double, double> beam_radius_um(const OpticalField& field);

OpticalField apply_stack(const PlaneStack& stack, const OpticalField& input);

struct DesignResult {
    PlaneStack stack;
    // squared mean coupling magnitude after each full sweep; non-decreasing
    std::vector<double> fidelity_history;
    double final_fidelity = 0.0;
};

// Wavefront matching: per plane, the mask phase is set to the argument of
// the phase-aligned sum over modes of (back-propagated target) x
// conj(forward-propagated input).  Each pointwise update can only increase
// the summed coupling magnitude, which makes the recorded fidelity history
// non-decreasing.  One iteration is a forward then a backward sweep, each
// against freshly stored counter-propagating fields.
DesignResult wavefront_match(const std::vector<OpticalField>& inputs,
                             const std::vector<OpticalField>& targets, int n_planes, int n_iters,
                             const StackGeometry& geom);

// Same sweeps, continuing from an existing stack instead of flat masks.
DesignResult wavefront_refine(PlaneStack stack, const std::vector<OpticalField>& inputs,
                              const std::vector<OpticalField>& targets, int n_iters);

// Realized transformation on a chosen mode basis.
struct TransferMatrix {
    Matrix a;                               // outputs x inputs
    std::vector<double> column_efficiency;  // power coupled into the output set
};

TransferMatrix stack_matrix(const PlaneStack& stack, const std::vector<OpticalField>& inputs,
                            const std::vector<OpticalField>& output_projectors);

// |Tr(A U^dag)| / sqrt(Tr(A A^dag) Tr(U U^dag)); invariant under a global
// phase of either argument.
double frobenius_fidelity(const Matrix& a, const Matrix& u);

// Intensity-only reconstruction: single-input intensities fix |A|, and the
// phases within each row are fitted to phase-diverse probe measurements by
// alternating projections.  Rows are gauged to a real positive leading
// element; the relative phases between rows are not observable.
struct GsResult {
    TransferMatrix transfer;
    std::vector<bool> null_rows;       // rows with no recorded intensity
    bool conditioning_warning = false; // fewer probes than recommended (2M)
    double residual = 0.0;
    int iterations = 0;
};

struct GsProbe {
    Vector input;              // complex pattern injected across all inputs
    Eigen::VectorXd intensities;  // recorded per output
};

GsResult gs_reconstruct(const Eigen::MatrixXd& single_input_intensities,
                        const std::vector<GsProbe>& probes, int max_iters = 300,
                        double tol = 1e-8, int restarts = 5);

// Gauges each row's first element above threshold to be real positive.
Matrix row_gauged(const Matrix& a);

// Separable measurement compiler: one wavefront-matching call per qudit
// layer acting on its digit, boundary planes shared between consecutive
// layers, then joint polish sweeps over the assembled stack with the full
// tensor-product target set (the plane count stays layers*(planes-1)+1).
//
// Spots sit on a d^(N/2) x d^(N-N/2) grid, leading digits along y.  The
// default waist of 0.45 pitch keeps the spot basis near-orthogonal while
// still diffusing across the plane spacing.
struct MeasurementStack {
    PlaneStack stack;
    int plane_count = 0;
    double fidelity = 0.0;  // Frobenius fidelity against the separable target
    Matrix target;
    std::vector<OpticalField> modes;  // spot basis at input and output
};

MeasurementStack compile_measurement_stack(const std::vector<Matrix>& qudit_bases,
                                           const StackGeometry& geom, double spot_pitch_um = 300.0,
                                           double spot_waist_um = 135.0, int planes_per_layer = 3,
                                           int n_iters = 30);

}  // namespace hdmbqc
