#pragma once

#include <cstdint>
#include <vector>

#include "hdmbqc/common.hpp"

namespace hdmbqc {

// Physical layout of the circular apertures carved into the binary mask.
// Both photons' apertures live on one grid: rows*cols == 2*M.  Flattening is
// row-major with the origin at the top-left aperture.
struct ApertureGrid {
    int rows = 0;
    int cols = 0;
    double pitch_um = 0.0;
    double radius_um = 0.0;

    void validate(int total_modes) const;  // total_modes = 2*M
    // Center of aperture i relative to the grid center, in micrometers.
    std::pair<double, double> center_um(int i) const;
};

// Mode bookkeeping for one photon pair: d-level qudits, N qudits per photon,
// M = d^N spatial modes per photon.
struct EncodingSpec {
    int d = 2;
    int N = 1;
    ApertureGrid grid;

    int modes_per_photon() const { return modes_; }

    static EncodingSpec make(int d, int N, ApertureGrid grid);
    // Convenience for tests and synthetic states: derives a rows=2, cols=M
    // grid with default 300um pitch / 100um radius apertures.
    static EncodingSpec make_bare(int d, int N);

  private:
    int modes_ = 0;
};

// Digit string labelling one photon's qudits, most significant digit first
// (digit 0 is qudit 1).  Digits are 0-based, each in [0, d-1].
struct QuditString {
    std::vector<int> digits;
};

// Big-endian mixed-radix decomposition of a mode index.
QuditString index_to_digits(int m, const EncodingSpec& spec);

// Exact inverse of index_to_digits.
int digits_to_index(const QuditString& q, const EncodingSpec& spec);

// Aperture paired with i by momentum conservation: the point reflection of
// i through the grid center.  An involution on [0, 2M); photon A's aperture m
// pairs with photon B's aperture 2M-1-m, both carrying mode label m.
int partner_aperture(int i, const ApertureGrid& grid);

}  // namespace hdmbqc
