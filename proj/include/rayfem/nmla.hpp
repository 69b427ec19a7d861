#pragma once

#include "rayfem/types.hpp"
#include "rayfem/wavefield.hpp"

#include <stdexcept>
#include <vector>

namespace rayfem {

// Raised when the sampling circle does not fit in the field's mesh (or is
// capped below a usable size).
struct NmlaDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Impedance data U(theta) = (1/(ik)) du/dr + u sampled on a circle of radius
// r around x0, at M uniform angles; alpha = k(x0) r.
struct ImpedanceSamples {
    Vec2 center;
    double radius = 0.0;
    double alpha = 0.0;
    std::vector<cplx> values;  // U(theta_m), theta_m = 2 pi m / M

    int M() const { return static_cast<int>(values.size()); }
};

// Band-limited filtered signal BU(theta_m).
struct FilteredSignal {
    std::vector<cplx> values;
    int L = 0;  // truncation order L_alpha

    int M() const { return static_cast<int>(values.size()); }
    double resolutionWidth() const { return 2.0 * kPi / (2 * L + 1); }
};

// Peaks of |BU|: direction angles with complex amplitude estimates.
struct DirectionEstimate {
    std::vector<double> angles;      // sorted ascending, in [0, 2pi)
    std::vector<cplx> amplitudes;    // BU at the detected peaks
    std::vector<double> peakValues;  // |BU| there
    double resolutionWidth = 0.0;

    bool empty() const { return angles.empty(); }
    std::vector<Vec2> directions() const;
};

// Fourier truncation order max(1, floor(alpha), floor(alpha + alpha^{1/3} - 2.5)).
int l_alpha(double alpha);

ImpedanceSamples sample_impedance(const WaveField& field, Vec2 x0, double r, int M, double omega,
                                  const WaveSpeedFn& c);

// Filter: BU(theta) = 1/(2L+1) sum_l (FU)_l e^{il theta} / (i^l (J_l - i J_l')),
// with (FU)_l the discrete Fourier coefficients of the samples. (The i^l
// factor is the one under which a superposition of plane waves filters to a
// sum of Dirichlet kernels S_L centered at the propagation angles.)
FilteredSignal nmla_filter(const ImpedanceSamples& samples);

struct PeakConfig {
    double threshold = 0.5;   // relative to max |BU|, in (0,1)
    double abs_floor = 1e-8;  // below this max |BU|, report nothing
};

// Local maxima of |BU| above threshold * max, refined by a quadratic fit over
// three adjacent samples. Peaks closer than the resolution width merge into
// the stronger one; a much weaker peak within the first side-lobe distance of
// a stronger one is treated as its side lobe and dropped.
DirectionEstimate sharp_peak_locations(const FilteredSignal& signal, const PeakConfig& peaks);

struct NmlaConfig {
    double radius_scale = 1.0;       // C_r in r = C_r omega^{-1/2}
    double radius_wavelengths = 4.0; // lower bound r >= this many local wavelengths
    double oversampling = 4.0;       // C_M in M = max(2L+2, C_M ceil(alpha))
    double cap_margin_cells = 2.0;   // circle kept this many h away from the mesh edge
    double min_alpha = 3.0;          // below this the estimate is refused
    PeakConfig peaks;
};

// Full pipeline at one observation point: choose the radius, sample, filter,
// pick peaks. Throws NmlaDomainError when the circle cannot fit.
DirectionEstimate nmla(Vec2 x0, const WaveField& field, double omega, const WaveSpeedFn& c,
                       const NmlaConfig& cfg);

}  // namespace rayfem
