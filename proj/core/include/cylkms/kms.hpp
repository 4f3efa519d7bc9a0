#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cylkms/covariance.hpp"
#include "cylkms/fourier.hpp"

namespace cylkms {

// Uniform real time grid t_k = start + k step, k = 0 .. count-1.
struct TimeGrid {
    double start = 0.0;
    double step = 0.0;
    int count = 0;

    static TimeGrid symmetric(double halfWidth, double step);
};

// The two correlator time series of a state and a test-function pair:
//   forward(t)  = omega( Phi(f) . Phi(g) time-shifted by t )
//   reversed(t) = omega( Phi(g) time-shifted by t . Phi(f) )
// Thermal equilibrium ties them by reversed(t - i beta) = forward(t).
struct CorrelatorPair {
    SampledSeries forward;
    SampledSeries reversed;
};

// Builds both series with one smearing engine per side.  Throws
// TruncationError unless both series have decayed below
// decayTolerance * max at the grid ends (widen the grid, or taper
// afterwards for slowly decaying kernels and pass a looser tolerance).
CorrelatorPair correlator_timeseries(const QuasiFreeState& state, const TestFunction2D& f,
                                     const TestFunction2D& g, const TimeGrid& grid,
                                     double decayTolerance = 1e-10);

struct KmsReport {
    // Frequencies (in the sign convention where the forward transform of a
    // ground-state series is supported at non-negative values) where the
    // signal exceeded the noise floor, with the detailed-balance residual
    //   | reversed^(w) - e^{-beta w} forward^(w) | / max |forward^|
    // at each, both sides rescaled by e^{beta w} at negative frequencies so
    // the Boltzmann weight always damps.
    std::vector<double> frequencies;
    std::vector<double> ratioResiduals;
    double maxResidual = 0.0;
    double complexTimeResidual = 0.0;
    // Lifted runs only: worst pointwise gap between the swept series and
    // per-sample evaluation through the algebra morphisms.
    double transportDeviation = 0.0;
    double tolerance = 1e-4;
    bool pass = false;

    double beta = 0.0;
    std::string kernelLabel;
    std::string functionDescriptor;
};

// Frequency-domain check of thermal equilibrium.  Residuals are evaluated
// on the band where |forward^| is at least 1e-8 of its peak (the
// exponential weight amplifies transform noise outside it).  Throws
// EmptySignalError when the forward transform peak is below 1e-14.
// complexTimeResidual is left at zero; orchestrators fill it.
KmsReport detailed_balance_check(const SampledSeries& forward,
                                 const SampledSeries& reversed, double beta,
                                 double tolerance);

// Direct analytic continuation check: max over the sample times of
// |forward(t) - reversed(t - i beta)| / max |forward|, with both sides
// evaluated by smearing the closed-form kernel.  A shift outside the
// kernel's analyticity strip raises AnalyticityError.
double complex_time_check(const CorrelatorKernel& kernel, double beta,
                          const TestFunction2D& f, const TestFunction2D& g,
                          std::span<const double> tSamples);

struct PositiveFrequencyReport {
    std::vector<double> frequencies;
    std::vector<double> relativeMagnitudes;  // |forward^(w)| / max
    double cutoff = 0.0;                     // bandwidth scale of the bumps
    double maxBelowCutoff = 0.0;             // worst magnitude at w < -cutoff
    double tolerance = 1e-4;
    bool pass = false;
};

// Spectral support of the plane vacuum correlator: after tapering the
// slowly decaying series, its transform must vanish (relative to peak)
// below -cutoff, cutoff = 2 / min bump radius.
PositiveFrequencyReport positive_frequency_check(const TestFunction2D& f,
                                                 const TestFunction2D& g, Epsilon eps);

// Full plane-side verification: thermal state at inverse temperature beta,
// detailed balance over the standard grid plus the complex-time
// continuation at t in {-2, ..., 2}.
KmsReport verify_thermal_kms(double beta, const TestFunction2D& f,
                             const TestFunction2D& g, double tolerance = 1e-4);

// Same verification for the cylinder state pulled back through the
// branch-n lift of a plane thermal state.  The report additionally carries
// transportDeviation: on a thinned subgrid the swept series is compared
// against evaluation that time-translates on the cylinder first and pulls
// back per point.
KmsReport verify_lifted_kms(double beta, const TestFunction2D& fCylinder,
                            const TestFunction2D& gCylinder, std::int64_t branch,
                            double tolerance = 1e-4);

}  // namespace cylkms
