#pragma once

#include <vector>

#include "cylkms/numerics.hpp"

namespace cylkms {

// Uniformly sampled complex time series h(start + k*step).
struct SampledSeries {
    double start = 0.0;
    double step = 0.0;
    std::vector<complex> values;

    double time(std::size_t k) const { return start + static_cast<double>(k) * step; }
    std::size_t size() const { return values.size(); }
};

// Discrete transform samples on a uniform symmetric frequency grid.
struct SpectralSample {
    std::vector<double> frequencies;
    std::vector<complex> amplitudes;
    double gridStep = 0.0;

    std::size_t size() const { return amplitudes.size(); }
};

// Riemann approximation of integral h(t) e^{+i w t} dt on the symmetric
// frequency grid w = k * (2 pi / (N * step)), |k| <= floor(N/2), optionally
// clipped to |w| <= maxFrequency when maxFrequency > 0.
//
// The input must have decayed at both ends of the grid (below
// 1e-12 * max(1, max|h|)); otherwise the truncation bias is unquantified
// and a TruncationError is thrown.  Empty input raises EmptySignalError.
SpectralSample fourier_transform(const SampledSeries& h, double maxFrequency = 0.0);

// Multiplies the outer edgeFraction of the series on each side by a raised
// cosine falling to zero at the endpoints.  Used to meet the transform's
// decay precondition for slowly (power-law) decaying series.
SampledSeries cosine_tapered(const SampledSeries& h, double edgeFraction);

}  // namespace cylkms
