#include "cylkms/fourier.hpp"

#include <cmath>
#include <stdexcept>

#include "cylkms/errors.hpp"

namespace cylkms {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const std::vector<complex>& v) {
    double m = 0.0;
    for (const complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

SpectralSample fourier_transform(const SampledSeries& h, double maxFrequency) {
    const std::size_t n = h.size();
    if (n == 0) throw EmptySignalError("fourier_transform: empty series");
    if (!(h.step > 0.0))
        throw std::invalid_argument("fourier_transform: step must be positive");
    const double peak = max_abs(h.values);
    const double edge = 1e-12 * std::max(1.0, peak);
    if (std::abs(h.values.front()) > edge || std::abs(h.values.back()) > edge)
        throw TruncationError(
            "fourier_transform: series has not decayed at the grid ends; "
            "widen the grid or taper the series");

    const double dw = 2.0 * kPi / (static_cast<double>(n) * h.step);
    std::size_t m = n / 2;
    if (maxFrequency > 0.0)
        m = std::min(m, static_cast<std::size_t>(std::floor(maxFrequency / dw)));

    SpectralSample out;
    out.gridStep = dw;
    out.frequencies.reserve(2 * m + 1);
    out.amplitudes.reserve(2 * m + 1);
    for (std::size_t j = 0; j < 2 * m + 1; ++j) {
        const double w = (static_cast<double>(j) - static_cast<double>(m)) * dw;
        // Accumulate sum h_k e^{iw t_k} with an incremental phase rotation,
        // re-anchored on an exact exponential every block to stop the
        // rotation's rounding drift from growing with n.
        constexpr std::size_t kBlock = 256;
        const complex ratio = std::polar(1.0, w * h.step);
        complex acc = 0.0;
        for (std::size_t k0 = 0; k0 < n; k0 += kBlock) {
            complex phase = std::polar(1.0, w * h.time(k0));
            const std::size_t k1 = std::min(n, k0 + kBlock);
            complex block = 0.0;
            for (std::size_t k = k0; k < k1; ++k) {
                block += h.values[k] * phase;
                phase *= ratio;
            }
            acc += block;
        }
        out.frequencies.push_back(w);
        out.amplitudes.push_back(acc * h.step);
    }
    return out;
}

SampledSeries cosine_tapered(const SampledSeries& h, double edgeFraction) {
    if (!(edgeFraction > 0.0) || !(edgeFraction < 0.5))
        throw std::invalid_argument("cosine_tapered: edge fraction must be in (0, 0.5)");
    SampledSeries out = h;
    const std::size_t n = out.size();
    const std::size_t edge = static_cast<std::size_t>(std::floor(edgeFraction * n));
    if (edge < 2) return out;
    for (std::size_t k = 0; k < edge; ++k) {
        // Rises from exactly 0 at the first sample to 1 at the window edge.
        const double s = static_cast<double>(k) / static_cast<double>(edge);
        const double w = 0.5 * (1.0 - std::cos(kPi * s));
        out.values[k] *= w;
        out.values[n - 1 - k] *= w;
    }
    return out;
}

}  // namespace cylkms
