#pragma once

#include "cylkms/numerics.hpp"

namespace cylkms {

enum class TailCorrection { None, IntegralTail };

// Truncation control for image and mode sums.
struct SeriesSpec {
    int truncation = 1;
    TailCorrection tail = TailCorrection::None;

    SeriesSpec(int truncation, TailCorrection tail);
};

// Symmetric lattice sum sum_{n=-N..N} (z - n*step)^{-2}.  With
// TailCorrection::IntegralTail the |n| > N remainder is replaced by its
// Euler-Maclaurin estimate (exact integral + half endpoint - derivative
// correction), improving the raw 1/N truncation error to roughly 1/N^5.
// The step may be complex (purely imaginary steps give the thermal,
// imaginary-time lattice).  z must not sit on the lattice.
complex lattice_inverse_square(complex z, complex step, const SeriesSpec& spec);

// Partial-fraction series for the cotangent,
//   cot z ~ 1/z + 2z sum_{k=1..K} 1/(z^2 - k^2 pi^2),
// optionally with the Euler-Maclaurin tail.  z must avoid multiples of pi.
complex cot_series(complex z, int terms, TailCorrection tail);

}  // namespace cylkms
