#include "cylkms/series.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cylkms/errors.hpp"

namespace cylkms {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

SeriesSpec::SeriesSpec(int n, TailCorrection t) : truncation(n), tail(t) {
    if (n < 1) throw std::invalid_argument("SeriesSpec: truncation must be at least 1");
}

complex lattice_inverse_square(complex z, complex step, const SeriesSpec& spec) {
    if (step == complex(0.0, 0.0))
        throw std::invalid_argument("lattice_inverse_square: step must be nonzero");
    const int n = spec.truncation;
    std::vector<complex> terms;
    terms.reserve(2 * n + 1);
    for (int k = -n; k <= n; ++k) {
        const complex d = z - static_cast<double>(k) * step;
        if (d == complex(0.0, 0.0))
            throw SingularityError("lattice_inverse_square: z lies on the lattice");
        terms.push_back(1.0 / (d * d));
    }
    complex sum = pairwise_sum(std::span<const complex>(terms));
    if (spec.tail == TailCorrection::IntegralTail) {
        // Remainder sum_{x>=a} f(x) with f(x) = (z-xs)^{-2} + (z+xs)^{-2},
        // a = N+1, estimated by integral + f(a)/2 - f'(a)/12.  The exact
        // integral (1/s)[1/(as-z) + 1/(as+z)] is required; its leading
        // 2/(a s^2) approximation is not accurate enough at these N.
        const double a = static_cast<double>(n) + 1.0;
        const complex as = a * step;
        const complex fm = 1.0 / ((z - as) * (z - as));
        const complex fp = 1.0 / ((z + as) * (z + as));
        const complex dm = (z - as) * (z - as) * (z - as);
        const complex dp = (z + as) * (z + as) * (z + as);
        const complex integral = (1.0 / (as - z) + 1.0 / (as + z)) / step;
        const complex fprime = 2.0 * step * (1.0 / dm - 1.0 / dp);
        sum += integral + 0.5 * (fm + fp) - fprime / 12.0;
    }
    return sum;
}

complex cot_series(complex z, int terms, TailCorrection tail) {
    if (terms < 1) throw std::invalid_argument("cot_series: need at least one term");
    const complex zpi = z / kPi;
    const double distance = std::abs(zpi - std::round(zpi.real()));
    if (distance < 1e-14) throw SingularityError("cot_series: z is at a pole of cot");
    std::vector<complex> parts;
    parts.reserve(terms);
    for (int k = 1; k <= terms; ++k) {
        const double kp = static_cast<double>(k) * kPi;
        parts.push_back(1.0 / (z * z - kp * kp));
    }
    complex sum = 1.0 / z + 2.0 * z * pairwise_sum(std::span<const complex>(parts));
    if (tail == TailCorrection::IntegralTail) {
        // Remainder sum_{k>=a} t(k), t(x) = 2z/(z^2 - x^2 pi^2), a = K+1,
        // with the same Euler-Maclaurin estimate as the lattice sum.
        const double a = static_cast<double>(terms) + 1.0;
        const complex den = z * z - a * a * kPi * kPi;
        const complex integral = -std::log((kPi * a + z) / (kPi * a - z)) / kPi;
        const complex ta = 2.0 * z / den;
        const complex tprime = 4.0 * z * kPi * kPi * a / (den * den);
        sum += integral + 0.5 * ta - tprime / 12.0;
    }
    return sum;
}

}  // namespace cylkms
