#pragma once

// Shared fixtures and brute-force oracles for the test suite.

#include <algorithm>
#include <complex>
#include <utility>

#include "cylkms/correlators.hpp"
#include "cylkms/quadrature.hpp"
#include "cylkms/rng.hpp"
#include "cylkms/smearing.hpp"

namespace cylkms::testing {

inline double rel_diff(complex a, complex b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

// Bump with the geometry used by the KMS studies: support on the t = 0
// line, null half widths a fraction of a unit.
inline TestFunction2D kms_bump(SeededRng& rng, double t0, double x0, const Chart& chart) {
    const double hu = rng.uniform(0.15, 0.3);
    const double hv = rng.uniform(0.15, 0.3);
    const SpacetimePoint c = chart.is_plane()
                                 ? SpacetimePoint::plane(t0, x0)
                                 : SpacetimePoint::cylinder(t0, x0, chart.period);
    return centered_test_function(Diamond(c, hu, hv), rng.uniform(0.7, 0.95),
                                  rng.uniform(0.8, 1.5));
}

// Well separated pair, so the light-cone band of the pairing sits mid-sweep
// and both supports fit inside one period of the standard cylinder.
inline std::pair<TestFunction2D, TestFunction2D> kms_bump_pair(SeededRng& rng,
                                                              const Chart& chart) {
    const double xf = rng.uniform(0.75, 0.95);
    const double separation = rng.uniform(4.4, 4.6);
    TestFunction2D f = kms_bump(rng, 0.0, xf, chart);
    TestFunction2D g = kms_bump(rng, 0.0, xf + separation, chart);
    return {f, g};
}

// Smearing oracle by plain nested Gauss-Legendre over the support boxes.
// Shares nothing with the panelized cross-correlation and Taylor
// subtraction path of SmearEngine beyond the pointwise kernel evaluator.
// The chiral part is isolated from evaluate_null with a fixed reference
// separation, valid for the differentiated (meromorphic) kernels.
inline complex brute_force_smear(const CorrelatorKernel& kernel, const TestFunction2D& f,
                                 const TestFunction2D& g, complex shift,
                                 int panels = 120, int order = 10) {
    const complex ref(7.37, 0.0);
    const complex chiRef = 0.5 * kernel.evaluate_null(ref, ref);
    auto pairSide = [&](const BumpFunction& a, const BumpFunction& b) {
        return integrate_panels(
            [&](double u) {
                const complex inner = integrate_panels(
                    [&](double up) {
                        const complex chi =
                            kernel.evaluate_null(complex(u - up, 0.0) + shift, ref) -
                            chiRef;
                        return b.value(up) * chi;
                    },
                    b.support_min(), b.support_max(), order, panels);
                return a.value(u) * inner;
            },
            a.support_min(), a.support_max(), order, panels);
    };
    const double fIU = integral(f.uFactor), gIU = integral(g.uFactor);
    const double fIV = integral(f.vFactor), gIV = integral(g.vFactor);
    const complex bu = pairSide(f.uFactor, g.uFactor);
    const complex bv = pairSide(f.vFactor, g.vFactor);
    return 0.25 * (bu * fIV * gIV + fIU * gIU * bv);
}

}  // namespace cylkms::testing
