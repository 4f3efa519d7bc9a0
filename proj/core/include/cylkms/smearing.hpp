#pragma once

#include "cylkms/geometry.hpp"

namespace cylkms {

// The standard smooth bump amplitude * exp(-1/(1-s^2)), s = (x-center)/radius,
// supported on (center-radius, center+radius).  All derivatives exist and
// vanish identically outside the support.
struct BumpFunction {
    double center = 0.0;
    double radius = 1.0;
    double amplitude = 1.0;

    BumpFunction(double center, double radius, double amplitude = 1.0);

    double value(double x) const;
    // k-th derivative in x, exact up to rounding.  The profile factors as
    // exp(phi) with phi = -1/(1-s^2); phi's derivatives have a closed form
    // and the exponential's follow from the Leibniz recursion.
    double derivative(double x, int order) const;
    double support_min() const { return center - radius; }
    double support_max() const { return center + radius; }
};

// Integral of the bump over its support (fixed panelized Gauss-Legendre).
double integral(const BumpFunction& b);

// A product test function f(p) = u(U(p)) * v(V(p)) supported inside a
// diamond.  Product form in null coordinates keeps every smearing integral
// separable for the chiral kernels used here.
struct TestFunction2D {
    BumpFunction uFactor;
    BumpFunction vFactor;
    Diamond region;

    // Throws if the support rectangle of the factors is not contained in
    // the region in null coordinates.
    TestFunction2D(BumpFunction u, BumpFunction v, Diamond region);

    const Chart& chart() const { return region.chart(); }
    // Value in the function's own chart; on the cylinder the representative
    // inside the (seam-aware) region is used.
    double value(const SpacetimePoint& p) const;
};

// Test function with both bump factors centered on the diamond's center,
// radii equal to shrink * halfwidth.  Convenience for fixtures.
TestFunction2D centered_test_function(const Diamond& region, double shrink,
                                      double amplitude = 1.0);

// Integral over spacetime, = (1/2) * (integral of u) * (integral of v)
// from the null-coordinate Jacobian dt dx = dU dV / 2.
double integral(const TestFunction2D& f);

// Pushforward along the branch-n inverse of the covering projection: the
// returned plane function satisfies f_p(q) = f_c(pi(q)) on the branch-n
// preimage diamond and vanishes elsewhere.
TestFunction2D pushforward_pi_inv(const TestFunction2D& cylinderFn,
                                  const DeckTransformation& branch);

// Pushforward along time translation by tau: (result)(q) = f(q shifted by
// -tau), i.e. both null centers move forward by tau.
TestFunction2D pushforward_time(const TestFunction2D& f, double tau);

// Pushforward along a deck translation on the plane.
TestFunction2D pushforward_deck(const TestFunction2D& planeFn,
                                const DeckTransformation& deck);

}  // namespace cylkms
