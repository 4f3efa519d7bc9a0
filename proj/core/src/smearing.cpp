#include "cylkms/smearing.hpp"

#include <cmath>
#include <stdexcept>

#include "cylkms/quadrature.hpp"

namespace cylkms {

namespace {

constexpr int kMaxDerivativeOrder = 12;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

BumpFunction::BumpFunction(double c, double r, double a)
    : center(c), radius(r), amplitude(a) {
    if (!(r > 0.0)) throw std::invalid_argument("BumpFunction: radius must be positive");
}

double BumpFunction::value(double x) const {
    const double s = (x - center) / radius;
    const double q = 1.0 - s * s;
    // Below q ~ 1e-12 the profile exp(-1/q) underflows anyway; cutting off
    // early avoids overflow in the intermediate 1/q.
    if (q < 1e-12) return 0.0;
    return amplitude * std::exp(-1.0 / q);
}

double BumpFunction::derivative(double x, int order) const {
    if (order < 0 || order > kMaxDerivativeOrder)
        throw std::invalid_argument("BumpFunction::derivative: unsupported order");
    if (order == 0) return value(x);
    const double s = (x - center) / radius;
    const double q = 1.0 - s * s;
    if (q < 1e-12) return 0.0;
    // phi = -1/(1-s^2) = -(1/2)[1/(1-s) + 1/(1+s)], so
    // phi^{(k)} = -(k!/2)[(1-s)^{-(k+1)} + (-1)^k (1+s)^{-(k+1)}].
    double phi[kMaxDerivativeOrder + 1];
    phi[0] = -1.0 / q;
    double factorial = 1.0;
    double pm = 1.0 / (1.0 - s);
    double pp = 1.0 / (1.0 + s);
    double powm = pm;
    double powp = pp;
    double sign = 1.0;
    for (int k = 1; k <= order; ++k) {
        factorial *= k;
        powm *= pm;
        powp *= pp;
        sign = -sign;
        phi[k] = -0.5 * factorial * (powm + sign * powp);
    }
    // B' = phi' B gives B^{(k+1)} = sum_j C(k,j) phi^{(j+1)} B^{(k-j)}.
    double b[kMaxDerivativeOrder + 1];
    b[0] = std::exp(phi[0]);
    for (int k = 0; k < order; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += binomial(k, j) * phi[j + 1] * b[k - j];
        b[k + 1] = acc;
    }
    return amplitude * b[order] / std::pow(radius, order);
}

double integral(const BumpFunction& b) {
    return integrate_panels([&b](double x) { return b.value(x); }, b.support_min(),
                            b.support_max(), 64, 6);
}

TestFunction2D::TestFunction2D(BumpFunction u, BumpFunction v, Diamond d)
    : uFactor(u), vFactor(v), region(d) {
    const NullCoords c = to_null(region.center);
    const bool uInside = c.U - region.halfWidthU <= u.support_min() &&
                         u.support_max() <= c.U + region.halfWidthU;
    const bool vInside = c.V - region.halfWidthV <= v.support_min() &&
                         v.support_max() <= c.V + region.halfWidthV;
    if (!uInside || !vInside)
        throw std::invalid_argument(
            "TestFunction2D: factor supports must lie inside the region in "
            "null coordinates");
}

double TestFunction2D::value(const SpacetimePoint& p) const {
    if (!(p.chart == chart()))
        throw std::invalid_argument("TestFunction2D::value: chart mismatch");
    // On the cylinder the support may straddle the seam, so probe the three
    // nearby representatives; at most one contributes because the region
    // fits inside a single chart.
    const int shifts = chart().is_cylinder() ? 1 : 0;
    double acc = 0.0;
    for (int k = -shifts; k <= shifts; ++k) {
        const double x = p.x + k * chart().period;
        acc += uFactor.value(p.t - x) * vFactor.value(p.t + x);
    }
    return acc;
}

TestFunction2D centered_test_function(const Diamond& region, double shrink,
                                      double amplitude) {
    if (!(shrink > 0.0) || !(shrink <= 1.0))
        throw std::invalid_argument("centered_test_function: shrink must be in (0, 1]");
    const NullCoords c = to_null(region.center);
    BumpFunction u(c.U, shrink * region.halfWidthU, amplitude);
    BumpFunction v(c.V, shrink * region.halfWidthV, 1.0);
    return TestFunction2D(u, v, region);
}

double integral(const TestFunction2D& f) {
    return 0.5 * integral(f.uFactor) * integral(f.vFactor);
}

TestFunction2D pushforward_pi_inv(const TestFunction2D& cylinderFn,
                                  const DeckTransformation& branch) {
    if (!cylinderFn.chart().is_cylinder())
        throw std::invalid_argument("pushforward_pi_inv: expected a cylinder function");
    if (branch.period != cylinderFn.chart().period)
        throw std::invalid_argument("pushforward_pi_inv: branch period mismatch");
    const double shift = static_cast<double>(branch.n) * branch.period;
    // x -> x + nL sends U to U - nL and V to V + nL.
    BumpFunction u(cylinderFn.uFactor.center - shift, cylinderFn.uFactor.radius,
                   cylinderFn.uFactor.amplitude);
    BumpFunction v(cylinderFn.vFactor.center + shift, cylinderFn.vFactor.radius,
                   cylinderFn.vFactor.amplitude);
    Diamond region(branch.apply(unwrap(cylinderFn.region.center)),
                   cylinderFn.region.halfWidthU, cylinderFn.region.halfWidthV);
    return TestFunction2D(u, v, region);
}

TestFunction2D pushforward_time(const TestFunction2D& f, double tau) {
    BumpFunction u(f.uFactor.center + tau, f.uFactor.radius, f.uFactor.amplitude);
    BumpFunction v(f.vFactor.center + tau, f.vFactor.radius, f.vFactor.amplitude);
    const SpacetimePoint c = f.region.center;
    SpacetimePoint shifted = c.chart.is_cylinder()
                                 ? SpacetimePoint::cylinder(c.t + tau, c.x, c.chart.period)
                                 : SpacetimePoint::plane(c.t + tau, c.x);
    return TestFunction2D(u, v, Diamond(shifted, f.region.halfWidthU, f.region.halfWidthV));
}

TestFunction2D pushforward_deck(const TestFunction2D& planeFn,
                                const DeckTransformation& deck) {
    if (!planeFn.chart().is_plane())
        throw std::invalid_argument("pushforward_deck: expected a plane function");
    const double shift = static_cast<double>(deck.n) * deck.period;
    BumpFunction u(planeFn.uFactor.center - shift, planeFn.uFactor.radius,
                   planeFn.uFactor.amplitude);
    BumpFunction v(planeFn.vFactor.center + shift, planeFn.vFactor.radius,
                   planeFn.vFactor.amplitude);
    Diamond region(deck.apply(planeFn.region.center), planeFn.region.halfWidthU,
                   planeFn.region.halfWidthV);
    return TestFunction2D(u, v, region);
}

}  // namespace cylkms
