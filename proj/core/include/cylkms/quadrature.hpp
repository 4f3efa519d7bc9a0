#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cylkms {

// Gauss-Legendre rule on [-1, 1].  Nodes are ascending, weights positive.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Returns the n-point Gauss-Legendre rule.  Rules for orders 16, 32, 64 and
// 128 are computed once and cached; other orders are computed on demand.
// Nodes are found by Newton iteration on the Legendre recurrence starting
// from the Chebyshev-like estimate cos(pi*(i - 1/4)/(n + 1/2)), which is
// accurate enough that a handful of iterations reaches machine precision.
const GaussLegendreRule& gauss_legendre(int order);

// Integral of f over [a, b] with a single n-point Gauss-Legendre panel.
template <typename F>
auto integrate(F&& f, double a, double b, int order) {
    const GaussLegendreRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    using R = decltype(f(a));
    R acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

// Integral of f over [a, b] split into `panels` equal panels of `order`
// points each.  Used when the integrand has structure on a scale smaller
// than the full interval.
template <typename F>
auto integrate_panels(F&& f, double a, double b, int order, int panels) {
    using R = decltype(f(a));
    R acc{};
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += integrate(f, a + p * width, a + (p + 1) * width, order);
    return acc;
}

}  // namespace cylkms
