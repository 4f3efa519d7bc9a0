#include "cylkms/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cylkms {

Chart Chart::cylinder(double period) {
    if (!(period > 0.0))
        throw std::invalid_argument("Chart::cylinder: period must be positive");
    return Chart{ChartKind::Cylinder, period};
}

double wrap_coordinate(double x, double period) {
    double r = x - period * std::floor(x / period);
    // floor can land exactly on period when x is a tiny negative multiple.
    if (r >= period) r -= period;
    if (r < 0.0) r += period;
    return r;
}

SpacetimePoint SpacetimePoint::cylinder(double t, double x, double period) {
    Chart chart = Chart::cylinder(period);
    return SpacetimePoint{t, wrap_coordinate(x, period), chart};
}

NullCoords to_null(const SpacetimePoint& p) { return NullCoords{p.t - p.x, p.t + p.x}; }

SpacetimePoint from_null(const NullCoords& n, const Chart& chart) {
    const double t = 0.5 * (n.V + n.U);
    const double x = 0.5 * (n.V - n.U);
    if (chart.is_cylinder()) return SpacetimePoint::cylinder(t, x, chart.period);
    return SpacetimePoint::plane(t, x);
}

Diamond::Diamond(SpacetimePoint c, double a, double b)
    : center(c), halfWidthU(a), halfWidthV(b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("Diamond: null half widths must be positive");
    if (center.chart.is_cylinder() && !(a + b < center.chart.period))
        throw std::invalid_argument(
            "Diamond: spatial extent must be smaller than the period so the "
            "diamond fits inside one covering chart");
}

bool Diamond::contains(const SpacetimePoint& p) const {
    if (!(p.chart == center.chart)) return false;
    const NullCoords c = to_null(center);
    const int shifts = center.chart.is_cylinder() ? 1 : 0;
    for (int k = -shifts; k <= shifts; ++k) {
        const double x = p.x + k * center.chart.period;
        const double du = (p.t - x) - c.U;
        const double dv = (p.t + x) - c.V;
        if (std::abs(du) < halfWidthU && std::abs(dv) < halfWidthV) return true;
    }
    return false;
}

CoveringMap::CoveringMap(double p) : period(p) {
    if (!(period > 0.0))
        throw std::invalid_argument("CoveringMap: period must be positive");
}

SpacetimePoint CoveringMap::project(const SpacetimePoint& planePoint) const {
    if (!planePoint.chart.is_plane())
        throw std::invalid_argument("CoveringMap::project: expected a plane point");
    return SpacetimePoint::cylinder(planePoint.t, planePoint.x, period);
}

SpacetimePoint DeckTransformation::apply(const SpacetimePoint& planePoint) const {
    if (!planePoint.chart.is_plane())
        throw std::invalid_argument("DeckTransformation: deck moves act on plane points");
    return SpacetimePoint::plane(planePoint.t, planePoint.x + static_cast<double>(n) * period);
}

DeckTransformation DeckTransformation::compose(const DeckTransformation& other) const {
    if (period != other.period)
        throw std::invalid_argument("DeckTransformation: mismatched periods");
    return DeckTransformation{n + other.n, period};
}

SpacetimePoint unwrap(const SpacetimePoint& cylinderPoint) {
    if (!cylinderPoint.chart.is_cylinder())
        throw std::invalid_argument("unwrap: expected a cylinder point");
    return SpacetimePoint::plane(cylinderPoint.t, cylinderPoint.x);
}

SpacetimePoint wrap(const SpacetimePoint& planePoint, double period) {
    return CoveringMap(period).project(planePoint);
}

std::vector<Diamond> preimage_diamonds(const Diamond& cylinderDiamond, int count) {
    if (!cylinderDiamond.chart().is_cylinder())
        throw std::invalid_argument("preimage_diamonds: expected a cylinder diamond");
    if (count < 1) throw std::invalid_argument("preimage_diamonds: count must be positive");
    const double L = cylinderDiamond.chart().period;
    const SpacetimePoint base = unwrap(cylinderDiamond.center);
    std::vector<Diamond> result;
    result.reserve(count);
    // Branch order 0, +1, -1, +2, -2, ... so truncating keeps the diamonds
    // nearest the fundamental domain.
    for (int i = 0; i < count; ++i) {
        const int n = (i % 2 == 1) ? (i + 1) / 2 : -(i / 2);
        DeckTransformation deck{n, L};
        result.emplace_back(deck.apply(base), cylinderDiamond.halfWidthU,
                            cylinderDiamond.halfWidthV);
    }
    return result;
}

}  // namespace cylkms
