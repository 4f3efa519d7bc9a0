#pragma once

#include <cstdint>
#include <vector>

namespace cylkms {

// Background chart for a point or region.  The cylinder chart carries the
// spatial period; the plane chart does not use it.
enum class ChartKind { Plane, Cylinder };

struct Chart {
    ChartKind kind = ChartKind::Plane;
    double period = 0.0;  // spatial period L, cylinder only

    static Chart plane() { return Chart{ChartKind::Plane, 0.0}; }
    static Chart cylinder(double period);

    bool is_plane() const { return kind == ChartKind::Plane; }
    bool is_cylinder() const { return kind == ChartKind::Cylinder; }

    friend bool operator==(const Chart& a, const Chart& b) {
        if (a.kind != b.kind) return false;
        return a.kind == ChartKind::Plane || a.period == b.period;
    }
};

// Floored modulo, so the result lies in [0, period) for any sign of x.
double wrap_coordinate(double x, double period);

// A point of 2d Minkowski spacetime or of the spatial cylinder.  Cylinder
// points are stored with the canonical representative x in [0, L).
struct SpacetimePoint {
    double t = 0.0;
    double x = 0.0;
    Chart chart = Chart::plane();

    static SpacetimePoint plane(double t, double x) {
        return SpacetimePoint{t, x, Chart::plane()};
    }
    static SpacetimePoint cylinder(double t, double x, double period);
};

// Null coordinates U = t - x, V = t + x.
struct NullCoords {
    double U = 0.0;
    double V = 0.0;
};

NullCoords to_null(const SpacetimePoint& p);
SpacetimePoint from_null(const NullCoords& n, const Chart& chart);

// An open diamond |U - U_c| < a, |V - V_c| < b around a center point.  On
// the cylinder the total spatial width a + b must stay below the period so
// the diamond fits inside a single covering chart.
struct Diamond {
    SpacetimePoint center;
    double halfWidthU = 0.0;
    double halfWidthV = 0.0;

    Diamond(SpacetimePoint center, double halfWidthU, double halfWidthV);

    const Chart& chart() const { return center.chart; }
    double spatial_extent() const { return halfWidthU + halfWidthV; }
    // Membership in the same chart as the diamond.  On the cylinder the
    // test shifts x by -L, 0, L to cover diamonds straddling the seam.
    bool contains(const SpacetimePoint& p) const;
};

// The covering projection (t, x) -> (t, x mod L) from the plane onto the
// cylinder of period L.
struct CoveringMap {
    double period;

    explicit CoveringMap(double period);
    SpacetimePoint project(const SpacetimePoint& planePoint) const;
};

// Spatial translation by n periods, the deck group of the covering.  Acts
// on plane points only; projecting before and after gives the same
// cylinder point.
struct DeckTransformation {
    std::int64_t n = 0;
    double period = 0.0;

    static DeckTransformation identity(double period) { return {0, period}; }
    SpacetimePoint apply(const SpacetimePoint& planePoint) const;
    DeckTransformation compose(const DeckTransformation& other) const;
    DeckTransformation inverse() const { return {-n, period}; }
};

// Time translation by tau.  Defined on both charts and commutes with the
// covering projection and with every deck transformation.
struct TimeTranslation {
    double tau = 0.0;

    SpacetimePoint apply(const SpacetimePoint& p) const {
        return SpacetimePoint{p.t + tau, p.x, p.chart};
    }
    TimeTranslation compose(const TimeTranslation& other) const {
        return TimeTranslation{tau + other.tau};
    }
};

// Re-interprets a cylinder point as the plane point with the same canonical
// coordinates (the branch-0 preimage) and back.
SpacetimePoint unwrap(const SpacetimePoint& cylinderPoint);
SpacetimePoint wrap(const SpacetimePoint& planePoint, double period);

// The first `count` preimage diamonds of a cylinder diamond under the
// covering map, on branches n = 0, +1, -1, +2, -2, ...  They are pairwise
// disjoint and each projects onto the input diamond.
std::vector<Diamond> preimage_diamonds(const Diamond& cylinderDiamond, int count);

}  // namespace cylkms
