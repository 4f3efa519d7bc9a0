#pragma once

#include <memory>

#include "cylkms/numerics.hpp"
#include "cylkms/series.hpp"
#include "cylkms/smearing.hpp"

namespace cylkms {

// Strictly positive regulator of the i-epsilon prescription.  Every
// evaluator keeps epsilon finite and explicit; limits are probed by
// decreasing sequences, never by setting epsilon to zero.
struct Epsilon {
    double value;
    explicit Epsilon(double v);
};

// Two-point function of the plane vacuum at null separations dU, dV:
//   -(1/4pi) ln[(dU - i eps)(dV - i eps)]
// with the principal branch taken of the product (not of each factor;
// the product form is the one whose boundary values satisfy hermiticity).
complex w2_plane_vacuum(complex dU, complex dV, Epsilon eps);

// Cylinder vacuum counterpart,
//   -(1/4pi) ln[(1 - e^{-i(2pi/L)(dU - i eps)})(1 - e^{-i(2pi/L)(dV - i eps)})],
// principal branch of the product.  Periodic under dU -> dU + L.
complex w2_cylinder_vacuum(complex dU, complex dV, double period, Epsilon eps);

// Chiral twice-differentiated kernels (one null argument each).
complex dd_plane_vacuum(complex d, Epsilon eps);                  // -1/(4pi (d-i eps)^2)
complex dd_cylinder_closed(complex d, double period, Epsilon eps);  // sine closed form
complex dd_plane_thermal(complex d, double beta, Epsilon eps);      // sinh closed form

// Spatial image sum sum_n -1/(4pi (d - nL - i eps)^2), optionally with the
// Euler-Maclaurin tail.  Converges to dd_cylinder_closed.
complex dd_image_sum(complex d, double period, Epsilon eps, const SeriesSpec& spec);

// Spatial image sum of dd_plane_thermal with analytic (coth) tail; doubly
// periodic in real period L and imaginary period beta.
complex dd_cylinder_thermal(complex d, double beta, double period, Epsilon eps,
                            const SeriesSpec& spec);

// Evaluation grid for the periodization comparison: (t, t') rectangle at
// fixed spatial positions x, x'.
struct DiscrepancyGrid {
    double tMin, tMax;
    int tCount;
    double tPrimeMin, tPrimeMax;
    int tPrimeCount;
    double x, xPrime;
};

// A grid inside one period that stays away from the light-cone set.
DiscrepancyGrid default_discrepancy_grid(double period);

struct DiscrepancyReport {
    AffineFit2 fit;                  // delta ~ a + b t + c t'
    double maxResidual;              // worst deviation from the affine model
    double secondTimeDerivative;     // max |d^2 delta / dt^2| by finite differences
};

// Difference between the cylinder vacuum two-point function and the
// sine-periodized expression -(1/4pi) ln[sin(pi(dU-i eps)/L) sin(...)],
// fitted to an affine function of (t, t').  The difference carries the
// branch bookkeeping of the logarithms; it is affine in the times, so both
// expressions share the same twice-differentiated kernel.
DiscrepancyReport periodization_discrepancy(const DiscrepancyGrid& grid, double period,
                                            Epsilon eps);

namespace detail {
class ChiralKernel;
}

// A translation-invariant two-point kernel, evaluated at complex time and
// real space separation.  Integrated kernels are the logarithmic two-point
// functions; Differentiated kernels are the chiral d_U d_U' + d_V d_V'
// forms, which stay meromorphic and are the objects smeared against test
// functions.  Thermal kinds exist at the Differentiated level only (their
// integrated form would carry the massless zero-mode ambiguity).
class CorrelatorKernel {
  public:
    enum class Kind { PlaneVacuum, CylinderVacuum, PlaneThermal, CylinderThermal, ImageSeries };
    enum class Level { Integrated, Differentiated };

    static CorrelatorKernel plane_vacuum(Level level, Epsilon eps);
    static CorrelatorKernel cylinder_vacuum(Level level, double period, Epsilon eps);
    static CorrelatorKernel plane_thermal(double beta, Epsilon eps);
    static CorrelatorKernel cylinder_thermal(double beta, double period, Epsilon eps,
                                             const SeriesSpec& spec);
    // Spatially periodized copy of a plane kernel (vacuum or thermal,
    // Differentiated level), summed term by term with tail correction.
    static CorrelatorKernel image_series(const CorrelatorKernel& base, double period,
                                         const SeriesSpec& spec);

    complex evaluate(complex dt, double dx) const;
    complex evaluate_null(complex dU, complex dV) const;

    Kind kind() const;
    Level level() const;
    double beta() const;     // infinity for vacuum kinds
    double period() const;   // 0 for plane kinds
    double epsilon() const;
    Chart domain_chart() const;

  private:
    struct Impl;
    explicit CorrelatorKernel(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
    friend class SmearEngine;
};

struct QuadratureOptions {
    int order = 64;          // Gauss-Legendre points per panel
    bool crossCheck = true;  // re-evaluate at half order and compare
};

// Evaluator of the smeared two-point pairing
//   integral f(p) K(t - t' + timeShift, x - x') g(p') dp dp'
// for one fixed kernel and test-function pair.  Construction precomputes
// the (kernel-independent) cross-correlation of the chiral factors on a
// fixed panel grid, so sweeping many time shifts is cheap.
//
// Shifts must respect the kernel's analyticity strip: Im(timeShift) in
// [-beta, 0] for thermal kernels and <= 0 for vacuum kernels (boundary
// values are admitted; they are what the i-epsilon prescription encodes).
// Kernel singularities crossing the integration range are handled by local
// Taylor subtraction with closed-form core moments.  With crossCheck on,
// every evaluation is repeated at half the quadrature order and a
// QuadratureError is raised if the two disagree beyond 1e-8 relative.
class SmearEngine {
  public:
    SmearEngine(const CorrelatorKernel& kernel, const TestFunction2D& f,
                const TestFunction2D& g, QuadratureOptions opts = {});

    complex evaluate(complex timeShift) const;
    const CorrelatorKernel& kernel() const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// One-shot smearing (constructs a SmearEngine internally).
complex smear(const CorrelatorKernel& kernel, const TestFunction2D& f,
              const TestFunction2D& g, complex timeShift, QuadratureOptions opts = {});

}  // namespace cylkms
