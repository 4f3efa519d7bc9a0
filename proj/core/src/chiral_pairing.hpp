#pragma once

// Internal machinery for pairing two 1d bump factors against a chiral
// kernel:  Pair(shift) = integral a(U) chi(U - U' + shift) b(U') dU dU'.
// Not installed; the public entry point is SmearEngine in correlators.hpp.

#include <memory>
#include <vector>

#include "cylkms/correlators.hpp"
#include "cylkms/smearing.hpp"

namespace cylkms::detail {

// How a chiral kernel behaves at one of its singular points w:
// chi(z) = coefficient * (z-w)^{-2} + smooth        (InverseSquare)
// chi(z) = coefficient * log(scale * (z-w)) + smooth (Log)
// with the shared coefficient -1/(4 pi).
enum class CoreType { InverseSquare, Log };

class ChiralKernel {
  public:
    virtual ~ChiralKernel() = default;
    virtual complex evaluate(complex z) const = 0;
    virtual CoreType core_type() const = 0;
    // Scale factor of the Log core at the given singular point; unused for
    // InverseSquare cores.
    virtual complex core_scale(complex pole) const;
    // All singular points w with Re w in [reLo, reHi], Im w in [imLo, imHi].
    virtual std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                                 double imHi) const = 0;
    // chi(z) - core(z - pole), stable near the pole.
    virtual complex remainder(complex z, complex pole) const = 0;
    // Distance over which the kernel's smooth part varies; bounds the
    // quadrature panel width.  Infinity when the kernel sets no scale.
    virtual double structure_scale() const = 0;
};

// Reduction of the double pairing integral to one dimension:
//   Pair(shift) = integral rho(D) chi(D + shift) dD,
//   rho(D) = integral a(U) b(U - D) dU,
// with rho precomputed at fixed Gauss-Legendre panel nodes over the support
// [a1 - b2, a2 - b1].  Per shift only the kernel values are new; panels hit
// by a kernel singularity use Taylor subtraction of rho around the
// singular point's real part with closed-form core moments.
class ChiralPairing {
  public:
    ChiralPairing(const BumpFunction& a, const BumpFunction& b,
                  std::shared_ptr<const ChiralKernel> kernel, QuadratureOptions opts);

    complex evaluate(complex shift) const;

    double support_min() const;  // of rho
    double support_max() const;

  private:
    struct NodeSet {
        std::vector<double> nodes;    // flattened panel nodes
        std::vector<double> weights;  // matching scaled weights
        std::vector<double> rho;      // cross-correlation values at the nodes
    };

    complex evaluate_with(const NodeSet& set, complex shift) const;
    double rho_value(double d) const;
    double rho_derivative(double d, int order) const;

    BumpFunction a_;
    BumpFunction b_;
    std::shared_ptr<const ChiralKernel> kernel_;
    QuadratureOptions opts_;
    double dMin_ = 0.0;
    double dMax_ = 0.0;
    double panelWidth_ = 0.0;
    int panelCount_ = 0;
    NodeSet main_;
    NodeSet half_;
};

}  // namespace cylkms::detail
