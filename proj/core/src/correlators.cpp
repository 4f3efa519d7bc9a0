#include "cylkms/correlators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chiral_pairing.hpp"
#include "cylkms/errors.hpp"

namespace cylkms {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCoeff = -1.0 / (4.0 * kPi);
constexpr double kInf = std::numeric_limits<double>::infinity();
const complex kImag(0.0, 1.0);

// csch^2 with the hyperbolic overflow moved into decaying exponentials.
complex csch2(complex w) {
    if (std::abs(w.real()) > 20.0) {
        const complex e = std::exp(-2.0 * (w.real() > 0 ? w : -w));
        const complex d = 1.0 - e;
        return 4.0 * e / (d * d);
    }
    const complex s = std::sinh(w);
    if (s == complex(0.0, 0.0)) throw SingularityError("csch2: argument on the lattice");
    return 1.0 / (s * s);
}

complex coth(complex w) {
    if (w.real() > 20.0) {
        const complex e = std::exp(-2.0 * w);
        return (1.0 + e) / (1.0 - e);
    }
    if (w.real() < -20.0) {
        const complex e = std::exp(2.0 * w);
        return -(1.0 + e) / (1.0 - e);
    }
    const complex s = std::sinh(w);
    if (s == complex(0.0, 0.0)) throw SingularityError("coth: argument on the lattice");
    return std::cosh(w) / s;
}

// (pi/p)^2 csc^2(pi u / p) - 1/u^2, or the csch analogue, evaluated
// without cancellation near u = 0 via the Laurent tail
//   csc^2 x  = 1/x^2 + 1/3 + x^2/15 + 2x^4/189 + x^6/675 + 2x^8/10395 + ...
//   csch^2 x = 1/x^2 - 1/3 + x^2/15 - 2x^4/189 + x^6/675 - 2x^8/10395 + ...
complex periodic_remainder(complex u, double period, bool hyperbolic) {
    const double k = kPi / period;
    const complex x = k * u;
    if (std::abs(x) < 0.25) {
        static const double c[5] = {1.0 / 3.0, 1.0 / 15.0, 2.0 / 189.0, 1.0 / 675.0,
                                    2.0 / 10395.0};
        const complex x2 = x * x;
        complex acc = 0.0;
        complex pw = 1.0;
        for (int j = 0; j < 5; ++j) {
            const double sign = (hyperbolic && j % 2 == 0) ? -1.0 : 1.0;
            acc += sign * c[j] * pw;
            pw *= x2;
        }
        return k * k * acc;
    }
    complex full;
    if (hyperbolic) {
        full = k * k * csch2(x);
    } else {
        const complex s = std::sin(x);
        full = k * k / (s * s);
    }
    return full - 1.0 / (u * u);
}

// Spatial image sum of the thermal chiral kernel with its Euler-Maclaurin
// tail (exact coth integral + endpoint corrections), shared by the free
// function and the kernel object.  skip, when in [-N, N], removes that one
// image from the sum and tail-corrected total (used for remainders).
complex spatial_thermal_sum(complex z, double beta, double period, double eps,
                            const SeriesSpec& spec, long skip) {
    const double k = kPi / beta;
    const complex ie(0.0, eps);
    const int n = spec.truncation;
    std::vector<complex> terms;
    terms.reserve(2 * n + 1);
    for (int m = -n; m <= n; ++m) {
        if (m == skip) continue;
        const complex u = z - static_cast<double>(m) * period - ie;
        terms.push_back(kCoeff * k * k * csch2(k * u));
    }
    complex sum = pairwise_sum(std::span<const complex>(terms));
    if (spec.tail == TailCorrection::IntegralTail) {
        // P(v) = kCoeff k^2 csch^2(k(v - i eps)) has antiderivative
        // G(v) = -kCoeff k coth(k(v - i eps)); the remainder beyond x = N
        // is integral + F(a)/2 - F'(a)/12 with F(x) = P(z-xL) + P(z+xL).
        const double a = static_cast<double>(n) + 1.0;
        const complex vm = z - a * period - ie;
        const complex vp = z + a * period - ie;
        auto g = [&](complex v) { return -kCoeff * k * coth(k * v); };
        const complex edge = complex(kCoeff * k, 0.0);
        const complex integral = ((g(vm) - edge) + (-edge - g(vp))) / period;
        const complex pm = kCoeff * k * k * csch2(k * vm);
        const complex pp = kCoeff * k * k * csch2(k * vp);
        auto pprime = [&](complex v) {
            return -2.0 * kCoeff * k * k * k * csch2(k * v) * coth(k * v);
        };
        const complex fa = pm + pp;
        const complex fprime = period * (pprime(vp) - pprime(vm));
        sum += integral + 0.5 * fa - fprime / 12.0;
    }
    return sum;
}

// Symmetric vacuum image sum with one image optionally removed; tail as in
// lattice_inverse_square.
complex spatial_vacuum_sum(complex z, double period, double eps, const SeriesSpec& spec,
                           long skip) {
    const complex ze = z - complex(0.0, eps);
    const int n = spec.truncation;
    std::vector<complex> terms;
    terms.reserve(2 * n + 1);
    for (int m = -n; m <= n; ++m) {
        if (m == skip) continue;
        const complex d = ze - static_cast<double>(m) * period;
        if (d == complex(0.0, 0.0))
            throw SingularityError("image sum: separation on the image lattice");
        terms.push_back(kCoeff / (d * d));
    }
    complex sum = pairwise_sum(std::span<const complex>(terms));
    if (spec.tail == TailCorrection::IntegralTail) {
        const double a = static_cast<double>(n) + 1.0;
        const complex as(a * period, 0.0);
        const complex integral = (1.0 / (as - ze) + 1.0 / (as + ze)) / period;
        const complex m3 = (ze - as) * (ze - as) * (ze - as);
        const complex p3 = (ze + as) * (ze + as) * (ze + as);
        const complex fa = 1.0 / ((ze - as) * (ze - as)) + 1.0 / ((ze + as) * (ze + as));
        const complex fprime = 2.0 * period * (1.0 / m3 - 1.0 / p3);
        sum += kCoeff * (integral + 0.5 * fa - fprime / 12.0);
    }
    return sum;
}

// ---- chiral kernel implementations -------------------------------------

class PlaneVacuumDd final : public detail::ChiralKernel {
  public:
    explicit PlaneVacuumDd(double eps) : eps_(eps) {}
    complex evaluate(complex z) const override {
        const complex d = z - complex(0.0, eps_);
        if (d == complex(0.0, 0.0))
            throw SingularityError("plane vacuum kernel: coincident null separation");
        return kCoeff / (d * d);
    }
    detail::CoreType core_type() const override {
        return detail::CoreType::InverseSquare;
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (reLo <= 0.0 && 0.0 <= reHi && imLo <= eps_ && eps_ <= imHi)
            out.push_back(complex(0.0, eps_));
        return out;
    }
    complex remainder(complex, complex) const override { return 0.0; }
    double structure_scale() const override { return kInf; }

  private:
    double eps_;
};

class CylinderClosedDd final : public detail::ChiralKernel {
  public:
    CylinderClosedDd(double period, double eps) : period_(period), eps_(eps) {}
    complex evaluate(complex z) const override {
        const complex s = std::sin(kPi * (z - complex(0.0, eps_)) / period_);
        if (s == complex(0.0, 0.0))
            throw SingularityError("cylinder kernel: separation on the periodic cone");
        const double k = kPi / period_;
        return kCoeff * k * k / (s * s);
    }
    detail::CoreType core_type() const override {
        return detail::CoreType::InverseSquare;
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (imLo <= eps_ && eps_ <= imHi) {
            const long lo = static_cast<long>(std::ceil(reLo / period_));
            const long hi = static_cast<long>(std::floor(reHi / period_));
            for (long m = lo; m <= hi; ++m)
                out.push_back(complex(static_cast<double>(m) * period_, eps_));
        }
        return out;
    }
    complex remainder(complex z, complex pole) const override {
        return kCoeff * periodic_remainder(z - pole, period_, false);
    }
    double structure_scale() const override { return period_ / kPi; }

  private:
    double period_;
    double eps_;
};

class PlaneThermalDd final : public detail::ChiralKernel {
  public:
    PlaneThermalDd(double beta, double eps) : beta_(beta), eps_(eps) {}
    complex evaluate(complex z) const override {
        const double k = kPi / beta_;
        return kCoeff * k * k * csch2(k * (z - complex(0.0, eps_)));
    }
    detail::CoreType core_type() const override {
        return detail::CoreType::InverseSquare;
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (reLo <= 0.0 && 0.0 <= reHi) {
            const long lo = static_cast<long>(std::ceil((imLo - eps_) / beta_));
            const long hi = static_cast<long>(std::floor((imHi - eps_) / beta_));
            for (long n = lo; n <= hi; ++n)
                out.push_back(complex(0.0, eps_ + static_cast<double>(n) * beta_));
        }
        return out;
    }
    complex remainder(complex z, complex pole) const override {
        return kCoeff * periodic_remainder(z - pole, beta_, true);
    }
    double structure_scale() const override { return beta_ / kPi; }

  private:
    double beta_;
    double eps_;
};

class CylinderThermalDd final : public detail::ChiralKernel {
  public:
    CylinderThermalDd(double beta, double period, double eps, SeriesSpec spec)
        : beta_(beta), period_(period), eps_(eps), spec_(spec) {}
    complex evaluate(complex z) const override {
        return spatial_thermal_sum(z, beta_, period_, eps_, spec_,
                                   spec_.truncation + 1L);
    }
    detail::CoreType core_type() const override {
        return detail::CoreType::InverseSquare;
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        const long mLo = static_cast<long>(std::ceil(reLo / period_));
        const long mHi = static_cast<long>(std::floor(reHi / period_));
        const long nLo = static_cast<long>(std::ceil((imLo - eps_) / beta_));
        const long nHi = static_cast<long>(std::floor((imHi - eps_) / beta_));
        const long trunc = spec_.truncation;
        for (long m = mLo; m <= mHi; ++m) {
            // Images beyond the truncation window enter through the smooth
            // tail only, so they are not poles of the evaluated function.
            if (m < -trunc || m > trunc) continue;
            for (long n = nLo; n <= nHi; ++n)
                out.push_back(complex(static_cast<double>(m) * period_,
                                      eps_ + static_cast<double>(n) * beta_));
        }
        return out;
    }
    complex remainder(complex z, complex pole) const override {
        const long m0 = std::lround(pole.real() / period_);
        return kCoeff * periodic_remainder(z - pole, beta_, true) +
               spatial_thermal_sum(z, beta_, period_, eps_, spec_, m0);
    }
    double structure_scale() const override { return std::min(beta_, period_) / kPi; }

  private:
    double beta_;
    double period_;
    double eps_;
    SeriesSpec spec_;
};

class ImageVacuumDd final : public detail::ChiralKernel {
  public:
    ImageVacuumDd(double period, double eps, SeriesSpec spec)
        : period_(period), eps_(eps), spec_(spec) {}
    complex evaluate(complex z) const override {
        return spatial_vacuum_sum(z, period_, eps_, spec_, spec_.truncation + 1L);
    }
    detail::CoreType core_type() const override {
        return detail::CoreType::InverseSquare;
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (imLo <= eps_ && eps_ <= imHi) {
            const long lo = static_cast<long>(std::ceil(reLo / period_));
            const long hi = static_cast<long>(std::floor(reHi / period_));
            const long trunc = spec_.truncation;
            for (long m = lo; m <= hi; ++m) {
                // Images beyond the truncation window enter through the
                // smooth tail only, so they are not poles.
                if (m < -trunc || m > trunc) continue;
                out.push_back(complex(static_cast<double>(m) * period_, eps_));
            }
        }
        return out;
    }
    complex remainder(complex z, complex pole) const override {
        const long m0 = std::lround(pole.real() / period_);
        return spatial_vacuum_sum(z, period_, eps_, spec_, m0);
    }
    double structure_scale() const override { return period_ / kPi; }

  private:
    double period_;
    double eps_;
    SeriesSpec spec_;
};

class PlaneVacuumLog final : public detail::ChiralKernel {
  public:
    explicit PlaneVacuumLog(double eps) : eps_(eps) {}
    complex evaluate(complex z) const override {
        const complex d = z - complex(0.0, eps_);
        if (d == complex(0.0, 0.0))
            throw SingularityError("plane vacuum kernel: coincident null separation");
        return kCoeff * std::log(d);
    }
    detail::CoreType core_type() const override { return detail::CoreType::Log; }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (reLo <= 0.0 && 0.0 <= reHi && imLo <= eps_ && eps_ <= imHi)
            out.push_back(complex(0.0, eps_));
        return out;
    }
    complex remainder(complex, complex) const override { return 0.0; }
    double structure_scale() const override { return kInf; }

  private:
    double eps_;
};

class CylinderVacuumLog final : public detail::ChiralKernel {
  public:
    CylinderVacuumLog(double period, double eps) : period_(period), eps_(eps) {}
    complex evaluate(complex z) const override {
        const double theta = 2.0 * kPi / period_;
        const complex w = 1.0 - std::exp(-kImag * theta * (z - complex(0.0, eps_)));
        if (w == complex(0.0, 0.0))
            throw SingularityError("cylinder kernel: separation on the periodic cone");
        return kCoeff * std::log(w);
    }
    detail::CoreType core_type() const override { return detail::CoreType::Log; }
    complex core_scale(complex) const override {
        return kImag * (2.0 * kPi / period_);
    }
    std::vector<complex> singular_points(double reLo, double reHi, double imLo,
                                         double imHi) const override {
        std::vector<complex> out;
        if (imLo <= eps_ && eps_ <= imHi) {
            const long lo = static_cast<long>(std::ceil(reLo / period_));
            const long hi = static_cast<long>(std::floor(reHi / period_));
            for (long m = lo; m <= hi; ++m)
                out.push_back(complex(static_cast<double>(m) * period_, eps_));
        }
        return out;
    }
    complex remainder(complex z, complex pole) const override {
        // 1 - e^{-i theta u} = i theta u e^{-i theta u/2} sin(x)/x with
        // x = theta u / 2, so the difference from the log core is the
        // principal logarithm of the analytic bracket.
        const double theta = 2.0 * kPi / period_;
        const complex u = z - pole;
        const complex x = 0.5 * theta * u;
        if (std::abs(x) < 2.5) {
            complex sinc = 1.0;
            if (x != complex(0.0, 0.0)) sinc = std::sin(x) / x;
            return kCoeff * std::log(std::exp(-kImag * x) * sinc);
        }
        return evaluate(z) - kCoeff * std::log(kImag * theta * u);
    }
    double structure_scale() const override { return period_ / kPi; }

  private:
    double period_;
    double eps_;
};

}  // namespace

// ---- pointwise operations ----------------------------------------------

Epsilon::Epsilon(double v) : value(v) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("Epsilon: regulator must be positive and finite");
}

complex w2_plane_vacuum(complex dU, complex dV, Epsilon eps) {
    const complex ie(0.0, eps.value);
    const complex p = (dU - ie) * (dV - ie);
    if (p == complex(0.0, 0.0))
        throw SingularityError("w2_plane_vacuum: coincident separation");
    return kCoeff * std::log(p);
}

complex w2_cylinder_vacuum(complex dU, complex dV, double period, Epsilon eps) {
    if (!(period > 0.0))
        throw std::invalid_argument("w2_cylinder_vacuum: period must be positive");
    const double theta = 2.0 * kPi / period;
    const complex ie(0.0, eps.value);
    const complex fu = 1.0 - std::exp(-kImag * theta * (dU - ie));
    const complex fv = 1.0 - std::exp(-kImag * theta * (dV - ie));
    const complex p = fu * fv;
    if (p == complex(0.0, 0.0))
        throw SingularityError("w2_cylinder_vacuum: separation on the periodic cone");
    return kCoeff * std::log(p);
}

complex dd_plane_vacuum(complex d, Epsilon eps) {
    return PlaneVacuumDd(eps.value).evaluate(d);
}

complex dd_cylinder_closed(complex d, double period, Epsilon eps) {
    if (!(period > 0.0))
        throw std::invalid_argument("dd_cylinder_closed: period must be positive");
    return CylinderClosedDd(period, eps.value).evaluate(d);
}

complex dd_plane_thermal(complex d, double beta, Epsilon eps) {
    if (!(beta > 0.0))
        throw std::invalid_argument("dd_plane_thermal: beta must be positive");
    return PlaneThermalDd(beta, eps.value).evaluate(d);
}

complex dd_image_sum(complex d, double period, Epsilon eps, const SeriesSpec& spec) {
    if (!(period > 0.0))
        throw std::invalid_argument("dd_image_sum: period must be positive");
    return spatial_vacuum_sum(d, period, eps.value, spec, spec.truncation + 1L);
}

complex dd_cylinder_thermal(complex d, double beta, double period, Epsilon eps,
                            const SeriesSpec& spec) {
    if (!(beta > 0.0) || !(period > 0.0))
        throw std::invalid_argument("dd_cylinder_thermal: beta and period must be positive");
    return spatial_thermal_sum(d, beta, period, eps.value, spec, spec.truncation + 1L);
}

// ---- periodization discrepancy -----------------------------------------

DiscrepancyGrid default_discrepancy_grid(double period) {
    if (!(period > 0.0))
        throw std::invalid_argument("default_discrepancy_grid: period must be positive");
    DiscrepancyGrid g;
    g.tMin = 0.35 * period;
    g.tMax = 0.65 * period;
    g.tCount = 20;
    g.tPrimeMin = 0.0;
    g.tPrimeMax = 0.2 * period;
    g.tPrimeCount = 20;
    g.x = 0.1 * period;
    g.xPrime = 0.0;
    return g;
}

namespace {

complex sine_periodized_w2(complex dU, complex dV, double period, double eps) {
    const complex ie(0.0, eps);
    const complex su = std::sin(kPi * (dU - ie) / period);
    const complex sv = std::sin(kPi * (dV - ie) / period);
    const complex p = su * sv;
    if (p == complex(0.0, 0.0))
        throw SingularityError("sine periodization: separation on the periodic cone");
    return kCoeff * std::log(p);
}

complex discrepancy_at(double t, double tp, const DiscrepancyGrid& g, double period,
                       double eps) {
    const double dt = t - tp;
    const double dx = g.x - g.xPrime;
    const complex dU(dt - dx, 0.0);
    const complex dV(dt + dx, 0.0);
    return w2_cylinder_vacuum(dU, dV, period, Epsilon(eps)) -
           sine_periodized_w2(dU, dV, period, eps);
}

}  // namespace

DiscrepancyReport periodization_discrepancy(const DiscrepancyGrid& grid, double period,
                                            Epsilon eps) {
    if (grid.tCount < 2 || grid.tPrimeCount < 2 ||
        grid.tCount * grid.tPrimeCount < 3)
        throw std::invalid_argument(
            "periodization_discrepancy: grid too small for the affine fit");
    std::vector<double> ts, tps;
    std::vector<complex> deltas;
    const double dtStep = (grid.tMax - grid.tMin) / (grid.tCount - 1);
    const double tpStep = (grid.tPrimeMax - grid.tPrimeMin) / (grid.tPrimeCount - 1);
    for (int i = 0; i < grid.tCount; ++i) {
        for (int j = 0; j < grid.tPrimeCount; ++j) {
            const double t = grid.tMin + i * dtStep;
            const double tp = grid.tPrimeMin + j * tpStep;
            ts.push_back(t);
            tps.push_back(tp);
            deltas.push_back(discrepancy_at(t, tp, grid, period, eps.value));
        }
    }
    DiscrepancyReport report;
    report.fit = fit_affine2(ts, tps, deltas);
    report.maxResidual = report.fit.max_residual;
    // Affine functions have vanishing curvature; probe it directly with
    // second differences in t and t' at a few interior points.
    const double h = 1e-3;
    double curvature = 0.0;
    for (int s = 0; s < 5; ++s) {
        const double t = grid.tMin + (0.2 + 0.15 * s) * (grid.tMax - grid.tMin);
        const double tp = grid.tPrimeMin + (0.2 + 0.15 * s) * (grid.tPrimeMax - grid.tPrimeMin);
        const complex ddt = discrepancy_at(t + h, tp, grid, period, eps.value) -
                            2.0 * discrepancy_at(t, tp, grid, period, eps.value) +
                            discrepancy_at(t - h, tp, grid, period, eps.value);
        const complex ddtp = discrepancy_at(t, tp + h, grid, period, eps.value) -
                             2.0 * discrepancy_at(t, tp, grid, period, eps.value) +
                             discrepancy_at(t, tp - h, grid, period, eps.value);
        curvature = std::max(curvature, std::abs(ddt) / (h * h));
        curvature = std::max(curvature, std::abs(ddtp) / (h * h));
    }
    report.secondTimeDerivative = curvature;
    return report;
}

// ---- kernel object ------------------------------------------------------

struct CorrelatorKernel::Impl {
    Kind kind;
    Level level;
    double beta;    // +inf for vacuum kinds
    double period;  // 0 for plane kinds
    double eps;
    SeriesSpec spec{1, TailCorrection::None};
    std::shared_ptr<const detail::ChiralKernel> chi;  // per-factor chiral piece
};

CorrelatorKernel::CorrelatorKernel(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

CorrelatorKernel CorrelatorKernel::plane_vacuum(Level level, Epsilon eps) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::PlaneVacuum;
    impl->level = level;
    impl->beta = kInf;
    impl->period = 0.0;
    impl->eps = eps.value;
    if (level == Level::Differentiated)
        impl->chi = std::make_shared<PlaneVacuumDd>(eps.value);
    else
        impl->chi = std::make_shared<PlaneVacuumLog>(eps.value);
    return CorrelatorKernel(impl);
}

CorrelatorKernel CorrelatorKernel::cylinder_vacuum(Level level, double period,
                                                   Epsilon eps) {
    if (!(period > 0.0))
        throw std::invalid_argument("CorrelatorKernel: period must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::CylinderVacuum;
    impl->level = level;
    impl->beta = kInf;
    impl->period = period;
    impl->eps = eps.value;
    if (level == Level::Differentiated)
        impl->chi = std::make_shared<CylinderClosedDd>(period, eps.value);
    else
        impl->chi = std::make_shared<CylinderVacuumLog>(period, eps.value);
    return CorrelatorKernel(impl);
}

CorrelatorKernel CorrelatorKernel::plane_thermal(double beta, Epsilon eps) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("CorrelatorKernel: beta must be positive and finite");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::PlaneThermal;
    impl->level = Level::Differentiated;
    impl->beta = beta;
    impl->period = 0.0;
    impl->eps = eps.value;
    impl->chi = std::make_shared<PlaneThermalDd>(beta, eps.value);
    return CorrelatorKernel(impl);
}

CorrelatorKernel CorrelatorKernel::cylinder_thermal(double beta, double period,
                                                    Epsilon eps, const SeriesSpec& spec) {
    if (!(beta > 0.0) || !std::isfinite(beta) || !(period > 0.0))
        throw std::invalid_argument(
            "CorrelatorKernel: beta and period must be positive and finite");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::CylinderThermal;
    impl->level = Level::Differentiated;
    impl->beta = beta;
    impl->period = period;
    impl->eps = eps.value;
    impl->spec = spec;
    impl->chi = std::make_shared<CylinderThermalDd>(beta, period, eps.value, spec);
    return CorrelatorKernel(impl);
}

CorrelatorKernel CorrelatorKernel::image_series(const CorrelatorKernel& base,
                                                double period, const SeriesSpec& spec) {
    if (!(period > 0.0))
        throw std::invalid_argument("CorrelatorKernel: period must be positive");
    if (base.period() != 0.0 || base.level() != Level::Differentiated)
        throw std::invalid_argument(
            "CorrelatorKernel::image_series: base must be a differentiated "
            "plane kernel");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ImageSeries;
    impl->level = Level::Differentiated;
    impl->beta = base.beta();
    impl->period = period;
    impl->eps = base.epsilon();
    impl->spec = spec;
    if (base.kind() == Kind::PlaneThermal)
        impl->chi = std::make_shared<CylinderThermalDd>(base.beta(), period,
                                                        base.epsilon(), spec);
    else
        impl->chi = std::make_shared<ImageVacuumDd>(period, base.epsilon(), spec);
    return CorrelatorKernel(impl);
}

complex CorrelatorKernel::evaluate(complex dt, double dx) const {
    return evaluate_null(dt - dx, dt + dx);
}

complex CorrelatorKernel::evaluate_null(complex dU, complex dV) const {
    if (impl_->level == Level::Integrated) {
        if (impl_->kind == Kind::PlaneVacuum)
            return w2_plane_vacuum(dU, dV, Epsilon(impl_->eps));
        return w2_cylinder_vacuum(dU, dV, impl_->period, Epsilon(impl_->eps));
    }
    return impl_->chi->evaluate(dU) + impl_->chi->evaluate(dV);
}

CorrelatorKernel::Kind CorrelatorKernel::kind() const { return impl_->kind; }
CorrelatorKernel::Level CorrelatorKernel::level() const { return impl_->level; }
double CorrelatorKernel::beta() const { return impl_->beta; }
double CorrelatorKernel::period() const { return impl_->period; }
double CorrelatorKernel::epsilon() const { return impl_->eps; }

Chart CorrelatorKernel::domain_chart() const {
    return impl_->period > 0.0 ? Chart::cylinder(impl_->period) : Chart::plane();
}

// ---- smearing -----------------------------------------------------------

struct SmearEngine::Impl {
    CorrelatorKernel kernel;
    detail::ChiralPairing pairU;
    detail::ChiralPairing pairV;
    double fIntU, gIntU, fIntV, gIntV;

    Impl(const CorrelatorKernel& k, const TestFunction2D& f, const TestFunction2D& g,
         QuadratureOptions opts)
        : kernel(k),
          pairU(f.uFactor, g.uFactor, k.impl_->chi, opts),
          pairV(f.vFactor, g.vFactor, k.impl_->chi, opts),
          fIntU(integral(f.uFactor)),
          gIntU(integral(g.uFactor)),
          fIntV(integral(f.vFactor)),
          gIntV(integral(g.vFactor)) {}
};

SmearEngine::SmearEngine(const CorrelatorKernel& kernel, const TestFunction2D& f,
                         const TestFunction2D& g, QuadratureOptions opts) {
    if (!(f.chart() == kernel.domain_chart()) || !(g.chart() == kernel.domain_chart()))
        throw std::invalid_argument(
            "SmearEngine: test function charts must match the kernel domain");
    impl_ = std::make_shared<Impl>(kernel, f, g, opts);
}

complex SmearEngine::evaluate(complex timeShift) const {
    const double beta = impl_->kernel.beta();
    const double im = timeShift.imag();
    if (std::isfinite(beta)) {
        if (im > 0.0 || im < -beta)
            throw AnalyticityError(
                "SmearEngine: time shift outside the thermal analyticity "
                "strip [-beta, 0]");
    } else if (im > 0.0) {
        throw AnalyticityError(
            "SmearEngine: vacuum kernels admit only non-positive imaginary "
            "time shifts");
    }
    // dp dp' = (1/4) dU dV dU' dV' and the kernel splits into chiral parts,
    // so each part pairs one factor family and leaves plain integrals of
    // the other.
    const complex u = impl_->pairU.evaluate(timeShift) * impl_->fIntV * impl_->gIntV;
    const complex v = impl_->fIntU * impl_->gIntU * impl_->pairV.evaluate(timeShift);
    return 0.25 * (u + v);
}

const CorrelatorKernel& SmearEngine::kernel() const { return impl_->kernel; }

complex smear(const CorrelatorKernel& kernel, const TestFunction2D& f,
              const TestFunction2D& g, complex timeShift, QuadratureOptions opts) {
    return SmearEngine(kernel, f, g, opts).evaluate(timeShift);
}

}  // namespace cylkms
