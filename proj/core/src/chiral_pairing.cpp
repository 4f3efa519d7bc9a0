#include "chiral_pairing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "cylkms/errors.hpp"
#include "cylkms/quadrature.hpp"

namespace cylkms::detail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCoreCoefficient = -1.0 / (4.0 * kPi);
// Taylor degree of the subtraction around a singular point.
constexpr int kSubtractionOrder = 5;
// Poles within this fraction of a panel width degrade plain Gauss-Legendre
// and are handled by subtraction instead.
constexpr double kSingularWindow = 0.35;
// Inside this radius of the subtraction point the difference rho - T is
// pure cancellation noise; the true contribution there is O(u^4) and is
// dropped rather than amplified by the nearby core.
constexpr double kGuardRadius = 1e-5;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct LocalPole {
    complex location;  // singular point w of chi
    double re;         // Re(w - shift), the subtraction point on the path
    complex offset;    // i * Im(w - shift), offset of the pole from the path
    std::array<complex, kSubtractionOrder + 1> coeff;  // rho^(m)(re) / m!
};

// integral of u^m / (u - offset)^2 over [u1, u2] along the real axis, the
// pole sitting at distance |offset| off the path.  Binomial expansion in
// v = u - offset reduces everything to endpoint evaluations; the principal
// logarithm is safe because the path keeps Im v fixed and nonzero.
complex inverse_square_moment(int m, double u1, double u2, complex offset) {
    const complex v1 = u1 - offset;
    const complex v2 = u2 - offset;
    complex total = 0.0;
    for (int k = 0; k <= m; ++k) {
        complex ik;
        if (k == 0)
            ik = 1.0 / v1 - 1.0 / v2;
        else if (k == 1)
            ik = std::log(v2) - std::log(v1);
        else
            ik = (std::pow(v2, k - 1) - std::pow(v1, k - 1)) / static_cast<double>(k - 1);
        total += binomial(m, k) * std::pow(offset, m - k) * ik;
    }
    return total;
}

// integral of u^m log(scale (u - offset)) over [u1, u2], by parts.
complex log_moment(int m, double u1, double u2, complex offset, complex scale) {
    const complex v1 = u1 - offset;
    const complex v2 = u2 - offset;
    complex total = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double kp = static_cast<double>(k + 1);
        const complex f2 = std::pow(v2, k + 1) * (kp * std::log(scale * v2) - 1.0) / (kp * kp);
        const complex f1 = std::pow(v1, k + 1) * (kp * std::log(scale * v1) - 1.0) / (kp * kp);
        total += binomial(m, k) * std::pow(offset, m - k) * (f2 - f1);
    }
    return total;
}

}  // namespace

complex ChiralKernel::core_scale(complex) const { return 1.0; }

ChiralPairing::ChiralPairing(const BumpFunction& a, const BumpFunction& b,
                             std::shared_ptr<const ChiralKernel> kernel,
                             QuadratureOptions opts)
    : a_(a), b_(b), kernel_(std::move(kernel)), opts_(opts) {
    if (opts_.order < 8 || opts_.order % 2 != 0)
        throw std::invalid_argument("ChiralPairing: order must be even and at least 8");
    dMin_ = a_.support_min() - b_.support_max();
    dMax_ = a_.support_max() - b_.support_min();
    const double range = dMax_ - dMin_;
    double target = range / 6.0;
    const double scale = kernel_->structure_scale();
    if (std::isfinite(scale)) target = std::min(target, 0.5 * scale);
    panelCount_ = std::max(6, static_cast<int>(std::ceil(range / target)));
    panelWidth_ = range / panelCount_;

    auto build = [&](int order) {
        NodeSet set;
        const GaussLegendreRule& rule = gauss_legendre(order);
        set.nodes.reserve(panelCount_ * order);
        set.weights.reserve(panelCount_ * order);
        for (int p = 0; p < panelCount_; ++p) {
            const double lo = dMin_ + p * panelWidth_;
            const double mid = lo + 0.5 * panelWidth_;
            const double half = 0.5 * panelWidth_;
            for (int i = 0; i < order; ++i) {
                set.nodes.push_back(mid + half * rule.nodes[i]);
                set.weights.push_back(half * rule.weights[i]);
            }
        }
        set.rho.reserve(set.nodes.size());
        for (double d : set.nodes) set.rho.push_back(rho_value(d));
        return set;
    };
    main_ = build(opts_.order);
    if (opts_.crossCheck) half_ = build(opts_.order / 2);
}

double ChiralPairing::support_min() const { return dMin_; }
double ChiralPairing::support_max() const { return dMax_; }

double ChiralPairing::rho_value(double d) const {
    const double lo = std::max(a_.support_min(), b_.support_min() + d);
    const double hi = std::min(a_.support_max(), b_.support_max() + d);
    if (!(hi > lo)) return 0.0;
    return integrate_panels([&](double u) { return a_.value(u) * b_.value(u - d); }, lo,
                            hi, 48, 8);
}

double ChiralPairing::rho_derivative(double d, int order) const {
    const double lo = std::max(a_.support_min(), b_.support_min() + d);
    const double hi = std::min(a_.support_max(), b_.support_max() + d);
    if (!(hi > lo)) return 0.0;
    const double raw = integrate_panels(
        [&](double u) { return a_.value(u) * b_.derivative(u - d, order); }, lo, hi, 48, 8);
    return (order % 2 == 0) ? raw : -raw;
}

complex ChiralPairing::evaluate(complex shift) const {
    const complex value = evaluate_with(main_, shift);
    if (opts_.crossCheck) {
        const complex check = evaluate_with(half_, shift);
        if (std::abs(value - check) > 1e-8 * std::max(1.0, std::abs(value)))
            throw QuadratureError(
                "ChiralPairing: half-order cross-check disagrees; integrand "
                "under-resolved at this shift");
    }
    return value;
}

complex ChiralPairing::evaluate_with(const NodeSet& set, complex shift) const {
    const double margin = kSingularWindow * panelWidth_;
    const std::vector<complex> raw = kernel_->singular_points(
        dMin_ + shift.real() - margin, dMax_ + shift.real() + margin,
        shift.imag() - margin, shift.imag() + margin);

    std::vector<LocalPole> poles;
    poles.reserve(raw.size());
    for (const complex& w : raw) {
        const complex z0 = w - shift;
        if (std::abs(z0.imag()) < 1e-13) {
            if (z0.real() >= dMin_ && z0.real() <= dMax_)
                throw AnalyticityError(
                    "ChiralPairing: a kernel singularity pinches the "
                    "integration range at this shift");
            continue;  // on-path but outside the support, harmless
        }
        LocalPole p;
        p.location = w;
        p.re = z0.real();
        p.offset = complex(0.0, z0.imag());
        double factorial = 1.0;
        for (int m = 0; m <= kSubtractionOrder; ++m) {
            if (m > 0) factorial *= m;
            p.coeff[m] = rho_derivative(p.re, m) / factorial;
        }
        poles.push_back(p);
    }

    const int order = static_cast<int>(set.nodes.size()) / panelCount_;
    std::vector<complex> contributions;
    contributions.reserve(panelCount_);
    for (int p = 0; p < panelCount_; ++p) {
        const double lo = dMin_ + p * panelWidth_;
        const double hi = lo + panelWidth_;
        const LocalPole* pole = nullptr;
        for (const LocalPole& cand : poles) {
            if (cand.re < lo - margin || cand.re > hi + margin) continue;
            if (pole != nullptr)
                throw AnalyticityError(
                    "ChiralPairing: two singular points fall in one panel; "
                    "the panel grid cannot separate them");
            pole = &cand;
        }
        complex acc = 0.0;
        const int base = p * order;
        if (pole == nullptr) {
            for (int i = 0; i < order; ++i)
                acc += set.weights[base + i] * set.rho[base + i] *
                       kernel_->evaluate(set.nodes[base + i] + shift);
        } else {
            for (int i = 0; i < order; ++i) {
                const double node = set.nodes[base + i];
                const double u = node - pole->re;
                complex taylor = pole->coeff[kSubtractionOrder];
                for (int m = kSubtractionOrder - 1; m >= 0; --m)
                    taylor = taylor * u + pole->coeff[m];
                complex term =
                    taylor * kernel_->remainder(node + shift, pole->location);
                if (std::abs(u) >= kGuardRadius)
                    term += (set.rho[base + i] - taylor) *
                            kernel_->evaluate(node + shift);
                acc += set.weights[base + i] * term;
            }
            const double u1 = lo - pole->re;
            const double u2 = hi - pole->re;
            const bool logCore = kernel_->core_type() == CoreType::Log;
            const complex scale = logCore ? kernel_->core_scale(pole->location) : 0.0;
            for (int m = 0; m <= kSubtractionOrder; ++m) {
                const complex moment =
                    logCore ? log_moment(m, u1, u2, pole->offset, scale)
                            : inverse_square_moment(m, u1, u2, pole->offset);
                acc += pole->coeff[m] * kCoreCoefficient * moment;
            }
        }
        contributions.push_back(acc);
    }
    return pairwise_sum(std::span<const complex>(contributions));
}

}  // namespace cylkms::detail
