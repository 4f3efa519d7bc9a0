#include "cylkms/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "cylkms/errors.hpp"
#include "cylkms/rng.hpp"

namespace cylkms {

// ---- morphisms ----------------------------------------------------------

EmbeddingMorphism::EmbeddingMorphism(Chart source, Chart target, DeckTransformation branch,
                                     TimeTranslation shift)
    : source_(source), target_(target), branch_(branch), shift_(shift) {}

EmbeddingMorphism EmbeddingMorphism::identity(const Chart& chart) {
    return EmbeddingMorphism(chart, chart, DeckTransformation{0, chart.period},
                             TimeTranslation{0.0});
}

EmbeddingMorphism EmbeddingMorphism::lift(double period, std::int64_t branch) {
    if (!(period > 0.0))
        throw std::invalid_argument("EmbeddingMorphism::lift: period must be positive");
    return EmbeddingMorphism(Chart::cylinder(period), Chart::plane(),
                             DeckTransformation{branch, period}, TimeTranslation{0.0});
}

EmbeddingMorphism EmbeddingMorphism::time_translation(const Chart& chart, double tau) {
    return EmbeddingMorphism(chart, chart, DeckTransformation{0, chart.period},
                             TimeTranslation{tau});
}

EmbeddingMorphism EmbeddingMorphism::deck(double period, std::int64_t branch) {
    if (!(period > 0.0))
        throw std::invalid_argument("EmbeddingMorphism::deck: period must be positive");
    return EmbeddingMorphism(Chart::plane(), Chart::plane(),
                             DeckTransformation{branch, period}, TimeTranslation{0.0});
}

EmbeddingMorphism compose(const EmbeddingMorphism& outer, const EmbeddingMorphism& inner) {
    if (!(inner.target() == outer.source()))
        throw std::invalid_argument(
            "compose: morphisms do not match head to tail");
    double period = std::max(inner.branch().period, outer.branch().period);
    if (inner.branch().period > 0.0 && outer.branch().period > 0.0 &&
        inner.branch().period != outer.branch().period)
        throw std::invalid_argument("compose: mismatched deck periods");
    const std::int64_t n = inner.branch().n + outer.branch().n;
    const double tau = inner.time_shift().tau + outer.time_shift().tau;
    return EmbeddingMorphism(inner.source(), outer.target(),
                             DeckTransformation{n, period}, TimeTranslation{tau});
}

TestFunction2D pushforward(const EmbeddingMorphism& psi, const TestFunction2D& f) {
    if (!(f.chart() == psi.source()))
        throw std::invalid_argument(
            "pushforward: test function chart does not match the morphism source");
    TestFunction2D g = f;
    if (psi.source().is_cylinder() && psi.target().is_plane()) {
        g = pushforward_pi_inv(g, psi.branch());
    } else if (psi.source().is_plane() && psi.branch().n != 0) {
        g = pushforward_deck(g, psi.branch());
    }
    if (psi.time_shift().tau != 0.0) g = pushforward_time(g, psi.time_shift().tau);
    return g;
}

// ---- algebra elements ---------------------------------------------------

AlgebraElement::AlgebraElement(Chart chart, std::vector<TestFunction2D> generators)
    : chart_(chart), generators_(std::move(generators)) {}

AlgebraElement AlgebraElement::unit(const Chart& chart) {
    return AlgebraElement(chart, {});
}

AlgebraElement AlgebraElement::field(const TestFunction2D& f) {
    return AlgebraElement(f.chart(), {f});
}

AlgebraElement AlgebraElement::product(const AlgebraElement& other) const {
    if (!(chart_ == other.chart_))
        throw std::invalid_argument("AlgebraElement::product: mismatched charts");
    std::vector<TestFunction2D> gens = generators_;
    gens.insert(gens.end(), other.generators_.begin(), other.generators_.end());
    return AlgebraElement(chart_, std::move(gens));
}

AlgebraElement AlgebraElement::adjoint() const {
    std::vector<TestFunction2D> gens(generators_.rbegin(), generators_.rend());
    return AlgebraElement(chart_, std::move(gens));
}

AlgebraElement alpha_apply(const EmbeddingMorphism& psi, const AlgebraElement& a) {
    if (!(a.chart() == psi.source()))
        throw std::invalid_argument(
            "alpha_apply: element chart does not match the morphism source");
    std::vector<TestFunction2D> gens;
    gens.reserve(a.degree());
    for (const TestFunction2D& f : a.generators()) gens.push_back(pushforward(psi, f));
    AlgebraElement out = AlgebraElement::unit(psi.target());
    for (const TestFunction2D& f : gens) out = out.product(AlgebraElement::field(f));
    return out;
}

// ---- quasi-free states --------------------------------------------------

namespace detail {

struct StateImpl {
    std::optional<CorrelatorKernel> kernel;      // direct states
    std::shared_ptr<const StateImpl> base;       // pullback states
    std::optional<EmbeddingMorphism> morphism;
    Chart chart;
    std::string label;
    QuadratureOptions opts;
};

}  // namespace detail

QuasiFreeState::QuasiFreeState(std::shared_ptr<const detail::StateImpl> impl)
    : impl_(std::move(impl)) {}

QuasiFreeState QuasiFreeState::from_kernel(const CorrelatorKernel& kernel,
                                           std::string label, QuadratureOptions opts) {
    auto impl = std::make_shared<detail::StateImpl>();
    impl->kernel = kernel;
    impl->chart = kernel.domain_chart();
    impl->label = std::move(label);
    impl->opts = opts;
    return QuasiFreeState(impl);
}

namespace {

complex impl_two_point(const detail::StateImpl& impl, const TestFunction2D& f,
                       const TestFunction2D& g);

complex impl_wick(const detail::StateImpl& impl,
                  const std::vector<TestFunction2D>& gens) {
    const std::size_t n = gens.size();
    if (n == 0) return 1.0;
    if (n % 2 != 0) return 0.0;
    if (n == 2) return impl_two_point(impl, gens[0], gens[1]);
    // Pair the first generator with each later one and recurse, keeping
    // each pair in its original order.
    complex acc = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<TestFunction2D> rest;
        rest.reserve(n - 2);
        for (std::size_t k = 1; k < n; ++k)
            if (k != j) rest.push_back(gens[k]);
        acc += impl_two_point(impl, gens[0], gens[j]) * impl_wick(impl, rest);
    }
    return acc;
}

complex impl_two_point(const detail::StateImpl& impl, const TestFunction2D& f,
                       const TestFunction2D& g) {
    if (impl.base)
        return impl_two_point(*impl.base, pushforward(*impl.morphism, f),
                              pushforward(*impl.morphism, g));
    return smear(*impl.kernel, f, g, complex(0.0, 0.0), impl.opts);
}

}  // namespace

complex QuasiFreeState::evaluate(const AlgebraElement& a) const {
    if (!(a.chart() == impl_->chart))
        throw std::invalid_argument(
            "QuasiFreeState::evaluate: element chart does not match the state");
    return impl_wick(*impl_, a.generators());
}

complex QuasiFreeState::two_point(const TestFunction2D& f, const TestFunction2D& g) const {
    if (!(f.chart() == impl_->chart) || !(g.chart() == impl_->chart))
        throw std::invalid_argument(
            "QuasiFreeState::two_point: function chart does not match the state");
    return impl_two_point(*impl_, f, g);
}

std::vector<complex> QuasiFreeState::pair_correlator_sweep(
    const TestFunction2D& f, const TestFunction2D& g,
    std::span<const complex> shifts) const {
    if (!(f.chart() == impl_->chart) || !(g.chart() == impl_->chart))
        throw std::invalid_argument(
            "QuasiFreeState::pair_correlator_sweep: function chart does not "
            "match the state");
    const detail::StateImpl* impl = impl_.get();
    TestFunction2D fp = f;
    TestFunction2D gp = g;
    while (impl->base) {
        fp = pushforward(*impl->morphism, fp);
        gp = pushforward(*impl->morphism, gp);
        impl = impl->base.get();
    }
    SmearEngine engine(*impl->kernel, fp, gp, impl->opts);
    std::vector<complex> out;
    out.reserve(shifts.size());
    for (const complex& s : shifts) out.push_back(engine.evaluate(s));
    return out;
}

const Chart& QuasiFreeState::chart() const { return impl_->chart; }
const std::string& QuasiFreeState::label() const { return impl_->label; }

const CorrelatorKernel& QuasiFreeState::kernel() const {
    const detail::StateImpl* impl = impl_.get();
    while (impl->base) impl = impl->base.get();
    return *impl->kernel;
}

QuasiFreeState state_pullback(const QuasiFreeState& base, const EmbeddingMorphism& psi) {
    if (!(base.chart() == psi.target()))
        throw std::invalid_argument(
            "state_pullback: state chart does not match the morphism target");
    auto impl = std::make_shared<detail::StateImpl>();
    impl->base = base.impl_;
    impl->morphism = psi;
    impl->chart = psi.source();
    impl->label = "pullback of " + base.label();
    impl->opts = base.impl_->opts;
    return QuasiFreeState(impl);
}

// ---- orbits and comparisons ---------------------------------------------

std::vector<AlgebraElement> observable_class(const AlgebraElement& a, double period,
                                             int maxBranch) {
    if (!a.chart().is_plane())
        throw std::invalid_argument("observable_class: element must live on the plane");
    if (maxBranch < 0)
        throw std::invalid_argument("observable_class: maxBranch must be non-negative");
    std::vector<AlgebraElement> out;
    out.reserve(2 * maxBranch + 1);
    for (int n = -maxBranch; n <= maxBranch; ++n)
        out.push_back(alpha_apply(EmbeddingMorphism::deck(period, n), a));
    return out;
}

namespace {

struct Box {
    double tLo, tHi, xLo, xHi;
};

Box support_box(const TestFunction2D& f) {
    const Diamond& d = f.region;
    const double s = 0.5 * (d.halfWidthU + d.halfWidthV);
    return Box{d.center.t - s, d.center.t + s, d.center.x - s, d.center.x + s};
}

Box merge(const Box& a, const Box& b) {
    return Box{std::min(a.tLo, b.tLo), std::max(a.tHi, b.tHi), std::min(a.xLo, b.xLo),
               std::max(a.xHi, b.xHi)};
}

double function_deviation(const TestFunction2D& a, const TestFunction2D& b,
                          int gridPoints) {
    const Box box = merge(support_box(a), support_box(b));
    const Chart& chart = a.chart();
    double dev = 0.0;
    for (int i = 0; i < gridPoints; ++i) {
        for (int j = 0; j < gridPoints; ++j) {
            const double t = box.tLo + (box.tHi - box.tLo) * i / (gridPoints - 1);
            const double x = box.xLo + (box.xHi - box.xLo) * j / (gridPoints - 1);
            const SpacetimePoint p =
                chart.is_cylinder() ? SpacetimePoint::cylinder(t, x, chart.period)
                                    : SpacetimePoint::plane(t, x);
            dev = std::max(dev, std::abs(a.value(p) - b.value(p)));
        }
    }
    return dev;
}

}  // namespace

double element_deviation(const AlgebraElement& a, const AlgebraElement& b,
                         int gridPoints) {
    if (a.degree() != b.degree())
        throw std::invalid_argument("element_deviation: mismatched degrees");
    if (!(a.chart() == b.chart()))
        throw std::invalid_argument("element_deviation: mismatched charts");
    if (gridPoints < 2)
        throw std::invalid_argument("element_deviation: need at least a 2x2 grid");
    double dev = 0.0;
    for (std::size_t k = 0; k < a.degree(); ++k)
        dev = std::max(dev,
                       function_deviation(a.generators()[k], b.generators()[k], gridPoints));
    return dev;
}

CommutationCheck lift_time_commutation_check(const TestFunction2D& f, double tau,
                                             std::int64_t branch) {
    if (!f.chart().is_cylinder())
        throw std::invalid_argument(
            "lift_time_commutation_check: function must live on the cylinder");
    const double period = f.chart().period;
    const AlgebraElement el = AlgebraElement::field(f);
    const EmbeddingMorphism liftPsi = EmbeddingMorphism::lift(period, branch);
    const EmbeddingMorphism shiftCyl =
        EmbeddingMorphism::time_translation(Chart::cylinder(period), tau);
    const EmbeddingMorphism shiftPlane =
        EmbeddingMorphism::time_translation(Chart::plane(), tau);
    const AlgebraElement lhs = alpha_apply(liftPsi, alpha_apply(shiftCyl, el));
    const AlgebraElement rhs = alpha_apply(shiftPlane, alpha_apply(liftPsi, el));
    CommutationCheck out;
    out.deviation = element_deviation(lhs, rhs, 50);
    out.pass = out.deviation < 1e-12;
    return out;
}

// ---- seeded property suite ----------------------------------------------

namespace {

TestFunction2D random_cylinder_function(SeededRng& rng, double period) {
    const double t0 = rng.uniform(-1.0, 1.0);
    const double x0 = rng.uniform(0.0, period);
    const double a = rng.uniform(0.3, 0.8);
    const double b = rng.uniform(0.3, 0.8);
    const double shrink = rng.uniform(0.5, 0.9);
    const double amp = rng.uniform(0.5, 2.0);
    Diamond d(SpacetimePoint::cylinder(t0, x0, period), a, b);
    return centered_test_function(d, shrink, amp);
}

TestFunction2D random_plane_function(SeededRng& rng) {
    const double t0 = rng.uniform(-2.0, 2.0);
    const double x0 = rng.uniform(-3.0, 3.0);
    const double a = rng.uniform(0.3, 0.8);
    const double b = rng.uniform(0.3, 0.8);
    const double shrink = rng.uniform(0.5, 0.9);
    const double amp = rng.uniform(0.5, 2.0);
    Diamond d(SpacetimePoint::plane(t0, x0), a, b);
    return centered_test_function(d, shrink, amp);
}

AlgebraElement random_element(SeededRng& rng, const Chart& chart, double period) {
    const long degree = rng.uniform_int(1, 2);
    AlgebraElement out = AlgebraElement::unit(chart);
    for (long k = 0; k < degree; ++k) {
        const TestFunction2D f = chart.is_cylinder()
                                     ? random_cylinder_function(rng, period)
                                     : random_plane_function(rng);
        out = out.product(AlgebraElement::field(f));
    }
    return out;
}

double exact_identity_deviation(const AlgebraElement& a, const AlgebraElement& b) {
    // The identity morphism must reproduce parameters bit for bit.
    double dev = 0.0;
    for (std::size_t k = 0; k < a.degree(); ++k) {
        const TestFunction2D& fa = a.generators()[k];
        const TestFunction2D& fb = b.generators()[k];
        auto diff = [&dev](double p, double q) { dev = std::max(dev, std::abs(p - q)); };
        diff(fa.uFactor.center, fb.uFactor.center);
        diff(fa.uFactor.radius, fb.uFactor.radius);
        diff(fa.uFactor.amplitude, fb.uFactor.amplitude);
        diff(fa.vFactor.center, fb.vFactor.center);
        diff(fa.vFactor.radius, fb.vFactor.radius);
        diff(fa.vFactor.amplitude, fb.vFactor.amplitude);
        diff(fa.region.center.t, fb.region.center.t);
        diff(fa.region.center.x, fb.region.center.x);
        diff(fa.region.halfWidthU, fb.region.halfWidthU);
        diff(fa.region.halfWidthV, fb.region.halfWidthV);
    }
    return dev;
}

LawReport identity_law(SeededRng& rng, double period) {
    LawReport report{"identity-acts-trivially", 0.0, 0.0, false};
    for (int k = 0; k < 50; ++k) {
        const Chart chart = (k % 2 == 0) ? Chart::plane() : Chart::cylinder(period);
        const AlgebraElement a = random_element(rng, chart, period);
        const AlgebraElement b = alpha_apply(EmbeddingMorphism::identity(chart), a);
        report.deviation = std::max(report.deviation, exact_identity_deviation(a, b));
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

LawReport composition_law(SeededRng& rng, double period) {
    LawReport report{"composition-law", 0.0, 1e-12, false};
    for (int k = 0; k < 50; ++k) {
        EmbeddingMorphism inner = EmbeddingMorphism::identity(Chart::plane());
        EmbeddingMorphism outer = inner;
        AlgebraElement a = AlgebraElement::unit(Chart::plane());
        switch (k % 3) {
            case 0:
                inner = EmbeddingMorphism::lift(period, rng.uniform_int(-2, 2));
                outer = EmbeddingMorphism::deck(period, rng.uniform_int(-2, 2));
                a = random_element(rng, Chart::cylinder(period), period);
                break;
            case 1:
                inner = EmbeddingMorphism::time_translation(Chart::cylinder(period),
                                                            rng.uniform(-1.0, 1.0));
                outer = EmbeddingMorphism::lift(period, rng.uniform_int(-2, 2));
                a = random_element(rng, Chart::cylinder(period), period);
                break;
            default:
                inner = EmbeddingMorphism::deck(period, rng.uniform_int(-2, 2));
                outer = EmbeddingMorphism::time_translation(Chart::plane(),
                                                            rng.uniform(-1.0, 1.0));
                a = random_element(rng, Chart::plane(), period);
                break;
        }
        const AlgebraElement lhs = alpha_apply(compose(outer, inner), a);
        const AlgebraElement rhs = alpha_apply(outer, alpha_apply(inner, a));
        report.deviation = std::max(report.deviation, element_deviation(lhs, rhs, 50));
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

LawReport commutation_law(SeededRng& rng, double period) {
    LawReport report{"lift-time-commutation", 0.0, 1e-12, false};
    for (int k = 0; k < 50; ++k) {
        const TestFunction2D f = random_cylinder_function(rng, period);
        const double tau = rng.uniform(-1.0, 1.0);
        const std::int64_t branch = rng.uniform_int(-2, 2);
        report.deviation =
            std::max(report.deviation, lift_time_commutation_check(f, tau, branch).deviation);
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

LawReport contravariance_law(SeededRng& rng, double period) {
    LawReport report{"pullback-contravariance", 0.0, 1e-10, false};
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-6));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane thermal");
    for (int k = 0; k < 10; ++k) {
        const EmbeddingMorphism inner = EmbeddingMorphism::lift(period, rng.uniform_int(-1, 1));
        const EmbeddingMorphism outer =
            (k % 2 == 0) ? EmbeddingMorphism::deck(period, rng.uniform_int(-1, 1))
                         : EmbeddingMorphism::time_translation(Chart::plane(),
                                                               rng.uniform(-0.5, 0.5));
        const TestFunction2D f = random_cylinder_function(rng, period);
        const TestFunction2D g = random_cylinder_function(rng, period);
        const AlgebraElement a =
            AlgebraElement::field(f).product(AlgebraElement::field(g));
        const QuasiFreeState direct = state_pullback(omega, compose(outer, inner));
        const QuasiFreeState nested = state_pullback(state_pullback(omega, outer), inner);
        const complex v1 = direct.evaluate(a);
        const complex v2 = nested.evaluate(a);
        report.deviation = std::max(report.deviation, std::abs(v1 - v2));
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

LawReport positivity_law(SeededRng& rng, double period) {
    LawReport report{"positivity-transport", 0.0, 1e-12, false};
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-6));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane thermal");
    const QuasiFreeState lifted =
        state_pullback(omega, EmbeddingMorphism::lift(period, 0));
    for (int k = 0; k < 50; ++k) {
        const TestFunction2D f = random_cylinder_function(rng, period);
        const AlgebraElement a = AlgebraElement::field(f);
        const complex v = lifted.evaluate(a.adjoint().product(a));
        report.deviation = std::max(report.deviation, std::max(0.0, -v.real()));
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

LawReport orbit_law(SeededRng& rng, double period) {
    LawReport report{"deck-orbit-invariance", 0.0, 1e-10, false};
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-6));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane thermal");
    for (int k = 0; k < 5; ++k) {
        const TestFunction2D f = random_plane_function(rng);
        const TestFunction2D g = random_plane_function(rng);
        const AlgebraElement a =
            AlgebraElement::field(f).product(AlgebraElement::field(g));
        const std::vector<AlgebraElement> orbit = observable_class(a, period, 2);
        const complex ref = omega.evaluate(orbit.front());
        for (const AlgebraElement& member : orbit)
            report.deviation =
                std::max(report.deviation, std::abs(omega.evaluate(member) - ref));
    }
    report.pass = report.deviation <= report.tolerance;
    return report;
}

}  // namespace

std::vector<LawReport> run_functor_checks(std::uint64_t seed) {
    const double period = 2.0 * 3.14159265358979323846;
    SeededRng rng(seed);
    std::vector<LawReport> out;
    out.push_back(identity_law(rng, period));
    out.push_back(composition_law(rng, period));
    out.push_back(commutation_law(rng, period));
    out.push_back(contravariance_law(rng, period));
    out.push_back(positivity_law(rng, period));
    out.push_back(orbit_law(rng, period));
    return out;
}

}  // namespace cylkms
