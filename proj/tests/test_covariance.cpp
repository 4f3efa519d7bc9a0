#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cylkms/covariance.hpp"
#include "cylkms/errors.hpp"
#include "cylkms/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cylkms;
using cylkms::testing::rel_diff;

namespace {
constexpr double kTwoPi = 6.283185307179586;

Chart cyl_chart() { return Chart::cylinder(kTwoPi); }

TestFunction2D random_cylinder_bump(SeededRng& rng) {
    const double hw = rng.uniform(0.2, 0.5);
    return centered_test_function(
        Diamond(SpacetimePoint::cylinder(rng.uniform(-1.0, 1.0),
                                         rng.uniform(0.0, kTwoPi), kTwoPi),
                hw, hw),
        rng.uniform(0.7, 0.95), rng.uniform(0.5, 1.5));
}

TestFunction2D random_plane_bump(SeededRng& rng) {
    const double hw = rng.uniform(0.2, 0.5);
    return centered_test_function(
        Diamond(SpacetimePoint::plane(rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0)),
                hw, hw),
        rng.uniform(0.7, 0.95), rng.uniform(0.5, 1.5));
}

AlgebraElement random_element(SeededRng& rng, int degree, bool cylinder) {
    AlgebraElement a = AlgebraElement::unit(cylinder ? cyl_chart() : Chart::plane());
    for (int i = 0; i < degree; ++i) {
        const TestFunction2D f =
            cylinder ? random_cylinder_bump(rng) : random_plane_bump(rng);
        a = a.product(AlgebraElement::field(f));
    }
    return a;
}
}  // namespace

TEST_CASE("morphism construction and composition") {
    const EmbeddingMorphism idPlane = EmbeddingMorphism::identity(Chart::plane());
    CHECK(idPlane.source().is_plane());
    CHECK(idPlane.target().is_plane());
    CHECK(idPlane.branch().n == 0);
    CHECK(idPlane.time_shift().tau == 0.0);

    const EmbeddingMorphism lift1 = EmbeddingMorphism::lift(kTwoPi, 1);
    CHECK(lift1.source().is_cylinder());
    CHECK(lift1.source().period == kTwoPi);
    CHECK(lift1.target().is_plane());
    CHECK(lift1.branch().n == 1);

    const EmbeddingMorphism viaId = compose(EmbeddingMorphism::identity(Chart::plane()), lift1);
    CHECK(viaId.source().is_cylinder());
    CHECK(viaId.branch().n == 1);
    CHECK(viaId.time_shift().tau == 0.0);

    const EmbeddingMorphism decks =
        compose(EmbeddingMorphism::deck(kTwoPi, 1), EmbeddingMorphism::deck(kTwoPi, 2));
    CHECK(decks.branch().n == 3);
    CHECK(decks.source().is_plane());

    const EmbeddingMorphism shiftedLift =
        compose(lift1, EmbeddingMorphism::time_translation(cyl_chart(), 0.7));
    CHECK(shiftedLift.source().is_cylinder());
    CHECK(shiftedLift.target().is_plane());
    CHECK(shiftedLift.branch().n == 1);
    CHECK(shiftedLift.time_shift().tau == 0.7);

    // Head-to-tail mismatch: a lift expects a cylinder source, but the inner
    // lift already landed on the plane.
    CHECK_THROWS_AS(compose(lift1, lift1), std::invalid_argument);
}

TEST_CASE("morphism pushforward on test functions") {
    SeededRng rng(90001);
    const TestFunction2D fc = random_cylinder_bump(rng);

    const TestFunction2D viaMorphism =
        pushforward(EmbeddingMorphism::lift(kTwoPi, 1), fc);
    const TestFunction2D direct = pushforward_pi_inv(fc, DeckTransformation{1, kTwoPi});
    CHECK(viaMorphism.uFactor.center == direct.uFactor.center);
    CHECK(viaMorphism.vFactor.center == direct.vFactor.center);
    CHECK(viaMorphism.chart().is_plane());

    const TestFunction2D fp = random_plane_bump(rng);
    const TestFunction2D moved =
        pushforward(EmbeddingMorphism::time_translation(Chart::plane(), 1.3), fp);
    CHECK(moved.uFactor.center == doctest::Approx(fp.uFactor.center + 1.3).epsilon(1e-15));
    CHECK(moved.vFactor.center == doctest::Approx(fp.vFactor.center + 1.3).epsilon(1e-15));

    const TestFunction2D same = pushforward(EmbeddingMorphism::identity(Chart::plane()), fp);
    CHECK(same.uFactor.center == fp.uFactor.center);
    CHECK(same.vFactor.center == fp.vFactor.center);

    CHECK_THROWS_AS(pushforward(EmbeddingMorphism::lift(kTwoPi, 0), fp),
                    std::invalid_argument);
}

TEST_CASE("algebra elements form ordered monomials") {
    SeededRng rng(90002);
    const AlgebraElement one = AlgebraElement::unit(Chart::plane());
    CHECK(one.degree() == 0);

    const TestFunction2D f = random_plane_bump(rng);
    const TestFunction2D g = random_plane_bump(rng);
    const AlgebraElement fg = AlgebraElement::field(f).product(AlgebraElement::field(g));
    CHECK(fg.degree() == 2);
    CHECK(fg.generators()[0].uFactor.center == f.uFactor.center);
    CHECK(fg.generators()[1].uFactor.center == g.uFactor.center);

    const AlgebraElement gf = fg.adjoint();
    CHECK(gf.generators()[0].uFactor.center == g.uFactor.center);
    CHECK(gf.generators()[1].uFactor.center == f.uFactor.center);

    CHECK((one.product(fg)).degree() == 2);
    const AlgebraElement cylElem = random_element(rng, 1, true);
    CHECK_THROWS_AS(fg.product(cylElem), std::invalid_argument);
}

TEST_CASE("alpha is a homomorphism and respects composition") {
    SeededRng rng(90003);
    const EmbeddingMorphism lift0 = EmbeddingMorphism::lift(kTwoPi, 0);
    const EmbeddingMorphism lift2 = EmbeddingMorphism::lift(kTwoPi, 2);
    const EmbeddingMorphism deck1 = EmbeddingMorphism::deck(kTwoPi, 1);
    const EmbeddingMorphism cylShift =
        EmbeddingMorphism::time_translation(cyl_chart(), 0.45);

    SUBCASE("identity acts trivially") {
        const AlgebraElement a = random_element(rng, 3, false);
        CHECK(element_deviation(alpha_apply(EmbeddingMorphism::identity(Chart::plane()), a),
                                a) == 0.0);
    }

    SUBCASE("products map to products") {
        const AlgebraElement a = random_element(rng, 2, true);
        const AlgebraElement b = random_element(rng, 1, true);
        const AlgebraElement lhs = alpha_apply(lift2, a.product(b));
        const AlgebraElement rhs = alpha_apply(lift2, a).product(alpha_apply(lift2, b));
        CHECK(element_deviation(lhs, rhs) <= 1e-15);
    }

    SUBCASE("composition law") {
        for (int trial = 0; trial < 20; ++trial) {
            const AlgebraElement a = random_element(rng, 1 + trial % 3, true);
            const EmbeddingMorphism outer = (trial % 2 == 0) ? deck1 : EmbeddingMorphism::time_translation(Chart::plane(), 0.8);
            const EmbeddingMorphism inner = (trial % 3 == 0) ? lift0 : compose(lift2, cylShift);
            const AlgebraElement viaComposite = alpha_apply(compose(outer, inner), a);
            const AlgebraElement viaNesting = alpha_apply(outer, alpha_apply(inner, a));
            CHECK(element_deviation(viaComposite, viaNesting) <= 1e-12);
        }
    }

    SUBCASE("chart mismatch rejected") {
        const AlgebraElement planeElem = random_element(rng, 1, false);
        CHECK_THROWS_AS(alpha_apply(lift0, planeElem), std::invalid_argument);
    }
}

TEST_CASE("lifting commutes with time translation") {
    SeededRng rng(90004);
    const TestFunction2D f = random_cylinder_bump(rng);
    CHECK(lift_time_commutation_check(f, 0.0, 0).deviation == 0.0);
    for (std::int64_t branch : {0L, 1L, -1L}) {
        const CommutationCheck check = lift_time_commutation_check(f, 0.3, branch);
        CHECK(check.pass);
        CHECK(check.deviation < 1e-12);
    }
}

TEST_CASE("quasi-free state evaluates by pair partitions") {
    const CorrelatorKernel kernel = CorrelatorKernel::plane_vacuum(
        CorrelatorKernel::Level::Differentiated, Epsilon(1e-8));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane-vacuum");
    CHECK(omega.label() == "plane-vacuum");
    CHECK(omega.chart().is_plane());
    CHECK(omega.kernel().kind() == CorrelatorKernel::Kind::PlaneVacuum);

    CHECK(omega.evaluate(AlgebraElement::unit(Chart::plane())) == complex(1.0, 0.0));

    std::vector<TestFunction2D> fs;
    for (double x : {0.5, 3.2, 6.0, 9.1}) {
        fs.push_back(centered_test_function(
            Diamond(SpacetimePoint::plane(0.0, x), 0.25, 0.25), 0.9));
    }

    const AlgebraElement phi1 = AlgebraElement::field(fs[0]);
    CHECK(std::abs(omega.evaluate(phi1)) == 0.0);
    CHECK(std::abs(omega.evaluate(phi1.product(phi1).product(phi1))) == 0.0);

    const complex pair = omega.evaluate(phi1.product(AlgebraElement::field(fs[1])));
    CHECK(rel_diff(pair, smear(kernel, fs[0], fs[1], complex(0.0, 0.0))) < 1e-12);
    CHECK(rel_diff(pair, omega.two_point(fs[0], fs[1])) < 1e-12);

    AlgebraElement quartic = AlgebraElement::unit(Chart::plane());
    for (const TestFunction2D& f : fs) quartic = quartic.product(AlgebraElement::field(f));
    auto w = [&](int i, int j) { return omega.two_point(fs[i], fs[j]); };
    const complex wick = w(0, 1) * w(2, 3) + w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
    CHECK(rel_diff(omega.evaluate(quartic), wick) < 1e-12);

    // Positivity of omega(a* a) for a degree-two monomial.
    const AlgebraElement a = phi1.product(AlgebraElement::field(fs[1]));
    const complex norm2 = omega.evaluate(a.adjoint().product(a));
    CHECK(norm2.real() >= -1e-11 * std::max(1.0, std::abs(norm2)));
}

TEST_CASE("pair correlator sweep matches individual smears") {
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-8));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane-thermal");
    SeededRng rng(90005);
    const auto [f, g] = cylkms::testing::kms_bump_pair(rng, Chart::plane());
    const std::vector<complex> shifts = {complex(0.0, 0.0), complex(-0.5, 0.0),
                                         complex(0.3, -0.2)};
    const std::vector<complex> swept = omega.pair_correlator_sweep(f, g, shifts);
    REQUIRE(swept.size() == shifts.size());
    for (std::size_t k = 0; k < shifts.size(); ++k) {
        CHECK(rel_diff(swept[k], smear(kernel, f, g, shifts[k])) < 1e-12);
    }
}

TEST_CASE("state pullback through the covering maps") {
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.3, Epsilon(1e-8));
    const QuasiFreeState base = QuasiFreeState::from_kernel(kernel, "plane-thermal");
    const EmbeddingMorphism lift0 = EmbeddingMorphism::lift(kTwoPi, 0);
    const QuasiFreeState pulled = state_pullback(base, lift0);

    CHECK(pulled.chart().is_cylinder());
    CHECK(pulled.kernel().kind() == CorrelatorKernel::Kind::PlaneThermal);
    CHECK(pulled.evaluate(AlgebraElement::unit(cyl_chart())) == complex(1.0, 0.0));

    SeededRng rng(90006);
    SUBCASE("two-point values factor through the pushforward") {
        for (int trial = 0; trial < 5; ++trial) {
            const TestFunction2D f = random_cylinder_bump(rng);
            const TestFunction2D g = random_cylinder_bump(rng);
            const complex viaPullback = pulled.two_point(f, g);
            const complex direct =
                base.two_point(pushforward(lift0, f), pushforward(lift0, g));
            CHECK(rel_diff(viaPullback, direct) < 1e-12);
        }
    }

    SUBCASE("branch independence of the pulled-back state") {
        const QuasiFreeState pulled1 =
            state_pullback(base, EmbeddingMorphism::lift(kTwoPi, 1));
        for (int trial = 0; trial < 20; ++trial) {
            const TestFunction2D f = random_cylinder_bump(rng);
            const TestFunction2D g = random_cylinder_bump(rng);
            CHECK(rel_diff(pulled.two_point(f, g), pulled1.two_point(f, g)) < 1e-10);
        }
    }

    SUBCASE("contravariance") {
        const EmbeddingMorphism deck1 = EmbeddingMorphism::deck(kTwoPi, 1);
        const QuasiFreeState viaComposite = state_pullback(base, compose(deck1, lift0));
        const QuasiFreeState viaNesting = state_pullback(state_pullback(base, deck1), lift0);
        for (int trial = 0; trial < 10; ++trial) {
            const AlgebraElement a = random_element(rng, 2, true);
            CHECK(rel_diff(viaComposite.evaluate(a), viaNesting.evaluate(a)) < 1e-10);
        }
    }

    SUBCASE("chart mismatch rejected") {
        CHECK_THROWS_AS(
            state_pullback(base, EmbeddingMorphism::time_translation(cyl_chart(), 0.2)),
            std::invalid_argument);
    }
}

TEST_CASE("observable classes are deck orbits") {
    SeededRng rng(90007);
    const TestFunction2D fp = random_plane_bump(rng);
    const AlgebraElement a = AlgebraElement::field(fp);

    const std::vector<AlgebraElement> trivial = observable_class(a, kTwoPi, 0);
    CHECK(trivial.size() == 1);
    CHECK(element_deviation(trivial[0], a) == 0.0);

    const std::vector<AlgebraElement> orbit = observable_class(a, kTwoPi, 2);
    REQUIRE(orbit.size() == 5);
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        const double shift =
            orbit[i].generators()[0].uFactor.center - fp.uFactor.center;
        const double branches = shift / kTwoPi;
        CHECK(std::abs(branches - std::round(branches)) < 1e-12);
        CHECK(std::abs(branches) <= 2.0 + 1e-12);
    }

    // Translation invariance of the plane thermal state: moving a whole
    // monomial through a deck translation leaves its expectation unchanged.
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-8));
    const QuasiFreeState omega = QuasiFreeState::from_kernel(kernel, "plane-thermal");
    const TestFunction2D gp = random_plane_bump(rng);
    const complex baseValue = omega.evaluate(a.product(AlgebraElement::field(gp)));
    const EmbeddingMorphism deck1 = EmbeddingMorphism::deck(kTwoPi, 1);
    const complex translated =
        omega.evaluate(alpha_apply(deck1, a.product(AlgebraElement::field(gp))));
    CHECK(rel_diff(baseValue, translated) < 1e-10);

    CHECK_THROWS_AS(observable_class(a, kTwoPi, -1), std::invalid_argument);
    const AlgebraElement cylElem = random_element(rng, 1, true);
    CHECK_THROWS_AS(observable_class(cylElem, kTwoPi, 1), std::invalid_argument);
}

TEST_CASE("element deviation validates its inputs") {
    SeededRng rng(90008);
    const AlgebraElement a = random_element(rng, 2, false);
    const AlgebraElement b = random_element(rng, 1, false);
    CHECK_THROWS_AS(element_deviation(a, b), std::invalid_argument);
    CHECK(element_deviation(a, a) == 0.0);
}

TEST_CASE("functor law suite passes and is deterministic") {
    const std::vector<LawReport> first = run_functor_checks(20260823);
    const std::vector<LawReport> second = run_functor_checks(20260823);
    REQUIRE(first.size() == 6);
    REQUIRE(second.size() == first.size());

    const std::vector<std::string> expected = {
        "identity-acts-trivially", "composition-law",      "lift-time-commutation",
        "pullback-contravariance", "positivity-transport", "deck-orbit-invariance"};
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].name == expected[i]);
        CHECK(first[i].pass);
        CHECK(first[i].deviation <= first[i].tolerance);
        CHECK(first[i].deviation == second[i].deviation);
    }
}
