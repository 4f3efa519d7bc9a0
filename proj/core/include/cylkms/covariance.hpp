#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cylkms/correlators.hpp"
#include "cylkms/geometry.hpp"
#include "cylkms/smearing.hpp"

namespace cylkms {

// Morphism between the two spacetimes in play, from the families that
// generate every diagram used here: branch-n lifts of the cylinder into the
// plane (the inverses of the covering projection), deck translations of the
// plane, and time translations of either chart.  Every such morphism
// factors as (time translation) after (branch map); composition adds branch
// integers and time shifts.
class EmbeddingMorphism {
  public:
    static EmbeddingMorphism identity(const Chart& chart);
    // Branch-n inverse of the covering projection: cylinder(period) -> plane.
    static EmbeddingMorphism lift(double period, std::int64_t branch);
    // Time translation within one chart.
    static EmbeddingMorphism time_translation(const Chart& chart, double tau);
    // Deck translation by branch periods: plane -> plane.
    static EmbeddingMorphism deck(double period, std::int64_t branch);

    const Chart& source() const { return source_; }
    const Chart& target() const { return target_; }
    const DeckTransformation& branch() const { return branch_; }
    const TimeTranslation& time_shift() const { return shift_; }

    friend EmbeddingMorphism compose(const EmbeddingMorphism& outer,
                                     const EmbeddingMorphism& inner);

  private:
    EmbeddingMorphism(Chart source, Chart target, DeckTransformation branch,
                      TimeTranslation shift);

    Chart source_;
    Chart target_;
    DeckTransformation branch_;
    TimeTranslation shift_;
};

// Head-to-tail composition outer after inner; requires
// inner.target() == outer.source().  Branch integers and time shifts add.
EmbeddingMorphism compose(const EmbeddingMorphism& outer, const EmbeddingMorphism& inner);

// Induced pushforward on test functions; requires f.chart() == psi.source().
TestFunction2D pushforward(const EmbeddingMorphism& psi, const TestFunction2D& f);

// A *-monomial in smeared field generators: an ordered list of test
// functions over one common chart, the empty list being the unit.  No
// commutation relations are imposed; states evaluate these symbols.  Test
// functions are real-valued, so each generator is self-adjoint and the
// adjoint of a monomial is its reversal.
class AlgebraElement {
  public:
    static AlgebraElement unit(const Chart& chart);
    static AlgebraElement field(const TestFunction2D& f);

    // Concatenation of generator lists; charts must agree.
    AlgebraElement product(const AlgebraElement& other) const;
    AlgebraElement adjoint() const;

    const Chart& chart() const { return chart_; }
    const std::vector<TestFunction2D>& generators() const { return generators_; }
    std::size_t degree() const { return generators_.size(); }

  private:
    AlgebraElement(Chart chart, std::vector<TestFunction2D> generators);

    Chart chart_;
    std::vector<TestFunction2D> generators_;
};

// The algebra homomorphism induced by a morphism: pushes every generator's
// test function forward, preserving order.  Requires the element's chart to
// match the morphism source.
AlgebraElement alpha_apply(const EmbeddingMorphism& psi, const AlgebraElement& a);

namespace detail {
struct StateImpl;
}

// A state determined entirely by its two-point kernel: degree-0 monomials
// evaluate to 1, odd degrees to 0, and even degrees to the sum over pair
// partitions of products of two-point values (each pair taken in its
// original order).  A pulled-back state evaluates elements by first
// applying the morphism's homomorphism and then the base state.
class QuasiFreeState {
  public:
    static QuasiFreeState from_kernel(const CorrelatorKernel& kernel, std::string label,
                                      QuadratureOptions opts = {});

    complex evaluate(const AlgebraElement& a) const;
    complex two_point(const TestFunction2D& f, const TestFunction2D& g) const;

    // Smeared kernel values at many relative time shifts:
    //   value[k] = integral f(p) K(t_p - t_p' + shifts[k], x_p - x_p') g(p')
    // built on one engine, so sweeping a long grid costs one kernel pass
    // per shift.  Pulled-back states delegate to their base state on the
    // pushed-forward functions (time shifts commute with the morphisms
    // used here), so lifted sweeps run at plane cost.
    std::vector<complex> pair_correlator_sweep(const TestFunction2D& f,
                                               const TestFunction2D& g,
                                               std::span<const complex> shifts) const;

    const Chart& chart() const;
    const std::string& label() const;
    // The underlying two-point kernel; for pulled-back states, the base's.
    const CorrelatorKernel& kernel() const;

    friend QuasiFreeState state_pullback(const QuasiFreeState& base,
                                         const EmbeddingMorphism& psi);

  private:
    explicit QuasiFreeState(std::shared_ptr<const detail::StateImpl> impl);
    std::shared_ptr<const detail::StateImpl> impl_;
};

// Dual action on states: (pullback of omega through psi)(a) = omega(alpha_psi(a)).
// Requires base.chart() == psi.target(); the result lives on psi.source().
QuasiFreeState state_pullback(const QuasiFreeState& base, const EmbeddingMorphism& psi);

// The deck-orbit representatives alpha_deck(n)(a) for n = -maxBranch ..
// maxBranch, all projecting to the same cylinder observable.
std::vector<AlgebraElement> observable_class(const AlgebraElement& a, double period,
                                             int maxBranch);

// Maximum pointwise deviation between the generators of two elements,
// sampled on a grid covering both supports.  Elements must have equal
// degree and chart.
double element_deviation(const AlgebraElement& a, const AlgebraElement& b,
                         int gridPoints = 50);

struct CommutationCheck {
    double deviation = 0.0;
    bool pass = false;
};

// Whether lifting to the plane commutes with time translation on the field
// generators: compares (lift after cylinder-time-shift) against
// (plane-time-shift after lift) applied to the generator of f.
CommutationCheck lift_time_commutation_check(const TestFunction2D& f, double tau,
                                             std::int64_t branch);

struct LawReport {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Seeded property suite over the functor laws: identity action, the
// composition law, lift/time-translation commutation, contravariance of
// the state pullback, positivity transport, and deck-orbit invariance of
// translation-invariant states.  Shared by the tests, the acceptance
// harness, and the command-line driver.
std::vector<LawReport> run_functor_checks(std::uint64_t seed);

}  // namespace cylkms
