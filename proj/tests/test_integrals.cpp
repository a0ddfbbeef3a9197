#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geoproj/zoo.hpp"

using namespace geoproj;
using std::numbers::pi;

namespace {

const ScalarField X = ScalarField::x();
const ScalarField Y = ScalarField::y();

}  // namespace

TEST_CASE("fiber integral evaluation") {
    const FiberIntegral I("I", {X, 1.0, Y}, {2.0, X}, 3.0);
    // x vx^2 + 2 vx vy + y vy^2 + 2 vx + x vy + 3
    CHECK(I({2, 5}, {1, -1}) == doctest::Approx(2 - 2 + 5 + 2 - 2 + 3));
    const Vec2 grad = I.fiber_gradient({2, 5}, {1, -1});
    CHECK(grad[0] == doctest::Approx(2 * 2 * 1 + 2 * -1 + 2));
    CHECK(grad[1] == doctest::Approx(2 * 1 + 2 * 5 * -1 + 2));
    CHECK(I.magnitude({2, 5}, {1, -1}) == doctest::Approx(2 + 2 + 5 + 2 + 2 + 3));
}

TEST_CASE("combine is linear") {
    const MetricChart s = round_sphere();
    const FiberIntegral E = energy(s);
    const FiberIntegral C = clairaut(s, {0.0, 1.0});
    const FiberIntegral Q = combine(2.0, E, -3.0, square(C));
    for (auto [p, v] : {std::pair{Point{1.0, 0.2}, Vec2{0.3, 0.9}}, {Point{2.0, 4.0}, Vec2{-1.0, 0.1}}})
        CHECK(Q(p, v) == doctest::Approx(2 * E(p, v) - 3 * C(p, v) * C(p, v)));
}

TEST_CASE("Darboux integral of a metric with itself is its energy") {
    const KillingChart cp = clifton_pohl();
    const FiberIntegral D = darboux_integral(cp.chart, cp.chart);
    const FiberIntegral E = energy(cp.chart);
    CHECK(integral_difference(D, E, sample_grid(cp.chart, 8)) < 1e-12);
}

TEST_CASE("Darboux integral throws on a vanishing determinant ratio") {
    const MetricChart g = round_sphere();
    const MetricChart degenerate("deg", 1.0, 0.0, 0.0, Signature::Riemannian, g.domain(), g.options());
    CHECK_THROWS_AS(darboux_integral(degenerate, g), ConstructionError);
}

TEST_CASE("Clairaut integral requires a Killing field") {
    CHECK_THROWS_AS(clairaut(round_sphere(), {1.0, 0.0}), ConstructionError);
    CHECK_NOTHROW(clairaut(round_sphere(), {0.0, 1.0}));
}

TEST_CASE("pullback of an integral") {
    const MetricChart s = round_sphere();
    const ChartMap shift("shift", X, Y + 0.5);
    const FiberIntegral C = clairaut(s, {0.0, 1.0});
    CHECK(integral_difference(pullback(C, shift), C, sample_grid(s, 6)) < 1e-14);
}

TEST_CASE("energy, Clairaut and g + t C^2 are conserved") {
    const KillingChart cp = clifton_pohl();
    const FiberIntegral E = energy(cp.chart), C = clairaut(cp.chart, cp.killing);
    ConservationOptions o;
    o.n_samples = 20;
    o.seed = 3;
    CHECK(check_conservation(cp.chart, E, o).pass);
    CHECK(check_conservation(cp.chart, C, o).pass);
    for (double t : {0.5, -0.7}) CHECK(check_conservation(cp.chart, combine(1.0, E, t, square(C)), o).pass);
}

TEST_CASE("a non-integral is flagged") {
    const MetricChart s = round_sphere();
    const FiberIntegral vx2("vx^2", {1.0, 0.0, 0.0}, {}, 0.0);
    const ConservationReport r = check_conservation(s, vx2, {});
    CHECK_FALSE(r.pass);
    CHECK(r.max_drift > 1e-2);
    CHECK(r.traces.size() == 20);
}

TEST_CASE("Gram determinant detects functional dependence") {
    const MetricChart s = round_sphere();
    const FiberIntegral E = energy(s), C = clairaut(s, {0.0, 1.0});
    CHECK(std::fabs(gram_determinant(E, C, {1.0, 0.0}, {0.6, 0.8})) > 1e-3);
    CHECK(std::fabs(gram_determinant(E, combine(2.0, E, 0.0, C), {1.0, 0.0}, {0.6, 0.8})) < 1e-12);
}

TEST_CASE("Liouville integral: the standard form is conserved") {
    const ScalarField h1 = 2.0 + sin(4 * pi * X), h2 = 5.0 - sin(4 * pi * Y);
    for (int sign : {1, -1}) {
        const MetricChart m = liouville_metric(h1, h2, sign, 1.0, 1.0);
        ConservationOptions o;
        o.seed = 2;
        CHECK(check_conservation(m, liouville_integral(h1, h2, sign), o).pass);
    }
    const MetricChart m = liouville_metric(h1, h2, 1, 1.0, 1.0);
    CHECK_FALSE(check_conservation(m, liouville_integral(h1, h2, 1, LiouvilleVariant::Swapped), {}).pass);
}

TEST_CASE("drift along a trace") {
    const MetricChart e("euclid", 1.0, 0.0, 1.0, Signature::Riemannian);
    const GeodesicTrace tr = integrate_geodesic(e, {0, 0, 0, 1, 0}, 2.0);
    const FiberIntegral x("x", {0.0, 0.0, 0.0}, {0.0, 0.0}, X);
    // x runs from 0 to 2; the scale falls back to the term magnitude at t = 0 (zero), then to 1.
    CHECK(drift_along(x, tr) > 1.0);
    CHECK(drift_along(energy(e), tr) < 1e-12);
}
