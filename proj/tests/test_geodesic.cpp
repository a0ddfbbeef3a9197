#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geoproj/zoo.hpp"

using namespace geoproj;
using std::numbers::pi;

namespace {

MetricChart euclid() { return MetricChart("euclid", 1.0, 0.0, 1.0, Signature::Riemannian); }

GeodesicState unit_on_sphere(double r, double th, double angle) {
    // Unit vector for dr^2 + sin^2 r dth^2 at angle to the meridian.
    return {0.0, r, th, std::cos(angle), std::sin(angle) / std::sin(r)};
}

}  // namespace

TEST_CASE("dopri5 reproduces the harmonic oscillator") {
    std::array<double, 2> y{1.0, 0.0};
    double t = 0.0;
    auto f = [](double, const std::array<double, 2>& s, std::array<double, 2>& ds) {
        ds = {s[1], -s[0]};
        return RhsStatus::Ok;
    };
    const OdeStop st = integrate_dopri5<2>(f, t, y, 10.0, IntegratorOptions{}, [](double, const auto&) { return true; });
    CHECK(st == OdeStop::Reached);
    CHECK(t == 10.0);
    CHECK(y[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
    CHECK(y[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));
}

TEST_CASE("flat geodesics are straight lines") {
    const GeodesicTrace tr = integrate_geodesic(euclid(), {0, 0.5, -1.0, 0.3, 0.7}, 3.0);
    CHECK(tr.reason == Termination::TimeLimit);
    CHECK(tr.back().x == doctest::Approx(0.5 + 0.9));
    CHECK(tr.back().y == doctest::Approx(-1.0 + 2.1));
    const auto s = advance(euclid(), {0, 0, 0, 1, 1}, 0.25);
    REQUIRE(s);
    CHECK(s->x == doctest::Approx(0.25));
}

TEST_CASE("integration runs backwards") {
    const GeodesicTrace tr = integrate_geodesic(euclid(), {0, 0, 0, 1, 0}, -2.0);
    CHECK(tr.back().t == -2.0);
    CHECK(tr.back().x == doctest::Approx(-2.0));
}

TEST_CASE("leaving the domain is reported") {
    const MetricChart h("half", 1.0, 0.0, 1.0, Signature::Riemannian,
                        Domain{Box{-10, 10, 0, 10}, {}});
    const GeodesicTrace tr = integrate_geodesic(h, {0, 0, 1, 0, -1}, 5.0);
    CHECK(tr.reason == Termination::DomainExit);
    CHECK(tr.back().y >= 0.0);
    CHECK(tr.back().y < 1e-6);
}

TEST_CASE("sphere great circle returns after 2 pi") {
    const MetricChart s = round_sphere();
    const GeodesicState s0 = unit_on_sphere(1.2, 0.3, 0.7);
    const auto s1 = advance(s, s0, 2 * pi);
    REQUIRE(s1);
    CHECK(return_distance(s, s0, *s1) < 1e-7);
    const ClosureResult c = detect_closure(s, s0, 10.0);
    CHECK(c.closed);
    CHECK(c.period == doctest::Approx(2 * pi).epsilon(1e-6));
}

TEST_CASE("energy and Clairaut integral are conserved on the sphere") {
    const MetricChart s = round_sphere();
    const GeodesicState s0 = unit_on_sphere(0.9, 0.0, 1.1);
    const GeodesicTrace tr = integrate_geodesic(s, s0, 20.0);
    double e_drift = 0.0, c_drift = 0.0;
    const double c0 = std::pow(std::sin(s0.x), 2) * s0.vy;
    for (const auto& st : tr.samples) {
        e_drift = std::max(e_drift, std::fabs(energy(s, st) - 1.0));
        c_drift = std::max(c_drift, std::fabs(std::pow(std::sin(st.x), 2) * st.vy - c0));
    }
    CHECK(e_drift < 1e-7);
    CHECK(c_drift < 1e-7);
}

TEST_CASE("reversibility") {
    const MetricChart m = punctured_plane_family(1.0, 0.5).chart;
    const GeodesicState s0{0, 1.0, 0.5, 0.3, -0.2};
    const GeodesicTrace fw = integrate_geodesic(m, s0, 1.0);
    REQUIRE(fw.reason == Termination::TimeLimit);
    GeodesicState b = fw.back();
    b.t = 0;
    b.vx = -b.vx;
    b.vy = -b.vy;
    const GeodesicTrace bw = integrate_geodesic(m, b, 1.0);
    CHECK(bw.back().x == doctest::Approx(s0.x).epsilon(1e-8));
    CHECK(bw.back().y == doctest::Approx(s0.y).epsilon(1e-8));
    CHECK(-bw.back().vx == doctest::Approx(s0.vx).epsilon(1e-8));
}

TEST_CASE("Jacobi fields: linear in flat space") {
    const MetricChart e = euclid();
    const GeodesicState s0{0, 0, 0, 1, 0};
    const GeodesicTrace tr = integrate_geodesic(e, s0, 2.0);
    JacobiState j0;
    j0.base = s0;
    j0.j = {0.0, 0.0};
    j0.j_cov = {0.0, 1.0};
    const auto js = integrate_jacobi(e, tr, j0);
    REQUIRE(js.size() == tr.samples.size());
    for (const auto& j : js) CHECK(j.j[1] == doctest::Approx(j.base.t).epsilon(1e-9));
}

TEST_CASE("Jacobi fields: sin t along a sphere equator") {
    const MetricChart s = round_sphere();
    // Equator r = pi/2, moving in theta at unit speed; J = sin(t) d/dr.
    const GeodesicState s0{0, pi / 2, 0, 0, 1};
    const GeodesicTrace tr = integrate_geodesic(s, s0, 3.0);
    JacobiState j0;
    j0.base = s0;
    j0.j_cov = {1.0, 0.0};
    for (const auto& j : integrate_jacobi(s, tr, j0)) CHECK(j.j[0] == doctest::Approx(std::sin(j.base.t)).epsilon(1e-8));
}

TEST_CASE("conjugate points") {
    const MetricChart s = round_sphere();
    const auto cps = find_conjugate_points(s, unit_on_sphere(1.0, 0.0, 0.4), 7.0);
    REQUIRE(cps.size() == 2);
    CHECK(cps[0] == doctest::Approx(pi).epsilon(1e-7));
    CHECK(cps[1] == doctest::Approx(2 * pi).epsilon(1e-7));
    CHECK(find_conjugate_points(MetricChart("e", 1.0, 0.0, 1.0, Signature::Riemannian), {0, 0, 0, 1, 1}, 10.0)
              .empty());
}

TEST_CASE("random initial states respect domain and causal class") {
    const MetricChart cp = clifton_pohl().chart;
    std::mt19937_64 rng(5);
    for (const auto& s : random_initial_states(cp, rng, 30, CausalClass::Timelike)) {
        CHECK(cp.contains(s.pos()));
        CHECK(classify(cp, s.pos(), s.vel()) == CausalClass::Timelike);
        CHECK(std::hypot(s.vx, s.vy) == doctest::Approx(1.0));
    }
    std::mt19937_64 a(9), b(9);
    const auto sa = random_initial_states(cp, a, 5), sb = random_initial_states(cp, b, 5);
    for (int i = 0; i < 5; ++i) CHECK(sa[i].x == sb[i].x);
}

TEST_CASE("blow-up near the Clifton-Pohl puncture ends as a singularity") {
    const MetricChart cp = clifton_pohl().chart;
    // Radial null lines through the origin reach it in finite affine time.
    const GeodesicTrace tr = integrate_geodesic(cp, {0, 1.0, 0.0, -1.0, 0.0}, 100.0);
    CHECK(tr.reason != Termination::TimeLimit);
}
