#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoproj/zoo.hpp"

using namespace geoproj;
using std::numbers::pi;

namespace {

const ScalarField X = ScalarField::x();
const ScalarField Y = ScalarField::y();

}  // namespace

TEST_CASE("band matrix identity") {
    CHECK(band_rescaling_residual(1, 0, 0.7, 0, 1) < 1e-15);
    CHECK(band_rescaling_residual(1, 0, 2, 0.5, 2) <= 1e-12);
    CHECK_THROWS_AS(band_rescaling_residual(1, 1, -1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(band_rescaling_residual(0, 0, 1, 0, 1), std::invalid_argument);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng) + 2.5, ell = u(rng), z = u(rng), mu = u(rng), beta = u(rng) + 2.5;
        if (std::fabs(1 + ell * z) < 0.05 || std::fabs(1 + (ell + mu * a) * z) < 0.05) continue;
        CHECK(band_rescaling_residual(a, ell, z, mu, beta) <= 1e-10);
    }
}

TEST_CASE("band metric determinant") {
    for (auto [a, ell] : {std::pair{2.0, 0.3}, {-1.0, 0.4}, {1.0, -0.5}}) {
        BandMetricSpec s;
        s.a = a;
        s.ell = ell;
        const MetricChart m = band_metric(s).chart;
        for (double x : {0.1, 0.35, 0.8}) {
            const double f = std::pow(std::sin(pi * x), 2);
            CHECK(m.matrix({x, 0.3}).det() == doctest::Approx(-a * a / std::pow(1 + ell * f, 3)));
            const Sym2 G = band_matrix(a, ell, f), M = m.matrix({x, 0.3});
            CHECK(G.xx == doctest::Approx(M.xx));
            CHECK(G.yy == doctest::Approx(M.yy));
        }
    }
    BandMetricSpec bad;
    bad.ell = -1.5;  // 1 + l f vanishes where f = 2/3
    CHECK_THROWS(band_metric(bad));
}

TEST_CASE("the band family is the projective rescaling by E + l C^2, scaled by a") {
    // For g = 2 dx dy + f dy^2 and C = g(d/dy, .): J = E + l C^2 has
    // det J = -(1 + l f), so (det g / det J)^2 J = J / (1 + l f)^2 = G_{1,l}.
    const KillingChart g = band_metric(BandMetricSpec{});
    const FiberIntegral E = energy(g.chart), C = clairaut(g.chart, g.killing);
    for (auto [a, ell] : {std::pair{2.0, 0.3}, {-1.0, 0.4}, {1.0, -0.5}}) {
        const MetricChart r = projective_rescaling(g.chart, combine(1.0, E, ell, square(C)), "r");
        BandMetricSpec s;
        s.a = a;
        s.ell = ell;
        const MetricChart direct = band_metric(s).chart;
        for (double x : {0.1, 0.6}) {
            const Sym2 pp = r.matrix({x, 0}), qq = direct.matrix({x, 0});
            CHECK(a * pp.xx == doctest::Approx(qq.xx));
            CHECK(a * pp.xy == doctest::Approx(qq.xy));
            CHECK(a * pp.yy == doctest::Approx(qq.yy));
        }
    }
}

TEST_CASE("punctured-plane family") {
    const MetricChart cp = clifton_pohl().chart;
    const MetricChart f10 = punctured_plane_family(1, 0).chart;
    for (Point p : {Point{0.3, 1.2}, Point{-1, 0.5}}) CHECK(f10.matrix(p).xy == doctest::Approx(cp.matrix(p).xy));
    CHECK_THROWS(punctured_plane_family(1, 1));
    CHECK_THROWS(punctured_plane_family(0, 0));
    const KillingChart k = punctured_plane_family(2, -1);
    CHECK(killing_residual(k.chart, k.killing, sample_grid(k.chart, 8)) < 1e-9);
    CHECK(gaussian_curvature(punctured_plane_family(1, 0.5).chart, {1, 1}) == doctest::Approx(-3.0));
}

TEST_CASE("Tannery surfaces") {
    const MetricChart round = tannery_riemannian({}).chart;
    for (Point p : {Point{0.5, 1.0}, Point{2.0, 0.0}}) CHECK(gaussian_curvature(round, p) == doctest::Approx(1.0));

    TannerySpec zero;
    const MetricChart neg = tannery_deformed(zero).chart;
    const Sym2 a = neg.matrix({1.0, 0.2}), b = round.matrix({1.0, 0.2});
    CHECK(a.xx == doctest::Approx(-b.xx));
    CHECK(a.yy == doctest::Approx(-b.yy));

    TannerySpec l2;
    l2.ell = -2;
    const MetricChart lor = tannery_deformed(l2).chart;
    CHECK(lor.signature() == Signature::Lorentzian);
    CHECK(signature_violations(lor, sample_grid(lor, 20)) == 0);
    TannerySpec l1;
    l1.ell = -1;
    CHECK_THROWS(tannery_deformed(l1));
}

TEST_CASE("Tannery surface with odd h has closed geodesics") {
    TannerySpec s;
    s.h = 0.1 * pow(X, 3.0);
    const MetricChart m = tannery_riemannian(s).chart;
    std::mt19937_64 rng(4);
    ClosureOptions co;
    co.tol = 1e-5;
    int tried = 0;
    for (const auto& st : random_initial_states(m, rng, 10)) {
        // skip near-meridians, which pass close to the poles
        if (std::fabs(std::pow(std::sin(st.x), 2) * st.vy) < 0.2 * std::sqrt(energy(m, st))) continue;
        ++tried;
        CHECK(detect_closure(m, st, 60.0, co).closed);
    }
    CHECK(tried > 3);
}

TEST_CASE("Tannery reparametrisation") {
    CHECK(tannery_reparam_x(0.0) == doctest::Approx(pi / 2));
    double prev = tannery_reparam_x(-4.0);
    for (double t = -3.9; t < 4.0; t += 0.1) {
        const double x = tannery_reparam_x(t);
        CHECK(x > prev);
        CHECK(x > pi / 4);
        CHECK(x < 3 * pi / 4);
        CHECK(tannery_reparam_x(-t) + x == doctest::Approx(pi));
        prev = x;
    }
    for (double t : {-2.0, -1.0, 0.5, 3.0}) {
        const double s2 = std::pow(std::sin(tannery_reparam_x(t)), 2);
        CHECK(s2 / (1 - 2 * s2) == doctest::Approx(-std::cosh(t) * std::cosh(t)).epsilon(1e-10));
    }
}

TEST_CASE("Clairaut truncation") {
    const KillingChart t = tannery_riemannian({});
    const MetricChart u = clairaut_truncation(t.chart, t.killing, 0.8);
    CHECK(u.contains({0.5, 0.0}));        // sin^2 0.5 < 0.64
    CHECK_FALSE(u.contains({pi / 2, 0}));  // sin^2 = 1
    // det J = sin^2 r (1 - sin^2 r / l^2) > 0 on U
    CHECK(u.signature() == Signature::Riemannian);
    const MetricChart g0u = t.chart.with_domain(u.domain());
    ConservationOptions o;
    o.n_samples = 10;
    CHECK(check_conservation(g0u, darboux_integral(g0u, u), o).pass);
}

TEST_CASE("periodic-shift construction") {
    PeriodicShiftSpec s;
    const PeriodicShiftResult r = periodic_shift_metric(s);
    CHECK(r.m == doctest::Approx(1.0));
    // A(x + n) = a^n A(x)
    for (double x : {0.2, 0.55})
        for (int n : {-1, 1, 2}) CHECK(r.A.eval(x + n, 0) == doctest::Approx(std::pow(2.0, n) * r.A.eval(x, 0)));
    CHECK(shift_seam_smoothness(r).max_jump < 1e-8);
    for (double x : {0.1, 0.5, 0.9})
        for (int n = -2; n <= 3; ++n) CHECK(shift_relation_residual(r, s, x, n) < 1e-8);
    CHECK(killing_residual(r.chart, r.killing, sample_grid(r.chart, 8)) < 1e-8);

    PeriodicShiftSpec over = s;
    over.eps = 0.9;
    CHECK_THROWS_AS(periodic_shift_metric(over), ConstructionError);
    PeriodicShiftSpec flat = s;
    flat.f = ScalarField(1.0);
    CHECK_THROWS_AS(periodic_shift_metric(flat), ConstructionError);
    PeriodicShiftSpec aperiodic = s;
    aperiodic.f = X * X;
    CHECK_THROWS_AS(periodic_shift_metric(aperiodic), ConstructionError);
}

TEST_CASE("catalogue") {
    for (const auto& it : catalogue()) {
        const ZooEntry e = make_zoo(it.name);
        CHECK(!e.integrals.empty());
        CHECK(e.integrals.front().name() == "energy");
        CHECK(signature_violations(e.chart, sample_grid(e.chart, 10)) == 0);
        if (e.killing) CHECK(killing_residual(e.chart, *e.killing, sample_grid(e.chart, 8)) < 1e-8);
    }
    try {
        make_zoo("nonexistent");
        FAIL("expected an exception");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("clifton-pohl") != std::string::npos);
    }
    ZooParams p;
    p.values = {{"a", "1"}, {"l", "0"}, {"f", "sin^2(pi x)"}};
    CHECK(make_zoo("band", p).chart.matrix({0.5, 0}).yy == doctest::Approx(1.0));
    p.values = {{"a", "x"}};
    CHECK_THROWS_AS(make_zoo("band", p), std::invalid_argument);
}
