#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geoproj/zoo.hpp"

using namespace geoproj;
using std::numbers::pi;

namespace {

const ScalarField X = ScalarField::x();
const ScalarField Y = ScalarField::y();
constexpr double inf = std::numeric_limits<double>::infinity();

MetricChart euclid() { return MetricChart("euclid", 1.0, 0.0, 1.0, Signature::Riemannian); }

MetricChart hyperbolic() {
    const ScalarField w = 1.0 / (Y * Y);
    return MetricChart("half-plane", w, 0.0, w, Signature::Riemannian, Domain{Box{-inf, inf, 0.0, inf}, {}});
}

// A generic Lorentzian metric with all coefficients nonconstant.
MetricChart generic() {
    return MetricChart("generic", 0.3 * sin(X), 1.0 + 0.2 * X * Y, 0.5 + 0.1 * cos(Y), Signature::Lorentzian,
                       Domain{Box{-1, 1, -1, 1}, {}});
}

}  // namespace

TEST_CASE("coefficients and signature") {
    const MetricChart m = generic();
    const Sym2 g = m.matrix({0.2, 0.3});
    CHECK(g.xx == doctest::Approx(0.3 * std::sin(0.2)));
    CHECK(g.xy == doctest::Approx(1.0 + 0.2 * 0.06));
    CHECK(signature_violations(m, sample_grid(m, 10)) == 0);
    CHECK(signature_violations(m.renamed("wrong").with_options({}), sample_grid(m, 10)) == 0);
    const MetricChart bad("bad", 1.0, 0.0, 1.0, Signature::Lorentzian);
    CHECK(signature_violations(bad, sample_grid(bad, 5)) == 25);
}

TEST_CASE("points outside the domain raise DomainError") {
    CHECK_THROWS_AS(hyperbolic().matrix({0.0, -1.0}), DomainError);
    CHECK_THROWS_AS(generic().jet2({2.0, 0.0}), DomainError);
}

TEST_CASE("metric compatibility of the Christoffel symbols") {
    // d_k g_ij = Gamma^l_ki g_lj + Gamma^l_kj g_il
    const MetricChart m = generic();
    for (Point p : {Point{0.2, 0.3}, Point{-0.5, 0.1}}) {
        const MetricJet jet = m.jet1(p);
        const Christoffel G = christoffel(jet);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double rhs = 0.0;
                    for (int l = 0; l < 2; ++l) rhs += G[l][k][i] * jet.g.at(l, j) + G[l][k][j] * jet.g.at(i, l);
                    CHECK(jet.dg[k].at(i, j) == doctest::Approx(rhs).epsilon(1e-12));
                }
    }
}

TEST_CASE("Christoffel derivatives match finite differences") {
    const MetricChart m = generic();
    const Point p{0.2, -0.3};
    const ChristoffelDerivative dG = christoffel_derivative(m.jet2(p));
    const double h = 1e-6;
    for (int mm = 0; mm < 2; ++mm) {
        const Point a{p.x + (mm == 0 ? h : 0), p.y + (mm == 1 ? h : 0)};
        const Point b{p.x - (mm == 0 ? h : 0), p.y - (mm == 1 ? h : 0)};
        const Christoffel ga = christoffel(m, a), gb = christoffel(m, b);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(dG[mm][k][i][j] == doctest::Approx((ga[k][i][j] - gb[k][i][j]) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("Gaussian curvature of model surfaces") {
    CHECK(gaussian_curvature(euclid(), {0.3, 0.4}) == doctest::Approx(0.0));
    for (Point p : {Point{0.5, 0.5}, Point{2.0, 3.0}}) CHECK(gaussian_curvature(hyperbolic(), p) == doctest::Approx(-1.0));
    const MetricChart s = round_sphere();
    for (Point p : {Point{0.4, 0.0}, Point{2.0, 1.0}}) CHECK(gaussian_curvature(s, p) == doctest::Approx(1.0));
}

TEST_CASE("curvature of a conformal metric") {
    // K = -exp(-2 phi) Laplacian(phi) for exp(2 phi)(dx^2 + dy^2).
    const ScalarField phi = 0.3 * sin(X) * cos(Y);
    const ScalarField w = exp(2.0 * phi);
    const MetricChart m("conformal", w, 0.0, w, Signature::Riemannian);
    for (Point p : {Point{0.1, 0.2}, Point{-0.7, 1.3}}) {
        const double lap = -0.6 * std::sin(p.x) * std::cos(p.y);
        const double want = -std::exp(-2 * 0.3 * std::sin(p.x) * std::cos(p.y)) * lap;
        CHECK(gaussian_curvature(m, p) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("Clifton-Pohl curvature and its axis limit") {
    // For 2 lambda dx dy, K = -(1/lambda) d_x d_y log lambda; with
    // lambda = 1/(x^2 + y^2) this is -4xy/(x^2 + y^2).
    const MetricChart cp = clifton_pohl().chart;
    for (Point p : {Point{1, 1}, Point{2, 2}, Point{0.5, -1.5}, Point{-2, 0.3}})
        CHECK(gaussian_curvature(cp, p) == doctest::Approx(-4 * p.x * p.y / (p.x * p.x + p.y * p.y)));
    CHECK(gaussian_curvature_limit(cp, {1, 0}, {0, 1}) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("pullback is functorial and preserves curvature") {
    const MetricChart m = generic();
    const ChartMap phi("phi", X + 0.1 * Y * Y, 0.5 * Y);
    const ChartMap psi("psi", 0.8 * X, Y + 0.05 * X);
    const MetricChart a = pullback(pullback(m, phi), psi);
    const MetricChart b = pullback(m, compose(phi, psi));
    for (Point p : {Point{0.1, 0.2}, Point{-0.3, 0.4}}) {
        const Sym2 ga = a.matrix(p), gb = b.matrix(p);
        CHECK(ga.xx == doctest::Approx(gb.xx));
        CHECK(ga.xy == doctest::Approx(gb.xy));
        CHECK(ga.yy == doctest::Approx(gb.yy));
        CHECK(gaussian_curvature(pullback(m, phi), p) == doctest::Approx(gaussian_curvature(m, phi.apply(p))));
    }
}

TEST_CASE("chart maps") {
    const ChartMap phi("shift", X + 1.0, 2.0 * Y, X - 1.0, 0.5 * Y);
    CHECK(phi.apply({1, 2}).x == 2.0);
    CHECK(phi.apply({1, 2}).y == 4.0);
    CHECK(phi.inverse_residual({{0, 0}, {1, -3}}) == 0.0);
    const auto J = phi.jacobian_at({0.3, 0.1});
    CHECK(J[0][0] == 1.0);
    CHECK(J[1][1] == 2.0);
    CHECK_THROWS_AS(ChartMap("n", X, Y).inverse(), std::logic_error);
}

TEST_CASE("causal classification") {
    const MetricChart f = flat_null();
    CHECK(classify(f, {0, 0}, {1, 0}) == CausalClass::Lightlike);
    CHECK(classify(f, {0, 0}, {1, 1}) == CausalClass::Spacelike);
    CHECK(classify(f, {0, 0}, {1, -1}) == CausalClass::Timelike);
}

TEST_CASE("Killing residual") {
    const MetricChart s = round_sphere();
    CHECK(killing_residual(s, {0.0, 1.0}, sample_grid(s, 8)) < 1e-12);
    CHECK(killing_residual(s, {1.0, 0.0}, sample_grid(s, 8)) > 1e-2);
    const KillingChart cp = clifton_pohl();
    CHECK(killing_residual(cp.chart, cp.killing, sample_grid(cp.chart, 8)) < 1e-12);
}

TEST_CASE("sample grids stay inside the domain") {
    const MetricChart cp = clifton_pohl().chart;
    for (const auto& p : sample_grid(cp, 11)) CHECK(cp.contains(p));
    CHECK(grid_points(Box{0, 1, 0, 1}, 4, 5).size() == 20);
}
