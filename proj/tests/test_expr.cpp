#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geoproj/expr.hpp"

using namespace geoproj;
using std::numbers::pi;

namespace {

const ScalarField X = ScalarField::x();
const ScalarField Y = ScalarField::y();

// Central difference of f in x or y.
double fd(const ScalarField& f, Var v, double x, double y, double h = 1e-5) {
    if (v == Var::X) return (f.eval(x + h, y) - f.eval(x - h, y)) / (2 * h);
    return (f.eval(x, y + h) - f.eval(x, y - h)) / (2 * h);
}

std::vector<ScalarField> sample_fields() {
    return {
        sin(X * Y) + exp(X) / (1.0 + Y * Y),
        pow(X * X + Y * Y + 1.0, 1.5) - cbrt(X + 3.0),
        log(2.0 + cos(X)) * sqrt(1.0 + Y * Y) + asin(0.3 * X),
        cosh(0.5 * X) * sinh(Y) / (3.0 + sin(Y)),
        smooth_step(X + 0.5) * (Y - 2.0),
        mod(X + 0.1 * Y, 1.0) + bump(X + 1.0) * Y,
    };
}

}  // namespace

TEST_CASE("symbolic partials match central differences") {
    for (const auto& f : sample_fields()) {
        for (auto [x, y] : {std::pair{0.3, -0.4}, {-0.2, 0.7}, {0.45, 1.1}}) {
            CHECK(f.dx().eval(x, y) == doctest::Approx(fd(f, Var::X, x, y)).epsilon(1e-7));
            CHECK(f.dy().eval(x, y) == doctest::Approx(fd(f, Var::Y, x, y)).epsilon(1e-7));
        }
    }
}

TEST_CASE("mixed partials commute") {
    for (const auto& f : sample_fields()) {
        for (auto [x, y] : {std::pair{0.3, -0.4}, {-0.2, 0.7}}) {
            CHECK(f.dx().dy().eval(x, y) == doctest::Approx(f.dy().dx().eval(x, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("second derivative of sin is -sin") {
    const ScalarField f = sin(2.0 * X);
    for (double x : {-1.0, 0.2, 2.5}) CHECK(f.dx().dx().eval(x, 0) == doctest::Approx(-4 * std::sin(2 * x)));
}

TEST_CASE("constant folding and identities") {
    CHECK((ScalarField(2.0) * 3.0 + 1.0).is_constant());
    CHECK((ScalarField(2.0) * 3.0 + 1.0).constant_value() == 7.0);
    CHECK((X * 0.0).is_constant());
    CHECK(X.dy().is_constant());
    CHECK(X.dy().constant_value() == 0.0);
}

TEST_CASE("prefix text round trip") {
    for (const auto& f : sample_fields()) {
        const ScalarField g = parse_field(f.to_string());
        CHECK(g.to_string() == f.to_string());
        CHECK(g.eval(0.31, -0.27) == f.eval(0.31, -0.27));
    }
}

TEST_CASE("prefix parser") {
    CHECK(parse_field("(+ x 1 2)").eval(1, 0) == 4.0);
    CHECK(parse_field("(- x)").eval(3, 0) == -3.0);
    CHECK(parse_field("(^ (sin (* pi x)) 2)").eval(0.5, 0) == doctest::Approx(1.0));
    CHECK(parse_field("(mod x 1)").eval(2.25, 0) == doctest::Approx(0.25));
    CHECK(parse_field("(floor x 1)").eval(-0.5, 0) == -1.0);
    CHECK_THROWS_AS(parse_field("(sin x"), ConstructionError);
    CHECK_THROWS_AS(parse_field("(frobnicate x)"), ConstructionError);
    CHECK_THROWS_AS(parse_field("(^ x y)"), ConstructionError);
    CHECK_THROWS_AS(parse_field("x y"), ConstructionError);
}

TEST_CASE("infix parser") {
    CHECK(parse_infix("sin^2(pi x)").eval(0.25, 0) == doctest::Approx(0.5));
    CHECK(parse_infix("2 + sin(4 pi x)").eval(0.125, 0) == doctest::Approx(3.0));
    CHECK(parse_infix("-x^2").eval(3, 0) == -9.0);
    CHECK(parse_infix("(x + 1)^2").eval(2, 0) == 9.0);
    CHECK(parse_infix("x y / 2").eval(3, 4) == 6.0);
    CHECK(parse_infix("2^x").eval(3, 0) == doctest::Approx(8.0));
    CHECK(parse_infix("e^(2 x)").eval(0.5, 0) == doctest::Approx(std::numbers::e));
    CHECK(parse_infix("0.1 x^3").eval(2, 0) == doctest::Approx(0.8));
    CHECK(parse_infix("mod(x, 1)").eval(1.75, 0) == doctest::Approx(0.75));
    CHECK_THROWS_AS(parse_infix("x^y"), ConstructionError);
    CHECK_THROWS_AS(parse_infix("sin(x"), ConstructionError);
    CHECK_THROWS_AS(parse_infix("foo(x)"), ConstructionError);
    // Prefix text is recognised first, infix otherwise.
    CHECK(parse_expression("(+ x 1)").eval(1, 0) == 2.0);
    CHECK(parse_expression("(x + 1)*2").eval(1, 0) == 4.0);
}

TEST_CASE("substitution") {
    const ScalarField f = X * X + 3.0 * Y;
    const ScalarField g = f.substitute(Y, X);  // y^2 + 3x
    CHECK(g.eval(2, 5) == 31.0);
    CHECK(g.dx().eval(2, 5) == 3.0);
}

TEST_CASE("smooth step is flat outside [0, 1] and symmetric") {
    const ScalarField s = smooth_step(X);
    CHECK(s.eval(-0.5, 0) == 0.0);
    CHECK(s.eval(1.5, 0) == 1.0);
    CHECK(s.eval(0.5, 0) == doctest::Approx(0.5));
    for (double t : {0.1, 0.3, 0.45}) CHECK(s.eval(t, 0) + s.eval(1 - t, 0) == doctest::Approx(1.0));
    CHECK(s.dx().eval(-0.1, 0) == 0.0);
    CHECK(std::fabs(s.dx().dx().eval(1.1, 0)) < 1e-12);
}

TEST_CASE("bump derivatives") {
    for (int k = 0; k < 3; ++k) {
        const double h = 1e-6, t = 0.4;
        CHECK(bump_derivative(t, k + 1) ==
              doctest::Approx((bump_derivative(t + h, k) - bump_derivative(t - h, k)) / (2 * h)).epsilon(1e-6));
        CHECK(bump_derivative(-0.3, k) == 0.0);
    }
}

TEST_CASE("periodic wrap") {
    const ScalarField f = periodic(X * X, Var::X, 1.0);
    CHECK(f.eval(2.25, 0) == doctest::Approx(0.0625));
    CHECK(f.eval(-0.75, 0) == doctest::Approx(0.0625));
}

TEST_CASE("non-finite values raise DomainError") {
    CHECK_THROWS_AS(log(X).eval(-1, 0), DomainError);
    CHECK(std::isnan(log(X).eval_raw(-1, 0)));
    CHECK_THROWS_AS((1.0 / X).eval(0, 0), DomainError);
}

TEST_CASE("tape evaluates several roots at once") {
    const std::vector<ScalarField> roots{sin(X), sin(X) * Y, Y};
    const Tape t(roots);
    double out[3];
    t.eval(0.5, 2.0, out);
    CHECK(out[0] == doctest::Approx(std::sin(0.5)));
    CHECK(out[1] == doctest::Approx(2 * std::sin(0.5)));
    CHECK(out[2] == 2.0);
    CHECK(t.root_count() == 3);
}
