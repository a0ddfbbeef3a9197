// Fiber-polynomial first integrals I(p, v) = v.Q(p)v + L(p).v + c(p) of the
// geodesic flow, and the conservation harness that tests them.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geoproj/geodesic.hpp"

namespace geoproj {

struct SymField {
    ScalarField xx;
    ScalarField xy;
    ScalarField yy;
};

class FiberIntegral {
public:
    FiberIntegral(std::string name, SymField q, VectorField l, ScalarField c);

    const std::string& name() const { return name_; }
    const SymField& quadratic() const { return q_; }
    const VectorField& linear() const { return l_; }
    const ScalarField& constant() const { return c_; }

    double operator()(Point p, const Vec2& v) const;
    // Sum of absolute values of the individual terms; the scale used for
    // relative drift when I itself is near zero.
    double magnitude(Point p, const Vec2& v) const;
    // Gradient with respect to the fiber variable v.
    Vec2 fiber_gradient(Point p, const Vec2& v) const;

    FiberIntegral renamed(std::string name) const;

private:
    std::string name_;
    SymField q_;
    VectorField l_;
    ScalarField c_;
    std::shared_ptr<const Tape> tape_;

    std::array<double, 6> coeffs(Point p) const;
};

// I = a * A + b * B
FiberIntegral combine(double a, const FiberIntegral& A, double b, const FiberIntegral& B, std::string name = {});
// Square of a linear integral.
FiberIntegral square(const FiberIntegral& linear, std::string name = {});
// (phi^* I)(p, v) = I(phi(p), dphi v)
FiberIntegral pullback(const FiberIntegral& I, const ChartMap& phi);

FiberIntegral energy(const MetricChart& m);

// C(v) = g(K, v). Throws ConstructionError when K fails the sampled Killing test.
FiberIntegral clairaut(const MetricChart& m, const VectorField& k, double killing_tol = 1e-8, int grid = 12);

// Symbolic det(G)/det(Gbar); shared by the Darboux integral and the
// projective rescaling.
ScalarField determinant(const MetricChart& m);

// I(v) = (det g / det gbar)^(2/3) gbar(v, v), the power taken as cbrt(r)^2.
// Throws ConstructionError when the ratio vanishes or is not finite at a
// sampled point of g's domain.
FiberIntegral darboux_integral(const MetricChart& g, const MetricChart& gbar, int grid = 12);

enum class LiouvilleVariant {
    Standard,  // (h1(x) + h2(y)) (h2(y) dx^2 - s h1(x) dy^2)
    Swapped,   // (h1(x) + h2(y)) (h1(y) dx^2 - h2(x) dy^2)
};

// Quadratic integral of (h1(x) + h2(y)) (dx^2 + sign dy^2). h1 is read as a
// function of x and h2 as a function of y.
FiberIntegral liouville_integral(const ScalarField& h1, const ScalarField& h2, int sign,
                                 LiouvilleVariant variant = LiouvilleVariant::Standard);

struct ConservationOptions {
    int n_samples = 20;
    double t_max = 1.0;
    std::uint64_t seed = 1;
    double threshold = 1e-6;
    std::optional<CausalClass> causal;
    IntegratorOptions integrator{};
    // Initial states to use instead of random draws.
    std::vector<GeodesicState> starts;
};

struct TraceDrift {
    GeodesicState start;
    double drift = 0.0;     // max |I(t) - I(0)| / scale
    double duration = 0.0;  // affine length actually integrated
    Termination reason = Termination::TimeLimit;
};

struct ConservationReport {
    std::string chart;
    std::string integral;
    int n_samples = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    double max_drift = 0.0;
    bool pass = false;
    std::vector<TraceDrift> traces;
};

double drift_along(const FiberIntegral& I, const GeodesicTrace& trace);

ConservationReport check_conservation(const MetricChart& m, const FiberIntegral& I, const ConservationOptions& opts = {});

// Largest |I(p, v) - J(p, v)| / max(1, scale) over sampled points and unit directions.
double integral_difference(const FiberIntegral& I, const FiberIntegral& J, const std::vector<Point>& pts,
                           int directions = 8);

// Gram determinant of the fiber gradients of I and J at (p, v).
double gram_determinant(const FiberIntegral& I, const FiberIntegral& J, Point p, const Vec2& v);

}  // namespace geoproj
