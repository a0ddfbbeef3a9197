// Geodesic and Jacobi-field integration, conjugate points, closed geodesics.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geoproj/metric.hpp"
#include "geoproj/ode.hpp"

namespace geoproj {

struct GeodesicState {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;

    Point pos() const { return {x, y}; }
    Vec2 vel() const { return {vx, vy}; }
};

enum class Termination { TimeLimit, DomainExit, Singularity, ClosureDetected };

const char* to_string(Termination t);

struct GeodesicTrace {
    std::vector<GeodesicState> samples;
    Termination reason = Termination::TimeLimit;

    const GeodesicState& front() const { return samples.front(); }
    const GeodesicState& back() const { return samples.back(); }
    double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

struct JacobiState {
    GeodesicState base;
    Vec2 j{};       // Jacobi field, coordinate components
    Vec2 j_dot{};   // coordinate derivative dJ/dt
    Vec2 j_cov{};   // covariant derivative DJ/dt
};

// Right-hand side of the geodesic equation x'' = -Gamma(x)(x', x').
RhsStatus geodesic_rhs(const MetricChart& m, const std::array<double, 4>& s, std::array<double, 4>& ds);

double energy(const MetricChart& m, const GeodesicState& s);

// Integrates from s0 until t0 + t_max (t_max may be negative to run backwards).
GeodesicTrace integrate_geodesic(const MetricChart& m, const GeodesicState& s0, double t_max,
                                 const IntegratorOptions& opts = {});

// State at exactly s0.t + dt; nullopt when the domain is left first.
std::optional<GeodesicState> advance(const MetricChart& m, const GeodesicState& s0, double dt,
                                     const IntegratorOptions& opts = {});

// Integrates the linearised geodesic flow jointly with the base geodesic
// starting at trace.front() and reports the field at each trace sample time.
// The initial data are j0.j and j0.j_cov; j0.j_dot is ignored.
std::vector<JacobiState> integrate_jacobi(const MetricChart& m, const GeodesicTrace& trace, const JacobiState& j0,
                                          const IntegratorOptions& opts = {});

// Jacobi field with J(0) = 0 and J'(0) g-orthogonal to the velocity (any
// transverse vector for null velocities). Returns the zeros of J after t = 0,
// located by sign changes of the area form vol(v, J) refined by bisection.
std::vector<double> find_conjugate_points(const MetricChart& m, const GeodesicState& s0, double t_max,
                                          const IntegratorOptions& opts = {}, double t_tol = 1e-8);

struct ClosureOptions {
    double tol = 1e-6;
    // Sampling step for the return-distance scan.
    double scan_step = 0.02;
    IntegratorOptions integrator{};
};

struct ClosureResult {
    bool closed = false;
    double period = 0.0;
    double distance = 0.0;  // return distance at `period` (or best near-return)
    Termination trace_end = Termination::TimeLimit;
};

// Return distance between two states: position (wrapped by chart periods)
// and Euclidean-normalised direction, max-norm.
double return_distance(const MetricChart& m, const GeodesicState& a, const GeodesicState& b);

ClosureResult detect_closure(const MetricChart& m, const GeodesicState& s0, double t_max,
                             const ClosureOptions& opts = {});

// Random initial conditions: uniform position in the chart's sample box
// (rejecting points outside the domain), velocity uniform on the Euclidean
// unit circle, optionally filtered by causal class.
std::vector<GeodesicState> random_initial_states(const MetricChart& m, std::mt19937_64& rng, int n,
                                                 std::optional<CausalClass> want = std::nullopt,
                                                 int max_attempts = 100000);

}  // namespace geoproj
