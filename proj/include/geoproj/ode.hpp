// Embedded Dormand-Prince 5(4) integrator with PI step-size control.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace geoproj {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-12;
    std::size_t max_steps = 2'000'000;
    // Geodesic runs only: stop as a singularity once the Euclidean speed or
    // the largest metric coefficient exceeds the given multiple of its
    // initial value (blow-up), and stop normally once the Euclidean chart
    // length reaches max_length.
    double max_speed_growth = 30.0;
    double max_coefficient_growth = 30.0;
    double max_length = std::numeric_limits<double>::infinity();
};

enum class RhsStatus { Ok, OutOfDomain, NonFinite };

enum class OdeStop { Reached, DomainExit, StepUnderflow, MaxSteps, Halted };

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

// Integrates dy/dt = f(t, y) from t0 to t_end (t_end may be below t0).
//
//   f(t, y, dy) -> RhsStatus
//   on_step(t, y) -> bool      called after every accepted step; false halts
//
// A failing right-hand side rejects the step and shrinks it; once the step
// falls below min_step the run stops with DomainExit (the last failure was a
// domain violation) or StepUnderflow. t and y hold the last accepted state.
template <std::size_t N, class Rhs, class OnStep>
OdeStop integrate_dopri5(Rhs&& f, double& t, std::array<double, N>& y, double t_end, const IntegratorOptions& opt,
                         OnStep&& on_step) {
    using State = std::array<double, N>;
    using namespace detail;

    const double dir = t_end >= t ? 1.0 : -1.0;
    if (t == t_end) return OdeStop::Reached;

    State k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    if (f(t, y, k1) != RhsStatus::Ok || !all_finite(k1)) return OdeStop::DomainExit;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        // Hairer's starting-step heuristic (first part).
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::fabs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, 0.1);
    }
    h = std::min({h, opt.max_step, std::fabs(t_end - t)});

    double fac_old = 1e-4;
    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    RhsStatus last_fail = RhsStatus::Ok;
    bool last_rejected = false;

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (h < opt.min_step) {
            return last_fail == RhsStatus::OutOfDomain ? OdeStop::DomainExit : OdeStop::StepUnderflow;
        }
        const double remaining = std::fabs(t_end - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const double hs = dir * h;

        RhsStatus st = RhsStatus::Ok;
        auto stage = [&](State& out, double tc, auto&& combine) {
            if (st != RhsStatus::Ok) return;
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * combine(i);
            if (!all_finite(tmp)) {
                st = RhsStatus::NonFinite;
                return;
            }
            st = f(tc, tmp, out);
            if (st == RhsStatus::Ok && !all_finite(out)) st = RhsStatus::NonFinite;
        };
        stage(k2, t + c2 * hs, [&](std::size_t i) { return a21 * k1[i]; });
        stage(k3, t + c3 * hs, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
        stage(k4, t + c4 * hs, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
        stage(k5, t + c5 * hs,
              [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
        stage(k6, t + hs,
              [&](std::size_t i) { return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]; });
        if (st == RhsStatus::Ok) {
            for (std::size_t i = 0; i < N; ++i)
                ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            if (!all_finite(ynew)) {
                st = RhsStatus::NonFinite;
            } else {
                st = f(t + hs, ynew, k7);
                if (st == RhsStatus::Ok && !all_finite(k7)) st = RhsStatus::NonFinite;
            }
        }
        if (st != RhsStatus::Ok) {
            last_fail = st;
            last_rejected = true;
            h *= 0.25;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e =
                hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);

        const double fac11 = std::pow(std::max(err, 1e-300), expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(fac_old, beta);
            fac = std::clamp(fac / safe, 0.1, 5.0);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            fac_old = std::max(err, 1e-4);
            last_rejected = false;
            last_fail = RhsStatus::Ok;

            t = last ? t_end : t + hs;
            y = ynew;
            k1 = k7;
            if (!on_step(t, static_cast<const State&>(y))) return OdeStop::Halted;
            if (last) return OdeStop::Reached;
            h = std::min(h_new, opt.max_step);
        } else {
            h = h / std::min(fac11 / safe, 5.0);
            last_rejected = true;
        }
    }
    return OdeStop::MaxSteps;
}

}  // namespace geoproj
