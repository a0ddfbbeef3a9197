// Deciders for projective equivalence, isometry and affinity of chart maps,
// and the period/offset search for isometries of Liouville metrics.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoproj/integrals.hpp"

namespace geoproj {

enum class Verdict { Equivalent, NotEquivalent, Inconclusive };
const char* to_string(Verdict v);

struct EquivalenceOptions {
    int n_samples = 20;
    std::uint64_t seed = 1;
    double drift_tol = 1e-6;
    double overlap_tol = 1e-4;
    int min_traces = 5;
    // Traces run until this Euclidean chart length (or t_cap of affine parameter).
    double segment_length = 1.0;
    double t_cap = 100.0;
    int resample = 200;
    IntegratorOptions integrator{};
};

struct EquivalenceReport {
    std::string chart;
    std::string other;
    Verdict verdict = Verdict::Inconclusive;
    double max_drift = 0.0;
    double max_overlap = 0.0;   // largest Hausdorff distance between matched traces
    double mean_overlap = 0.0;
    int n_samples = 0;
    int n_unit_length = 0;      // g-traces reaching the full segment length
    int n_compared = 0;         // trace pairs entering the overlap statistic
    std::uint64_t seed = 0;
    double drift_tol = 0.0;
    double overlap_tol = 0.0;
    std::string note;
    std::vector<double> drifts;
    std::vector<double> overlaps;
};

// (a) Darboux integral of (g, gbar) conserved along g-geodesics and (b)
// geodesics of g and gbar with the same initial vector trace the same curve.
EquivalenceReport check_projective_equivalence(const MetricChart& g, const MetricChart& gbar,
                                               const EquivalenceOptions& opts = {});

// Euclidean chart length of a trace, using cubic Hermite interpolation per step.
double chart_length(const GeodesicTrace& trace);

// n + 1 points equally spaced in chart arclength over [0, length].
std::vector<Point> resample_by_length(const GeodesicTrace& trace, double length, int n);

// Symmetric discrete Hausdorff distance.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

struct MapCheck {
    bool pass = false;
    double residual = 0.0;  // relative, largest over sampled points
    int points = 0;
    // Affinity only: spread of the entrywise ratio phi^*g / g. Zero when the
    // pullback is a constant multiple of g.
    double proportionality_spread = 0.0;
    bool proportional = false;
};

// phi^*g == g on the sampled grid of g. Throws DomainError when the image of a
// sampled point leaves the domain.
MapCheck check_isometry(const MetricChart& g, const ChartMap& phi, double tol = 1e-8, int grid = 50);

// Christoffel symbols of phi^*g and g agree on the sampled grid.
MapCheck check_affinity(const MetricChart& g, const ChartMap& phi, double tol = 1e-8, int grid = 30);

enum class Orientation { Swap, AntiSwap };
const char* to_string(Orientation o);

struct LiouvilleIsometryResult {
    bool found = false;
    bool degenerate = false;  // both profiles constant
    double k = 0.0;
    double c = 0.0;
    Orientation orientation = Orientation::Swap;
    double residual = 0.0;    // at the returned k
    double best_swap = 0.0;   // smallest residual per orientation
    double best_anti = 0.0;
};

// h1 and h2 are functions of the variable x with the given period. Searches
// k in [0, period) for h1 2k-periodic together with h2(x + k) = h1(x) + c
// (swap) or h2(-x - k) = h1(x) + c (anti-swap).
LiouvilleIsometryResult liouville_isometry_search(const ScalarField& h1, const ScalarField& h2, double period,
                                                  int grid = 10000, int quadrature = 256, double found_tol = 1e-8);

// (x, y) -> (y + k, x + k) for Swap, (-y + k, -x - k) for AntiSwap.
ChartMap liouville_map(const LiouvilleIsometryResult& r);

}  // namespace geoproj
