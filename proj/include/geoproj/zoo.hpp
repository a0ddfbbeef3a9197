// Explicit metric families: the Clifton-Pohl plane and its projective
// deformations, band metrics with a null Killing field, Tannery surfaces and
// their Lorentzian deformation, the periodic-shift construction with a
// non-affine projective map, and Liouville metrics.

#pragma once

#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geoproj/integrals.hpp"

namespace geoproj {

struct KillingChart {
    MetricChart chart;
    VectorField killing;
};

// 2 dx dy on the plane.
MetricChart flat_null();
// dr^2 + sin^2 r dtheta^2 on (0, pi) x R, theta of period 2 pi.
MetricChart round_sphere();

// 2/(x^2 + y^2) dx dy on the plane minus a disk of radius 1e-6; K = (x, y).
KillingChart clifton_pohl();

struct BandMetricSpec {
    ScalarField f = pow(sin(std::numbers::pi * ScalarField::x()), 2.0);  // profile in x
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    double a = 1.0;
    double ell = 0.0;
    std::optional<double> period_x = 1.0;
    // Sample box used when the interval is unbounded.
    Box sample_box{-1.0, 1.0, -1.0, 1.0};
};

// a ell/(1 + ell f)^2 dx^2 + 2a/(1 + ell f) dx dy + a f/(1 + ell f) dy^2.
// (a, ell) = (1, 0) gives 2 dx dy + f dy^2. K = d/dy.
KillingChart band_metric(const BandMetricSpec& spec);

// G_{a,l}(z) and Q_{a,l}(z) of the band family, as plain matrices.
Sym2 band_matrix(double a, double ell, double z);
Sym2 band_clairaut_square(double a, double ell, double z);

// Relative residual of
//   beta (G_{a,l}(z) + mu Q_{a,l}(z)) = (det G_{a,l}(z) / det G_{b,m}(z))^(2/3) G_{b,m}(z)
// with b = a beta^-3 and m = l + mu a. Throws std::invalid_argument when
// 1 + l z, 1 + m z, a or beta vanishes.
double band_rescaling_residual(double a, double ell, double z, double mu, double beta);

// Projective rescaling (det g / det J)^2 J of a nondegenerate quadratic
// integral J of g.
MetricChart projective_rescaling(const MetricChart& g, const FiberIntegral& J, std::string name);

// Deformation of the Clifton-Pohl plane by J = a g + ell C^2 with C the
// radial Clairaut integral. Requires a != 0 and |ell| < |a|.
KillingChart punctured_plane_family(double a, double ell);

struct TannerySpec {
    int p = 1;
    int q = 1;
    ScalarField h = ScalarField(0.0);  // odd function of s, written in the variable x
    double ell = 0.0;
};

// (p/q + h(cos r))^2 dr^2 + sin^2 r dtheta^2 on (0, pi) x S^1. K = d/dtheta.
KillingChart tannery_riemannian(const TannerySpec& spec);

// -1/(1 + l sin^2 r)^2 ((p/q + h(cos r))^2 dr^2 + sin^2 r (1 + l sin^2 r) dtheta^2).
// For l < -1 the chart is the Lorentzian band where 1 + l sin^2 r < 0.
KillingChart tannery_deformed(const TannerySpec& spec);

// The smooth x(t) in (pi/4, 3pi/4) with sin^2 x / (1 - 2 sin^2 x) = -cosh^2 t.
double tannery_reparam_x(double t);

// (det g / det J)^2 J with J = g - C^2/l^2 on U = {g(K, K) < l^2}.
MetricChart clairaut_truncation(const MetricChart& m, const VectorField& k, double ell, int grid = 50);

struct PeriodicShiftSpec {
    ScalarField f = pow(sin(std::numbers::pi * ScalarField::x()), 2.0);  // 1-periodic, >= 0, nonconstant
    std::optional<double> m;  // max of f; sampled when absent
    double a = 2.0;
    double eps = 0.5;
    // Plateau width of the default bump profiles at each end of [0, 1].
    double plateau = 0.1;
    // Optional custom profiles in the variable x on [0, 1].
    std::optional<ScalarField> alpha;
    std::optional<ScalarField> lambda;
    // Growth per unit shift of A: a^(shift_power * n). 1 is the consistent
    // reading; 3 is kept for comparison.
    int shift_power = 1;
    Box sample_box{-2.0, 3.0, -1.0, 1.0};
};

struct PeriodicShiftResult {
    MetricChart chart;
    ChartMap tau;  // (x, y) -> (x + 1, y)
    ScalarField A;
    ScalarField Lambda;
    VectorField killing;  // d/dy
    double m = 0.0;
};

// Throws ConstructionError when eps violates eps < (a^3 - 1)/(m a^3), when
// 1 + Lambda f fails to be positive on the sampled grid, or when f is not
// periodic, nonnegative and nonconstant.
PeriodicShiftResult periodic_shift_metric(const PeriodicShiftSpec& spec);

struct SeamReport {
    double max_jump = 0.0;  // over value, first and second derivative of A and Lambda
    std::vector<double> seams;
};

SeamReport shift_seam_smoothness(const PeriodicShiftResult& r, const std::vector<int>& seams = {0, 1, 2, 3});

// Relative residual at x in [0, 1] and integer n of
//   a^-n (G_x + eps (1 - a^3n)/(1 - a^3) C^2(x)) = (det G_x / det G_{x+n})^(2/3) G_{x+n}.
double shift_relation_residual(const PeriodicShiftResult& r, const PeriodicShiftSpec& spec, double x, int n);

// (h1(x) + h2(y)) (dx^2 + sign dy^2). h1 is a function of x, h2 of y.
MetricChart liouville_metric(const ScalarField& h1, const ScalarField& h2, int sign,
                             std::optional<double> period_x = std::nullopt,
                             std::optional<double> period_y = std::nullopt, int grid = 50);

// Catalogue -----------------------------------------------------------------

struct ZooParams {
    std::map<std::string, std::string> values;  // a, l, f, eps, h, p, q, h1, h2, sign

    bool has(const std::string& k) const { return values.count(k) != 0; }
    double number(const std::string& k, double fallback) const;
    ScalarField field(const std::string& k, const ScalarField& fallback) const;
};

struct ZooEntry {
    MetricChart chart;
    std::optional<VectorField> killing;
    std::vector<FiberIntegral> integrals;  // energy first, then the known extra integrals
    std::vector<ChartMap> maps;            // named self-maps of the chart (periodic-shift: tau)
    std::optional<SeamReport> seams;       // periodic-shift only
};

struct CatalogueItem {
    std::string name;
    std::string description;
};

const std::vector<CatalogueItem>& catalogue();
ZooEntry make_zoo(const std::string& name, const ZooParams& params = {});

}  // namespace geoproj
