// Metric charts on a plane domain: coefficients, Levi-Civita connection,
// Gaussian curvature, pullbacks and causal classification.

#pragma once

#include <array>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "geoproj/expr.hpp"

namespace geoproj {

class DegenerateMetric : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Vec2 = std::array<double, 2>;

// Symmetric 2x2 matrix.
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double det() const { return xx * yy - xy * xy; }
    double operator()(const Vec2& v, const Vec2& w) const {
        return xx * v[0] * w[0] + xy * (v[0] * w[1] + v[1] * w[0]) + yy * v[1] * w[1];
    }
    double at(int i, int j) const { return i == 0 ? (j == 0 ? xx : xy) : (j == 0 ? xy : yy); }
    Sym2 inverse() const;
    double max_abs() const;
};

inline Sym2 operator*(double s, const Sym2& m) { return {s * m.xx, s * m.xy, s * m.yy}; }
inline Sym2 operator+(const Sym2& a, const Sym2& b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
inline Sym2 operator-(const Sym2& a, const Sym2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }

struct VectorField {
    ScalarField x;
    ScalarField y;
};

enum class Signature { Riemannian, Lorentzian };
enum class CausalClass { Spacelike, Timelike, Lightlike };

const char* to_string(Signature s);
const char* to_string(CausalClass c);

struct Box {
    double xmin = -std::numeric_limits<double>::infinity();
    double xmax = std::numeric_limits<double>::infinity();
    double ymin = -std::numeric_limits<double>::infinity();
    double ymax = std::numeric_limits<double>::infinity();

    bool contains(Point p) const { return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax; }
    bool bounded() const;
};

// Open box intersected with {f > 0} for every constraint field.
struct Domain {
    Box box;
    std::vector<ScalarField> positive;

    bool contains(Point p) const;
};

struct ChartOptions {
    std::optional<double> period_x;
    std::optional<double> period_y;
    // Region for random initial conditions and sampled grids; defaults to the
    // domain box when that is bounded, else [-1, 1]^2.
    std::optional<Box> sample_box;
};

// Coefficients with first and second partials at a point.
struct MetricJet {
    Sym2 g;
    std::array<Sym2, 2> dg;                 // dg[i] = d_i G
    std::array<std::array<Sym2, 2>, 2> ddg; // ddg[i][j] = d_i d_j G
};

// gamma[k][i][j] = Gamma^k_{ij}
using Christoffel = std::array<std::array<std::array<double, 2>, 2>, 2>;
// dgamma[m][k][i][j] = d_m Gamma^k_{ij}
using ChristoffelDerivative = std::array<Christoffel, 2>;

class MetricChart {
public:
    MetricChart(std::string name, ScalarField g11, ScalarField g12, ScalarField g22, Signature sig,
                Domain domain = {}, ChartOptions opts = {});

    const std::string& name() const { return impl_->name; }
    const ScalarField& g11() const { return impl_->g[0]; }
    const ScalarField& g12() const { return impl_->g[1]; }
    const ScalarField& g22() const { return impl_->g[2]; }
    const ScalarField& coefficient(int i, int j) const;
    Signature signature() const { return impl_->signature; }
    const Domain& domain() const { return impl_->domain; }
    const ChartOptions& options() const { return impl_->options; }
    const Box& sample_box() const { return impl_->sample_box; }

    bool contains(Point p) const { return impl_->domain.contains(p); }

    // All three throw DomainError outside the domain or on non-finite values.
    Sym2 matrix(Point p) const;
    // g and dg only; ddg is left zero.
    MetricJet jet1(Point p) const;
    MetricJet jet2(Point p) const;

    // Same coefficients, different metadata.
    MetricChart with_domain(Domain d) const;
    MetricChart with_options(ChartOptions o) const;
    MetricChart renamed(std::string name) const;

private:
    struct Impl {
        std::string name;
        std::array<ScalarField, 3> g;
        Signature signature;
        Domain domain;
        ChartOptions options;
        Box sample_box;
        mutable std::once_flag once1, once2;
        mutable std::shared_ptr<const Tape> tape0, tape1, tape2;
    };
    std::shared_ptr<const Impl> impl_;

    void check_domain(Point p) const;
};

// Diffeomorphism (x, y) -> (u(x, y), v(x, y)) with symbolic Jacobian.
class ChartMap {
public:
    ChartMap(std::string name, ScalarField u, ScalarField v);
    ChartMap(std::string name, ScalarField u, ScalarField v, ScalarField u_inv, ScalarField v_inv);

    static ChartMap identity();

    const std::string& name() const { return name_; }
    const ScalarField& u() const { return u_; }
    const ScalarField& v() const { return v_; }
    // jacobian()[i][j] = d(component i)/d(variable j)
    const std::array<std::array<ScalarField, 2>, 2>& jacobian() const { return jac_; }
    bool has_inverse() const { return inverse_.has_value(); }
    // Throws std::logic_error when no inverse was supplied.
    ChartMap inverse() const;

    Point apply(Point p) const;
    std::array<Vec2, 2> jacobian_at(Point p) const;  // rows
    Vec2 push_forward(Point p, const Vec2& w) const;

    // Largest |forward(inverse(q)) - q| over the given points; throws without an inverse.
    double inverse_residual(const std::vector<Point>& pts) const;

private:
    std::string name_;
    ScalarField u_, v_;
    std::array<std::array<ScalarField, 2>, 2> jac_;
    std::optional<std::pair<ScalarField, ScalarField>> inverse_;
};

// (outer o inner)(p) = outer(inner(p))
ChartMap compose(const ChartMap& outer, const ChartMap& inner);

double metric_eval(const MetricChart& m, Point p, const Vec2& v, const Vec2& w);

Christoffel christoffel(const MetricJet& jet);
Christoffel christoffel(const MetricChart& m, Point p);
ChristoffelDerivative christoffel_derivative(const MetricJet& jet);

double gaussian_curvature(const MetricJet& jet);
double gaussian_curvature(const MetricChart& m, Point p);
// Curvature at p reached as the limit of values at p + h * dir for h -> 0,
// for points where the chart formula is indeterminate or excluded.
double gaussian_curvature_limit(const MetricChart& m, Point p, const Vec2& dir);

MetricChart pullback(const MetricChart& m, const ChartMap& phi);

// tol < 0 selects the default 1e-9 times the local coefficient magnitude.
CausalClass classify(const MetricChart& m, Point p, const Vec2& v, double tol = -1.0);

// (L_K g)_{ij} = K^k d_k g_ij + g_kj d_i K^k + g_ik d_j K^k
Sym2 lie_derivative(const MetricChart& m, const VectorField& k, Point p);

// Largest relative Lie derivative over the sampled points.
double killing_residual(const MetricChart& m, const VectorField& k, const std::vector<Point>& pts);

// n x n grid over the sample box, restricted to the domain.
std::vector<Point> sample_grid(const MetricChart& m, int n);
std::vector<Point> grid_points(const Box& box, int nx, int ny);

// Number of points whose determinant sign disagrees with the declared
// signature; a zero determinant counts as a violation.
int signature_violations(const MetricChart& m, const std::vector<Point>& pts);

}  // namespace geoproj
