#include "geoproj/integrals.hpp"

#include <cmath>
#include <numbers>

namespace geoproj {

FiberIntegral::FiberIntegral(std::string name, SymField q, VectorField l, ScalarField c)
    : name_(std::move(name)), q_(std::move(q)), l_(std::move(l)), c_(std::move(c)) {
    const std::array<ScalarField, 6> roots{q_.xx, q_.xy, q_.yy, l_.x, l_.y, c_};
    tape_ = std::make_shared<const Tape>(roots);
}

std::array<double, 6> FiberIntegral::coeffs(Point p) const {
    std::array<double, 6> v{};
    tape_->eval(p.x, p.y, v);
    for (double c : v)
        if (!std::isfinite(c)) throw DomainError("integral '" + name_ + "' is not finite at the requested point");
    return v;
}

double FiberIntegral::operator()(Point p, const Vec2& v) const {
    const auto c = coeffs(p);
    return c[0] * v[0] * v[0] + 2.0 * c[1] * v[0] * v[1] + c[2] * v[1] * v[1] + c[3] * v[0] + c[4] * v[1] + c[5];
}

double FiberIntegral::magnitude(Point p, const Vec2& v) const {
    const auto c = coeffs(p);
    return std::fabs(c[0] * v[0] * v[0]) + 2.0 * std::fabs(c[1] * v[0] * v[1]) + std::fabs(c[2] * v[1] * v[1]) +
           std::fabs(c[3] * v[0]) + std::fabs(c[4] * v[1]) + std::fabs(c[5]);
}

Vec2 FiberIntegral::fiber_gradient(Point p, const Vec2& v) const {
    const auto c = coeffs(p);
    return {2.0 * (c[0] * v[0] + c[1] * v[1]) + c[3], 2.0 * (c[1] * v[0] + c[2] * v[1]) + c[4]};
}

FiberIntegral FiberIntegral::renamed(std::string name) const { return FiberIntegral(std::move(name), q_, l_, c_); }

FiberIntegral combine(double a, const FiberIntegral& A, double b, const FiberIntegral& B, std::string name) {
    if (name.empty()) name = std::to_string(a) + "*" + A.name() + " + " + std::to_string(b) + "*" + B.name();
    const ScalarField sa(a), sb(b);
    const auto& qa = A.quadratic();
    const auto& qb = B.quadratic();
    return FiberIntegral(std::move(name),
                         {sa * qa.xx + sb * qb.xx, sa * qa.xy + sb * qb.xy, sa * qa.yy + sb * qb.yy},
                         {sa * A.linear().x + sb * B.linear().x, sa * A.linear().y + sb * B.linear().y},
                         sa * A.constant() + sb * B.constant());
}

FiberIntegral square(const FiberIntegral& linear, std::string name) {
    const auto& q = linear.quadratic();
    if (!(q.xx.is_constant() && q.xx.constant_value() == 0.0 && q.xy.is_constant() && q.xy.constant_value() == 0.0 &&
          q.yy.is_constant() && q.yy.constant_value() == 0.0 && linear.constant().is_constant() &&
          linear.constant().constant_value() == 0.0))
        throw ConstructionError("square() expects a purely linear integral");
    if (name.empty()) name = linear.name() + "^2";
    const auto& L = linear.linear();
    return FiberIntegral(std::move(name), {L.x * L.x, L.x * L.y, L.y * L.y}, {}, {});
}

FiberIntegral pullback(const FiberIntegral& I, const ChartMap& phi) {
    const auto& u = phi.u();
    const auto& v = phi.v();
    const ScalarField a = I.quadratic().xx.substitute(u, v);
    const ScalarField b = I.quadratic().xy.substitute(u, v);
    const ScalarField c = I.quadratic().yy.substitute(u, v);
    const ScalarField lx = I.linear().x.substitute(u, v);
    const ScalarField ly = I.linear().y.substitute(u, v);
    const auto& J = phi.jacobian();
    auto q = [&](int i, int j) {
        return J[0][i] * a * J[0][j] + J[0][i] * b * J[1][j] + J[1][i] * b * J[0][j] + J[1][i] * c * J[1][j];
    };
    return FiberIntegral(phi.name() + "^*" + I.name(), {q(0, 0), q(0, 1), q(1, 1)},
                         {J[0][0] * lx + J[1][0] * ly, J[0][1] * lx + J[1][1] * ly}, I.constant().substitute(u, v));
}

FiberIntegral energy(const MetricChart& m) {
    return FiberIntegral("energy(" + m.name() + ")", {m.g11(), m.g12(), m.g22()}, {}, {});
}

FiberIntegral clairaut(const MetricChart& m, const VectorField& k, double killing_tol, int grid) {
    const double res = killing_residual(m, k, sample_grid(m, grid));
    if (!(res <= killing_tol))
        throw ConstructionError("vector field is not Killing for '" + m.name() + "' (residual " + std::to_string(res) + ")");
    return FiberIntegral("clairaut(" + m.name() + ")", {}, {m.g11() * k.x + m.g12() * k.y, m.g12() * k.x + m.g22() * k.y},
                         {});
}

ScalarField determinant(const MetricChart& m) { return m.g11() * m.g22() - m.g12() * m.g12(); }

FiberIntegral darboux_integral(const MetricChart& g, const MetricChart& gbar, int grid) {
    const ScalarField ratio = determinant(g) / determinant(gbar);
    for (const auto& p : sample_grid(g, grid)) {
        const double r = ratio.eval_raw(p.x, p.y);
        if (!std::isfinite(r) || r == 0.0)
            throw ConstructionError("determinant ratio of '" + g.name() + "' and '" + gbar.name() +
                                    "' vanishes or is not finite at a sampled point");
    }
    const ScalarField c = cbrt(ratio);
    const ScalarField scale = c * c;
    return FiberIntegral("darboux(" + g.name() + ", " + gbar.name() + ")",
                         {scale * gbar.g11(), scale * gbar.g12(), scale * gbar.g22()}, {}, {});
}

FiberIntegral liouville_integral(const ScalarField& h1, const ScalarField& h2, int sign, LiouvilleVariant variant) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    const ScalarField X = ScalarField::x();
    const ScalarField Y = ScalarField::y();
    const ScalarField h1x = h1.substitute(X, Y);
    const ScalarField h2y = h2.substitute(X, Y);
    const ScalarField factor = h1x + h2y;
    if (variant == LiouvilleVariant::Standard) {
        return FiberIntegral("liouville-I0", {factor * h2y, {}, -(ScalarField(sign) * factor * h1x)}, {}, {});
    }
    const ScalarField h1y = h1.substitute(Y, Y);
    const ScalarField h2x = h2.substitute(X, X);
    return FiberIntegral("liouville-I0-swapped", {factor * h1y, {}, -(factor * h2x)}, {}, {});
}

double drift_along(const FiberIntegral& I, const GeodesicTrace& trace) {
    const GeodesicState& s0 = trace.front();
    const double i0 = I(s0.pos(), s0.vel());
    const double scale = std::max({std::fabs(i0), I.magnitude(s0.pos(), s0.vel()), 1e-300});
    double worst = 0.0;
    for (const auto& s : trace.samples) worst = std::max(worst, std::fabs(I(s.pos(), s.vel()) - i0));
    return worst / scale;
}

ConservationReport check_conservation(const MetricChart& m, const FiberIntegral& I, const ConservationOptions& opts) {
    ConservationReport rep;
    rep.chart = m.name();
    rep.integral = I.name();
    rep.seed = opts.seed;
    rep.threshold = opts.threshold;

    std::vector<GeodesicState> starts = opts.starts;
    if (starts.empty()) {
        std::mt19937_64 rng(opts.seed);
        starts = random_initial_states(m, rng, opts.n_samples, opts.causal);
    }
    rep.n_samples = static_cast<int>(starts.size());
    for (const auto& s0 : starts) {
        const GeodesicTrace tr = integrate_geodesic(m, s0, opts.t_max, opts.integrator);
        TraceDrift td;
        td.start = s0;
        td.drift = drift_along(I, tr);
        td.duration = tr.duration();
        td.reason = tr.reason;
        rep.max_drift = std::max(rep.max_drift, td.drift);
        rep.traces.push_back(td);
    }
    rep.pass = rep.max_drift <= opts.threshold;
    return rep;
}

double integral_difference(const FiberIntegral& I, const FiberIntegral& J, const std::vector<Point>& pts, int directions) {
    double worst = 0.0;
    for (const auto& p : pts) {
        for (int k = 0; k < directions; ++k) {
            const double a = std::numbers::pi * k / directions;
            const Vec2 v{std::cos(a), std::sin(a)};
            const double scale = std::max({1.0, I.magnitude(p, v), J.magnitude(p, v)});
            worst = std::max(worst, std::fabs(I(p, v) - J(p, v)) / scale);
        }
    }
    return worst;
}

double gram_determinant(const FiberIntegral& I, const FiberIntegral& J, Point p, const Vec2& v) {
    const Vec2 a = I.fiber_gradient(p, v);
    const Vec2 b = J.fiber_gradient(p, v);
    const double aa = a[0] * a[0] + a[1] * a[1];
    const double bb = b[0] * b[0] + b[1] * b[1];
    const double ab = a[0] * b[0] + a[1] * b[1];
    return aa * bb - ab * ab;
}

}  // namespace geoproj
