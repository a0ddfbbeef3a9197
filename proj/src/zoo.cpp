#include "geoproj/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geoproj {

namespace {

constexpr double pi = std::numbers::pi;

const ScalarField X = ScalarField::x();
const ScalarField Y = ScalarField::y();

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Largest and smallest values of a function of x on [lo, hi].
std::pair<double, double> sample_range(const ScalarField& f, double lo, double hi, int n) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = f.eval(x, 0.0);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    return {mn, mx};
}

Box range_box(double lo, double hi, const Box& fallback) {
    Box b = fallback;
    if (std::isfinite(lo)) b.xmin = lo;
    if (std::isfinite(hi)) b.xmax = hi;
    return b;
}

void check_signature(const MetricChart& m, int grid) {
    const auto pts = sample_grid(m, grid);
    const int bad = signature_violations(m, pts);
    if (bad > 0)
        throw ConstructionError("chart '" + m.name() + "' is not " + to_string(m.signature()) + " at " +
                                std::to_string(bad) + " sampled points");
}

}  // namespace

MetricChart flat_null() {
    return MetricChart("flat", 0.0, 1.0, 0.0, Signature::Lorentzian);
}

MetricChart round_sphere() {
    ChartOptions o;
    o.period_y = 2 * pi;
    o.sample_box = Box{0.2, pi - 0.2, 0.0, 2 * pi};
    return MetricChart("sphere", 1.0, 0.0, sin(X) * sin(X), Signature::Riemannian, Domain{Box{0.0, pi}, {}}, o);
}

KillingChart clifton_pohl() {
    const ScalarField r2 = X * X + Y * Y;
    Domain d;
    d.positive.push_back(r2 - ScalarField(1e-12));
    ChartOptions o;
    o.sample_box = Box{-2.0, 2.0, -2.0, 2.0};
    return {MetricChart("clifton-pohl", 0.0, 1.0 / r2, 0.0, Signature::Lorentzian, std::move(d), o), {X, Y}};
}

KillingChart band_metric(const BandMetricSpec& s) {
    if (s.a == 0.0) throw ConstructionError("band metric needs a != 0");
    const Box box = range_box(s.x_min, s.x_max, s.sample_box);
    const ScalarField den = 1.0 + s.ell * s.f;
    const auto [mn, mx] = sample_range(den, box.xmin, box.xmax, 2000);
    if (!(mn > 0.0) && !(mx < 0.0))
        throw ConstructionError("1 + l f changes sign or vanishes on the interval (range [" + fmt(mn) + ", " + fmt(mx) +
                                "])");
    ChartOptions o;
    if (!std::isfinite(s.x_min) && !std::isfinite(s.x_max)) o.period_x = s.period_x;
    o.sample_box = box;
    const std::string name = (s.a == 1.0 && s.ell == 0.0) ? "band-base" : "band(a=" + fmt(s.a) + ",l=" + fmt(s.ell) + ")";
    MetricChart m(name, s.a * s.ell / (den * den), s.a / den, s.a * s.f / den, Signature::Lorentzian,
                  Domain{Box{s.x_min, s.x_max}, {}}, o);
    return {m, {0.0, 1.0}};
}

Sym2 band_matrix(double a, double ell, double z) {
    const double d = 1.0 + ell * z;
    return {a * ell / (d * d), a / d, a * z / d};
}

Sym2 band_clairaut_square(double a, double ell, double z) {
    const double d = 1.0 + ell * z;
    const double s = a * a / (d * d);
    return {s, s * z, s * z * z};
}

double band_rescaling_residual(double a, double ell, double z, double mu, double beta) {
    const double m = ell + mu * a;
    if (a == 0.0 || beta == 0.0 || 1.0 + ell * z == 0.0 || 1.0 + m * z == 0.0)
        throw std::invalid_argument("inadmissible tuple for the matrix identity");
    const double b = a / (beta * beta * beta);
    const Sym2 lhs = beta * (band_matrix(a, ell, z) + mu * band_clairaut_square(a, ell, z));
    const Sym2 gbm = band_matrix(b, m, z);
    const double c = std::cbrt(band_matrix(a, ell, z).det() / gbm.det());
    const Sym2 rhs = (c * c) * gbm;
    return (lhs - rhs).max_abs() / std::max(lhs.max_abs(), rhs.max_abs());
}

MetricChart projective_rescaling(const MetricChart& g, const FiberIntegral& J, std::string name) {
    const auto& q = J.quadratic();
    const ScalarField detj = q.xx * q.yy - q.xy * q.xy;
    const ScalarField r = determinant(g) / detj;
    const ScalarField s = r * r;
    // Signature follows det J since the scale factor is positive.
    Signature sig = g.signature();
    const auto pts = sample_grid(g, 7);
    for (const auto& p : pts) {
        const double d = detj.eval_raw(p.x, p.y);
        if (std::isfinite(d) && d != 0.0) {
            sig = d > 0.0 ? Signature::Riemannian : Signature::Lorentzian;
            break;
        }
    }
    return MetricChart(std::move(name), s * q.xx, s * q.xy, s * q.yy, sig, g.domain(), g.options());
}

KillingChart punctured_plane_family(double a, double ell) {
    if (a == 0.0 || !(std::fabs(ell) < std::fabs(a)))
        throw ConstructionError("punctured-plane family needs a != 0 and |l| < |a| (got a=" + fmt(a) + ", l=" + fmt(ell) +
                                ")");
    const KillingChart cp = clifton_pohl();
    if (a == 1.0 && ell == 0.0) return cp;
    const FiberIntegral E = energy(cp.chart);
    const FiberIntegral C = clairaut(cp.chart, cp.killing);
    const FiberIntegral J = combine(a, E, ell, square(C), "J");
    MetricChart m = projective_rescaling(cp.chart, J, "punctured-family(a=" + fmt(a) + ",l=" + fmt(ell) + ")");
    check_signature(m, 50);
    return {m, cp.killing};
}

namespace {

ScalarField tannery_profile(const TannerySpec& s) {
    const double pq = static_cast<double>(s.p) / s.q;
    if (s.q == 0 || !(pq > 0.0)) throw ConstructionError("p/q must be positive");
    for (int i = 0; i <= 200; ++i) {
        const double t = -1.0 + 2.0 * i / 200;
        const double e = s.h.eval(t, 0.0) + s.h.eval(-t, 0.0);
        if (std::fabs(e) > 1e-12 * (1.0 + std::fabs(s.h.eval(t, 0.0))))
            throw ConstructionError("h is not odd at s = " + fmt(t));
    }
    const ScalarField prof = ScalarField(pq) + s.h.substitute(cos(X), Y);
    const auto [mn, mx] = sample_range(prof, 1e-6, pi - 1e-6, 2000);
    (void)mx;
    if (!(mn > 0.0)) throw ConstructionError("p/q + h(cos r) is not positive on (0, pi)");
    return prof;
}

}  // namespace

KillingChart tannery_riemannian(const TannerySpec& s) {
    const ScalarField prof = tannery_profile(s);
    ChartOptions o;
    o.period_y = 2 * pi;
    o.sample_box = Box{0.2, pi - 0.2, 0.0, 2 * pi};
    MetricChart m("tannery", prof * prof, 0.0, sin(X) * sin(X), Signature::Riemannian, Domain{Box{0.0, pi}, {}}, o);
    return {m, {0.0, 1.0}};
}

KillingChart tannery_deformed(const TannerySpec& s) {
    const ScalarField prof = tannery_profile(s);
    const double l = s.ell;
    if (l == -1.0) throw ConstructionError("1 + l sin^2 r vanishes at r = pi/2 for l = -1");
    Box box{0.0, pi};
    Signature sig = Signature::Riemannian;
    if (l < -1.0) {
        const double r0 = std::asin(std::sqrt(-1.0 / l));
        box = Box{r0, pi - r0};
        sig = Signature::Lorentzian;
    }
    const ScalarField s2 = sin(X) * sin(X);
    const ScalarField w = 1.0 + l * s2;
    const ScalarField k = -1.0 / (w * w);
    ChartOptions o;
    o.period_y = 2 * pi;
    const double margin = l < -1.0 ? 1e-3 : 0.2;
    o.sample_box = Box{box.xmin + margin, box.xmax - margin, 0.0, 2 * pi};
    MetricChart m("tannery-deformed(l=" + fmt(l) + ")", k * prof * prof, 0.0, k * s2 * w, sig, Domain{box, {}}, o);
    check_signature(m, 50);
    return {m, {0.0, 1.0}};
}

double tannery_reparam_x(double t) {
    const double c2 = std::cosh(t) * std::cosh(t);
    const double base = std::asin(std::sqrt(-c2 / (1.0 - 2.0 * c2)));
    return t <= 0.0 ? base : pi - base;
}

MetricChart clairaut_truncation(const MetricChart& m, const VectorField& k, double ell, int grid) {
    if (!(ell > 0.0)) throw ConstructionError("truncation level must be positive");
    const FiberIntegral E = energy(m);
    const FiberIntegral C = clairaut(m, k);
    const FiberIntegral J = combine(1.0, E, -1.0 / (ell * ell), square(C), "J");
    const ScalarField kk = m.g11() * k.x * k.x + 2.0 * m.g12() * k.x * k.y + m.g22() * k.y * k.y;

    Domain d = m.domain();
    d.positive.push_back(ScalarField(ell * ell) - kk);
    const MetricChart restricted = m.with_domain(d).renamed(m.name() + "|U");
    const auto pts = sample_grid(restricted, grid);
    if (pts.empty()) throw ConstructionError("sublevel set {g(K,K) < l^2} has no sampled points");
    const auto& q = J.quadratic();
    for (const auto& p : pts) {
        const double dj = q.xx.eval(p.x, p.y) * q.yy.eval(p.x, p.y) - std::pow(q.xy.eval(p.x, p.y), 2);
        if (!(std::fabs(dj) > 0.0) || !std::isfinite(dj))
            throw ConstructionError("J is degenerate at a sampled point of the sublevel set");
    }
    MetricChart out = projective_rescaling(restricted, J, "truncation(" + m.name() + ",l=" + fmt(ell) + ")");
    check_signature(out, grid);
    return out;
}

// Periodic-shift construction ----------------------------------------------

PeriodicShiftResult periodic_shift_metric(const PeriodicShiftSpec& s) {
    if (!(s.a > 1.0)) throw ConstructionError("a must exceed 1");
    if (!(s.plateau > 0.0 && s.plateau < 0.5)) throw ConstructionError("plateau width must lie in (0, 1/2)");

    // f: 1-periodic, nonnegative, nonconstant.
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin, perr = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = i / 10000.0;
        const double v = s.f.eval(x, 0.0);
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
        perr = std::max(perr, std::fabs(s.f.eval(x + 1.0, 0.0) - v));
    }
    if (perr > 1e-9 * std::max(1.0, fmax)) throw ConstructionError("f is not 1-periodic");
    if (fmin < -1e-12) throw ConstructionError("f takes negative values");
    if (fmax - fmin < 1e-12) throw ConstructionError("f is constant");
    const double m = s.m.value_or(fmax);
    if (m < fmax * (1.0 - 1e-9)) throw ConstructionError("declared maximum of f is below its sampled maximum");

    const double a3 = s.a * s.a * s.a;
    const double bound = (a3 - 1.0) / (m * a3);
    if (!(s.eps > 0.0 && s.eps < bound))
        throw ConstructionError("eps = " + fmt(s.eps) + " violates 0 < eps < (a^3 - 1)/(m a^3) = " + fmt(bound));

    const ScalarField bump_arg = (X - s.plateau) / (1.0 - 2.0 * s.plateau);
    const ScalarField alpha = s.alpha.value_or(1.0 + (s.a - 1.0) * smooth_step(bump_arg));
    const ScalarField lambda = s.lambda.value_or(s.eps * smooth_step(bump_arg));
    for (double t : {0.0, 1.0}) {
        const double av = alpha.eval(t, 0.0), lv = lambda.eval(t, 0.0);
        const double aw = t == 0.0 ? 1.0 : s.a, lw = t == 0.0 ? 0.0 : s.eps;
        if (std::fabs(av - aw) > 1e-12 || std::fabs(lv - lw) > 1e-12)
            throw ConstructionError("bump profiles do not match their endpoint values");
    }

    const ScalarField t = mod(X, 1.0);
    const ScalarField n = floor_div(X, 1.0);
    const ScalarField al = alpha.substitute(t, Y);
    const ScalarField la = lambda.substitute(t, Y);
    const double loga = std::log(s.a);
    const ScalarField A = al * exp((s.shift_power * loga) * n);
    const ScalarField growth = (1.0 - exp((3.0 * loga) * n)) / (1.0 - a3);
    const ScalarField Lambda = la + s.eps * growth * al * al * al;

    const ScalarField den = 1.0 + Lambda * s.f;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -6.0 + 12.0 * i / 1000;
        const double lv = Lambda.eval(x, 0.0);
        if (!(lv > -1.0 / m) || !(den.eval(x, 0.0) > 0.0))
            throw ConstructionError("1 + Lambda f fails to be positive at x = " + fmt(x));
    }

    const ScalarField A3 = A * A * A;
    ChartOptions o;
    o.sample_box = s.sample_box;
    MetricChart chart("periodic-shift(a=" + fmt(s.a) + ",eps=" + fmt(s.eps) + ")", A3 * Lambda / (den * den), A3 / den,
                      A3 * s.f / den, Signature::Lorentzian, Domain{}, o);
    ChartMap tau("tau", X + 1.0, Y, X - 1.0, Y);
    return {chart, tau, A, Lambda, {0.0, 1.0}, m};
}

SeamReport shift_seam_smoothness(const PeriodicShiftResult& r, const std::vector<int>& seams) {
    SeamReport rep;
    const double d = 1e-9;
    const std::array<ScalarField, 6> fields{r.A, r.A.dx(), r.A.dx().dx(), r.Lambda, r.Lambda.dx(), r.Lambda.dx().dx()};
    for (int n : seams) {
        double worst = 0.0;
        for (const auto& f : fields) {
            const double lft = f.eval(n - d, 0.0), rgt = f.eval(n + d, 0.0), at = f.eval(n, 0.0);
            const double sc = std::max({1.0, std::fabs(lft), std::fabs(rgt)});
            worst = std::max({worst, std::fabs(lft - rgt) / sc, std::fabs(at - rgt) / sc});
        }
        rep.seams.push_back(worst);
        rep.max_jump = std::max(rep.max_jump, worst);
    }
    return rep;
}

double shift_relation_residual(const PeriodicShiftResult& r, const PeriodicShiftSpec& s, double x, int n) {
    const Sym2 gx = r.chart.matrix({x, 0.0});
    const Sym2 gn = r.chart.matrix({x + n, 0.0});
    // C = g(d/dy, .) at x
    const Sym2 c2{gx.xy * gx.xy, gx.xy * gx.yy, gx.yy * gx.yy};
    const double a3 = s.a * s.a * s.a;
    const double mu = s.eps * (1.0 - std::pow(a3, n)) / (1.0 - a3);
    const Sym2 lhs = std::pow(s.a, -n) * (gx + mu * c2);
    const double c = std::cbrt(gx.det() / gn.det());
    const Sym2 rhs = (c * c) * gn;
    return (lhs - rhs).max_abs() / std::max(lhs.max_abs(), rhs.max_abs());
}

MetricChart liouville_metric(const ScalarField& h1, const ScalarField& h2, int sign, std::optional<double> period_x,
                             std::optional<double> period_y, int grid) {
    if (sign != 1 && sign != -1) throw ConstructionError("sign must be +1 or -1");
    const ScalarField h1x = h1.substitute(X, Y);
    const ScalarField h2y = h2.substitute(X, Y);
    const ScalarField w = h1x + h2y;
    ChartOptions o;
    o.period_x = period_x;
    o.period_y = period_y;
    o.sample_box = Box{0.0, period_x.value_or(1.0), 0.0, period_y.value_or(1.0)};
    const Signature sig = sign > 0 ? Signature::Riemannian : Signature::Lorentzian;
    MetricChart m(sign > 0 ? "liouville" : "liouville-lorentzian", w, 0.0, ScalarField(sign) * w, sig, Domain{}, o);
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& p : grid_points(m.sample_box(), grid, grid)) {
        const double v = w.eval(p.x, p.y);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (sign > 0 ? !(mn > 0.0) : !(mn > 0.0 || mx < 0.0))
        throw ConstructionError("conformal factor h1 + h2 is not " + std::string(sign > 0 ? "positive" : "of one sign") +
                                " on the sampled grid");
    return m;
}

// Catalogue -------------------------------------------------------------------

double ZooParams::number(const std::string& k, double fallback) const {
    auto it = values.find(k);
    if (it == values.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != it->second.size()) throw std::invalid_argument("parameter '" + k + "' is not a number: " + it->second);
    return v;
}

ScalarField ZooParams::field(const std::string& k, const ScalarField& fallback) const {
    auto it = values.find(k);
    return it == values.end() ? fallback : parse_expression(it->second);
}

const std::vector<CatalogueItem>& catalogue() {
    static const std::vector<CatalogueItem> items{
        {"flat", "2 dx dy on the plane"},
        {"sphere", "round sphere dr^2 + sin^2 r dtheta^2 (control)"},
        {"clifton-pohl", "Clifton-Pohl plane 2/(x^2+y^2) dx dy with radial Killing field"},
        {"band", "projective family g_{a,l} of 2dxdy + f(x)dy^2 (params a, l, f)"},
        {"punctured-family", "projective deformation g_{a,l} of the Clifton-Pohl plane, |l| < |a| (params a, l)"},
        {"tannery", "Riemannian Tannery surface (p/q + h(cos r))^2 dr^2 + sin^2 r dtheta^2 (params p, q, h)"},
        {"tannery-deformed", "Lorentzian deformation of a Tannery surface (params p, q, h, l)"},
        {"tannery-truncated", "Clairaut truncation of a Tannery surface on {g(K,K) < l^2} (params p, q, h, l)"},
        {"periodic-shift", "metric with the non-affine projective shift (x, y) -> (x+1, y) (params f, a, eps)"},
        {"liouville", "Liouville metric (h1(x) + h2(y))(dx^2 + sign dy^2) (params h1, h2, sign)"},
    };
    return items;
}

ZooEntry make_zoo(const std::string& name, const ZooParams& p) {
    auto with_killing = [](const KillingChart& kc) {
        ZooEntry e{kc.chart, kc.killing, {}, {}, std::nullopt};
        e.integrals.push_back(energy(kc.chart).renamed("energy"));
        e.integrals.push_back(clairaut(kc.chart, kc.killing).renamed("clairaut"));
        return e;
    };
    auto tannery_spec = [&](double ell_default) {
        TannerySpec s;
        s.p = static_cast<int>(p.number("p", 1));
        s.q = static_cast<int>(p.number("q", 1));
        if (s.p != p.number("p", 1) || s.q != p.number("q", 1)) throw std::invalid_argument("p and q must be integers");
        s.h = p.field("h", name == "tannery" || name == "tannery-truncated" ? 0.1 * pow(X, 3.0) : ScalarField(0.0));
        s.ell = p.number("l", ell_default);
        return s;
    };

    if (name == "flat") return with_killing({flat_null(), {0.0, 1.0}});
    if (name == "sphere") return with_killing({round_sphere(), {0.0, 1.0}});
    if (name == "clifton-pohl") return with_killing(clifton_pohl());
    if (name == "band") {
        BandMetricSpec s;
        s.f = p.field("f", s.f);
        s.a = p.number("a", 2.0);
        s.ell = p.number("l", 0.3);
        if (p.has("f")) s.period_x.reset();
        return with_killing(band_metric(s));
    }
    if (name == "punctured-family") return with_killing(punctured_plane_family(p.number("a", 1.0), p.number("l", 0.5)));
    if (name == "tannery") return with_killing(tannery_riemannian(tannery_spec(0.0)));
    if (name == "tannery-deformed") return with_killing(tannery_deformed(tannery_spec(-2.0)));
    if (name == "tannery-truncated") {
        const TannerySpec s = tannery_spec(1.0);
        const KillingChart base = tannery_riemannian(s);
        MetricChart t = clairaut_truncation(base.chart, base.killing, s.ell);
        return with_killing({t, base.killing});
    }
    if (name == "periodic-shift") {
        PeriodicShiftSpec s;
        s.f = p.field("f", s.f);
        s.a = p.number("a", s.a);
        s.eps = p.number("eps", s.eps);
        const PeriodicShiftResult r = periodic_shift_metric(s);
        ZooEntry e = with_killing({r.chart, r.killing});
        e.integrals.push_back(darboux_integral(r.chart, pullback(r.chart, r.tau)).renamed("darboux-tau"));
        e.maps.push_back(r.tau);
        e.seams = shift_seam_smoothness(r);
        return e;
    }
    if (name == "liouville") {
        const ScalarField h1 = p.field("h1", 2.0 + sin(4 * pi * X));
        const ScalarField h2 = p.field("h2", 5.0 - sin(4 * pi * Y));
        const int sign = static_cast<int>(p.number("sign", 1));
        const bool custom = p.has("h1") || p.has("h2");
        MetricChart m = liouville_metric(h1, h2, sign, custom ? std::nullopt : std::optional<double>(1.0),
                                         custom ? std::nullopt : std::optional<double>(1.0));
        ZooEntry e{m, std::nullopt, {}, {}, std::nullopt};
        e.integrals.push_back(energy(m).renamed("energy"));
        e.integrals.push_back(liouville_integral(h1, h2, sign).renamed("liouville-I0"));
        return e;
    }
    std::string names;
    for (const auto& it : catalogue()) names += (names.empty() ? "" : ", ") + it.name;
    throw std::invalid_argument("unknown chart '" + name + "'; catalogue: " + names);
}

}  // namespace geoproj
