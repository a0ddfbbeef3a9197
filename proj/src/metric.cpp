#include "geoproj/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geoproj {

namespace {

std::string where(Point p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

void require_finite(std::span<const double> vals, Point p, const std::string& chart) {
    for (double v : vals)
        if (!std::isfinite(v)) throw DomainError("chart '" + chart + "': non-finite coefficient at " + where(p));
}

}  // namespace

const char* to_string(Signature s) { return s == Signature::Riemannian ? "riemannian" : "lorentzian"; }

const char* to_string(CausalClass c) {
    switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
    }
    return "?";
}

Sym2 Sym2::inverse() const {
    const double d = det();
    if (d == 0.0 || !std::isfinite(d)) throw DegenerateMetric("singular coefficient matrix");
    return {yy / d, -xy / d, xx / d};
}

double Sym2::max_abs() const { return std::max({std::fabs(xx), std::fabs(xy), std::fabs(yy)}); }

bool Box::bounded() const {
    return std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) && std::isfinite(ymax);
}

bool Domain::contains(Point p) const {
    if (!box.contains(p)) return false;
    for (const auto& f : positive) {
        const double v = f.eval_raw(p.x, p.y);
        if (!(v > 0.0)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

MetricChart::MetricChart(std::string name, ScalarField g11, ScalarField g12, ScalarField g22, Signature sig,
                         Domain domain, ChartOptions opts) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->g = {std::move(g11), std::move(g12), std::move(g22)};
    impl->signature = sig;
    impl->domain = std::move(domain);
    impl->options = std::move(opts);
    if (impl->options.sample_box) {
        impl->sample_box = *impl->options.sample_box;
    } else if (impl->domain.box.bounded()) {
        impl->sample_box = impl->domain.box;
    } else {
        impl->sample_box = Box{-1.0, 1.0, -1.0, 1.0};
    }
    impl->tape0 = std::make_shared<const Tape>(std::span<const ScalarField>(impl->g));
    impl_ = std::move(impl);
}

const ScalarField& MetricChart::coefficient(int i, int j) const {
    if (i == 0 && j == 0) return impl_->g[0];
    if (i == 1 && j == 1) return impl_->g[2];
    return impl_->g[1];
}

void MetricChart::check_domain(Point p) const {
    if (!impl_->domain.contains(p)) throw DomainError("chart '" + impl_->name + "': point " + where(p) + " outside domain");
}

Sym2 MetricChart::matrix(Point p) const {
    check_domain(p);
    std::array<double, 3> v{};
    impl_->tape0->eval(p.x, p.y, v);
    require_finite(v, p, impl_->name);
    return {v[0], v[1], v[2]};
}

MetricJet MetricChart::jet1(Point p) const {
    check_domain(p);
    std::call_once(impl_->once1, [this] {
        std::vector<ScalarField> roots(impl_->g.begin(), impl_->g.end());
        for (const auto& c : impl_->g) roots.push_back(c.dx());
        for (const auto& c : impl_->g) roots.push_back(c.dy());
        impl_->tape1 = std::make_shared<const Tape>(roots);
    });
    std::array<double, 9> v{};
    impl_->tape1->eval(p.x, p.y, v);
    require_finite(v, p, impl_->name);
    MetricJet j;
    j.g = {v[0], v[1], v[2]};
    j.dg[0] = {v[3], v[4], v[5]};
    j.dg[1] = {v[6], v[7], v[8]};
    return j;
}

MetricJet MetricChart::jet2(Point p) const {
    check_domain(p);
    std::call_once(impl_->once2, [this] {
        std::vector<ScalarField> roots(impl_->g.begin(), impl_->g.end());
        for (const auto& c : impl_->g) roots.push_back(c.dx());
        for (const auto& c : impl_->g) roots.push_back(c.dy());
        for (const auto& c : impl_->g) roots.push_back(c.dx().dx());
        for (const auto& c : impl_->g) roots.push_back(c.dx().dy());
        for (const auto& c : impl_->g) roots.push_back(c.dy().dy());
        impl_->tape2 = std::make_shared<const Tape>(roots);
    });
    std::array<double, 18> v{};
    impl_->tape2->eval(p.x, p.y, v);
    require_finite(v, p, impl_->name);
    MetricJet j;
    j.g = {v[0], v[1], v[2]};
    j.dg[0] = {v[3], v[4], v[5]};
    j.dg[1] = {v[6], v[7], v[8]};
    j.ddg[0][0] = {v[9], v[10], v[11]};
    j.ddg[0][1] = {v[12], v[13], v[14]};
    j.ddg[1][0] = j.ddg[0][1];
    j.ddg[1][1] = {v[15], v[16], v[17]};
    return j;
}

MetricChart MetricChart::with_domain(Domain d) const {
    return MetricChart(impl_->name, impl_->g[0], impl_->g[1], impl_->g[2], impl_->signature, std::move(d),
                       impl_->options);
}

MetricChart MetricChart::with_options(ChartOptions o) const {
    return MetricChart(impl_->name, impl_->g[0], impl_->g[1], impl_->g[2], impl_->signature, impl_->domain,
                       std::move(o));
}

MetricChart MetricChart::renamed(std::string name) const {
    return MetricChart(std::move(name), impl_->g[0], impl_->g[1], impl_->g[2], impl_->signature, impl_->domain,
                       impl_->options);
}

// ---------------------------------------------------------------------------

ChartMap::ChartMap(std::string name, ScalarField u, ScalarField v)
    : name_(std::move(name)), u_(std::move(u)), v_(std::move(v)) {
    jac_ = {{{u_.dx(), u_.dy()}, {v_.dx(), v_.dy()}}};
}

ChartMap::ChartMap(std::string name, ScalarField u, ScalarField v, ScalarField u_inv, ScalarField v_inv)
    : ChartMap(std::move(name), std::move(u), std::move(v)) {
    inverse_ = std::make_pair(std::move(u_inv), std::move(v_inv));
}

ChartMap ChartMap::identity() {
    return ChartMap("identity", ScalarField::x(), ScalarField::y(), ScalarField::x(), ScalarField::y());
}

ChartMap ChartMap::inverse() const {
    if (!inverse_) throw std::logic_error("chart map '" + name_ + "' has no inverse");
    return ChartMap(name_ + "^-1", inverse_->first, inverse_->second, u_, v_);
}

Point ChartMap::apply(Point p) const { return {u_.eval(p.x, p.y), v_.eval(p.x, p.y)}; }

std::array<Vec2, 2> ChartMap::jacobian_at(Point p) const {
    return {Vec2{jac_[0][0].eval(p.x, p.y), jac_[0][1].eval(p.x, p.y)},
            Vec2{jac_[1][0].eval(p.x, p.y), jac_[1][1].eval(p.x, p.y)}};
}

Vec2 ChartMap::push_forward(Point p, const Vec2& w) const {
    const auto j = jacobian_at(p);
    return {j[0][0] * w[0] + j[0][1] * w[1], j[1][0] * w[0] + j[1][1] * w[1]};
}

double ChartMap::inverse_residual(const std::vector<Point>& pts) const {
    const ChartMap inv = inverse();
    double worst = 0.0;
    for (const auto& q : pts) {
        const Point r = apply(inv.apply(q));
        worst = std::max({worst, std::fabs(r.x - q.x), std::fabs(r.y - q.y)});
    }
    return worst;
}

ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
    const std::string name = outer.name() + " o " + inner.name();
    ScalarField u = outer.u().substitute(inner.u(), inner.v());
    ScalarField v = outer.v().substitute(inner.u(), inner.v());
    if (outer.has_inverse() && inner.has_inverse()) {
        const ChartMap oi = outer.inverse();
        const ChartMap ii = inner.inverse();
        return ChartMap(name, std::move(u), std::move(v), ii.u().substitute(oi.u(), oi.v()),
                        ii.v().substitute(oi.u(), oi.v()));
    }
    return ChartMap(name, std::move(u), std::move(v));
}

// ---------------------------------------------------------------------------

double metric_eval(const MetricChart& m, Point p, const Vec2& v, const Vec2& w) { return m.matrix(p)(v, w); }

Christoffel christoffel(const MetricJet& jet) {
    const double d = jet.g.det();
    if (d == 0.0 || !std::isfinite(d)) throw DegenerateMetric("degenerate metric: det = " + std::to_string(d));
    const Sym2 inv = jet.g.inverse();
    // lowered[l][i][j] = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    double lowered[2][2][2];
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                lowered[l][i][j] = 0.5 * (jet.dg[i].at(l, j) + jet.dg[j].at(l, i) - jet.dg[l].at(i, j));
    Christoffel gamma{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                const double val = inv.at(k, 0) * lowered[0][i][j] + inv.at(k, 1) * lowered[1][i][j];
                gamma[k][i][j] = val;
                gamma[k][j][i] = val;
            }
    return gamma;
}

Christoffel christoffel(const MetricChart& m, Point p) { return christoffel(m.jet1(p)); }

ChristoffelDerivative christoffel_derivative(const MetricJet& jet) {
    const Sym2 inv = jet.g.inverse();
    double lowered[2][2][2];
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                lowered[l][i][j] = 0.5 * (jet.dg[i].at(l, j) + jet.dg[j].at(l, i) - jet.dg[l].at(i, j));

    ChristoffelDerivative out{};
    for (int m = 0; m < 2; ++m) {
        // d_m (G^-1) = -G^-1 (d_m G) G^-1
        double dinv[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c)
                    for (int e = 0; e < 2; ++e) s += inv.at(a, c) * jet.dg[m].at(c, e) * inv.at(e, b);
                dinv[a][b] = -s;
            }
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 2; ++l) {
                        const double dlow = 0.5 * (jet.ddg[m][i].at(l, j) + jet.ddg[m][j].at(l, i) -
                                                   jet.ddg[m][l].at(i, j));
                        s += dinv[k][l] * lowered[l][i][j] + inv.at(k, l) * dlow;
                    }
                    out[m][k][i][j] = s;
                }
    }
    return out;
}

double gaussian_curvature(const MetricJet& jet) {
    const Christoffel G = christoffel(jet);
    const ChristoffelDerivative dG = christoffel_derivative(jet);
    // R(d1, d2) d2 = R^l d_l,
    // R^l = d_1 G^l_22 - d_2 G^l_12 + G^l_1m G^m_22 - G^l_2m G^m_12
    std::array<double, 2> r{};
    for (int l = 0; l < 2; ++l) {
        double s = dG[0][l][1][1] - dG[1][l][0][1];
        for (int m = 0; m < 2; ++m) s += G[l][0][m] * G[m][1][1] - G[l][1][m] * G[m][0][1];
        r[l] = s;
    }
    // K = g(R(d1, d2) d2, d1) / det g
    return (jet.g.xx * r[0] + jet.g.xy * r[1]) / jet.g.det();
}

double gaussian_curvature(const MetricChart& m, Point p) { return gaussian_curvature(m.jet2(p)); }

double gaussian_curvature_limit(const MetricChart& m, Point p, const Vec2& dir) {
    try {
        const double k = gaussian_curvature(m, p);
        if (std::isfinite(k)) return k;
    } catch (const std::runtime_error&) {
    }
    const double n = std::hypot(dir[0], dir[1]);
    if (n == 0.0) throw std::invalid_argument("limit direction must be nonzero");
    // Richardson table on h, h/2, h/4, h/8 assuming K(h) = K0 + c1 h + c2 h^2 + ...
    constexpr int levels = 4;
    double table[levels][levels];
    double h = 1e-3;
    for (int i = 0; i < levels; ++i, h *= 0.5) {
        table[i][0] = gaussian_curvature(m, {p.x + h * dir[0] / n, p.y + h * dir[1] / n});
        double f = 2.0;
        for (int j = 1; j <= i; ++j, f *= 2.0) table[i][j] = (f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0);
    }
    return table[levels - 1][levels - 1];
}

MetricChart pullback(const MetricChart& m, const ChartMap& phi) {
    const ScalarField& u = phi.u();
    const ScalarField& v = phi.v();
    const ScalarField a = m.g11().substitute(u, v);
    const ScalarField b = m.g12().substitute(u, v);
    const ScalarField c = m.g22().substitute(u, v);
    const auto& J = phi.jacobian();
    // (J^T G J)_ij = sum_{kl} J_ki G_kl J_lj
    auto entry = [&](int i, int j) {
        return J[0][i] * a * J[0][j] + J[0][i] * b * J[1][j] + J[1][i] * b * J[0][j] + J[1][i] * c * J[1][j];
    };

    Domain d;
    const Box& mb = m.domain().box;
    if (std::isfinite(mb.xmin)) d.positive.push_back(u - ScalarField(mb.xmin));
    if (std::isfinite(mb.xmax)) d.positive.push_back(ScalarField(mb.xmax) - u);
    if (std::isfinite(mb.ymin)) d.positive.push_back(v - ScalarField(mb.ymin));
    if (std::isfinite(mb.ymax)) d.positive.push_back(ScalarField(mb.ymax) - v);
    for (const auto& f : m.domain().positive) d.positive.push_back(f.substitute(u, v));

    return MetricChart(phi.name() + "^*" + m.name(), entry(0, 0), entry(0, 1), entry(1, 1), m.signature(),
                       std::move(d), m.options());
}

CausalClass classify(const MetricChart& m, Point p, const Vec2& v, double tol) {
    if (v[0] == 0.0 && v[1] == 0.0) throw std::invalid_argument("cannot classify the zero vector");
    const Sym2 g = m.matrix(p);
    if (tol < 0.0) tol = 1e-9 * g.max_abs() * (v[0] * v[0] + v[1] * v[1]);
    const double q = g(v, v);
    if (q > tol) return CausalClass::Spacelike;
    if (q < -tol) return CausalClass::Timelike;
    return CausalClass::Lightlike;
}

Sym2 lie_derivative(const MetricChart& m, const VectorField& k, Point p) {
    const MetricJet j = m.jet1(p);
    const double K[2] = {k.x.eval(p.x, p.y), k.y.eval(p.x, p.y)};
    // dK[a][i] = d_i K^a
    const double dK[2][2] = {{k.x.dx().eval(p.x, p.y), k.x.dy().eval(p.x, p.y)},
                             {k.y.dx().eval(p.x, p.y), k.y.dy().eval(p.x, p.y)}};
    auto comp = [&](int i, int jj) {
        double s = K[0] * j.dg[0].at(i, jj) + K[1] * j.dg[1].at(i, jj);
        for (int a = 0; a < 2; ++a) s += j.g.at(a, jj) * dK[a][i] + j.g.at(i, a) * dK[a][jj];
        return s;
    };
    return {comp(0, 0), comp(0, 1), comp(1, 1)};
}

double killing_residual(const MetricChart& m, const VectorField& k, const std::vector<Point>& pts) {
    double worst = 0.0;
    for (const auto& p : pts) {
        const Sym2 l = lie_derivative(m, k, p);
        const MetricJet j = m.jet1(p);
        const double kn = std::hypot(k.x.eval(p.x, p.y), k.y.eval(p.x, p.y));
        const double scale = std::max(1.0, j.g.max_abs() * (1.0 + kn) + std::max(j.dg[0].max_abs(), j.dg[1].max_abs()) * kn);
        worst = std::max(worst, l.max_abs() / scale);
    }
    return worst;
}

std::vector<Point> grid_points(const Box& box, int nx, int ny) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(nx * ny));
    // Cell centres keep every point strictly inside the open box.
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            pts.push_back({box.xmin + (box.xmax - box.xmin) * (i + 0.5) / nx,
                           box.ymin + (box.ymax - box.ymin) * (j + 0.5) / ny});
    return pts;
}

std::vector<Point> sample_grid(const MetricChart& m, int n) {
    std::vector<Point> pts = grid_points(m.sample_box(), n, n);
    std::erase_if(pts, [&](const Point& p) { return !m.contains(p); });
    return pts;
}

int signature_violations(const MetricChart& m, const std::vector<Point>& pts) {
    int bad = 0;
    for (const auto& p : pts) {
        const double d = m.matrix(p).det();
        const bool ok = m.signature() == Signature::Riemannian ? d > 0.0 : d < 0.0;
        if (!ok) ++bad;
    }
    return bad;
}

}  // namespace geoproj
