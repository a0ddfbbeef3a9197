#include "geoproj/projective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace geoproj {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::NotEquivalent: return "not-equivalent";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(Orientation o) { return o == Orientation::Swap ? "swap" : "anti-swap"; }

namespace {

constexpr int kSub = 16;

Point hermite(const GeodesicState& a, const GeodesicState& b, double s) {
    const double h = b.t - a.t;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return {h00 * a.x + h10 * h * a.vx + h01 * b.x + h11 * h * b.vx,
            h00 * a.y + h10 * h * a.vy + h01 * b.y + h11 * h * b.vy};
}

// Dense polyline with cumulative length.
void densify(const GeodesicTrace& tr, std::vector<Point>& pts, std::vector<double>& cum) {
    pts.clear();
    cum.clear();
    pts.push_back(tr.front().pos());
    cum.push_back(0.0);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        for (int j = 1; j <= kSub; ++j) {
            const Point p = hermite(tr.samples[i - 1], tr.samples[i], static_cast<double>(j) / kSub);
            cum.push_back(cum.back() + std::hypot(p.x - pts.back().x, p.y - pts.back().y));
            pts.push_back(p);
        }
    }
}

std::vector<GeodesicState> shared_starts(const MetricChart& g, const MetricChart& gbar, std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::vector<GeodesicState> out;
    for (int round = 0; round < 50 && static_cast<int>(out.size()) < n; ++round) {
        for (const auto& s : random_initial_states(g, rng, n)) {
            if (static_cast<int>(out.size()) == n) break;
            if (gbar.contains(s.pos())) out.push_back(s);
        }
    }
    return out;
}

}  // namespace

double chart_length(const GeodesicTrace& trace) {
    std::vector<Point> pts;
    std::vector<double> cum;
    densify(trace, pts, cum);
    return cum.back();
}

std::vector<Point> resample_by_length(const GeodesicTrace& trace, double length, int n) {
    std::vector<Point> pts;
    std::vector<double> cum;
    densify(trace, pts, cum);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    std::size_t j = 1;
    for (int i = 0; i <= n; ++i) {
        const double s = std::min(length, cum.back()) * i / n;
        while (j + 1 < cum.size() && cum[j] < s) ++j;
        if (cum.size() == 1) {
            out.push_back(pts[0]);
            continue;
        }
        const double seg = cum[j] - cum[j - 1];
        const double w = seg > 0.0 ? std::clamp((s - cum[j - 1]) / seg, 0.0, 1.0) : 0.0;
        out.push_back({pts[j - 1].x + w * (pts[j].x - pts[j - 1].x), pts[j - 1].y + w * (pts[j].y - pts[j - 1].y)});
    }
    return out;
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    auto directed = [](const std::vector<Point>& p, const std::vector<Point>& q) {
        double worst = 0.0;
        for (const auto& u : p) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : q) best = std::min(best, std::hypot(u.x - v.x, u.y - v.y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

EquivalenceReport check_projective_equivalence(const MetricChart& g, const MetricChart& gbar,
                                               const EquivalenceOptions& opts) {
    EquivalenceReport rep;
    rep.chart = g.name();
    rep.other = gbar.name();
    rep.seed = opts.seed;
    rep.drift_tol = opts.drift_tol;
    rep.overlap_tol = opts.overlap_tol;

    const std::vector<GeodesicState> starts = shared_starts(g, gbar, opts.seed, opts.n_samples);
    rep.n_samples = static_cast<int>(starts.size());

    std::optional<FiberIntegral> I;
    try {
        I = darboux_integral(g, gbar);
    } catch (const ConstructionError& e) {
        rep.note = e.what();
        return rep;
    }

    IntegratorOptions io = opts.integrator;
    io.max_length = opts.segment_length;

    double overlap_sum = 0.0;
    for (const auto& s0 : starts) {
        const GeodesicTrace tg = integrate_geodesic(g, s0, opts.t_cap, io);
        const double drift = drift_along(*I, tg);
        rep.drifts.push_back(drift);
        rep.max_drift = std::max(rep.max_drift, drift);
        const double lg = chart_length(tg);
        if (lg >= opts.segment_length * (1.0 - 1e-9)) ++rep.n_unit_length;

        const GeodesicTrace tb = integrate_geodesic(gbar, s0, opts.t_cap, io);
        const double common = std::min({lg, chart_length(tb), opts.segment_length});
        if (!(common > 0.1 * opts.segment_length)) continue;
        const double d = hausdorff(resample_by_length(tg, common, opts.resample),
                                   resample_by_length(tb, common, opts.resample));
        rep.overlaps.push_back(d);
        rep.max_overlap = std::max(rep.max_overlap, d);
        overlap_sum += d;
        ++rep.n_compared;
    }
    if (rep.n_compared > 0) rep.mean_overlap = overlap_sum / rep.n_compared;

    if (rep.n_unit_length < opts.min_traces || rep.n_compared < opts.min_traces) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "too few traces reach the segment length before leaving the domain";
        return rep;
    }
    const bool ok = rep.max_drift <= opts.drift_tol && rep.max_overlap <= opts.overlap_tol;
    rep.verdict = ok ? Verdict::Equivalent : Verdict::NotEquivalent;
    return rep;
}

namespace {

std::vector<Point> mapped_grid(const MetricChart& g, const ChartMap& phi, int grid) {
    std::vector<Point> pts = sample_grid(g, grid);
    for (const auto& p : pts) {
        const Point q = phi.apply(p);
        if (!g.contains(q))
            throw DomainError("map '" + phi.name() + "' sends a sampled point outside the domain of '" + g.name() + "'");
    }
    if (pts.empty()) throw DomainError("no sampled points in the domain of '" + g.name() + "'");
    return pts;
}

}  // namespace

MapCheck check_isometry(const MetricChart& g, const ChartMap& phi, double tol, int grid) {
    const std::vector<Point> pts = mapped_grid(g, phi, grid);
    const MetricChart pb = pullback(g, phi);
    MapCheck r;
    for (const auto& p : pts) {
        const Sym2 a = g.matrix(p);
        const Sym2 b = pb.matrix(p);
        r.residual = std::max(r.residual, (a - b).max_abs() / std::max(a.max_abs(), 1e-300));
    }
    r.points = static_cast<int>(pts.size());
    r.pass = r.residual <= tol;
    return r;
}

MapCheck check_affinity(const MetricChart& g, const ChartMap& phi, double tol, int grid) {
    const std::vector<Point> pts = mapped_grid(g, phi, grid);
    const MetricChart pb = pullback(g, phi);
    MapCheck r;
    double scale = 0.0, diff = 0.0;
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    for (const auto& p : pts) {
        const MetricJet ja = g.jet1(p);
        const MetricJet jb = pb.jet1(p);
        const Christoffel a = christoffel(ja);
        const Christoffel b = christoffel(jb);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    scale = std::max(scale, std::fabs(a[k][i][j]));
                    diff = std::max(diff, std::fabs(a[k][i][j] - b[k][i][j]));
                }
        const double gm = ja.g.max_abs();
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                if (std::fabs(ja.g.at(i, j)) <= 1e-8 * gm) continue;
                const double q = jb.g.at(i, j) / ja.g.at(i, j);
                rmin = std::min(rmin, q);
                rmax = std::max(rmax, q);
            }
    }
    r.points = static_cast<int>(pts.size());
    r.residual = diff / std::max(scale, 1e-300);
    r.pass = r.residual <= tol;
    if (rmax >= rmin) {
        r.proportionality_spread = (rmax - rmin) / std::max(std::fabs(0.5 * (rmax + rmin)), 1e-300);
        r.proportional = r.proportionality_spread <= tol;
    }
    return r;
}

namespace {

struct ResidualFn {
    const ScalarField& h1;
    const ScalarField& h2;
    double period;
    std::vector<double> xs;
    std::vector<double> h1x;

    ResidualFn(const ScalarField& a, const ScalarField& b, double p, int n) : h1(a), h2(b), period(p) {
        for (int i = 0; i < n; ++i) {
            xs.push_back(p * i / n);
            h1x.push_back(h1.eval(xs.back(), 0.0));
        }
    }

    // Variance of the offset plus the 2k-periodicity defect; mean offset in c.
    double operator()(double k, Orientation o, double* c = nullptr) const {
        double s = 0.0, s2 = 0.0, per = 0.0;
        const double n = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs[i];
            const double arg = o == Orientation::Swap ? x + k : -x - k;
            const double d = h2.eval(arg, 0.0) - h1x[i];
            s += d;
            s2 += d * d;
            const double q = h1.eval(x + 2 * k, 0.0) - h1x[i];
            per += q * q;
        }
        const double mean = s / n;
        if (c) *c = mean;
        return std::max(0.0, s2 / n - mean * mean) + per / n;
    }
};

// Golden-section minimisation on [lo, hi].
double golden(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

LiouvilleIsometryResult liouville_isometry_search(const ScalarField& h1, const ScalarField& h2, double period, int grid,
                                                  int quadrature, double found_tol) {
    if (!(period > 0.0) || grid < 3 || quadrature < 4) throw std::invalid_argument("bad search parameters");
    const ResidualFn res(h1, h2, period, quadrature);
    LiouvilleIsometryResult out;

    // Constant profiles: every k works.
    double v1 = 0.0, v2 = 0.0, m1 = 0.0, m2 = 0.0;
    for (double x : res.xs) {
        m1 += h1.eval(x, 0.0);
        m2 += h2.eval(x, 0.0);
    }
    m1 /= quadrature;
    m2 /= quadrature;
    for (double x : res.xs) {
        v1 = std::max(v1, std::fabs(h1.eval(x, 0.0) - m1));
        v2 = std::max(v2, std::fabs(h2.eval(x, 0.0) - m2));
    }
    if (v1 <= 1e-12 * std::max(1.0, std::fabs(m1)) && v2 <= 1e-12 * std::max(1.0, std::fabs(m2))) {
        out.found = true;
        out.degenerate = true;
        out.k = 0.0;
        out.c = m2 - m1;
        return out;
    }

    const double step = period / grid;
    struct Candidate {
        double k, r, c;
    };
    auto search = [&](Orientation o, double& best) -> std::optional<Candidate> {
        std::vector<double> r(static_cast<std::size_t>(grid));
        for (int i = 0; i < grid; ++i) r[i] = res(i * step, o);
        best = *std::min_element(r.begin(), r.end());
        std::vector<Candidate> found;
        for (int i = 0; i < grid; ++i) {
            const double prev = r[(i + grid - 1) % grid], next = r[(i + 1) % grid];
            if (!(r[i] <= prev && r[i] <= next)) continue;
            // Only minima that can plausibly reach zero are refined.
            if (r[i] > std::max(1e3 * best, 1e-6)) continue;
            const double k0 = i * step;
            const double k = golden([&](double kk) { return res(kk, o); }, k0 - step, k0 + step, 1e-12 * period);
            double c = 0.0;
            double rk = res(k, o, &c);
            double kk = std::fmod(k, period);
            if (kk < 0) kk += period;
            // A grid point can already be the exact minimiser.
            if (r[i] <= rk) {
                kk = k0;
                rk = res(k0, o, &c);
            }
            best = std::min(best, rk);
            if (rk <= found_tol) found.push_back({kk, rk, c});
        }
        if (found.empty()) return std::nullopt;
        return *std::min_element(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.k < b.k; });
    };

    const auto sw = search(Orientation::Swap, out.best_swap);
    const auto an = search(Orientation::AntiSwap, out.best_anti);
    if (sw) {
        out.found = true;
        out.orientation = Orientation::Swap;
        out.k = sw->k;
        out.c = sw->c;
        out.residual = sw->r;
    } else if (an) {
        out.found = true;
        out.orientation = Orientation::AntiSwap;
        out.k = an->k;
        out.c = an->c;
        out.residual = an->r;
    } else {
        out.residual = std::min(out.best_swap, out.best_anti);
        out.orientation = out.best_swap <= out.best_anti ? Orientation::Swap : Orientation::AntiSwap;
    }
    return out;
}

ChartMap liouville_map(const LiouvilleIsometryResult& r) {
    const ScalarField X = ScalarField::x(), Y = ScalarField::y();
    if (r.orientation == Orientation::Swap)
        return ChartMap("liouville-swap", Y + r.k, X + r.k, Y - r.k, X - r.k);
    // (u, v) = (-y + k, -x - k)  =>  x = -v - k, y = k - u
    return ChartMap("liouville-anti-swap", r.k - Y, -X - r.k, -Y - r.k, r.k - X);
}

}  // namespace geoproj
