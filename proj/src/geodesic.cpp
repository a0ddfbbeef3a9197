#include "geoproj/geodesic.hpp"

#include <cmath>
#include <numbers>

namespace geoproj {

const char* to_string(Termination t) {
    switch (t) {
    case Termination::TimeLimit: return "time-limit";
    case Termination::DomainExit: return "domain-exit";
    case Termination::Singularity: return "singularity";
    case Termination::ClosureDetected: return "closure-detected";
    }
    return "?";
}

namespace {

Termination to_termination(OdeStop s) {
    switch (s) {
    case OdeStop::Reached: return Termination::TimeLimit;
    case OdeStop::DomainExit: return Termination::DomainExit;
    default: return Termination::Singularity;
    }
}

using JacobiVec = std::array<double, 8>;

RhsStatus jacobi_rhs(const MetricChart& m, const JacobiVec& s, JacobiVec& ds) {
    const Point p{s[0], s[1]};
    if (!m.contains(p)) return RhsStatus::OutOfDomain;
    try {
        const MetricJet jet = m.jet2(p);
        const Christoffel G = christoffel(jet);
        const ChristoffelDerivative dG = christoffel_derivative(jet);
        const double v[2] = {s[2], s[3]};
        const double xi[2] = {s[4], s[5]};
        const double eta[2] = {s[6], s[7]};
        ds[0] = v[0];
        ds[1] = v[1];
        ds[4] = eta[0];
        ds[5] = eta[1];
        for (int k = 0; k < 2; ++k) {
            double acc = 0.0;
            double var = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    acc += G[k][i][j] * v[i] * v[j];
                    var += (dG[0][k][i][j] * xi[0] + dG[1][k][i][j] * xi[1]) * v[i] * v[j] +
                           2.0 * G[k][i][j] * v[i] * eta[j];
                }
            ds[2 + k] = -acc;
            ds[6 + k] = -var;
        }
    } catch (const DomainError&) {
        return RhsStatus::NonFinite;
    } catch (const DegenerateMetric&) {
        return RhsStatus::NonFinite;
    }
    return RhsStatus::Ok;
}

Vec2 gamma_contract(const Christoffel& G, const Vec2& a, const Vec2& b) {
    Vec2 out{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out[k] += G[k][i][j] * a[i] * b[j];
    return out;
}

JacobiState unpack(const MetricChart& m, double t, const JacobiVec& s) {
    JacobiState js;
    js.base = {t, s[0], s[1], s[2], s[3]};
    js.j = {s[4], s[5]};
    js.j_dot = {s[6], s[7]};
    const Vec2 corr = gamma_contract(christoffel(m, js.base.pos()), js.base.vel(), js.j);
    js.j_cov = {s[6] + corr[0], s[7] + corr[1]};
    return js;
}

std::optional<JacobiVec> advance_jacobi(const MetricChart& m, double t0, const JacobiVec& s0, double dt,
                                        const IntegratorOptions& opts) {
    double t = t0;
    JacobiVec y = s0;
    const auto rhs = [&](double, const JacobiVec& s, JacobiVec& ds) { return jacobi_rhs(m, s, ds); };
    const OdeStop st = integrate_dopri5<8>(rhs, t, y, t0 + dt, opts, [](double, const JacobiVec&) { return true; });
    if (st != OdeStop::Reached) return std::nullopt;
    return y;
}

double wrap(double d, const std::optional<double>& period) {
    if (!period) return d;
    return std::remainder(d, *period);
}

}  // namespace

RhsStatus geodesic_rhs(const MetricChart& m, const std::array<double, 4>& s, std::array<double, 4>& ds) {
    const Point p{s[0], s[1]};
    if (!m.contains(p)) return RhsStatus::OutOfDomain;
    try {
        const Christoffel G = christoffel(m.jet1(p));
        ds[0] = s[2];
        ds[1] = s[3];
        for (int k = 0; k < 2; ++k) {
            ds[2 + k] = -(G[k][0][0] * s[2] * s[2] + 2.0 * G[k][0][1] * s[2] * s[3] + G[k][1][1] * s[3] * s[3]);
        }
    } catch (const DomainError&) {
        return RhsStatus::NonFinite;
    } catch (const DegenerateMetric&) {
        return RhsStatus::NonFinite;
    }
    return RhsStatus::Ok;
}

double energy(const MetricChart& m, const GeodesicState& s) {
    const Vec2 v = s.vel();
    return m.matrix(s.pos())(v, v);
}

GeodesicTrace integrate_geodesic(const MetricChart& m, const GeodesicState& s0, double t_max,
                                 const IntegratorOptions& opts) {
    if (!m.contains(s0.pos())) throw DomainError("initial point outside the domain of '" + m.name() + "'");
    if (!(t_max != 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be finite and nonzero");
    GeodesicTrace trace;
    trace.samples.push_back(s0);
    double t = s0.t;
    std::array<double, 4> y{s0.x, s0.y, s0.vx, s0.vy};
    const auto rhs = [&](double, const std::array<double, 4>& s, std::array<double, 4>& ds) {
        return geodesic_rhs(m, s, ds);
    };
    const double speed0 = std::hypot(s0.vx, s0.vy);
    const double coeff0 = m.matrix(s0.pos()).max_abs();
    double length = 0.0;
    bool blowup = false;
    const OdeStop st = integrate_dopri5<4>(rhs, t, y, s0.t + t_max, opts, [&](double tt, const std::array<double, 4>& s) {
        const GeodesicState& prev = trace.samples.back();
        length += std::hypot(s[0] - prev.x, s[1] - prev.y);
        trace.samples.push_back({tt, s[0], s[1], s[2], s[3]});
        if (std::hypot(s[2], s[3]) > opts.max_speed_growth * speed0 ||
            m.matrix({s[0], s[1]}).max_abs() > opts.max_coefficient_growth * coeff0) {
            blowup = true;
            return false;
        }
        return length < opts.max_length;
    });
    trace.reason = st == OdeStop::Halted ? (blowup ? Termination::Singularity : Termination::TimeLimit) : to_termination(st);
    return trace;
}

std::optional<GeodesicState> advance(const MetricChart& m, const GeodesicState& s0, double dt,
                                     const IntegratorOptions& opts) {
    if (dt == 0.0) return s0;
    double t = s0.t;
    std::array<double, 4> y{s0.x, s0.y, s0.vx, s0.vy};
    const auto rhs = [&](double, const std::array<double, 4>& s, std::array<double, 4>& ds) {
        return geodesic_rhs(m, s, ds);
    };
    const OdeStop st = integrate_dopri5<4>(rhs, t, y, s0.t + dt, opts, [](double, const std::array<double, 4>&) { return true; });
    if (st != OdeStop::Reached) return std::nullopt;
    return GeodesicState{t, y[0], y[1], y[2], y[3]};
}

std::vector<JacobiState> integrate_jacobi(const MetricChart& m, const GeodesicTrace& trace, const JacobiState& j0,
                                          const IntegratorOptions& opts) {
    if (trace.samples.empty()) throw std::invalid_argument("empty trace");
    const GeodesicState& b = trace.front();
    if (std::fabs(j0.base.t - b.t) > 1e-12 || std::fabs(j0.base.x - b.x) > 1e-12 || std::fabs(j0.base.y - b.y) > 1e-12)
        throw std::invalid_argument("Jacobi initial state is not based at the trace start");

    const Vec2 corr = gamma_contract(christoffel(m, b.pos()), b.vel(), j0.j);
    JacobiVec y{b.x, b.y, b.vx, b.vy, j0.j[0], j0.j[1], j0.j_cov[0] - corr[0], j0.j_cov[1] - corr[1]};

    std::vector<JacobiState> out;
    out.push_back(unpack(m, b.t, y));
    double t = b.t;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const double dt = trace.samples[i].t - t;
        auto next = advance_jacobi(m, t, y, dt, opts);
        if (!next) break;
        y = *next;
        t = trace.samples[i].t;
        out.push_back(unpack(m, t, y));
    }
    return out;
}

std::vector<double> find_conjugate_points(const MetricChart& m, const GeodesicState& s0, double t_max,
                                          const IntegratorOptions& opts, double t_tol) {
    const Sym2 g = m.matrix(s0.pos());
    const Vec2 v = s0.vel();
    const Vec2 gv{g.xx * v[0] + g.xy * v[1], g.xy * v[0] + g.yy * v[1]};
    Vec2 w{-gv[1], gv[0]};
    const CausalClass cls = classify(m, s0.pos(), v);
    if (cls == CausalClass::Lightlike) w = {-v[1], v[0]};  // g-orthogonal vectors are tangent here
    const double wn = std::hypot(w[0], w[1]);
    w = {w[0] / wn, w[1] / wn};

    JacobiVec y{s0.x, s0.y, s0.vx, s0.vy, 0.0, 0.0, w[0], w[1]};
    IntegratorOptions o = opts;
    o.max_step = std::min(o.max_step, 0.1);

    const auto area = [](const JacobiVec& s) { return s[2] * s[5] - s[3] * s[4]; };

    std::vector<double> zeros;
    double t = s0.t;
    double t_prev = t;
    JacobiVec y_prev = y;
    double n_prev = 0.0;
    bool started = false;
    const auto rhs = [&](double, const JacobiVec& s, JacobiVec& ds) { return jacobi_rhs(m, s, ds); };
    integrate_dopri5<8>(rhs, t, y, s0.t + t_max, o, [&](double tt, const JacobiVec& s) {
        const double n = area(s);
        if (started && n_prev != 0.0 && (n == 0.0 || (n > 0.0) != (n_prev > 0.0))) {
            // Bisection on [t_prev, tt], re-integrating from the left state.
            double lo = t_prev, hi = tt;
            JacobiVec ylo = y_prev;
            double nlo = n_prev;
            while (hi - lo > t_tol) {
                const double mid = 0.5 * (lo + hi);
                const auto ym = advance_jacobi(m, lo, ylo, mid - lo, opts);
                if (!ym) break;
                const double nm = area(*ym);
                if (nm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((nm > 0.0) == (nlo > 0.0)) {
                    lo = mid;
                    ylo = *ym;
                    nlo = nm;
                } else {
                    hi = mid;
                }
            }
            zeros.push_back(0.5 * (lo + hi) - s0.t);
        }
        started = true;
        t_prev = tt;
        y_prev = s;
        n_prev = n;
        return true;
    });
    return zeros;
}

double return_distance(const MetricChart& m, const GeodesicState& a, const GeodesicState& b) {
    const double dx = wrap(b.x - a.x, m.options().period_x);
    const double dy = wrap(b.y - a.y, m.options().period_y);
    const double na = std::hypot(a.vx, a.vy);
    const double nb = std::hypot(b.vx, b.vy);
    const double du = b.vx / nb - a.vx / na;
    const double dv = b.vy / nb - a.vy / na;
    return std::max({std::fabs(dx), std::fabs(dy), std::fabs(du), std::fabs(dv)});
}

ClosureResult detect_closure(const MetricChart& m, const GeodesicState& s0, double t_max, const ClosureOptions& opts) {
    IntegratorOptions io = opts.integrator;
    io.max_step = std::min(io.max_step, opts.scan_step);
    const GeodesicTrace trace = integrate_geodesic(m, s0, t_max, io);

    ClosureResult res;
    res.trace_end = trace.reason;
    res.distance = std::numeric_limits<double>::infinity();

    const auto& S = trace.samples;
    std::vector<double> d(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) d[i] = return_distance(m, s0, S[i]);

    const double arm = std::max(0.05, 100.0 * opts.tol);
    bool armed = false;
    constexpr double golden = 0.6180339887498949;
    for (std::size_t i = 1; i + 1 < S.size(); ++i) {
        if (!armed) {
            armed = d[i] > arm;
            continue;
        }
        if (!(d[i] <= d[i - 1] && d[i] <= d[i + 1]) || d[i] > 0.25) continue;

        const GeodesicState& left = S[i - 1];
        const auto F = [&](double tt) {
            const auto st = advance(m, left, tt - left.t, opts.integrator);
            return st ? return_distance(m, s0, *st) : std::numeric_limits<double>::infinity();
        };
        double a = S[i - 1].t, b = S[i + 1].t;
        double c = b - golden * (b - a), e = a + golden * (b - a);
        double fc = F(c), fe = F(e);
        while (b - a > 1e-11) {
            if (fc < fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - golden * (b - a);
                fc = F(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + golden * (b - a);
                fe = F(e);
            }
        }
        const double tm = 0.5 * (a + b);
        const double dm = F(tm);
        res.distance = std::min(res.distance, dm);
        if (dm <= opts.tol) {
            res.closed = true;
            res.period = tm - s0.t;
            res.distance = dm;
            res.trace_end = Termination::ClosureDetected;
            return res;
        }
    }
    return res;
}

std::vector<GeodesicState> random_initial_states(const MetricChart& m, std::mt19937_64& rng, int n,
                                                 std::optional<CausalClass> want, int max_attempts) {
    const Box& box = m.sample_box();
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax);
    std::uniform_real_distribution<double> uy(box.ymin, box.ymax);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);
    std::vector<GeodesicState> out;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < n; ++attempt) {
        const Point p{ux(rng), uy(rng)};
        if (!m.contains(p)) continue;
        Sym2 g;
        try {
            g = m.matrix(p);
        } catch (const DomainError&) {
            continue;
        }
        double ang = ua(rng);
        Vec2 v{std::cos(ang), std::sin(ang)};
        if (want == CausalClass::Lightlike) {
            // Null directions solve g11 c^2 + 2 g12 c s + g22 s^2 = 0.
            if (g.det() >= 0.0) continue;
            const bool first = ang < std::numbers::pi;
            const double disc = std::sqrt(-g.det());
            if (std::fabs(g.xx) > std::fabs(g.yy)) {
                const double r = (-g.xy + (first ? disc : -disc)) / g.xx;  // c/s
                v = {r, 1.0};
            } else {
                const double r = (-g.xy + (first ? disc : -disc)) / g.yy;  // s/c
                v = {1.0, r};
            }
            const double nv = std::hypot(v[0], v[1]);
            v = {v[0] / nv, v[1] / nv};
        } else if (want && classify(m, p, v) != *want) {
            continue;
        }
        out.push_back({0.0, p.x, p.y, v[0], v[1]});
    }
    if (static_cast<int>(out.size()) < n) {
        throw std::runtime_error("could not draw " + std::to_string(n) + " initial states on '" + m.name() + "'");
    }
    return out;
}

}  // namespace geoproj
