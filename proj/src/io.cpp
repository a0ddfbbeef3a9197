#include "geoproj/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace geoproj {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

Json num(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ChartFormatError("chart line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, int line) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) fail(line, "bad number '" + t + "'");
    return v;
}

}  // namespace

std::string serialize_chart(const MetricChart& m) {
    std::ostringstream os;
    const Box& b = m.domain().box;
    os << "name: " << m.name() << '\n';
    os << "signature: " << (m.signature() == Signature::Riemannian ? "riemannian" : "lorentzian") << '\n';
    os << "g11: " << m.g11().to_string() << '\n';
    os << "g12: " << m.g12().to_string() << '\n';
    os << "g22: " << m.g22().to_string() << '\n';
    os << "x-min: " << format_number(b.xmin) << '\n';
    os << "x-max: " << format_number(b.xmax) << '\n';
    os << "y-min: " << format_number(b.ymin) << '\n';
    os << "y-max: " << format_number(b.ymax) << '\n';
    for (const auto& c : m.domain().positive) os << "constraint: " << c.to_string() << '\n';
    if (m.options().period_x) os << "period-x: " << format_number(*m.options().period_x) << '\n';
    if (m.options().period_y) os << "period-y: " << format_number(*m.options().period_y) << '\n';
    if (m.options().sample_box) {
        const Box& s = *m.options().sample_box;
        os << "sample-box: " << format_number(s.xmin) << ' ' << format_number(s.xmax) << ' '
           << format_number(s.ymin) << ' ' << format_number(s.ymax) << '\n';
    }
    return os.str();
}

MetricChart parse_chart(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::map<std::string, int> seen;
    std::string name;
    std::optional<Signature> sig;
    std::optional<ScalarField> g[3];
    Domain dom;
    ChartOptions opts;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto colon = s.find(':');
        if (colon == std::string::npos) fail(line, "expected 'key: value'");
        const std::string key = trim(s.substr(0, colon));
        const std::string value = trim(s.substr(colon + 1));
        if (key != "constraint" && seen[key]++) fail(line, "duplicate key '" + key + "'");
        if (key == "name") {
            name = value;
        } else if (key == "signature") {
            if (value == "riemannian") sig = Signature::Riemannian;
            else if (value == "lorentzian") sig = Signature::Lorentzian;
            else fail(line, "signature must be riemannian or lorentzian");
        } else if (key == "g11" || key == "g12" || key == "g22") {
            const int i = key == "g11" ? 0 : key == "g12" ? 1 : 2;
            try {
                g[i] = parse_expression(value);
            } catch (const ConstructionError& e) {
                fail(line, e.what());
            }
        } else if (key == "x-min") {
            dom.box.xmin = parse_number(value, line);
        } else if (key == "x-max") {
            dom.box.xmax = parse_number(value, line);
        } else if (key == "y-min") {
            dom.box.ymin = parse_number(value, line);
        } else if (key == "y-max") {
            dom.box.ymax = parse_number(value, line);
        } else if (key == "constraint") {
            try {
                dom.positive.push_back(parse_expression(value));
            } catch (const ConstructionError& e) {
                fail(line, e.what());
            }
        } else if (key == "period-x" || key == "period-y") {
            const double p = parse_number(value, line);
            if (!(p > 0.0) || !std::isfinite(p)) fail(line, "period must be positive");
            (key == "period-x" ? opts.period_x : opts.period_y) = p;
        } else if (key == "sample-box") {
            std::istringstream vs(value);
            std::string a[4], extra;
            if (!(vs >> a[0] >> a[1] >> a[2] >> a[3]) || (vs >> extra)) fail(line, "sample-box needs 4 numbers");
            Box b{parse_number(a[0], line), parse_number(a[1], line), parse_number(a[2], line),
                  parse_number(a[3], line)};
            if (!(b.xmin < b.xmax && b.ymin < b.ymax) || !b.bounded()) fail(line, "sample-box must be a bounded box");
            opts.sample_box = b;
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (name.empty()) fail(line, "missing 'name'");
    if (!sig) fail(line, "missing 'signature'");
    for (int i = 0; i < 3; ++i)
        if (!g[i]) fail(line, std::string("missing 'g") + (i == 0 ? "11" : i == 1 ? "12" : "22") + "'");
    if (!(dom.box.xmin < dom.box.xmax && dom.box.ymin < dom.box.ymax)) fail(line, "empty domain box");
    return MetricChart(name, *g[0], *g[1], *g[2], *sig, std::move(dom), opts);
}

MetricChart load_chart(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ChartFormatError("cannot open chart file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_chart(ss.str());
}

void write_trace_csv(std::ostream& os, const MetricChart& m, const GeodesicTrace& trace,
                     const std::vector<FiberIntegral>& integrals) {
    os << "t,x,y,vx,vy,energy";
    for (const auto& I : integrals) os << ',' << I.name();
    os << '\n';
    for (const auto& s : trace.samples) {
        os << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.y) << ','
           << format_number(s.vx) << ',' << format_number(s.vy) << ',' << format_number(energy(m, s));
        for (const auto& I : integrals) os << ',' << format_number(I(s.pos(), s.vel()));
        os << '\n';
    }
}

Json to_json(const GeodesicState& s) {
    return {{"t", num(s.t)}, {"x", num(s.x)}, {"y", num(s.y)}, {"vx", num(s.vx)}, {"vy", num(s.vy)}};
}

Json to_json(const ConservationReport& r) {
    Json traces = Json::array();
    for (const auto& t : r.traces)
        traces.push_back({{"start", to_json(t.start)},
                          {"drift", num(t.drift)},
                          {"duration", num(t.duration)},
                          {"end", to_string(t.reason)}});
    return {{"chart", r.chart},          {"integral", r.integral}, {"samples", r.n_samples},
            {"seed", r.seed},            {"threshold", num(r.threshold)}, {"max_drift", num(r.max_drift)},
            {"pass", r.pass},            {"traces", traces}};
}

Json to_json(const EquivalenceReport& r) {
    Json drifts = Json::array(), overlaps = Json::array();
    for (double d : r.drifts) drifts.push_back(num(d));
    for (double d : r.overlaps) overlaps.push_back(num(d));
    return {{"chart", r.chart},
            {"other", r.other},
            {"verdict", to_string(r.verdict)},
            {"max_drift", num(r.max_drift)},
            {"max_overlap", num(r.max_overlap)},
            {"mean_overlap", num(r.mean_overlap)},
            {"samples", r.n_samples},
            {"unit_length_traces", r.n_unit_length},
            {"compared", r.n_compared},
            {"seed", r.seed},
            {"drift_tol", num(r.drift_tol)},
            {"overlap_tol", num(r.overlap_tol)},
            {"note", r.note},
            {"drifts", drifts},
            {"overlaps", overlaps}};
}

Json to_json(const MapCheck& r) {
    return {{"pass", r.pass},
            {"residual", num(r.residual)},
            {"points", r.points},
            {"proportionality_spread", num(r.proportionality_spread)},
            {"proportional", r.proportional}};
}

Json to_json(const LiouvilleIsometryResult& r) {
    return {{"found", r.found},
            {"degenerate", r.degenerate},
            {"k", num(r.k)},
            {"c", num(r.c)},
            {"orientation", to_string(r.orientation)},
            {"residual", num(r.residual)},
            {"best_swap", num(r.best_swap)},
            {"best_anti", num(r.best_anti)}};
}

Json to_json(const SeamReport& r) {
    Json seams = Json::array();
    for (double s : r.seams) seams.push_back(num(s));
    return {{"max_jump", num(r.max_jump)}, {"seams", seams}};
}

namespace {

void stringify_non_finite(Json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) j = format_number(v);
    } else if (j.is_structured()) {
        for (auto& child : j) stringify_non_finite(child);
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    Json copy = j;
    stringify_non_finite(copy);
    return copy.dump(2) + "\n";
}

}  // namespace geoproj
