// geoproj: command-line front end.
//
//   geoproj zoo list
//   geoproj zoo show NAME [--a ... zoo parameters]
//   geoproj geodesic --chart C X0 Y0 VX0 VY0 [--tmax T] [--csv PATH|-]
//   geoproj check projective --chart C (--other D | --map M)
//   geoproj check affine|isometry --chart C --map M
//   geoproj verify band-rescaling|shift-relation|tannery-x|liouville-i0
//   geoproj accept
//
// A chart is a catalogue name, optionally with inline parameters
// ("band:a=2,l=0.3"), or the path of a chart description file. A map is a
// name known to the chart ("tau", "liouville") or "u; v" with u and v
// expressions in x and y.
//
// Exit status: 0 pass, 1 check failed, 2 usage or configuration error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "geoproj/acceptance.hpp"

using namespace geoproj;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string chart;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::optional<int> samples;
    std::optional<double> tmax;
    std::string csv;
    std::string json;
    std::map<std::string, std::string> params;  // zoo parameters from flags
};

std::string catalogue_names() {
    std::string names;
    for (const auto& it : catalogue()) names += (names.empty() ? "" : ", ") + it.name;
    return names;
}

bool in_catalogue(const std::string& name) {
    for (const auto& it : catalogue())
        if (it.name == name) return true;
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// "name:k=v,k=v". A piece without '=' continues the previous value, so
// expressions such as mod(x, 1) survive the split.
std::pair<std::string, ZooParams> split_chart_spec(const std::string& spec, const Common& c) {
    ZooParams p{c.params};
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return {spec, p};
    const std::string name = spec.substr(0, colon);
    std::string key;
    std::size_t start = colon + 1;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string::npos) comma = spec.size();
        const std::string piece = spec.substr(start, comma - start);
        const auto eq = piece.find('=');
        if (eq != std::string::npos && piece.find('(') > eq) {
            key = trim(piece.substr(0, eq));
            p.values[key] = trim(piece.substr(eq + 1));
        } else if (!key.empty()) {
            p.values[key] += "," + piece;
        } else {
            throw UsageError("bad chart parameters in '" + spec + "'");
        }
        start = comma + 1;
    }
    return {name, p};
}

struct Loaded {
    ZooEntry entry;
    bool from_catalogue = false;
};

Loaded load(const std::string& spec, const Common& c) {
    if (spec.empty()) throw UsageError("--chart is required; catalogue: " + catalogue_names());
    auto [name, params] = split_chart_spec(spec, c);
    if (in_catalogue(name)) return {make_zoo(name, params), true};
    if (std::filesystem::is_regular_file(spec)) {
        MetricChart m = load_chart(spec);
        FiberIntegral e = energy(m).renamed("energy");
        return {ZooEntry{m, std::nullopt, {e}, {}, std::nullopt}, false};
    }
    throw UsageError("unknown chart '" + spec + "'; catalogue: " + catalogue_names());
}

ChartMap load_map(const std::string& spec, const Loaded& l, const Common& c) {
    for (const auto& m : l.entry.maps)
        if (m.name() == spec) return m;
    if (spec == "liouville") {
        ZooParams p{c.params};
        const ScalarField X = ScalarField::x();
        const ScalarField h1 = p.field("h1", 2.0 + sin(4 * std::numbers::pi * X));
        // The search reads both profiles in the variable x.
        const ScalarField h2 = p.field("h2", 5.0 - sin(4 * std::numbers::pi * ScalarField::y()))
                                   .substitute(X, X);
        const LiouvilleIsometryResult r = liouville_isometry_search(h1, h2, 1.0);
        if (!r.found) throw UsageError("no Liouville isometry exists for these profiles");
        return liouville_map(r);
    }
    const auto semi = spec.find(';');
    if (semi == std::string::npos)
        throw UsageError("unknown map '" + spec + "'; give a named map or 'u; v' expressions");
    return ChartMap("map", parse_expression(spec.substr(0, semi)), parse_expression(spec.substr(semi + 1)));
}

void emit(const Common& c, Json j, const std::string& line) {
    j["schema"] = 1;
    const std::string text = dump_json(j);
    if (c.json.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.json);
        if (!f) throw UsageError("cannot write '" + c.json + "'");
        f << text;
        std::cout << line << '\n';
    }
}

void add_zoo_flags(CLI::App* app, Common& c) {
    for (const char* k : {"a", "l", "f", "eps", "h", "p", "q", "h1", "h2", "sign"}) {
        const std::string key = k;
        app->add_option_function<std::string>(
               "--" + key, [&c, key](const std::string& v) { c.params[key] = v; },
               "zoo parameter " + key)
            ->type_name("VALUE");
    }
}

void add_common(CLI::App* app, Common& c, bool chart = true) {
    if (chart) app->add_option("--chart", c.chart, "catalogue name, name:k=v,... or chart file");
    app->add_option("--seed", c.seed, "random seed")->envname("GEOPROJ_SEED");
    app->add_option("--tol", c.tol, "tolerance");
    app->add_option("--samples", c.samples, "sample count")->check(CLI::PositiveNumber);
    app->add_option("--tmax", c.tmax, "affine parameter horizon");
    app->add_option("--json", c.json, "write the JSON report here instead of stdout");
    add_zoo_flags(app, c);
}

// Commands ------------------------------------------------------------------

int cmd_zoo_list() {
    for (const auto& it : catalogue()) std::printf("%-18s %s\n", it.name.c_str(), it.description.c_str());
    return kPass;
}

int cmd_zoo_show(const std::string& name, const Common& c) {
    const Loaded l = load(name, c);
    if (!l.from_catalogue) throw UsageError("unknown chart '" + name + "'; catalogue: " + catalogue_names());
    for (const auto& it : catalogue())
        if (it.name == split_chart_spec(name, c).first) std::cout << "# " << it.description << '\n';
    if (l.entry.seams) {
        std::cout << "# seam smoothness: max jump " << format_number(l.entry.seams->max_jump) << " over seams";
        for (double s : l.entry.seams->seams) std::cout << ' ' << format_number(s);
        std::cout << '\n';
    }
    std::cout << serialize_chart(l.entry.chart);
    return kPass;
}

int cmd_geodesic(const Common& c, const std::vector<double>& init) {
    const Loaded l = load(c.chart, c);
    const MetricChart& m = l.entry.chart;
    const GeodesicState s0{0.0, init[0], init[1], init[2], init[3]};
    if (!m.contains(s0.pos())) throw UsageError("initial point lies outside the domain of '" + m.name() + "'");
    if (s0.vx == 0.0 && s0.vy == 0.0) throw UsageError("initial velocity is zero");
    const double tmax = c.tmax.value_or(10.0);
    if (!std::isfinite(tmax) || tmax == 0.0) throw UsageError("--tmax must be finite and nonzero");
    const GeodesicTrace tr = integrate_geodesic(m, s0, tmax);

    std::vector<FiberIntegral> extra;
    for (const auto& I : l.entry.integrals)
        if (I.name() != "energy") extra.push_back(I);
    if (!c.csv.empty()) {
        if (c.csv == "-") {
            write_trace_csv(std::cout, m, tr, extra);
        } else {
            std::ofstream f(c.csv);
            if (!f) throw UsageError("cannot write '" + c.csv + "'");
            write_trace_csv(f, m, tr, extra);
        }
    }
    Json drifts = Json::object();
    drifts["energy"] = drift_along(energy(m), tr);
    for (const auto& I : extra) drifts[I.name()] = drift_along(I, tr);
    Json j{{"command", "geodesic"},
           {"chart", m.name()},
           {"start", to_json(s0)},
           {"end", to_json(tr.back())},
           {"t_max", tmax},
           {"termination", to_string(tr.reason)},
           {"samples", tr.samples.size()},
           {"causal_class", to_string(classify(m, s0.pos(), s0.vel()))},
           {"drift", drifts}};
    if (c.csv == "-") {
        if (c.json.empty()) return kPass;  // stdout carries the CSV
    }
    emit(c, j, std::string("geodesic: ") + to_string(tr.reason));
    return kPass;
}

int cmd_check(const std::string& kind, const Common& c, const std::string& other, const std::string& map) {
    const Loaded l = load(c.chart, c);
    const MetricChart& g = l.entry.chart;
    if (kind == "projective") {
        if (other.empty() == map.empty()) throw UsageError("check projective needs exactly one of --other and --map");
        const MetricChart gb = other.empty() ? pullback(g, load_map(map, l, c)) : load(other, c).entry.chart;
        EquivalenceOptions o;
        o.seed = c.seed;
        if (c.samples) o.n_samples = *c.samples;
        if (c.tol) o.drift_tol = *c.tol;
        const EquivalenceReport r = check_projective_equivalence(g, gb, o);
        Json j = to_json(r);
        j["command"] = "check projective";
        emit(c, j, std::string("projective: ") + to_string(r.verdict));
        return r.verdict == Verdict::Equivalent ? kPass : kFail;
    }
    if (map.empty()) throw UsageError("check " + kind + " needs --map");
    const ChartMap phi = load_map(map, l, c);
    const double tol = c.tol.value_or(1e-8);
    const MapCheck r = kind == "isometry" ? check_isometry(g, phi, tol) : check_affinity(g, phi, tol);
    Json j = to_json(r);
    j["command"] = "check " + kind;
    j["chart"] = g.name();
    j["map"] = map;
    j["tol"] = tol;
    emit(c, j, "check " + kind + ": " + (r.pass ? "pass" : "fail"));
    return r.pass ? kPass : kFail;
}

int cmd_verify(const std::string& what, const Common& c) {
    std::mt19937_64 rng(c.seed);
    Json j{{"command", "verify " + what}, {"seed", c.seed}};
    bool pass = false;
    if (what == "band-rescaling") {
        const int n = c.samples.value_or(1000);
        const double tol = c.tol.value_or(1e-10);
        std::uniform_real_distribution<double> u(-2.0, 2.0), mag(0.2, 3.0);
        std::bernoulli_distribution coin(0.5);
        double worst = 0.0;
        for (int i = 0; i < n;) {
            const double a = (coin(rng) ? 1 : -1) * mag(rng), beta = (coin(rng) ? 1 : -1) * mag(rng);
            const double ell = u(rng), z = u(rng), mu = u(rng);
            if (std::fabs(1 + ell * z) < 0.05 || std::fabs(1 + (ell + mu * a) * z) < 0.05) continue;
            worst = std::max(worst, band_rescaling_residual(a, ell, z, mu, beta));
            ++i;
        }
        pass = worst <= tol;
        j.update({{"tuples", n}, {"max_residual", worst}, {"tol", tol}});
    } else if (what == "shift-relation") {
        ZooParams p{c.params};
        PeriodicShiftSpec s;
        s.f = p.field("f", s.f);
        s.a = p.number("a", s.a);
        s.eps = p.number("eps", s.eps);
        const PeriodicShiftResult r = periodic_shift_metric(s);
        const int n = c.samples.value_or(100);
        const double tol = c.tol.value_or(1e-8);
        std::uniform_real_distribution<double> ux(0.0, 1.0);
        std::uniform_int_distribution<int> un(-2, 3);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, shift_relation_residual(r, s, ux(rng), un(rng)));
        pass = worst <= tol;
        j.update({{"points", n}, {"max_residual", worst}, {"tol", tol}, {"chart", r.chart.name()}});
    } else if (what == "tannery-x") {
        const int n = c.samples.value_or(100);
        const double tol = c.tol.value_or(1e-10);
        std::uniform_real_distribution<double> ut(-5.0, 5.0);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = ut(rng);
            const double s2 = std::pow(std::sin(tannery_reparam_x(t)), 2), c2 = std::cosh(t) * std::cosh(t);
            worst = std::max(worst, std::fabs(s2 / (1 - 2 * s2) + c2) / c2);
        }
        pass = worst <= tol;
        j.update({{"points", n}, {"max_residual", worst}, {"tol", tol}});
    } else if (what == "liouville-i0") {
        ZooParams p{c.params};
        const ScalarField h1 = p.field("h1", 2.0 + sin(4 * std::numbers::pi * ScalarField::x()));
        const ScalarField h2 = p.field("h2", 5.0 - sin(4 * std::numbers::pi * ScalarField::y()));
        const int sign = static_cast<int>(p.number("sign", 1));
        const MetricChart m = liouville_metric(h1, h2, sign);
        ConservationOptions o;
        o.seed = c.seed;
        if (c.samples) o.n_samples = *c.samples;
        if (c.tmax) o.t_max = *c.tmax;
        if (c.tol) o.threshold = *c.tol;
        const ConservationReport std_r = check_conservation(m, liouville_integral(h1, h2, sign), o);
        const ConservationReport swp_r =
            check_conservation(m, liouville_integral(h1, h2, sign, LiouvilleVariant::Swapped), o);
        pass = std_r.pass;
        j.update({{"chart", m.name()},
                  {"standard", {{"max_drift", std_r.max_drift}, {"pass", std_r.pass}}},
                  {"swapped", {{"max_drift", swp_r.max_drift}, {"pass", swp_r.pass}}},
                  {"threshold", o.threshold}});
    } else {
        throw UsageError("unknown identity '" + what + "'");
    }
    j["pass"] = pass;
    emit(c, j, "verify " + what + ": " + (pass ? "pass" : "fail"));
    return pass ? kPass : kFail;
}

int cmd_accept(const Common& c) {
    AcceptanceOptions o;
    o.seed = c.seed;
    const AcceptanceSummary s =
        run_acceptance(o, [](const CriterionResult& r) { std::cerr << summary_line(r) << std::endl; });
    Json j = to_json(s);
    j["command"] = "accept";
    emit(c, j, std::string("acceptance: ") + (s.pass ? "PASS" : "FAIL"));
    return s.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projective equivalence and geodesic tools for surface metrics"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    Common c;

    CLI::App* zoo = app.add_subcommand("zoo", "metric catalogue");
    zoo->require_subcommand(1);
    zoo->add_subcommand("list", "list catalogue entries");
    CLI::App* show = zoo->add_subcommand("show", "print a catalogue chart as a chart file");
    std::string show_name;
    show->add_option("name", show_name, "catalogue name")->required();
    add_zoo_flags(show, c);

    CLI::App* geo = app.add_subcommand("geodesic", "integrate one geodesic");
    std::vector<double> init;
    geo->add_option("state", init, "x0 y0 vx0 vy0")->expected(4)->required();
    add_common(geo, c);
    geo->add_option("--csv", c.csv, "write the trace as CSV ('-' for stdout)");

    CLI::App* check = app.add_subcommand("check", "projective, affine or isometry check");
    std::string kind, other, map;
    check->add_option("kind", kind, "projective | affine | isometry")
        ->required()
        ->check(CLI::IsMember({"projective", "affine", "isometry"}));
    check->add_option("--other", other, "second chart");
    check->add_option("--map", map, "named map or 'u; v'");
    add_common(check, c);

    CLI::App* verify = app.add_subcommand("verify", "identity checks");
    std::string what;
    verify->add_option("identity", what, "band-rescaling | shift-relation | tannery-x | liouville-i0")
        ->required()
        ->check(CLI::IsMember({"band-rescaling", "shift-relation", "tannery-x", "liouville-i0"}));
    add_common(verify, c, false);

    CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
    accept->add_option("--seed", c.seed, "random seed")->envname("GEOPROJ_SEED");
    accept->add_option("--json", c.json, "write the JSON summary here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (zoo->parsed()) {
            if (zoo->got_subcommand("list")) return cmd_zoo_list();
            return cmd_zoo_show(show_name, c);
        }
        if (geo->parsed()) return cmd_geodesic(c, init);
        if (check->parsed()) return cmd_check(kind, c, other, map);
        if (verify->parsed()) return cmd_verify(what, c);
        if (accept->parsed()) return cmd_accept(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConstructionError& e) {
        std::cerr << "construction error: " << e.what() << '\n';
        return kUsage;
    } catch (const ChartFormatError& e) {
        std::cerr << "chart file error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
