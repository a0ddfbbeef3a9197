#include <doctest.h>

#include <cmath>
#include <sstream>

#include "geoproj/acceptance.hpp"

using namespace geoproj;

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("every catalogue chart survives a text round trip") {
    for (const auto& it : catalogue()) {
        const MetricChart m = make_zoo(it.name).chart;
        const std::string text = serialize_chart(m);
        const MetricChart back = parse_chart(text);
        CHECK(serialize_chart(back) == text);
        CHECK(back.name() == m.name());
        CHECK(back.signature() == m.signature());
        CHECK(back.domain().positive.size() == m.domain().positive.size());
        CHECK(back.options().period_x == m.options().period_x);
        CHECK(back.options().period_y == m.options().period_y);
        for (const auto& p : sample_grid(m, 6)) {
            const Sym2 a = m.matrix(p), b = back.matrix(p);
            CHECK(a.xx == b.xx);
            CHECK(a.xy == b.xy);
            CHECK(a.yy == b.yy);
        }
    }
}

TEST_CASE("chart files") {
    const std::string text =
        "# hyperbolic half-plane\n"
        "name: half-plane\n"
        "signature: riemannian\n"
        "g11: (/ 1 (^ y 2))\n"
        "g12: 0\n"
        "g22: (/ 1 (^ y 2))\n"
        "y-min: 0\n"
        "sample-box: -1 1 0.5 2\n";
    const MetricChart m = parse_chart(text);
    CHECK(m.name() == "half-plane");
    CHECK(gaussian_curvature(m, {0.2, 1.3}) == doctest::Approx(-1.0));
    CHECK_FALSE(m.contains({0, -1}));
    CHECK(m.sample_box().ymin == 0.5);
}

TEST_CASE("chart file errors name the line") {
    const auto error_of = [](const std::string& t) {
        try {
            parse_chart(t);
        } catch (const ChartFormatError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const std::string head = "name: n\nsignature: riemannian\n";
    CHECK(error_of(head + "g11: 1\ng12: 0\n").find("g22") != std::string::npos);
    CHECK(error_of(head + "g11: (sin x\n").find("line 3") != std::string::npos);
    CHECK(error_of(head + "colour: blue\n").find("unknown key") != std::string::npos);
    CHECK(error_of(head + "g11: 1\ng11: 2\n").find("duplicate") != std::string::npos);
    CHECK(error_of("name: n\nsignature: other\n").find("line 2") != std::string::npos);
    CHECK(error_of(head + "g11: 1\ng12: 0\ng22: 1\nperiod-x: -1\n").find("period") != std::string::npos);
    CHECK(error_of(head + "g11: 1\ng12: 0\ng22: 1\nsample-box: 0 1 0\n").find("sample-box") != std::string::npos);
    CHECK_THROWS_AS(load_chart("/nonexistent/chart.txt"), ChartFormatError);
}

TEST_CASE("trace CSV columns") {
    const ZooEntry e = make_zoo("sphere");
    const GeodesicTrace tr = integrate_geodesic(e.chart, {0, 1.0, 0.0, 0.0, 1.0}, 1.0);
    std::ostringstream os;
    write_trace_csv(os, e.chart, tr, {e.integrals[1]});
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "t,x,y,vx,vy,energy,clairaut");
    std::getline(in, row);
    CHECK(row == "0,1,0,0,1," + format_number(std::pow(std::sin(1.0), 2)) + "," +
                     format_number(std::pow(std::sin(1.0), 2)));
    int rows = 1;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == static_cast<int>(tr.samples.size()));
}

TEST_CASE("JSON output is deterministic and keeps non-finite values") {
    Json j{{"b", 1.5}, {"a", std::numeric_limits<double>::infinity()}, {"c", {1, 2}}};
    const std::string s = dump_json(j);
    CHECK(s.find("\"a\": \"inf\"") != std::string::npos);
    CHECK(s.find("\"a\"") < s.find("\"b\""));
    CHECK(s.back() == '\n');

    const MetricChart g = make_zoo("band", {{{"a", "1"}, {"l", "0"}}}).chart;
    const MetricChart h = make_zoo("band").chart;
    CHECK(dump_json(to_json(check_projective_equivalence(g, h))) == dump_json(to_json(check_projective_equivalence(g, h))));
}

TEST_CASE("acceptance criterion reports carry no timing") {
    const CriterionResult r = run_criterion(5);
    CHECK(r.pass);
    const std::string s = dump_json(to_json(r));
    CHECK(s.find("seconds") == std::string::npos);
    CHECK(summary_line(r).rfind("criterion 5: PASS", 0) == 0);
    CHECK_THROWS_AS(run_criterion(11), std::out_of_range);
}
