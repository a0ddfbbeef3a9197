// Chart description files, trace CSV output and JSON reports.
//
// Chart files are line based, one "key: value" pair per line:
//
//   # comment
//   name: clifton-pohl
//   signature: lorentzian            (or riemannian)
//   g11: 0
//   g12: (/ 1 (+ (^ x 2) (^ y 2)))
//   g22: 0
//   x-min: -inf                      (x-max, y-min, y-max likewise; default +-inf)
//   constraint: (- (+ (^ x 2) (^ y 2)) 1e-12)    (repeatable; the domain needs > 0)
//   period-x: 1                      (optional; period-y likewise)
//   sample-box: -2 2 -2 2            (optional; xmin xmax ymin ymax)
//
// Coefficients use the prefix syntax of parse_field(). The grammar is in
// docs/chart-format.md.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoproj/projective.hpp"
#include "geoproj/zoo.hpp"

namespace geoproj {

using Json = nlohmann::json;

class ChartFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_chart(const MetricChart& m);
// Throws ChartFormatError (with a line number) on malformed input and
// ConstructionError on a bad coefficient expression.
MetricChart parse_chart(const std::string& text);
MetricChart load_chart(const std::string& path);

// Columns t, x, y, vx, vy, energy, then one column per integral in order.
void write_trace_csv(std::ostream& os, const MetricChart& m, const GeodesicTrace& trace,
                     const std::vector<FiberIntegral>& integrals);

// Shortest decimal text that reads back to the same double; "inf", "-inf", "nan".
std::string format_number(double v);

Json to_json(const GeodesicState& s);
Json to_json(const ConservationReport& r);
Json to_json(const EquivalenceReport& r);
Json to_json(const MapCheck& r);
Json to_json(const LiouvilleIsometryResult& r);
Json to_json(const SeamReport& r);

// Pretty-printed, key-sorted and newline terminated. Non-finite numbers are
// written as strings so that no value is lost.
std::string dump_json(const Json& j);

}  // namespace geoproj
