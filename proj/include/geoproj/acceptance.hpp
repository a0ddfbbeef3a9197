// The acceptance suite: ten numbered criteria, each a list of named checks.
// Negative controls are checks whose intended outcome is a failure; they
// pass when the failure is observed.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoproj/io.hpp"

namespace geoproj {

struct AcceptanceCheck {
    std::string name;
    bool pass = false;
    bool expected_fail = false;  // negative control
    Json data = Json::object();
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<AcceptanceCheck> checks;
    double seconds = 0.0;  // wall time; kept out of the JSON
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
};

struct AcceptanceSummary {
    bool pass = false;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;
};

constexpr int kCriterionCount = 10;

// Throws std::out_of_range for ids outside 1..kCriterionCount.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

// Runs every criterion in order, then the whole-suite runtime check.
AcceptanceSummary run_acceptance(const AcceptanceOptions& opts = {},
                                 const std::function<void(const CriterionResult&)>& on_done = {});

// One line: "criterion N: PASS|FAIL  title  (k/n checks, t s)".
std::string summary_line(const CriterionResult& r);

// Deterministic at fixed seed: timings are omitted.
Json to_json(const CriterionResult& r);
Json to_json(const AcceptanceSummary& s);

}  // namespace geoproj
