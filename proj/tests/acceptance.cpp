// Runs the acceptance suite and prints one PASS/FAIL line per criterion,
// followed by the individual checks of any failing criterion.
// Usage: acceptance [--seed N] [--json PATH] [criterion ids...]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "geoproj/acceptance.hpp"

int main(int argc, char** argv) {
    using namespace geoproj;
    AcceptanceOptions opts;
    std::string json_path;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc) {
            opts.seed = std::stoull(argv[++i]);
        } else if (a == "--json" && i + 1 < argc) {
            json_path = argv[++i];
        } else {
            ids.push_back(std::stoi(a));
        }
    }

    const auto print = [](const CriterionResult& r) {
        std::printf("%s\n", summary_line(r).c_str());
        for (const auto& c : r.checks) {
            if (c.pass && r.pass) continue;
            std::printf("    %s %s%s  %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(),
                        c.expected_fail ? " [negative control]" : "", c.data.dump().c_str());
        }
        std::fflush(stdout);
    };

    bool pass = true;
    Json out;
    if (ids.empty()) {
        const AcceptanceSummary s = run_acceptance(opts, print);
        std::printf("acceptance: %s (%.1f s, seed %llu)\n", s.pass ? "PASS" : "FAIL", s.seconds,
                    static_cast<unsigned long long>(s.seed));
        pass = s.pass;
        out = to_json(s);
    } else {
        out = Json::array();
        for (int id : ids) {
            const CriterionResult r = run_criterion(id, opts);
            print(r);
            pass = pass && r.pass;
            out.push_back(to_json(r));
        }
    }
    if (!json_path.empty()) std::ofstream(json_path) << dump_json(out);
    return pass ? 0 : 1;
}
