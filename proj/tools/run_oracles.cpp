// Runs the frozen oracle cases and writes a JUnit XML report plus a summary.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ptess/oracle_harness.hpp"

#ifndef PTESS_ORACLE_CASES
#define PTESS_ORACLE_CASES "tests/oracles/cases.json"
#endif

int main(int argc, char** argv) {
    CLI::App app{"Replay oracle cases against the library", "ptess_oracles"};
    std::string cases_path = PTESS_ORACLE_CASES, junit_path, summary_path, cache_path;
    app.add_option("--cases", cases_path, "Oracle case file (JSON)")->capture_default_str();
    app.add_option("--junit", junit_path, "JUnit XML report");
    app.add_option("--summary", summary_path, "Plain-text summary (always printed to stdout)");
    app.add_option("--cache", cache_path, "Result cache keyed by case and library fingerprint");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto report = ptess::run_oracles(ptess::load_oracle_cases(cases_path), {cache_path});
        const std::string summary = ptess::oracle_summary(report);
        std::cout << summary;
        if (!summary_path.empty()) std::ofstream(summary_path) << summary;
        if (!junit_path.empty()) {
            std::ofstream out(junit_path);
            out << ptess::junit_xml(report);
            if (!out) throw std::runtime_error("cannot write " + junit_path);
        }
        return report.green() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
