#pragma once
// Replays frozen oracle cases (tests/oracles/cases.json, regenerated by
// tools/oracles/make_cases.py) against the library.

#include <json.hpp>

#include <string>
#include <vector>

namespace ptess {

struct OracleCase {
    std::string id;
    std::string family;      // delaunay_cells, alpha_hat, volume_moment, importance_moment, face_intensities, regular_angle_sums
    std::string provenance;  // REFERENCE, TRIVIAL or DERIVED
    std::string oracle;      // how the expected value was obtained
    nlohmann::json inputs;
    nlohmann::json expected;
    std::string tolerance_kind = "exact";  // exact, rel, abs, se (multiples of the combined standard error)
    double tolerance = 0.0;
};

struct OracleResult {
    std::string id;
    std::string family;
    std::string provenance;
    bool passed = false;
    bool cached = false;
    std::string message;
    nlohmann::json actual;
    double seconds = 0.0;
};

struct OracleReport {
    std::vector<OracleResult> results;
    std::vector<std::string> warnings;
    std::size_t passed = 0, failed = 0, cached = 0;
    bool green() const { return failed == 0; }
};

struct OracleOptions {
    std::string cache_path;  // empty: no cache
};

std::vector<OracleCase> parse_oracle_cases(const nlohmann::json& doc);
std::vector<OracleCase> load_oracle_cases(const std::string& path);

// Identifies the library sources the cache entries were computed with.
std::string kernel_fingerprint();

OracleResult evaluate_oracle_case(const OracleCase& c);
OracleReport run_oracles(const std::vector<OracleCase>& cases, const OracleOptions& options = {});

std::string junit_xml(const OracleReport& report, const std::string& suite = "ptess-oracles");
std::string oracle_summary(const OracleReport& report);

}  // namespace ptess
