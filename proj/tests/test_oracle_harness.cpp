#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <sstream>

#include "ptess/numerics.hpp"
#include "ptess/oracle_harness.hpp"

using namespace ptess;
using nlohmann::json;

namespace {

std::vector<OracleCase> shipped_cases() { return load_oracle_cases(PTESS_ORACLE_CASES); }

const OracleCase& find_case(const std::vector<OracleCase>& cases, const std::string& family) {
    for (const auto& c : cases)
        if (c.family == family) return c;
    FAIL("no case of family " << family);
    return cases.front();
}

boost::property_tree::ptree parse_xml(const std::string& text) {
    boost::property_tree::ptree t;
    std::istringstream in(text);
    boost::property_tree::read_xml(in, t);
    return t;
}

}  // namespace

TEST_CASE("shipped oracle cases cover every family and all pass") {
    const auto cases = shipped_cases();
    std::size_t delaunay = 0;
    for (const auto& c : cases) delaunay += c.family == "delaunay_cells";
    CHECK(delaunay >= 60);
    for (const char* f : {"alpha_hat", "volume_moment", "importance_moment", "face_intensities", "regular_angle_sums"})
        CHECK(find_case(cases, f).id.size() > 0);

    const OracleReport report = run_oracles(cases);
    CHECK(report.green());
    CHECK(report.passed == cases.size());
    CHECK(report.warnings.empty());
    const auto xml = parse_xml(junit_xml(report));
    CHECK(xml.get<std::size_t>("testsuite.<xmlattr>.tests") == cases.size());
    CHECK(xml.get<std::size_t>("testsuite.<xmlattr>.failures") == 0);
    CHECK(oracle_summary(report).find("GREEN") != std::string::npos);
}

TEST_CASE("corrupted expectations turn the report red") {
    const auto cases = shipped_cases();
    std::vector<OracleCase> bad;

    OracleCase moment = find_case(cases, "alpha_hat");
    moment.expected = moment.expected.get<double>() * (1 + 1e-4);
    bad.push_back(moment);

    OracleCase tri = find_case(cases, "delaunay_cells");
    tri.expected.erase(tri.expected.begin());
    bad.push_back(tri);

    OracleCase mc = find_case(cases, "volume_moment");
    for (const auto& c : cases)
        if (c.tolerance_kind == "se") {
            mc = c;
            break;
        }
    mc.expected["value"] = mc.expected["value"].get<double>() + 10 * mc.expected["std_error"].get<double>();
    bad.push_back(mc);

    OracleCase unknown = moment;
    unknown.family = "no_such_family";
    bad.push_back(unknown);

    const OracleReport report = run_oracles(bad);
    CHECK_FALSE(report.green());
    CHECK(report.failed == bad.size());
    for (const auto& r : report.results) CHECK(!r.message.empty());
    CHECK(report.results[3].message.find("unknown oracle family") != std::string::npos);

    const auto xml = parse_xml(junit_xml(report));
    CHECK(xml.get<std::size_t>("testsuite.<xmlattr>.failures") == bad.size());
    std::size_t failures = 0;
    for (const auto& tc : xml.get_child("testsuite"))
        if (tc.first == "testcase") failures += tc.second.count("failure");
    CHECK(failures == bad.size());
    CHECK(oracle_summary(report).find("RED") != std::string::npos);
}

TEST_CASE("empty case list is green with a warning") {
    const OracleReport report = run_oracles({});
    CHECK(report.green());
    REQUIRE(report.warnings.size() == 1);
    CHECK(oracle_summary(report).find("WARNING") != std::string::npos);
    CHECK(parse_xml(junit_xml(report)).count("testsuite") == 1);
}

TEST_CASE("cache reuses results and keys on the case content") {
    const auto path = std::filesystem::temp_directory_path() / ("ptess_oracle_cache_" + std::to_string(::getpid()));
    std::filesystem::remove(path);
    auto cases = shipped_cases();
    cases.resize(6);

    const auto first = run_oracles(cases, {path.string()});
    CHECK(first.cached == 0);
    const auto second = run_oracles(cases, {path.string()});
    CHECK(second.cached == cases.size());
    CHECK(second.green());

    // Changing a case (here: corrupting it) misses the cache.
    cases[0].expected = 123.0;
    const auto third = run_oracles(cases, {path.string()});
    CHECK(third.cached == cases.size() - 1);
    CHECK(third.failed == 1);

    // A cache written by other library sources is discarded.
    json stale{{"kernel", "other"}, {"entries", json::object()}};
    std::ofstream(path) << stale.dump();
    CHECK(run_oracles(cases, {path.string()}).cached == 0);
    std::filesystem::remove(path);
    CHECK(!kernel_fingerprint().empty());
}

TEST_CASE("case files are validated") {
    CHECK_THROWS_AS(parse_oracle_cases(json::parse(R"({"cases":[{"id":"x","family":"alpha_hat","provenance":"GUESS",
        "inputs":{"d":2,"nu":0},"expected":1}]})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_oracle_cases(json::parse(R"({"cases":[{"id":"x","family":"alpha_hat","provenance":"DERIVED",
        "inputs":{"d":2,"nu":0},"expected":1}]})")),
                    ParameterError);
    CHECK_THROWS(load_oracle_cases("/nonexistent/cases.json"));
}
