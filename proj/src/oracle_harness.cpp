#include "ptess/oracle_harness.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "ptess/hull_geometry.hpp"
#include "ptess/numerics.hpp"
#include "ptess/typical_cells.hpp"

#ifndef PTESS_KERNEL_HASH
#define PTESS_KERNEL_HASH "unversioned"
#endif

namespace ptess {

using nlohmann::json;

namespace {

json compute_actual(const OracleCase& c) {
    const json& in = c.inputs;
    if (c.family == "delaunay_cells") {
        const int d = in.at("d").get<int>();
        std::vector<WeightedPoint> pts;
        for (const auto& row : in.at("points")) {
            auto xs = row.get<std::vector<double>>();
            if (int(xs.size()) != d) throw ParameterError("point of wrong dimension in " + c.id);
            const double h = xs.back();
            xs.pop_back();
            pts.push_back({xs, h});
        }
        std::vector<std::vector<int>> cells;
        for (const auto& cell : delaunay_cells(pts)) cells.push_back(cell.vertex_indices);
        std::sort(cells.begin(), cells.end());
        return cells;
    }
    if (c.family == "alpha_hat") return alpha_hat(in.at("d").get<int>(), in.at("nu").get<double>());
    if (c.family == "volume_moment")
        return volume_moment({in.at("d").get<int>(), in.at("nu").get<double>(), in.at("s").get<double>()});
    if (c.family == "importance_moment") {
        const Estimate e = importance_moment({in.at("d").get<int>(), in.at("nu").get<double>(), in.at("s").get<double>()},
                                             in.at("n").get<std::size_t>(), in.at("seed").get<std::uint64_t>());
        return {{"value", e.value}, {"std_error", e.std_error}};
    }
    if (c.family == "face_intensities") return face_intensities_closed_form(in.at("d").get<int>());
    if (c.family == "regular_angle_sums") return regular_simplex_angle_sums(in.at("d").get<int>());
    throw ParameterError("unknown oracle family '" + c.family + "'");
}

bool close(double actual, double expected, const OracleCase& c, std::string& why) {
    double allowed = 0.0;
    double want = expected;
    if (c.tolerance_kind == "rel") {
        allowed = c.tolerance * std::max(std::abs(expected), 1e-300);
    } else if (c.tolerance_kind == "abs") {
        allowed = c.tolerance;
    } else if (c.tolerance_kind != "exact") {
        throw ParameterError("tolerance kind '" + c.tolerance_kind + "' needs a scalar expectation");
    }
    if (std::abs(actual - want) <= allowed) return true;
    std::ostringstream os;
    os << std::setprecision(17) << "got " << actual << ", expected " << want << " (allowed deviation " << allowed
       << ")";
    why = os.str();
    return false;
}

bool compare(const json& actual, const OracleCase& c, std::string& why) {
    const json& e = c.expected;
    if (c.tolerance_kind == "se") {
        // Both sides may be estimates; their standard errors combine.
        const double value = e.at("value").get<double>();
        const double got = actual.is_object() ? actual.at("value").get<double>() : actual.get<double>();
        const double se = std::hypot(e.at("std_error").get<double>(),
                                     actual.is_object() ? actual.at("std_error").get<double>() : 0.0);
        const double dev = std::abs(got - value);
        if (dev <= c.tolerance * se) return true;
        std::ostringstream os;
        os << std::setprecision(17) << "got " << got << ", reference " << value << " +- " << se
           << " (" << dev / se << " s.e.)";
        why = os.str();
        return false;
    }
    if (e.is_number()) return close(actual.get<double>(), e.get<double>(), c, why);
    if (e.is_array() && !e.empty() && e.front().is_number()) {
        if (!actual.is_array() || actual.size() != e.size()) {
            why = "length mismatch: got " + actual.dump() + ", expected " + e.dump();
            return false;
        }
        for (std::size_t i = 0; i < e.size(); ++i)
            if (!close(actual[i].get<double>(), e[i].get<double>(), c, why)) {
                why = "entry " + std::to_string(i) + ": " + why;
                return false;
            }
        return true;
    }
    if (actual == e) return true;
    why = "got " + actual.dump() + ", expected " + e.dump();
    return false;
}

std::string cache_key(const OracleCase& c) {
    const json key{{"id", c.id},           {"family", c.family},       {"inputs", c.inputs},
                   {"expected", c.expected}, {"tol", c.tolerance},     {"kind", c.tolerance_kind},
                   {"kernel", kernel_fingerprint()}};
    std::ostringstream os;
    os << std::hex << std::hash<std::string>{}(key.dump());
    return os.str();
}

}  // namespace

std::vector<OracleCase> parse_oracle_cases(const json& doc) {
    std::vector<OracleCase> out;
    for (const auto& j : doc.at("cases")) {
        OracleCase c;
        c.id = j.at("id").get<std::string>();
        c.family = j.at("family").get<std::string>();
        c.provenance = j.value("provenance", "");
        c.oracle = j.value("oracle", "");
        c.inputs = j.at("inputs");
        c.expected = j.at("expected");
        if (j.contains("tolerance")) {
            c.tolerance_kind = j["tolerance"].value("kind", "exact");
            c.tolerance = j["tolerance"].value("value", 0.0);
        }
        if (c.provenance != "REFERENCE" && c.provenance != "TRIVIAL" && c.provenance != "DERIVED")
            throw ParameterError("case " + c.id + ": provenance must be REFERENCE, TRIVIAL or DERIVED");
        if (c.provenance == "DERIVED" && c.oracle.empty())
            throw ParameterError("case " + c.id + ": DERIVED case without an oracle description");
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<OracleCase> load_oracle_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read oracle cases from '" + path + "'");
    return parse_oracle_cases(json::parse(in));
}

std::string kernel_fingerprint() { return PTESS_KERNEL_HASH; }

OracleResult evaluate_oracle_case(const OracleCase& c) {
    OracleResult r;
    r.id = c.id;
    r.family = c.family;
    r.provenance = c.provenance;
    const auto start = std::chrono::steady_clock::now();
    try {
        r.actual = compute_actual(c);
        r.passed = compare(r.actual, c, r.message);
    } catch (const std::exception& e) {
        r.passed = false;
        r.message = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

OracleReport run_oracles(const std::vector<OracleCase>& cases, const OracleOptions& options) {
    OracleReport report;
    if (cases.empty()) report.warnings.push_back("empty case list: nothing was checked");

    json cache = json::object();
    if (!options.cache_path.empty()) {
        std::ifstream in(options.cache_path);
        if (in) {
            try {
                cache = json::parse(in);
            } catch (const json::exception&) {
                report.warnings.push_back("unreadable cache ignored: " + options.cache_path);
            }
        }
        if (cache.value("kernel", "") != kernel_fingerprint()) cache = {{"kernel", kernel_fingerprint()}, {"entries", json::object()}};
    }

    for (const auto& c : cases) {
        const std::string key = options.cache_path.empty() ? "" : cache_key(c);
        OracleResult r;
        if (!key.empty() && cache["entries"].contains(key)) {
            const json& e = cache["entries"][key];
            r.id = c.id;
            r.family = c.family;
            r.provenance = c.provenance;
            r.passed = e.at("passed").get<bool>();
            r.message = e.at("message").get<std::string>();
            r.actual = e.at("actual");
            r.cached = true;
        } else {
            r = evaluate_oracle_case(c);
            if (!key.empty())
                cache["entries"][key] = {{"passed", r.passed}, {"message", r.message}, {"actual", r.actual}};
        }
        (r.passed ? report.passed : report.failed)++;
        report.cached += r.cached;
        report.results.push_back(std::move(r));
    }

    if (!options.cache_path.empty()) {
        std::ofstream out(options.cache_path);
        if (out) out << cache.dump() << "\n";
        else report.warnings.push_back("could not write cache: " + options.cache_path);
    }
    return report;
}

std::string junit_xml(const OracleReport& report, const std::string& suite) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    pt::ptree& ts = root.add("testsuite", "");
    ts.put("<xmlattr>.name", suite);
    ts.put("<xmlattr>.tests", report.results.size());
    ts.put("<xmlattr>.failures", report.failed);
    ts.put("<xmlattr>.errors", 0);
    double total = 0;
    for (const auto& r : report.results) total += r.seconds;
    ts.put("<xmlattr>.time", total);
    for (const auto& w : report.warnings) ts.add("system-err", "warning: " + w);
    for (const auto& r : report.results) {
        pt::ptree& tc = ts.add("testcase", "");
        tc.put("<xmlattr>.name", r.id);
        tc.put("<xmlattr>.classname", r.family);
        tc.put("<xmlattr>.time", r.seconds);
        pt::ptree& prop = tc.add("properties.property", "");
        prop.put("<xmlattr>.name", "provenance");
        prop.put("<xmlattr>.value", r.provenance);
        if (r.cached) {
            pt::ptree& cp = tc.add("properties.property", "");
            cp.put("<xmlattr>.name", "cached");
            cp.put("<xmlattr>.value", "true");
        }
        if (!r.passed) {
            pt::ptree& f = tc.add("failure", r.message);
            f.put("<xmlattr>.message", r.message);
        }
    }
    std::ostringstream os;
    pt::write_xml(os, root, pt::xml_writer_make_settings<std::string>(' ', 2));
    return os.str();
}

std::string oracle_summary(const OracleReport& report) {
    std::ostringstream os;
    for (const auto& w : report.warnings) os << "WARNING: " << w << "\n";
    for (const auto& r : report.results)
        if (!r.passed) os << "FAIL " << r.id << " [" << r.family << "]: " << r.message << "\n";
    os << (report.green() ? "GREEN" : "RED") << ": " << report.passed << " passed, " << report.failed << " failed, "
       << report.results.size() << " cases";
    if (report.cached) os << " (" << report.cached << " from cache)";
    os << "\n";
    return os.str();
}

}  // namespace ptess
