#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("ptess_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = "cd '" + scratch().string() + "' && '" PTESS_CLI_PATH "' " + args + " 2>'" + err.string() + "'";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> row;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                row.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
}

}  // namespace

TEST_CASE("cmd_simulate writes identical JSON on repeat and a well-formed SVG") {
    const std::string args = "simulate --model gaussian --d 3 --R 4 --eps 0.05 --seed 7 --svg out.svg --json ";
    const Run a = run(args + "a.json");
    const Run b = run(args + "b.json");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const std::string ja = slurp(scratch() / "a.json");
    CHECK(!ja.empty());
    CHECK(ja == slurp(scratch() / "b.json"));

    const auto doc = nlohmann::json::parse(ja);
    CHECK(doc["format"] == "ptess-tessellation");
    CHECK(doc["window"]["R"] == 4.0);
    CHECK(!doc["cells"].empty());

    boost::property_tree::ptree tree;
    std::ifstream svg(scratch() / "out.svg");
    REQUIRE_NOTHROW(boost::property_tree::read_xml(svg, tree));
    const auto& root = tree.get_child("svg");
    CHECK(root.get<std::string>("<xmlattr>.version") == "1.1");
    std::size_t lines = 0;
    for (const auto& g : root)
        if (g.first == "g")
            for (const auto& el : g.second) lines += el.first == "line";
    CHECK(lines > 10);
}

TEST_CASE("cmd_simulate accepts beta > -1 and reports bad parameters as JSON") {
    CHECK(run("simulate --model beta --beta 0.5 --d 3 --R 2 --seed 1").code == 0);

    const Run bad = run("simulate --model beta --beta -1.5 --d 3");
    CHECK(bad.code == 2);
    const auto err = nlohmann::json::parse(bad.err);
    CHECK(err["error"]["type"] == "ParameterError");
    CHECK(err["error"]["command"] == "simulate");

    const Run usage = run("simulate --no-such-flag");
    CHECK(usage.code == 2);
    CHECK(nlohmann::json::parse(usage.err)["error"]["type"] == "UsageError");

    const Run io = run("simulate --d 2 --R 1 --json /nonexistent-dir/x.json");
    CHECK(io.code != 0);
    CHECK(nlohmann::json::parse(io.err)["error"]["type"] == "IoError");
}

TEST_CASE("cmd_moments table: fixed columns, exact s=0 rows, z-scores within 3") {
    const Run r = run("moments --d-list 2,3 --nu-list -1,0,1 --s-list 0,1,2 --n 200000 --seed 11");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1 + 2 * 3 * 3);
    CHECK(rows[0] == std::vector<std::string>{"d", "nu", "s", "closed_form", "mc_estimate", "stderr", "z_score", "n",
                                              "seed"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row[2] == "0") CHECK(row[3] == "1");
        if (row[0] == "2" && row[1] == "-1" && row[2] == "2") CHECK(std::stod(row[3]) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::abs(std::stod(row[6])) <= 3.0);
    }
}

TEST_CASE("cmd_converge: single beta is monotone; test set beyond the margin fails") {
    const Run r = run("converge --kinds beta --betas 16 --reps 10 --R 1 --eps 0.1 --compact ball:0:0.2");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][column(rows[0], "compact")] == "ball:0:0.2");
    CHECK(rows[1][column(rows[0], "pairs")] == "10");
    CHECK(nlohmann::json::parse(r.err)["monotone"] == true);

    const Run bad = run("converge --kinds beta --betas 16 --reps 10 --R 1 --compact ball:0.9:0.2");
    CHECK(bad.code == 2);
    CHECK(nlohmann::json::parse(bad.err)["error"]["message"].get<std::string>().find("undecidable margin") !=
          std::string::npos);
}

TEST_CASE("cmd_bounds: case-split rows and empirical frequency under the bound") {
    const Run low = run("bounds --bounds sup_beta --d 2 --A 1 --level 3 --beta 5 --beta0 2 --seeds 50");
    REQUIRE(low.code == 0);
    auto rows = csv_rows(low.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][column(rows[0], "bound_value")] == "1");

    const Run high = run("bounds --bounds sup_beta_prime --d 2 --A 1 --level 24 --beta 10 --seeds 50");
    REQUIRE(high.code == 0);
    rows = csv_rows(high.out);
    CHECK(rows[1][column(rows[0], "bound_value")] == "0");
    CHECK(rows[1][column(rows[0], "empirical")] == "0");

    const Run grid = run("bounds --bounds inf_gaussian --seeds 100 --seed 5");
    REQUIRE(grid.code == 0);
    rows = csv_rows(grid.out);
    CHECK(rows.size() == 21);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][column(rows[0], "within_3se")] == "true");
}

TEST_CASE("config file supplies defaults, flags win, manifest records the resolution") {
    {
        std::ofstream cfg(scratch() / "exp.toml");
        cfg << "[moments]\nd-list = [2]\nnu-list = [0]\ns-list = [1]\nn = 1000\nseed = 3\n";
    }
    const Run r = run("--config exp.toml moments --seed 9 --manifest m.json");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][column(rows[0], "n")] == "1000");
    CHECK(rows[1][column(rows[0], "seed")] == "9");

    const auto m = nlohmann::json::parse(slurp(scratch() / "m.json"));
    CHECK(m["command"] == "moments");
    CHECK(m["options"]["seed"] == "9");
    CHECK(m["options"]["n"] == "1000");
    CHECK(m.contains("version"));
}
