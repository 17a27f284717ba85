// Command-line driver: simulate, moments, converge, bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ptess/convergence_lab.hpp"
#include "ptess/typical_cells.hpp"

#ifndef PTESS_VERSION
#define PTESS_VERSION "0.0.0"
#endif

using namespace ptess;
using nlohmann::json;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

ModelKind parse_kind(const std::string& s) {
    if (s == "gaussian") return ModelKind::Gaussian;
    if (s == "beta") return ModelKind::Beta;
    if (s == "betaprime" || s == "beta_prime") return ModelKind::BetaPrime;
    throw ParameterError("unknown model '" + s + "' (gaussian, beta, betaprime)");
}

Vec parse_vec(const std::string& s) {
    Vec v;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) throw ParameterError("bad coordinate '" + part + "'");
        v.push_back(x);
    }
    return v;
}

// ball:X[,Y]:R | segment:A:B, alternatives joined by '|' form a union.
CompactTestSet parse_compact(const std::string& s) {
    if (s == "empty") return CompactTestSet::empty();
    if (s.find('|') != std::string::npos) {
        std::vector<CompactTestSet> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, '|')) parts.push_back(parse_compact(item));
        return CompactTestSet::finite_union(std::move(parts));
    }
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) f.push_back(item);
    if (f.size() == 3 && f[0] == "ball") {
        const Vec r = parse_vec(f[2]);
        if (r.size() != 1) throw ParameterError("bad ball radius in '" + s + "'");
        return CompactTestSet::ball(parse_vec(f[1]), r[0]);
    }
    if (f.size() == 3 && f[0] == "segment") return CompactTestSet::segment(parse_vec(f[1]), parse_vec(f[2]));
    throw ParameterError("bad test set '" + s + "' (ball:X[,Y]:R, segment:A:B, a|b, empty)");
}

std::vector<std::string> default_compacts(int d) {
    if (d == 2) return {"ball:0:0.3", "segment:0.5:0.9", "ball:-1.2:0.1|ball:1.5:0.1"};
    return {"ball:0,0:0.3", "segment:0.5,0:0.9,0.3", "ball:-1.2,0:0.1|ball:0,1.4:0.1"};
}

json manifest_of(const CLI::App& app, const CLI::App& sub) {
    json opts = json::object();
    for (const CLI::Option* o : sub.get_options()) {
        const std::string name = o->get_single_name();
        if (name.empty() || name == "help") continue;
        const auto& res = o->results();
        if (o->get_expected_min() == 0) {
            opts[name] = o->count() > 0;
        } else if (res.empty()) {
            opts[name] = o->get_default_str();
        } else if (res.size() == 1) {
            opts[name] = res[0];
        } else {
            opts[name] = res;
        }
    }
    return {{"tool", "ptess"}, {"version", PTESS_VERSION}, {"command", sub.get_name()}, {"options", opts},
            {"threads", resolve_threads(0)}, {"program", app.get_name()}};
}

void write_error(const std::string& kind, const std::string& message, const std::string& command) {
    const json err{{"error", {{"type", kind}, {"message", message}, {"command", command}}}};
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random tessellations: simulation, typical-cell moments, convergence and bound experiments", "ptess"};
    app.set_version_flag("--version", std::string(PTESS_VERSION));
    app.set_config("--config", "", "TOML configuration file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();
    std::string manifest_path;
    int threads = 0;
    app.add_option("--manifest", manifest_path, "Write the resolved configuration as JSON");
    app.add_option("--threads", threads, "Worker threads (default: PTESS_THREADS or all cores)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a tessellation in B_R and export JSON / SVG");
    std::string model_name = "gaussian", json_path, svg_path;
    int d = 3;
    double beta = 1.0, gamma = 1.0, R = 4.0, eps = 0.1, margin = -1.0;
    bool rescaled = false;
    std::uint64_t seed = 1, substream = 0;
    sim->add_option("--model", model_name, "gaussian | beta | betaprime")->capture_default_str();
    sim->add_option("--d", d, "Dimension d (space R^{d-1})")->capture_default_str();
    sim->add_option("--beta", beta, "Shape parameter")->capture_default_str();
    sim->add_option("--gamma", gamma, "Intensity parameter")->capture_default_str();
    sim->add_flag("--rescaled", rescaled, "Use the rescaled Beta / BetaPrime process");
    sim->add_option("--R", R, "Window radius")->capture_default_str();
    sim->add_option("--eps", eps, "Failure budget")->capture_default_str();
    sim->add_option("--seed", seed, "Seed")->capture_default_str();
    sim->add_option("--substream", substream, "Substream")->capture_default_str();
    sim->add_option("--margin", margin, "Spatial margin override (negative: from the stabilization bound)")
        ->capture_default_str();
    sim->add_option("--json", json_path, "Tessellation JSON output (default stdout)");
    sim->add_option("--svg", svg_path, "SVG skeleton output (d = 3)");

    // moments
    auto* mom = app.add_subcommand("moments", "Closed-form volume moments against importance Monte Carlo");
    std::vector<int> d_list{2, 3, 4};
    std::vector<double> nu_list{-1, 0, 1, 2}, s_list{0, 1, 2, 3};
    std::size_t n_samples = 1000000;
    std::uint64_t mom_seed = 1;
    std::string mom_out;
    mom->add_option("--d-list", d_list, "Dimensions")->delimiter(',')->capture_default_str();
    mom->add_option("--nu-list", nu_list, "Weight exponents")->delimiter(',')->capture_default_str();
    mom->add_option("--s-list", s_list, "Moment orders")->delimiter(',')->capture_default_str();
    mom->add_option("--n", n_samples, "Base samples per dimension")->capture_default_str();
    mom->add_option("--seed", mom_seed, "Seed")->capture_default_str();
    mom->add_option("--out", mom_out, "CSV output (default stdout)");

    // converge
    auto* conv = app.add_subcommand("converge", "Capacity functionals of rescaled models against the Gaussian model");
    std::vector<std::string> kinds{"beta", "betaprime"}, compacts;
    std::vector<double> betas{4, 16, 64, 256};
    int conv_d = 2;
    double conv_R = 2.0, conv_eps = 0.05;
    std::size_t reps = 2000;
    std::uint64_t conv_seed = 1;
    std::string conv_out;
    conv->add_option("--kinds", kinds, "beta, betaprime (gaussian: self-comparison)")->delimiter(',')->capture_default_str();
    conv->add_option("--betas", betas, "Beta grid")->delimiter(',')->capture_default_str();
    conv->add_option("--compact", compacts, "Test set: ball:X[,Y]:R, segment:A:B, a|b (repeatable)");
    conv->add_option("--d", conv_d, "Dimension")->capture_default_str();
    conv->add_option("--R", conv_R, "Window radius")->capture_default_str();
    conv->add_option("--eps", conv_eps, "Failure budget")->capture_default_str();
    conv->add_option("--reps", reps, "Replications")->capture_default_str();
    conv->add_option("--seed", conv_seed, "Seed")->capture_default_str();
    conv->add_option("--out", conv_out, "CSV output (default stdout)");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Growth-boundary bounds against empirical frequencies");
    std::vector<std::string> bound_names{"sup_beta", "sup_beta_prime", "sup_gaussian",
                                         "inf_beta", "inf_beta_prime", "inf_gaussian"};
    std::size_t n_seeds = 1000;
    std::uint64_t bnd_seed = 1;
    std::string bnd_out;
    int q_d = 0;
    double q_A = 1.0, q_level = 0.0, q_beta = 0.0, q_beta0 = 0.0;
    bnd->add_option("--bounds", bound_names, "Bounds to tabulate")->delimiter(',')->capture_default_str();
    bnd->add_option("--seeds", n_seeds, "Samples per parameter point")->capture_default_str();
    bnd->add_option("--seed", bnd_seed, "Seed")->capture_default_str();
    bnd->add_option("--out", bnd_out, "CSV output (default stdout)");
    bnd->add_option("--d", q_d, "Single point: dimension (0: built-in grid)");
    bnd->add_option("--A", q_A, "Single point: radius");
    bnd->add_option("--level", q_level, "Single point: level T or t");
    bnd->add_option("--beta", q_beta, "Single point: beta");
    bnd->add_option("--beta0", q_beta0, "Single point: beta0");

    std::string command = "ptess";
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        write_error("UsageError", e.what(), command);
        return 2;
    }

    const CLI::App* active = app.get_subcommands().front();
    command = active->get_name();
    try {
        if (!manifest_path.empty()) {
            Output m(manifest_path);
            m.stream() << manifest_of(app, *active).dump(2) << "\n";
            m.finish();
        }
        if (sim->parsed()) {
            ModelParams model;
            model.kind = parse_kind(model_name);
            model.d = d;
            model.beta = model.kind == ModelKind::Gaussian ? 0.0 : beta;
            model.gamma = gamma;
            model.rescaled = rescaled;
            const WindowSpec window{R, eps, model};
            validate(window);
            if (!svg_path.empty() && d != 3) throw ParameterError("SVG export needs d = 3");
            SimOptions opt;
            opt.margin = margin;
            const Tessellation tess = simulate(window, seed, substream, opt);
            Output out(json_path);
            out.stream() << to_json(tess).dump() << "\n";
            out.finish();
            if (!svg_path.empty()) {
                Output svg(svg_path);
                svg.stream() << skeleton_svg(tess);
                svg.finish();
            }
        } else if (mom->parsed()) {
            for (int dd : d_list)
                for (double nu : nu_list)
                    for (double s : s_list) volume_moment({dd, nu, s});  // validates the grid up front
            Output out(mom_out);
            auto& os = out.stream();
            os << "d,nu,s,closed_form,mc_estimate,stderr,z_score,n,seed\n";
            for (int dd : d_list) {
                const auto vols = gaussian_simplex_volumes(dd, n_samples, mom_seed);
                for (double nu : nu_list)
                    for (double s : s_list) {
                        const double exact = volume_moment({dd, nu, s});
                        const Estimate e = importance_moment_from_volumes(vols, nu, s);
                        const double z = e.std_error > 0 ? (e.value - exact) / e.std_error : 0.0;
                        os << dd << ',' << num(nu) << ',' << num(s) << ',' << num(exact) << ',' << num(e.value)
                           << ',' << num(e.std_error) << ',' << num(z) << ',' << e.n << ',' << mom_seed << "\n";
                    }
            }
            out.finish();
        } else if (conv->parsed()) {
            std::vector<ModelKind> ks;
            for (const auto& k : kinds) ks.push_back(parse_kind(k));
            if (compacts.empty()) compacts = default_compacts(conv_d);
            std::vector<CompactTestSet> sets;
            for (const auto& c : compacts) sets.push_back(parse_compact(c));
            for (double b : betas)
                if (!(b > 0)) throw ParameterError("betas must be positive");
            const WindowSpec window{conv_R, conv_eps, gaussian_model(conv_d)};
            const ConvergenceTable t = convergence_experiment(ks, betas, sets, window, reps, conv_seed, threads);
            Output out(conv_out);
            auto& os = out.stream();
            os << "kind,beta,compact,t_beta,t_gauss,delta,std_error,tv_bound,pairs\n";
            for (const auto& r : t.rows)
                os << to_string(r.kind) << ',' << num(r.beta) << ",\"" << compacts[r.compact] << "\"," << num(r.t_beta) << ','
                   << num(r.t_gauss) << ',' << num(r.delta) << ',' << num(r.std_error) << ',' << num(r.tv_bound)
                   << ',' << r.pairs << "\n";
            out.finish();
            std::cerr << json{{"monotone", t.monotone}, {"max_delta", t.max_delta}, {"max_delta_se", t.max_delta_se},
                              {"margin", t.margin}, {"T", t.T}}
                             .dump()
                      << "\n";
        } else if (bnd->parsed()) {
            std::vector<BoundId> ids;
            for (const auto& b : bound_names) ids.push_back(parse_bound_id(b));
            Output out(bnd_out);
            auto& os = out.stream();
            os << "bound,model,d,A,level,beta,beta0,bound_value,empirical,stderr,n_seeds,within_3se\n";
            for (BoundId id : ids) {
                std::vector<BoundQuery> pts =
                    q_d > 0 ? std::vector<BoundQuery>{{q_d, q_A, q_level, q_beta, q_beta0}} : admissible_bound_points(id);
                for (const auto& q : pts) {
                    const double bound = growth_bound(id, q);
                    const Estimate e = empirical_bound_frequency(id, q, n_seeds, bnd_seed, threads);
                    os << to_string(id) << ',' << to_string(bound_model(id)) << ',' << q.d << ',' << num(q.A) << ','
                       << num(q.level) << ',' << num(q.beta) << ',' << num(q.beta0) << ',' << num(bound) << ','
                       << num(e.value) << ',' << num(e.std_error) << ',' << e.n << ','
                       << (e.value <= bound + 3 * e.std_error ? "true" : "false") << "\n";
                }
            }
            out.finish();
        }
    } catch (const ParameterError& e) {
        write_error("ParameterError", e.what(), command);
        return 2;
    } catch (const IoError& e) {
        write_error("IoError", e.what(), command);
        return 3;
    } catch (const std::exception& e) {
        write_error("RuntimeError", e.what(), command);
        return 1;
    }
    return 0;
}
