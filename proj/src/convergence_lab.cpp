#include "ptess/convergence_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

namespace ptess {

namespace {

double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(a[0] + s * dx - p[0], a[1] + s * dy - p[1]);
}

int orient2(const Vec& a, const Vec& b, const Vec& c) {
    const double v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return (v > 0) - (v < 0);
}

bool on_segment(const Vec& a, const Vec& b, const Vec& p) {
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
           p[1] <= std::max(a[1], b[1]);
}

bool segments_intersect(const Vec& p1, const Vec& p2, const Vec& q1, const Vec& q2) {
    const int o1 = orient2(p1, p2, q1), o2 = orient2(p1, p2, q2);
    const int o3 = orient2(q1, q2, p1), o4 = orient2(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

bool face_hits(const SkeletonFace& f, const CompactTestSet& c) {
    using K = CompactTestSet::Kind;
    switch (c.kind) {
        case K::Empty: return false;
        case K::Union:
            for (const auto& p : c.parts)
                if (face_hits(f, p)) return true;
            return false;
        case K::Ball:
            if (f.points.size() == 1) return std::abs(f.points[0][0] - c.center[0]) <= c.radius;
            return dist_point_segment(c.center, f.points[0], f.points[1]) <= c.radius;
        case K::Segment:
            if (f.points.size() == 1) {
                const double x = f.points[0][0];
                return std::min(c.a[0], c.b[0]) <= x && x <= std::max(c.a[0], c.b[0]);
            }
            return segments_intersect(f.points[0], f.points[1], c.a, c.b);
    }
    return false;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const int t = std::max(1, std::min<int>(threads, int(n)));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; !failed && (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Per replication: -1 when the window was not determined, else hit flags per set.
std::vector<std::vector<int>> replicate_hits(const ModelParams& model, const std::vector<CompactTestSet>& sets,
                                             const WindowSpec& window, std::size_t n_reps, std::uint64_t seed,
                                             int threads, double* margin = nullptr, double* T = nullptr) {
    std::vector<std::vector<int>> out(n_reps);
    WindowSpec w = window;
    w.model = model;
    parallel_for(n_reps, resolve_threads(threads), [&](std::size_t i) {
        const Tessellation tess = simulate(w, seed, i);
        if (i == 0) {
            if (margin) *margin = tess.margin;
            if (T) *T = tess.T_window;
        }
        if (!tess.window_determined) {
            out[i].assign(sets.size(), -1);
            return;
        }
        const auto faces = skeleton(tess);
        for (const auto& c : sets) {
            bool hit = false;
            for (const auto& f : faces)
                if (face_hits(f, c)) {
                    hit = true;
                    break;
                }
            out[i].push_back(hit);
        }
    });
    return out;
}

void check_margin(const CompactTestSet& c, const WindowSpec& w, double margin) {
    if (c.kind == CompactTestSet::Kind::Empty) return;
    const int m = w.model.d - 1;
    std::function<void(const CompactTestSet&)> dims = [&](const CompactTestSet& s) {
        for (const Vec* v : {&s.center, &s.a, &s.b})
            if (!v->empty() && int(v->size()) != m) throw ParameterError("test set dimension does not match d-1");
        for (const auto& p : s.parts) dims(p);
    };
    dims(c);
    if (!(outer_radius(c) <= w.R * (1.0 - margin)))
        throw ParameterError("undecidable margin: test set must lie in B_{R(1-margin)}");
}

}  // namespace

CompactTestSet CompactTestSet::ball(Vec center, double radius) {
    if (!(radius >= 0.0)) throw ParameterError("ball radius must be nonnegative");
    CompactTestSet c;
    c.kind = Kind::Ball;
    c.center = std::move(center);
    c.radius = radius;
    return c;
}

CompactTestSet CompactTestSet::segment(Vec a, Vec b) {
    if (a.size() != b.size() || a.empty()) throw ParameterError("segment endpoints must share a dimension");
    CompactTestSet c;
    c.kind = Kind::Segment;
    c.a = std::move(a);
    c.b = std::move(b);
    return c;
}

CompactTestSet CompactTestSet::finite_union(std::vector<CompactTestSet> parts) {
    CompactTestSet c;
    c.kind = parts.empty() ? Kind::Empty : Kind::Union;
    c.parts = std::move(parts);
    return c;
}

double outer_radius(const CompactTestSet& c) {
    auto norm = [](const Vec& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    switch (c.kind) {
        case CompactTestSet::Kind::Empty: return -kInf;
        case CompactTestSet::Kind::Ball: return norm(c.center) + c.radius;
        case CompactTestSet::Kind::Segment: return std::max(norm(c.a), norm(c.b));
        case CompactTestSet::Kind::Union: {
            double r = -kInf;
            for (const auto& p : c.parts) r = std::max(r, outer_radius(p));
            return r;
        }
    }
    return -kInf;
}

bool skeleton_hits(const Tessellation& tess, const CompactTestSet& c) {
    for (const auto& f : skeleton(tess))
        if (face_hits(f, c)) return true;
    return false;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PTESS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CapacityEstimate> capacity_estimates(const ModelParams& model, const std::vector<CompactTestSet>& sets,
                                                 const WindowSpec& window, std::size_t n_reps, std::uint64_t seed,
                                                 double margin, int threads) {
    validate(window);
    for (const auto& c : sets) check_margin(c, window, margin);
    std::vector<CapacityEstimate> out(sets.size());
    bool all_empty = true;
    for (const auto& c : sets) all_empty = all_empty && c.kind == CompactTestSet::Kind::Empty;
    if (all_empty) {
        for (auto& e : out) {
            e.hits.assign(n_reps, 0);
            e.replications = n_reps;
        }
        return out;
    }
    const auto hits = replicate_hits(model, sets, window, n_reps, seed, threads);
    for (std::size_t k = 0; k < sets.size(); ++k) {
        auto& e = out[k];
        for (const auto& row : hits) {
            if (row[k] < 0) {
                ++e.skipped;
                continue;
            }
            e.hits.push_back(char(row[k]));
        }
        e.replications = e.hits.size();
        if (e.replications == 0) continue;
        double s = 0;
        for (char h : e.hits) s += h;
        e.value = s / double(e.replications);
        e.std_error = std::sqrt(e.value * (1 - e.value) / double(e.replications));
    }
    return out;
}

CapacityEstimate capacity_estimate(const ModelParams& model, const CompactTestSet& c, const WindowSpec& window,
                                   std::size_t n_reps, std::uint64_t seed, double margin) {
    return capacity_estimates(model, {c}, window, n_reps, seed, margin).front();
}

ModelParams bound_reference_model(BoundId which, int d, double beta) {
    switch (bound_model(which)) {
        case ModelKind::Gaussian: return gaussian_model(d);
        case ModelKind::Beta: return rescaled_model(ModelKind::Beta, d, beta);
        case ModelKind::BetaPrime: return rescaled_model(ModelKind::BetaPrime, d, beta);
    }
    return gaussian_model(d);
}

std::vector<BoundQuery> admissible_bound_points(BoundId which) {
    std::vector<BoundQuery> out;
    for (int d : {2, 3})
        for (double A : {0.5, 1.0}) {
            const double base = 4 * A * A;
            switch (which) {
                case BoundId::SupGaussian:
                    for (double x : {0.0, 1.0, 2.0, 3.0, 5.0}) out.push_back({d, A, base + x, 0, 0});
                    break;
                case BoundId::SupBeta:
                    for (double x : {-0.5, 0.5, 1.5, 3.0, 5.0}) out.push_back({d, A, base + x, 5.0, 2.0});
                    break;
                case BoundId::SupBetaPrime:
                    // Levels stay below the support edge 2 beta = 20.
                    for (double x : {0.0, 1.0, 2.0, 4.0, 8.0}) out.push_back({d, A, base + x, 10.0, 0});
                    break;
                case BoundId::InfGaussian:
                    for (double t : {-8.0, -6.0, -4.0, -3.0, -2.0}) out.push_back({d, A, t, 0, 0});
                    break;
                case BoundId::InfBeta:
                    for (double t : {-8.0, -6.0, -4.0, -3.0, -2.0}) out.push_back({d, A, t, 5.0, 0});
                    break;
                case BoundId::InfBetaPrime:
                    for (double t : {-8.0, -6.0, -4.0, -3.0, -2.0}) out.push_back({d, A, t, 10.0, 5.0});
                    break;
            }
        }
    return out;
}

Estimate empirical_bound_frequency(BoundId which, const BoundQuery& q, std::size_t n_seeds, std::uint64_t seed,
                                   int threads) {
    const ModelParams model = bound_reference_model(which, q.d, q.beta);
    const bool sup = is_sup_bound(which);
    // K(A, level) can hold too many points (infinitely many once the level passes
    // the BetaPrime support top). Dropping points only raises the growth boundary,
    // so a sample below a capped level gives a superset of the sup event.
    double sample_level = q.level;
    constexpr double kPointBudget = 20000;
    auto mass = [&](double t) { return intensity_measure(model, KRegion{q.A, t}); };
    if (sup && !(mass(q.level) <= kPointBudget)) {
        double lo = q.level, hi = q.level;
        for (double step = 1.0; !(mass(lo) <= kPointBudget); step *= 2) {
            hi = lo;
            lo -= step;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mass(mid) <= kPointBudget ? lo : hi) = mid;
        }
        sample_level = lo;
    }
    std::vector<char> event(n_seeds, 0);
    parallel_for(n_seeds, resolve_threads(threads), [&](std::size_t i) {
        const auto pts = sample_poisson(model, KRegion{q.A, sample_level}, seed, i);
        // Points outside K(A, level) have power above the level everywhere on B_A.
        event[i] = sup ? sup_growth_height(pts, q.A) > q.level : !pts.empty();
    });
    Estimate e;
    e.n = n_seeds;
    double s = 0;
    for (char x : event) s += x;
    e.value = n_seeds ? s / double(n_seeds) : 0.0;
    e.std_error = n_seeds ? std::sqrt(e.value * (1 - e.value) / double(n_seeds)) : 0.0;
    return e;
}

double tv_bound_integral(double beta, double R, double r, double T, int d, ModelKind kind) {
    if (!(beta > 0.0)) throw ParameterError("tv_bound_integral needs beta > 0");
    if (d < 2) throw ParameterError("d must be at least 2");
    if (kind == ModelKind::Gaussian) throw ParameterError("tv_bound_integral compares a Beta or BetaPrime model");
    const int m = d - 1;
    if (kind == ModelKind::BetaPrime && !(T < 2 * beta)) return kInf;
    const double log_gauss_c = -0.5 * d * std::log(2 * M_PI);
    const double log_c = (kind == ModelKind::Beta ? std::log(beta_constant(d, beta)) : std::log(beta_prime_constant(d, beta))) -
                         0.5 * d * std::log(2 * beta);
    auto f = [&](double s) -> double {
        if (kind == ModelKind::Beta) return s >= -2 * beta ? std::exp(log_c + beta * std::log1p(s / (2 * beta))) : 0.0;
        return std::exp(log_c - beta * std::log1p(-s / (2 * beta)));
    };
    auto integrand = [&](double s) -> double {
        if (!std::isfinite(s)) return 0.0;
        const double g = std::exp(log_gauss_c + 0.5 * s);
        const double w = std::pow(std::sqrt(std::max(0.0, T - s)) + R + r, m);
        return w * std::abs(g - f(s));
    };
    std::vector<double> cuts{-kInf};
    for (double c : {-2 * beta, T - 200.0, T - 60.0, T - 20.0})
        if (c < T && c > cuts.back()) cuts.push_back(c);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(T);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i] < cuts[i + 1]) total += integrate(integrand, cuts[i], cuts[i + 1], 1e-8);
    return 1.5 * unit_ball_volume(m) * total;
}

ConvergenceTable convergence_experiment(const std::vector<ModelKind>& kinds, const std::vector<double>& betas,
                                        const std::vector<CompactTestSet>& compacts, const WindowSpec& window,
                                        std::size_t n_reps, std::uint64_t seed, int threads) {
    validate(window);
    for (const auto& c : compacts) check_margin(c, window, 0.05);
    const int d = window.model.d;
    ConvergenceTable table;
    const auto gauss = replicate_hits(gaussian_model(d), compacts, window, n_reps, seed, threads, &table.margin, &table.T);
    for (ModelKind kind : kinds) {
        std::vector<double> maxd, maxse;
        for (double beta : betas) {
            // A Gaussian entry compares the reference with itself (coupling check).
            const bool self = kind == ModelKind::Gaussian;
            const auto hits = self ? gauss
                                   : replicate_hits(rescaled_model(kind, d, beta), compacts, window, n_reps, seed, threads);
            const double tv = self ? 0.0 : tv_bound_integral(beta, window.R, table.margin, table.T, d, kind);
            double best = -1, best_se = 0;
            for (std::size_t k = 0; k < compacts.size(); ++k) {
                double sb = 0, sg = 0, sd = 0, sd2 = 0;
                std::size_t n = 0;
                for (std::size_t i = 0; i < n_reps; ++i) {
                    if (hits[i][k] < 0 || gauss[i][k] < 0) continue;
                    const double diff = hits[i][k] - gauss[i][k];
                    sb += hits[i][k];
                    sg += gauss[i][k];
                    sd += diff;
                    sd2 += diff * diff;
                    ++n;
                }
                ConvergenceRow row{kind, beta, k, 0, 0, 0, 0, tv, n};
                if (n > 0) {
                    row.t_beta = sb / n;
                    row.t_gauss = sg / n;
                    row.delta = std::abs(sd / n);
                    row.std_error = n > 1 ? std::sqrt(std::max(0.0, (sd2 - sd * sd / n) / (n - 1)) / n) : 0.0;
                }
                if (row.delta > best) {
                    best = row.delta;
                    best_se = row.std_error;
                }
                table.rows.push_back(row);
            }
            maxd.push_back(std::max(best, 0.0));
            maxse.push_back(best_se);
        }
        for (std::size_t i = 1; i < maxd.size(); ++i)
            if (maxd[i] > maxd[i - 1] + 3 * std::hypot(maxse[i], maxse[i - 1])) table.monotone = false;
        table.max_delta.insert(table.max_delta.end(), maxd.begin(), maxd.end());
        table.max_delta_se.insert(table.max_delta_se.end(), maxse.begin(), maxse.end());
    }
    return table;
}

}  // namespace ptess
