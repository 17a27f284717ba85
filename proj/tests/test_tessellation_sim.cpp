#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ptess/rng.hpp"
#include "ptess/tessellation_sim.hpp"

using namespace ptess;

namespace {

std::vector<ModelParams> model_zoo() {
    return {gaussian_model(2),          gaussian_model(3, 2.5),
            beta_model(2, 1.5),         beta_model(3, 3.0, 0.3),
            rescaled_model(ModelKind::Beta, 3, 2.0, 4.0), beta_model(2, -0.5, 2.0),
            beta_prime_model(2, 4.0),   beta_prime_model(3, 7.0, 3.0),
            rescaled_model(ModelKind::BetaPrime, 3, 6.0, 0.5)};
}

WeightedPoint forward(const CanonicalMap& cm, const WeightedPoint& p) {
    WeightedPoint q = p;
    for (double& x : q.v) x *= cm.spatial;
    q.h = cm.height_scale * p.h + cm.height_shift;
    return q;
}

std::set<std::vector<double>> keyed(const std::vector<WeightedPoint>& pts) {
    std::set<std::vector<double>> out;
    for (const auto& p : pts) {
        auto k = p.v;
        k.push_back(p.h);
        out.insert(k);
    }
    return out;
}

double grid_sup_2d(const std::vector<WeightedPoint>& pts, double A, int n) {
    double best = -kInf;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const Vec w{-A + 2 * A * i / n, -A + 2 * A * j / n};
            if (w[0] * w[0] + w[1] * w[1] > A * A) continue;
            best = std::max(best, growth_boundary_height(w, pts));
        }
    for (int k = 0; k < 4 * n; ++k) {
        const double a = 2 * M_PI * k / (4 * n);
        best = std::max(best, growth_boundary_height({A * std::cos(a), A * std::sin(a)}, pts));
    }
    return best;
}

}  // namespace

TEST_CASE("canonical map carries the intensity onto the reference process") {
    Rng rng(5);
    for (const auto& model : model_zoo()) {
        const CanonicalMap cm = canonical_map(model);
        CHECK(cm.height_scale == doctest::Approx(cm.spatial * cm.spatial));
        const auto supp = height_support(model);
        const int m = model.d - 1;
        for (int k = 0; k < 20; ++k) {
            WeightedPoint p;
            for (int i = 0; i < m; ++i) p.v.push_back(4 * rng.uniform() - 2);
            const double lo = std::isfinite(supp.lo) ? supp.lo : -10.0;
            const double hi = std::isfinite(supp.hi) ? supp.hi : 10.0;
            p.h = lo + (hi - lo) * (0.02 + 0.96 * rng.uniform());
            const double lhs = intensity_density(model, p);
            const double rhs = intensity_density(cm.reference, forward(cm, p)) * std::pow(cm.spatial, m) *
                               cm.height_scale;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("height window inverts the bounds") {
    const double eps = 0.1, A = 5.0;
    struct Case {
        ModelParams model;
        BoundId sup, inf;
    };
    for (const Case& c : {Case{gaussian_model(3, 2.0), BoundId::SupGaussian, BoundId::InfGaussian},
                          Case{rescaled_model(ModelKind::Beta, 3, 3.0), BoundId::SupBeta, BoundId::InfBeta},
                          Case{beta_model(2, 2.5, 0.7), BoundId::SupBeta, BoundId::InfBeta},
                          Case{rescaled_model(ModelKind::BetaPrime, 3, 5.0), BoundId::SupBetaPrime,
                               BoundId::InfBetaPrime}}) {
        const HeightWindow hw = height_window(c.model, A, eps);
        const CanonicalMap cm = canonical_map(c.model);
        const double b = cm.reference.beta;
        const double Ac = cm.spatial * A;
        const double Tc = cm.height_scale * hw.T + cm.height_shift;
        const double tc = cm.height_scale * hw.t + cm.height_shift;
        CHECK(hw.t < hw.T);
        CHECK(growth_bound(c.sup, {c.model.d, Ac, Tc, b, b}) <= 0.5 * eps * (1 + 1e-9));
        CHECK(growth_bound(c.inf, {c.model.d, Ac, tc, b, b}) == doctest::Approx(0.5 * eps).epsilon(1e-8));
        if (c.sup == BoundId::SupGaussian)
            CHECK(growth_bound(c.sup, {c.model.d, Ac, Tc, b, b}) == doctest::Approx(0.5 * eps).epsilon(1e-8));
    }
    CHECK_THROWS_AS(height_window(beta_model(2, 0.5), A, eps), ParameterError);
    CHECK_THROWS_AS(height_window(beta_model(2, 1.0), A, eps), ParameterError);
}

TEST_CASE("stabilization radius") {
    for (const auto& model : {gaussian_model(2), gaussian_model(3), rescaled_model(ModelKind::Beta, 3, 2.0),
                              rescaled_model(ModelKind::BetaPrime, 2, 6.0)}) {
        double prev = kInf;
        for (double eps : {0.01, 0.05, 0.1, 0.3}) {
            const auto rep = stabilization_report(model, 5.0, eps);
            CHECK(rep.r <= prev);
            CHECK(rep.p_outside <= eps / 2);
            CHECK(rep.p_low <= eps / 2 * (1 + 1e-9));
            CHECK(rep.r >= std::sqrt(2.0 * model.d) / canonical_map(model).spatial - 1e-12);
            prev = rep.r;
        }
        double last = 0.0;
        for (double R : {1.0, 3.0, 10.0, 30.0}) {
            const double r = stabilization_radius(model, R, 0.1);
            CHECK(r >= last);
            last = r;
        }
    }
    CHECK_THROWS_AS(stabilization_radius(beta_model(3, 0.5), 5, 0.1), ParameterError);
    CHECK_THROWS_AS(stabilization_radius(beta_prime_model(3, 5.0), 5, 0.1), ParameterError);
    CHECK_THROWS_AS(stabilization_radius(gaussian_model(3), 0.5, 0.1), ParameterError);
}

TEST_CASE("block field agrees on overlapping regions") {
    for (const auto& model : {gaussian_model(3), beta_prime_model(3, 4.0), beta_model(2, 2.0)}) {
        const bool neg = model.kind == ModelKind::BetaPrime;
        const KRegion a{3.0, neg ? -0.2 : 2.0, neg ? -3.0 : -6.0}, b{5.0, neg ? -0.6 : 1.2, neg ? -3.0 : -6.0};
        const auto pa = sample_block_field(model, a, 99, 3);
        const auto pb = sample_block_field(model, b, 99, 3);
        std::vector<WeightedPoint> a_in_b, b_in_a;
        for (const auto& p : pa)
            if (region_contains(Region{b}, p)) a_in_b.push_back(p);
        for (const auto& p : pb)
            if (region_contains(Region{a}, p)) b_in_a.push_back(p);
        CHECK(keyed(a_in_b) == keyed(b_in_a));
        CHECK(!a_in_b.empty());
        for (const auto& p : pa) CHECK(region_contains(Region{a}, p));
    }
}

TEST_CASE("block field count matches the intensity") {
    const ModelParams model = gaussian_model(3);
    const KRegion region{2.0, 1.0, -4.0};
    const double expected = intensity_measure(model, Region{region});
    double sum = 0;
    const int n = 400;
    for (int s = 0; s < n; ++s) sum += double(sample_block_field(model, region, 1000 + s).size());
    CHECK(std::abs(sum / n - expected) < 4 * std::sqrt(expected / n));
}

TEST_CASE("sup of the growth boundary over a disk") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<WeightedPoint> pts;
        for (int i = 0; i < 10; ++i) pts.push_back({{6 * rng.uniform() - 3, 6 * rng.uniform() - 3}, 2 * rng.uniform()});
        const double A = 2.0;
        const double brute = sup_growth_height(pts, A);
        auto more = pts;
        more.push_back({{40, 1}, 1e4});
        more.push_back({{-35, 7}, 1e4});
        more.push_back({{3, -45}, 1e4});
        const double via_cells = sup_growth_height(more, A);
        CHECK(via_cells == doctest::Approx(brute).epsilon(1e-9));
        const double grid = grid_sup_2d(pts, A, 300);
        CHECK(grid <= brute + 1e-9);
        CHECK(brute - grid < 0.1);
    }
    CHECK(std::isinf(sup_growth_height({}, 1.0)));
    CHECK(inf_growth_height({{{3.0}, 1.0}, {{0.5}, 2.0}}, 1.0) == doctest::Approx(2.0));
    // 1-d: two sites at 0 and 2 with equal heights, sup over [-1,1] is at -1.
    CHECK(sup_growth_height({{{0.0}, 0.0}, {{2.0}, 0.0}}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("skeleton of small configurations") {
    WindowSpec w{100.0, 0.1, gaussian_model(3)};
    auto one = tessellate_points(w, {{{0, 0}, 0}, {{1, 0}, 0}, {{0, 1}, 0}});
    CHECK(skeleton(one).size() == 3);
    auto two = tessellate_points(w, {{{0, 0}, 0}, {{1, 0}, 0}, {{0, 1}, 0}, {{1, 1.2}, 0}});
    CHECK(two.cells.size() == 2);
    CHECK(skeleton(two).size() == 5);
    auto none = tessellate_points(w, {});
    CHECK(skeleton(none).empty());
    CHECK(none.empty);
    // Clipping: segment crossing the unit disk.
    WindowSpec small{1.0, 0.1, gaussian_model(3)};
    auto clip = tessellate_points(small, {{{-3, 0}, 0}, {{3, 0}, 0}, {{0, 3}, 0}});
    int clipped = 0;
    for (const auto& f : skeleton(clip))
        for (const auto& p : f.points) {
            CHECK(p[0] * p[0] + p[1] * p[1] <= 1 + 1e-9);
            ++clipped;
        }
    CHECK(clipped == 2);
    WindowSpec line{1.0, 0.1, gaussian_model(2)};
    auto seg = tessellate_points(line, {{{-0.5}, 0}, {{0.5}, 0}, {{3}, 0}});
    CHECK(skeleton(seg).size() == 2);
}

TEST_CASE("face intensities of a single cell") {
    WindowSpec w{2.0, 0.1, gaussian_model(3)};
    auto t = tessellate_points(w, {{{0, 0}, 0}, {{1, 0}, 0}, {{0, 1}, 0}});
    CHECK_FALSE(t.window_determined);
    CHECK_THROWS_AS(empirical_face_intensities({t}), ParameterError);
    t.window_determined = true;
    const auto est = empirical_face_intensities({t});
    const double vol = M_PI * 4.0;
    CHECK(est.mean[0] == doctest::Approx(3 / vol));
    CHECK(est.mean[1] == doctest::Approx(3 / vol));
    CHECK(est.mean[2] == doctest::Approx(1 / vol));
    CHECK(est.realizations == 1);
}

TEST_CASE("simulate") {
    WindowSpec w{3.0, 0.1, gaussian_model(3)};
    const Tessellation a = simulate(w, 7);
    const Tessellation b = simulate(w, 7);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.margin_source == "stabilization_bound");
    CHECK(a.margin == doctest::Approx(stabilization_radius(w.model, 3.0, 0.1)));
    CHECK(a.window_determined);
    CHECK_FALSE(a.empty);
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        CHECK(empty_paraboloid(a.cells[c], a.points));
        if (a.valid[c]) CHECK(std::hypot(a.cells[c].apex.w[0], a.cells[c].apex.w[1]) <= 3.0);
    }
    const Tessellation c = simulate(w, 8);
    CHECK(to_json(a) != to_json(c));

    WindowSpec weak{2.0, 0.1, beta_model(2, 0.0)};
    const Tessellation d = simulate(weak, 3);
    CHECK(d.margin_source == "a_posteriori");

    SimOptions opt;
    opt.margin = 1.5;
    const Tessellation e = simulate(w, 7, 0, opt);
    CHECK(e.margin_source == "override");
    CHECK(e.sample_region.A == doctest::Approx(4.5));
    CHECK_THROWS_AS(simulate(WindowSpec{0.5, 0.1, gaussian_model(3)}, 1), ParameterError);
    CHECK_THROWS_AS(simulate(WindowSpec{2, 0.1, gaussian_model(4)}, 1), ParameterError);
}

TEST_CASE("svg and json export") {
    WindowSpec w{3.0, 0.1, gaussian_model(3)};
    const Tessellation a = simulate(w, 21);
    const std::string svg = skeleton_svg(a);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);
    const auto j = to_json(a);
    CHECK(j["cells"].size() == a.cells.size());
    CHECK(j["flags"]["window_determined"].get<bool>());
}
