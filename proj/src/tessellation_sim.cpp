#include "ptess/tessellation_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ptess/rng.hpp"

namespace ptess {

namespace {

double log_sqrtpi_gamma(int d) { return 0.5 * std::log(M_PI) + std::lgamma(0.5 * (d + 1)); }

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Distance from the origin to the segment [p, q] in R^2.
double segment_origin_distance(const Vec& p, const Vec& q) {
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0 ? -(p[0] * dx + p[1] * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(p[0] + s * dx, p[1] + s * dy);
}

// Parameters s (in [lo, hi]) where |p + s (q - p)| = A.
std::vector<double> circle_crossings(const Vec& p, const Vec& dir, double A, double lo, double hi) {
    const double a = dir[0] * dir[0] + dir[1] * dir[1];
    const double b = 2 * (p[0] * dir[0] + p[1] * dir[1]);
    const double c = p[0] * p[0] + p[1] * p[1] - A * A;
    std::vector<double> out;
    if (a == 0.0) return out;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) return out;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
    double roots[2] = {q / a, q != 0.0 ? c / q : -b / (2 * a)};
    for (double s : roots)
        if (s >= lo && s <= hi) out.push_back(s);
    return out;
}

double min_power(const Vec& w, const std::vector<WeightedPoint>& pts) {
    double best = kInf;
    for (const auto& p : pts) best = std::min(best, power(w, p));
    return best;
}

double sup_brute(const std::vector<WeightedPoint>& pts, double A) {
    const int m = int(pts[0].v.size());
    const int n = int(pts.size());
    double best = -kInf;
    auto eval = [&](const Vec& w) { best = std::max(best, min_power(w, pts)); };
    if (m == 1) {
        eval({-A});
        eval({A});
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (pts[i].v[0] == pts[j].v[0]) continue;
                const Apex ap = paraboloid_through({pts[i], pts[j]});
                if (std::abs(ap.w[0]) <= A) eval(ap.w);
            }
        return best;
    }
    eval({A, 0.0});
    for (const auto& p : pts) {
        const double r = std::sqrt(norm2(p.v));
        if (r > 0) eval({-A * p.v[0] / r, -A * p.v[1] / r});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            // Bisector 2 <w, vj - vi> = |vj|^2 + hj - |vi|^2 - hi.
            const Vec e{pts[j].v[0] - pts[i].v[0], pts[j].v[1] - pts[i].v[1]};
            const double e2 = norm2(e);
            if (e2 == 0.0) continue;
            const double rhs = 0.5 * (norm2(pts[j].v) + pts[j].h - norm2(pts[i].v) - pts[i].h);
            const Vec p0{e[0] * rhs / e2, e[1] * rhs / e2};
            for (double s : circle_crossings(p0, {-e[1], e[0]}, A, -kInf, kInf))
                eval({p0[0] - s * e[1], p0[1] + s * e[0]});
            for (int k = j + 1; k < n; ++k) {
                try {
                    const Apex ap = paraboloid_through({pts[i], pts[j], pts[k]});
                    if (norm2(ap.w) <= A * A) eval(ap.w);
                } catch (const DegeneracyError&) {
                }
            }
        }
    return best;
}

struct RidgeInfo {
    int cell;
    int opposite;  // position of the vertex not on the ridge
};

std::map<std::vector<int>, std::vector<RidgeInfo>> ridge_map(const std::vector<SimplexCell>& cells) {
    std::map<std::vector<int>, std::vector<RidgeInfo>> ridges;
    for (int c = 0; c < int(cells.size()); ++c) {
        const auto& idx = cells[c].vertex_indices;
        for (int k = 0; k < int(idx.size()); ++k) {
            std::vector<int> key;
            for (int j = 0; j < int(idx.size()); ++j)
                if (j != k) key.push_back(idx[j]);
            ridges[key].push_back({c, k});
        }
    }
    return ridges;
}

// Exact sup over B_A using a triangulation of all points.
double sup_with_cells(const std::vector<WeightedPoint>& pts, const std::vector<SimplexCell>& cells,
                      double A) {
    const int m = int(pts[0].v.size());
    double best = -kInf;
    for (const auto& c : cells)
        if (norm2(c.apex.w) <= A * A) best = std::max(best, c.apex.r);
    if (m == 1) {
        best = std::max(best, min_power({-A}, pts));
        best = std::max(best, min_power({A}, pts));
        return best;
    }
    best = std::max(best, min_power({A, 0.0}, pts));
    const auto ridges = ridge_map(cells);
    std::vector<std::vector<int>> nbrs(pts.size());
    for (const auto& [key, owners] : ridges) {
        const int i = key[0], j = key[1];
        nbrs[i].push_back(j);
        nbrs[j].push_back(i);
        // Laguerre edge between sites i and j.
        const Vec& p = cells[owners[0].cell].apex.w;
        if (owners.size() >= 2) {
            const Vec& q = cells[owners[1].cell].apex.w;
            const Vec dir{q[0] - p[0], q[1] - p[1]};
            for (double s : circle_crossings(p, dir, A, 0.0, 1.0))
                best = std::max(best, power({p[0] + s * dir[0], p[1] + s * dir[1]}, pts[i]));
        } else {
            const auto& cell = cells[owners[0].cell];
            const int k = cell.vertex_indices[owners[0].opposite];
            const Vec e{pts[j].v[0] - pts[i].v[0], pts[j].v[1] - pts[i].v[1]};
            Vec dir{-e[1], e[0]};
            const double side = dir[0] * (pts[k].v[0] - pts[i].v[0]) + dir[1] * (pts[k].v[1] - pts[i].v[1]);
            if (side > 0) dir = {e[1], -e[0]};
            for (double s : circle_crossings(p, dir, A, 0.0, kInf))
                best = std::max(best, power({p[0] + s * dir[0], p[1] + s * dir[1]}, pts[i]));
        }
    }
    for (int i = 0; i < int(pts.size()); ++i) {
        if (nbrs[i].empty()) continue;
        const double r = std::sqrt(norm2(pts[i].v));
        if (r == 0.0) continue;
        const Vec w{-A * pts[i].v[0] / r, -A * pts[i].v[1] / r};
        const double own = power(w, pts[i]);
        bool inside = true;
        for (int j : nbrs[i])
            if (power(w, pts[j]) < own) {
                inside = false;
                break;
            }
        if (inside) best = std::max(best, own);
    }
    return best;
}

double sup_growth_impl(const std::vector<WeightedPoint>& pts, const std::vector<SimplexCell>* cells,
                       double A) {
    if (pts.empty()) return kInf;
    const int m = int(pts[0].v.size());
    if (m < 1 || m > 2) throw ParameterError("sup_growth_height supports d = 2, 3");
    if (pts.size() <= 12) return sup_brute(pts, A);
    if (cells && !cells->empty()) return sup_with_cells(pts, *cells, A);
    try {
        const auto own = delaunay_cells(pts);
        return sup_with_cells(pts, own, A);
    } catch (const DegeneracyError&) {
        return sup_brute(pts, A);
    }
}

// ---------------------------------------------------------------------------
// Coupled block sampler in reference coordinates.

struct Slab {
    long long k;
    int sub;
    double lo, hi, side;
};

long long slab_index(double h) {
    if (h >= -64.0 && h < 64.0) return (long long)std::floor(h);
    if (h < -64.0) return -65 - (long long)std::floor(std::log2(-h / 64.0));
    return 64 + (long long)std::floor(std::log2(h / 64.0));
}

Slab slab_of(long long k) {
    if (k >= -64 && k < 64) return {k, 0, double(k), double(k + 1), 4.0};
    if (k < -64) {
        const long long j = -65 - k;
        const double side = 4.0 * std::ldexp(1.0, int((j + 2) / 2));
        return {k, 0, -64.0 * std::ldexp(1.0, int(j + 1)), -64.0 * std::ldexp(1.0, int(j)), side};
    }
    const long long j = k - 64;
    return {k, 0, 64.0 * std::ldexp(1.0, int(j)), 64.0 * std::ldexp(1.0, int(j + 1)), 4.0};
}

class BlockField {
public:
    BlockField(const CanonicalMap& cm, std::uint64_t seed, std::uint64_t stream)
        : cm_(cm), seed_(seed), stream_(stream), support_(height_support(cm.reference)),
          m_(cm.reference.d - 1) {}

    // Points of K(A, level) with h >= hmin, all in reference coordinates.
    std::vector<WeightedPoint> sample(double A, double level, double hmin, double budget) {
        if (!(level < support_.hi)) throw InfiniteMeasureError("level reaches the edge of the height support");
        hmin = std::max(hmin, support_.lo);
        std::vector<WeightedPoint> out;
        if (!(hmin < level)) return out;
        double expected = 0.0;
        for (const Slab& s : slabs(hmin, level)) {
            const double rho = A + std::sqrt(level - std::max(s.lo, hmin));
            const long long cmax = (long long)std::floor(rho / s.side);
            const long long cmin = (long long)std::floor(-rho / s.side);
            std::vector<long long> c(m_, cmin);
            while (true) {
                double d2 = 0.0;
                for (int k = 0; k < m_; ++k) {
                    const double lo = c[k] * s.side, hi = lo + s.side;
                    const double gap = lo > 0 ? lo : (hi < 0 ? -hi : 0.0);
                    d2 += gap * gap;
                }
                if (d2 <= rho * rho) {
                    const auto& pts = block(s, c, expected);
                    if (expected > budget) throw std::runtime_error("sampling budget exceeded");
                    for (const auto& p : pts) {
                        if (p.h < hmin || p.h > level) continue;
                        const double r = std::sqrt(norm2(p.v));
                        const double dist = std::max(0.0, r - A);
                        if (dist * dist + p.h <= level) out.push_back(p);
                    }
                }
                int k = 0;
                while (k < m_ && ++c[k] > cmax) c[k++] = cmin;
                if (k == m_) break;
            }
        }
        return out;
    }

private:
    std::vector<Slab> slabs(double hmin, double level) const {
        std::vector<Slab> out;
        for (long long k = slab_index(hmin); k <= slab_index(level); ++k) {
            Slab s = slab_of(k);
            s.lo = std::max(s.lo, support_.lo);
            if (!(s.lo < s.hi)) continue;
            if (std::isfinite(support_.hi) && s.hi >= support_.hi) {
                // Subdivide geometrically towards the non-integrable top edge.
                const double w = support_.hi - s.lo;
                for (int j = 0; j < 200; ++j) {
                    const double lo = support_.hi - w * std::ldexp(1.0, -j);
                    const double hi = support_.hi - w * std::ldexp(1.0, -j - 1);
                    if (!(lo < level)) break;
                    out.push_back({k, j + 1, lo, hi, s.side});
                }
                continue;
            }
            if (s.lo < level) out.push_back(s);
        }
        return out;
    }

    const std::vector<WeightedPoint>& block(const Slab& s, const std::vector<long long>& c, double& expected) {
        std::uint64_t key = mix64(std::uint64_t(s.k) + 0x1234567ull);
        key = combine_stream(key, std::uint64_t(s.sub));
        for (long long x : c) key = combine_stream(key, std::uint64_t(x));
        const double mass = std::pow(s.side, m_) * height_mass(cm_.reference, s.lo, s.hi);
        if (std::isinf(mass)) throw InfiniteMeasureError("block with infinite intensity");
        expected += mass;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Rng rng(seed_, combine_stream(stream_, key));
        const long long n = poisson_inverse_cdf(mass, rng.uniform());
        std::vector<WeightedPoint> pts;
        pts.reserve(std::size_t(n));
        for (long long i = 0; i < n; ++i) {
            WeightedPoint p;
            p.v.resize(m_);
            for (int k = 0; k < m_; ++k) p.v[k] = (double(c[k]) + rng.uniform()) * s.side;
            p.h = height_quantile(cm_.reference, s.lo, s.hi, rng.uniform());
            pts.push_back(std::move(p));
        }
        return cache_.emplace(key, std::move(pts)).first->second;
    }

    CanonicalMap cm_;
    std::uint64_t seed_, stream_;
    HeightRange support_;
    int m_;
    std::unordered_map<std::uint64_t, std::vector<WeightedPoint>> cache_;
};

WeightedPoint to_model(const CanonicalMap& cm, const WeightedPoint& p) {
    WeightedPoint q;
    q.v.resize(p.v.size());
    for (std::size_t k = 0; k < p.v.size(); ++k) q.v[k] = p.v[k] / cm.spatial;
    q.h = (p.h - cm.height_shift) / cm.height_scale;
    return q;
}

double to_reference_height(const CanonicalMap& cm, double h) {
    return cm.height_scale * h + cm.height_shift;
}
double to_model_height(const CanonicalMap& cm, double h) {
    return (h - cm.height_shift) / cm.height_scale;
}

void seeded_permutation(std::vector<WeightedPoint>& pts, std::uint64_t seed, std::uint64_t stream) {
    Rng rng(seed, combine_stream(stream, 0x9E7A11ull));
    for (std::size_t i = pts.size(); i > 1; --i) {
        const std::size_t j = std::min(i - 1, std::size_t(rng.uniform() * double(i)));
        std::swap(pts[i - 1], pts[j]);
    }
}

bool ridge_meets_ball(const std::vector<WeightedPoint>& pts, const std::vector<int>& ridge, double R) {
    if (ridge.size() == 1) return std::abs(pts[ridge[0]].v[0]) <= R;
    return segment_origin_distance(pts[ridge[0]].v, pts[ridge[1]].v) <= R;
}

void finalize(Tessellation& tess, double A, double level) {
    const double R = tess.window.R;
    const auto& cells = tess.cells;
    tess.valid.assign(cells.size(), 0);
    tess.neighbors.assign(cells.size(), std::vector<int>());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        tess.valid[c] = norm2(cells[c].apex.w) <= R * R && cells[c].apex.r <= level;
        tess.neighbors[c].assign(cells[c].vertex_indices.size(), -1);
    }
    tess.empty = cells.empty();
    bool determined = !cells.empty();
    for (const auto& [key, owners] : ridge_map(cells)) {
        if (owners.size() == 2) {
            tess.neighbors[owners[0].cell][owners[0].opposite] = owners[1].cell;
            tess.neighbors[owners[1].cell][owners[1].opposite] = owners[0].cell;
        } else if (owners.size() == 1 && ridge_meets_ball(tess.points, key, R)) {
            determined = false;
        }
    }
    for (const auto& c : cells)
        if (cell_meets_ball(c, R) && !(norm2(c.apex.w) <= A * A && c.apex.r <= level)) determined = false;
    tess.window_determined = determined;
}

std::vector<SimplexCell> safe_cells(const std::vector<WeightedPoint>& pts, int d) {
    if (int(pts.size()) < d) return {};
    try {
        return delaunay_cells(pts);
    } catch (const DegeneracyError&) {
        return {};
    }
}

}  // namespace

void validate(const WindowSpec& w) {
    validate(w.model);
    if (!(w.R >= 1.0) || !std::isfinite(w.R)) throw ParameterError("window radius R must be >= 1");
    if (!(w.epsilon > 0.0 && w.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
}

CanonicalMap canonical_map(const ModelParams& model) {
    validate(model);
    CanonicalMap cm;
    const int d = model.d;
    const double b = model.beta, g = model.gamma;
    switch (model.kind) {
        case ModelKind::Gaussian:
            cm.reference = gaussian_model(d);
            cm.height_shift = 2.0 * std::log(g);
            cm.bounds_apply = true;
            return cm;
        case ModelKind::Beta: {
            if (b <= 0.0) {
                const double lam = std::pow(g, 1.0 / (2 * b + d + 1));
                cm.reference = beta_model(d, b, 1.0);
                cm.spatial = lam;
                cm.height_scale = lam * lam;
                return cm;
            }
            const double lam = std::pow(g / std::sqrt(2 * b), 1.0 / (2 * b + d + 1));
            cm.reference = rescaled_model(ModelKind::Beta, d, b);
            if (model.rescaled) {
                cm.spatial = lam;
                cm.height_scale = lam * lam;
                cm.height_shift = 2 * b * (lam * lam - 1);
            } else {
                cm.spatial = std::sqrt(2 * b) * lam;
                cm.height_scale = 2 * b * lam * lam;
                cm.height_shift = -2 * b;
            }
            cm.bounds_apply = b >= 1.0;
            return cm;
        }
        case ModelKind::BetaPrime: {
            const double lam = std::pow(std::sqrt(2 * b) / g, 1.0 / (2 * b - d - 1));
            cm.reference = rescaled_model(ModelKind::BetaPrime, d, b);
            if (model.rescaled) {
                cm.spatial = lam;
                cm.height_scale = lam * lam;
                cm.height_shift = -2 * b * (lam * lam - 1);
            } else {
                cm.spatial = std::sqrt(2 * b) * lam;
                cm.height_scale = 2 * b * lam * lam;
                cm.height_shift = 2 * b;
            }
            cm.bounds_apply = true;
            return cm;
        }
    }
    return cm;
}

HeightWindow height_window(const ModelParams& model, double A, double epsilon) {
    if (!(A > 0.0)) throw ParameterError("A must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
    const CanonicalMap cm = canonical_map(model);
    const int d = model.d, m = d - 1;
    const double b = model.beta;
    const double Ac = cm.spatial * A;
    const double L = std::log(2.0 / epsilon);   // exp(-x) <= eps/2  <=>  x >= L
    const double ell = -std::log1p(-0.5 * epsilon);  // 1 - exp(-x) <= eps/2  <=>  x <= ell
    const double lsg = log_sqrtpi_gamma(d);
    const double base = 4 * Ac * Ac;
    double Tc = 0, tc = 0;
    switch (model.kind) {
        case ModelKind::Gaussian: {
            const double logK = m * std::log(Ac) - (0.5 * d - 1) * std::log(2.0) - lsg;
            Tc = base + 2 * (std::log(L) - logK);
            tc = 2 * (std::log(ell) - std::log(2.0) + 0.5 * std::log(M_PI) - m * std::log(Ac + 1));
            break;
        }
        case ModelKind::Beta: {
            if (!(b >= 1.0)) throw ParameterError("height window: the sup bound needs beta >= 1 (binding: beta0 >= 1)");
            if (!(b > 1.0)) throw ParameterError("height window: the inf bound needs beta > 1");
            const double logK = m * std::log(Ac) - 0.5 * d * std::log(2.0) - lsg;
            const double x = (std::log(L) - logK) / b;
            Tc = x > 0 ? base + 2 * b * std::expm1(x) : std::nextafter(base, kInf);
            tc = 2 * (std::log(ell) - std::log(2.0) - 0.5 * d * std::log(0.5 * d + 1) + 0.5 * std::log(M_PI) -
                      m * std::log(Ac + 1));
            break;
        }
        case ModelKind::BetaPrime: {
            const double logK = m * std::log(Ac) - 0.5 * d * std::log(2.0 * (d + 1)) - lsg;
            Tc = std::min(base + 2 * (std::log(L) - logK), base + 2 * b);
            const double h = 0.5 * (d + 1), k = b - h;
            const double logC = std::log(2.0) + b * std::log(2 * b) + m * std::log(Ac + 1) -
                                0.5 * std::log(M_PI) - h * std::log(2 * b - d - 1);
            tc = std::min(2 * b - std::exp((logC - std::log(ell)) / k), -1e-12);
            break;
        }
    }
    return {to_model_height(cm, tc), to_model_height(cm, Tc)};
}

StabilizationReport stabilization_report(const ModelParams& model, double R, double epsilon) {
    if (!(R >= 1.0)) throw ParameterError("stabilization radius needs R >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
    const CanonicalMap cm = canonical_map(model);
    const int d = model.d, m = d - 1;
    if (model.kind == ModelKind::Beta && !(cm.bounds_apply))
        throw ParameterError("stabilization radius needs beta >= 1 for the Beta model");
    if (model.kind == ModelKind::BetaPrime && !(model.beta >= 1.5 * (d + 1)))
        throw ParameterError("stabilization radius needs beta >= 3(d+1)/2 for the BetaPrime model");

    StabilizationReport rep;
    const double Rc = std::max(1.0, cm.spatial * R);
    rep.R_reference = Rc;
    const double lsg = log_sqrtpi_gamma(d);
    double logC = 0;  // log of (sqrt(d-1) a)^(d-1)
    switch (model.kind) {
        case ModelKind::Gaussian: logC = (0.5 * d - 1) * std::log(2.0) + lsg; break;
        case ModelKind::Beta: logC = 0.5 * d * std::log(2.0) + lsg; break;
        case ModelKind::BetaPrime: logC = 0.5 * d * std::log(2.0 * (d + 1)) + lsg; break;
    }
    const double A1 = std::exp(logC / m);  // sqrt(d-1) a
    const double a = A1 / std::sqrt(double(m));
    rep.cube_side = a;
    const double count_factor = unit_ball_volume(m) * std::pow(a, -m);
    const double ell = -std::log1p(-0.5 * epsilon);

    auto level_t = [&](double r) {
        switch (model.kind) {
            case ModelKind::Gaussian:
                return 2 * std::log(ell) - 2.0 * m * std::log(Rc + r) - 2.0 * d * std::log(2.0) + std::log(M_PI);
            case ModelKind::Beta:
                return 2 * std::log(ell) - 2.0 * m * std::log(Rc + r) - d * std::log(2.0 * d + 4) + std::log(M_PI);
            case ModelKind::BetaPrime: {
                // Largest t with the inf bound at beta0 = 3(d+1)/2 equal to eps/2.
                const double b0 = 1.5 * (d + 1), h = 0.5 * (d + 1);
                const double logC = std::log(2.0) + b0 * std::log(2 * b0) + m * std::log(Rc + r + 1) -
                                    0.5 * std::log(M_PI) - h * std::log(2 * b0 - d - 1);
                return 2 * b0 - std::exp((logC - std::log(ell)) / (b0 - h));
            }
        }
        return 0.0;
    };
    // Sup bound over a cube of side a at level T; the normalization of a makes
    // the prefactor 1.
    auto p_cube = [&](double T) {
        switch (model.kind) {
            case ModelKind::Gaussian: return growth_bound(BoundId::SupGaussian, {d, A1, T, 0, 0});
            case ModelKind::Beta: return growth_bound(BoundId::SupBeta, {d, A1, T, 1.0, 1.0});
            case ModelKind::BetaPrime: return std::exp(-std::exp(0.5 * T - 2 * A1 * A1));
        }
        return 1.0;
    };
    auto p_low = [&](double r, double t) {
        const double A = Rc + r;
        switch (model.kind) {
            case ModelKind::Gaussian: return growth_bound(BoundId::InfGaussian, {d, A, t, 0, 0});
            case ModelKind::Beta:
                return -std::expm1(-std::exp(std::log(2.0) + 0.5 * d * std::log(0.5 * d + 1) -
                                             0.5 * std::log(M_PI) + m * std::log(A + 1) + 0.5 * t));
            case ModelKind::BetaPrime: {
                const double b0 = 1.5 * (d + 1);
                return growth_bound(BoundId::InfBetaPrime, {d, A, t, b0, b0});
            }
        }
        return 1.0;
    };
    auto p_outside = [&](double r, double t) {
        double sum = 0.0;
        for (int y = 0; y < 100000; ++y) {
            const double rad = Rc + std::sqrt(0.25 * r * r + y + 1) + A1;
            const double term = std::pow(rad, m) * p_cube(t + 0.25 * r * r + y);
            sum += term;
            if (y > 8 && term <= 1e-17 * sum) break;
        }
        return count_factor * sum;
    };

    const double r_start = std::sqrt(2.0 * d);
    for (int step = 0; step < 64 * 20000; ++step) {
        const double r = r_start + step / 64.0;
        const double t = level_t(r);
        const double side = model.kind == ModelKind::Beta ? -4 * t + 16 * A1 * A1 : -4 - 4 * t + 16 * A1 * A1;
        if (!(r * r > side)) continue;
        if (model.kind == ModelKind::BetaPrime && !(t < 0)) continue;
        const double low = p_low(r, t);
        if (!(low <= 0.5 * epsilon * (1 + 1e-12))) continue;
        const double out = p_outside(r, t);
        if (!(out <= 0.5 * epsilon)) continue;
        rep.r_reference = r;
        rep.r = r / cm.spatial;
        rep.level_t = t;
        rep.p_outside = out;
        rep.p_low = low;
        return rep;
    }
    throw ParameterError("stabilization radius search did not converge");
}

double stabilization_radius(const ModelParams& model, double R, double epsilon) {
    return stabilization_report(model, R, epsilon).r;
}

std::vector<WeightedPoint> sample_block_field(const ModelParams& model, const KRegion& region,
                                              std::uint64_t seed, std::uint64_t substream) {
    const CanonicalMap cm = canonical_map(model);
    BlockField field(cm, seed, substream);
    auto pts = field.sample(cm.spatial * region.A, to_reference_height(cm, region.t),
                            std::isinf(region.hmin) ? lower_height_cut(cm.reference,
                                                                       KRegion{cm.spatial * region.A,
                                                                               to_reference_height(cm, region.t)})
                                                    : to_reference_height(cm, region.hmin),
                            kInf);
    for (auto& p : pts) p = to_model(cm, p);
    return pts;
}

double sup_growth_height(const std::vector<WeightedPoint>& points, double A) {
    return sup_growth_impl(points, nullptr, A);
}

double inf_growth_height(const std::vector<WeightedPoint>& points, double A) {
    double best = kInf;
    for (const auto& p : points) {
        const double gap = std::max(0.0, std::sqrt(norm2(p.v)) - A);
        best = std::min(best, gap * gap + p.h);
    }
    return best;
}

bool cell_meets_ball(const SimplexCell& cell, double R) {
    const auto& v = cell.vertices;
    if (v.empty()) return false;
    if (v[0].size() == 1) {
        const double lo = std::min(v[0][0], v[1][0]), hi = std::max(v[0][0], v[1][0]);
        const double gap = lo > 0 ? lo : (hi < 0 ? -hi : 0.0);
        return gap <= R;
    }
    if (v[0].size() != 2) throw ParameterError("cell_meets_ball supports d = 2, 3");
    // Origin inside the triangle?
    auto cross = [](const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; };
    const double s0 = cross({v[1][0] - v[0][0], v[1][1] - v[0][1]}, {-v[0][0], -v[0][1]});
    const double s1 = cross({v[2][0] - v[1][0], v[2][1] - v[1][1]}, {-v[1][0], -v[1][1]});
    const double s2 = cross({v[0][0] - v[2][0], v[0][1] - v[2][1]}, {-v[2][0], -v[2][1]});
    if ((s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0)) return true;
    return std::min({segment_origin_distance(v[0], v[1]), segment_origin_distance(v[1], v[2]),
                     segment_origin_distance(v[2], v[0])}) <= R;
}

Tessellation simulate(const WindowSpec& window, std::uint64_t seed, std::uint64_t substream,
                      const SimOptions& opt) {
    validate(window);
    const ModelParams& model = window.model;
    const int d = model.d;
    if (d < 2 || d > 3) throw ParameterError("simulate supports d = 2 and d = 3");
    const CanonicalMap cm = canonical_map(model);
    const HeightRange supp = height_support(cm.reference);

    Tessellation tess;
    tess.window = window;
    tess.seed = seed;
    tess.substream = substream;
    tess.tail_mass = opt.tail_mass;

    double r = 0.0;
    bool a_posteriori = false;
    if (opt.margin >= 0.0) {
        r = opt.margin;
        tess.margin_source = "override";
    } else {
        try {
            r = stabilization_radius(model, window.R, window.epsilon);
            tess.margin_source = "stabilization_bound";
        } catch (const ParameterError&) {
            r = window.R;
            a_posteriori = true;
            tess.margin_source = "a_posteriori";
        }
    }

    // Starting level: about one point per unit reference volume below it.
    const double lo_search = std::isfinite(supp.lo) ? supp.lo : -400.0;
    double lo = lo_search, hi = std::isfinite(supp.hi) ? supp.hi : 400.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (height_mass(cm.reference, -kInf, mid) < 1.0) lo = mid;
        else hi = mid;
    }
    double start = std::floor(lo);
    if (!(start > supp.lo)) start = 0.5 * (supp.lo + lo);

    BlockField field(cm, seed, substream);
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double A = window.R + r;
        const double Ac = cm.spatial * A;
        double tc = -kInf, Tc = kInf;
        tess.t_window = -kInf;
        tess.T_window = kInf;
        try {
            const HeightWindow hw = height_window(model, A, window.epsilon);
            tess.t_window = hw.t;
            tess.T_window = hw.T;
            tc = to_reference_height(cm, hw.t);
            Tc = to_reference_height(cm, hw.T);
        } catch (const ParameterError&) {
        }

        double level = std::min(start, Tc);
        tess.levels = 0;
        tess.height_cap_reached = false;
        std::vector<WeightedPoint> pts;
        std::vector<SimplexCell> cells;
        double hmin = -kInf;
        while (true) {
            ++tess.levels;
            const double cut = lower_height_cut(cm.reference, KRegion{Ac, level}, opt.tail_mass);
            hmin = std::min(tc, cut);
            auto ref_pts = field.sample(Ac, level, hmin, opt.max_expected_points);
            pts.clear();
            pts.reserve(ref_pts.size());
            for (const auto& p : ref_pts) pts.push_back(to_model(cm, p));
            seeded_permutation(pts, seed, substream);
            cells = safe_cells(pts, d);
            const double sup = pts.empty() ? kInf : sup_growth_impl(pts, &cells, A);
            if (sup <= to_model_height(cm, level)) break;
            if (level >= Tc) {
                tess.height_cap_reached = true;
                break;
            }
            double next = level + 1.0;
            if (next >= supp.hi) next = 0.5 * (level + supp.hi);
            level = std::min(next, Tc);
        }
        tess.points = std::move(pts);
        tess.cells = std::move(cells);
        tess.margin = r;
        tess.sample_region = KRegion{A, to_model_height(cm, level), to_model_height(cm, std::max(hmin, supp.lo))};
        finalize(tess, A, tess.sample_region.t);
        if (!a_posteriori || tess.window_determined) break;
        r *= 2.0;
    }
    return tess;
}

Tessellation tessellate_points(const WindowSpec& window, std::vector<WeightedPoint> points) {
    if (!(window.R > 0.0)) throw ParameterError("window radius must be positive");
    Tessellation tess;
    tess.window = window;
    const int d = points.empty() ? window.model.d : int(points[0].v.size()) + 1;
    tess.points = std::move(points);
    tess.cells = safe_cells(tess.points, d);
    tess.sample_region = KRegion{kInf, kInf, -kInf};
    tess.margin = kInf;
    tess.margin_source = "override";
    finalize(tess, kInf, kInf);
    return tess;
}

std::vector<SkeletonFace> skeleton(const Tessellation& tess) {
    std::vector<SkeletonFace> out;
    const double R = tess.window.R;
    std::set<std::vector<int>> seen;
    for (const auto& c : tess.cells) {
        if (!cell_meets_ball(c, R)) continue;
        const auto& idx = c.vertex_indices;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::vector<int> key;
            for (std::size_t j = 0; j < idx.size(); ++j)
                if (j != k) key.push_back(idx[j]);
            if (!seen.insert(key).second) continue;
            if (key.size() == 1) {
                const Vec& v = tess.points[key[0]].v;
                if (std::abs(v[0]) <= R) out.push_back({key, {v}});
                continue;
            }
            const Vec& p = tess.points[key[0]].v;
            const Vec& q = tess.points[key[1]].v;
            const Vec dir{q[0] - p[0], q[1] - p[1]};
            double s0 = 0.0, s1 = 1.0;
            const bool p_in = norm2(p) <= R * R, q_in = norm2(q) <= R * R;
            if (!p_in || !q_in) {
                const auto xs = circle_crossings(p, dir, R, 0.0, 1.0);
                if (!p_in && !q_in) {
                    if (xs.size() < 2) continue;
                    s0 = std::min(xs[0], xs[1]);
                    s1 = std::max(xs[0], xs[1]);
                } else if (!xs.empty()) {
                    if (!p_in) s0 = xs[0];
                    else s1 = xs[0];
                }
            }
            out.push_back({key, {{p[0] + s0 * dir[0], p[1] + s0 * dir[1]}, {p[0] + s1 * dir[0], p[1] + s1 * dir[1]}}});
        }
    }
    return out;
}

FaceIntensityEstimate empirical_face_intensities(const std::vector<Tessellation>& list) {
    FaceIntensityEstimate est;
    int dims = -1;
    for (const auto& tess : list) {
        if (!tess.window_determined) {
            ++est.skipped;
            continue;
        }
        const int d = int(tess.cells.front().vertex_indices.size());
        if (dims < 0) dims = d;
        if (d != dims) throw ParameterError("mixed dimensions in face intensity estimate");
        const double R = tess.window.R;
        const double vol = unit_ball_volume(d - 1) * std::pow(R, d - 1);
        std::vector<std::set<std::vector<int>>> faces(d);
        for (const auto& c : tess.cells) {
            if (!cell_meets_ball(c, R)) continue;
            const auto& idx = c.vertex_indices;
            for (int mask = 1; mask < (1 << d); ++mask) {
                std::vector<int> f;
                for (int k = 0; k < d; ++k)
                    if (mask & (1 << k)) f.push_back(idx[k]);
                if (norm2(tess.points[f[0]].v) <= R * R) faces[f.size() - 1].insert(f);
            }
        }
        std::vector<double> row(d);
        for (int j = 0; j < d; ++j) row[j] = double(faces[j].size()) / vol;
        est.per_realization.push_back(row);
    }
    est.realizations = est.per_realization.size();
    if (est.realizations == 0) throw ParameterError("no realization with a determined window");
    est.mean.assign(dims, 0.0);
    est.std_error.assign(dims, 0.0);
    const double n = double(est.realizations);
    for (int j = 0; j < dims; ++j) {
        double s = 0, s2 = 0;
        for (const auto& row : est.per_realization) {
            s += row[j];
            s2 += row[j] * row[j];
        }
        est.mean[j] = s / n;
        est.std_error[j] = n > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1)) / n) : 0.0;
    }
    return est;
}

nlohmann::json to_json(const Tessellation& tess) {
    using nlohmann::json;
    const auto& m = tess.window.model;
    auto num = [](double x) -> json {
        if (std::isfinite(x)) return x;
        return x > 0 ? "inf" : "-inf";
    };
    json j;
    j["format"] = "ptess-tessellation";
    j["version"] = 1;
    j["model"] = {{"kind", to_string(m.kind)}, {"beta", m.beta}, {"gamma", m.gamma}, {"d", m.d},
                  {"rescaled", m.rescaled}};
    j["window"] = {{"R", tess.window.R}, {"epsilon", tess.window.epsilon}};
    j["seed"] = tess.seed;
    j["substream"] = tess.substream;
    j["margin"] = num(tess.margin);
    j["margin_source"] = tess.margin_source;
    j["height_window"] = {{"t", num(tess.t_window)}, {"T", num(tess.T_window)}};
    j["sample_region"] = {{"A", num(tess.sample_region.A)}, {"level", num(tess.sample_region.t)},
                          {"hmin", num(tess.sample_region.hmin)}};
    j["discarded_tail_mass"] = tess.tail_mass;
    j["levels"] = tess.levels;
    j["flags"] = {{"empty", tess.empty}, {"window_determined", tess.window_determined},
                  {"height_cap_reached", tess.height_cap_reached}};
    json pts = json::array();
    for (const auto& p : tess.points) {
        json row = p.v;
        row.push_back(p.h);
        pts.push_back(row);
    }
    j["points"] = pts;
    json cells = json::array();
    for (std::size_t c = 0; c < tess.cells.size(); ++c) {
        const auto& cell = tess.cells[c];
        cells.push_back({{"vertices", cell.vertex_indices},
                         {"apex", {{"w", cell.apex.w}, {"r", cell.apex.r}}},
                         {"volume", cell.volume},
                         {"valid", bool(tess.valid[c])},
                         {"neighbors", tess.neighbors[c]}});
    }
    j["cells"] = cells;
    return j;
}

std::string skeleton_svg(const Tessellation& tess) {
    if (tess.window.model.d != 3) throw ParameterError("SVG export needs d = 3");
    const double R = tess.window.R;
    std::ostringstream os;
    os.precision(10);
    const double sw = R / 250.0;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << -R << ' ' << -R << ' '
       << 2 * R << ' ' << 2 * R << "\" width=\"600\" height=\"600\">\n"
       << "<circle cx=\"0\" cy=\"0\" r=\"" << R << "\" fill=\"white\" stroke=\"gray\" stroke-width=\"" << sw
       << "\"/>\n<g stroke=\"black\" stroke-width=\"" << sw << "\" stroke-linecap=\"round\">\n";
    for (const auto& f : skeleton(tess)) {
        // SVG y grows downwards; flip to keep the usual orientation.
        os << "<line x1=\"" << f.points[0][0] << "\" y1=\"" << -f.points[0][1] << "\" x2=\"" << f.points[1][0]
           << "\" y2=\"" << -f.points[1][1] << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace ptess
