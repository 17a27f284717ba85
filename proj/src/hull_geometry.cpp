#include "ptess/hull_geometry.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "predicates.hpp"

namespace ptess {

double power(const Vec& w, const WeightedPoint& p) {
    if (w.size() != p.v.size()) throw ParameterError("dimension mismatch in power");
    double s = p.h;
    for (std::size_t k = 0; k < w.size(); ++k) s += (w[k] - p.v[k]) * (w[k] - p.v[k]);
    return s;
}

Vec lift(const WeightedPoint& p) {
    Vec x = p.v;
    double n2 = 0.0;
    for (double c : p.v) n2 += c * c;
    x.push_back(n2 + p.h);
    return x;
}

namespace {

// Solves A x = b (n x n, row-major) with partial pivoting; false if singular.
bool solve_linear(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& x,
                  double rel_eps = 1e-13) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return false;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (std::abs(a[piv * n + c]) <= rel_eps * scale) return false;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return true;
}

bool solve_exact(std::vector<mpq_class> a, std::vector<mpq_class> b, int n,
                 std::vector<mpq_class>& x) {
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (sgn(a[r * n + c]) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return false;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (int r = c + 1; r < n; ++r) {
            if (sgn(a[r * n + c]) == 0) continue;
            const mpq_class f = a[r * n + c] / a[c * n + c];
            for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0);
    for (int r = n - 1; r >= 0; --r) {
        mpq_class s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return true;
}

double apex_residual(const std::vector<WeightedPoint>& pts, const Apex& a) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, std::abs(p.h - (a.r - power(a.w, {p.v, 0.0}))));
    return worst;
}

constexpr int kMaxDim = 8;

struct Facet {
    std::array<int, kMaxDim> v{};
    std::array<int, kMaxDim> nb{};
    std::vector<int> conflicts;
    bool alive = true;
};

struct RidgeKey {
    std::array<int, kMaxDim> v{};
    bool operator==(const RidgeKey& o) const { return v == o.v; }
};
struct RidgeHash {
    std::size_t operator()(const RidgeKey& k) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : k.v) h = (h ^ std::size_t(x + 1)) * 1099511628211ull;
        return h;
    }
};

// Randomized incremental convex hull in R^d with conflict lists; returns the
// facets whose outer normal has a negative last component.
std::vector<std::vector<int>> lower_hull_impl(const detail::LiftedPoints& P, bool require_full_rank) {
    const int n = P.size();
    const int d = P.dim();
    if (d < 2 || d >= kMaxDim) throw ParameterError("lower hull supports 2 <= d < 8");
    if (n < d + 1) throw DegeneracyError("lower hull needs at least d+1 points");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(0x5EEDull ^ std::uint64_t(n));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    // Initial simplex by greedy Gram-Schmidt on rounded coordinates.
    std::vector<int> simplex{order[0]};
    std::vector<std::vector<double>> basis;
    auto residual = [&](int i, std::vector<double>* out) {
        std::vector<double> r(d);
        for (int k = 0; k < d; ++k) r[k] = P.coord(i, k) - P.coord(simplex[0], k);
        for (const auto& b : basis) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += r[k] * b[k];
            for (int k = 0; k < d; ++k) r[k] -= dot * b[k];
        }
        double n2 = 0.0;
        for (double x : r) n2 += x * x;
        if (out) *out = r;
        return n2;
    };
    for (int step = 1; step <= d; ++step) {
        int best = -1;
        double best_n2 = 0.0;
        for (int i : order) {
            if (std::find(simplex.begin(), simplex.end(), i) != simplex.end()) continue;
            const double n2 = residual(i, nullptr);
            if (n2 > best_n2) {
                best_n2 = n2;
                best = i;
            }
        }
        if (step == d) {
            std::vector<int> idx = simplex;
            idx.push_back(best);
            if (require_full_rank) {
                bool full = best >= 0 && P.orient(idx.data(), false) != 0;
                for (int i = 0; i < n && !full; ++i) {
                    idx.back() = i;
                    full = P.orient(idx.data(), false) != 0;
                }
                if (!full) throw DegeneracyError("points lie on one hyperplane");
                idx.back() = best;
            }
            if (best < 0 || P.orient(idx.data()) == 0) {
                best = -1;
                for (int i : order) {
                    if (std::find(simplex.begin(), simplex.end(), i) != simplex.end()) continue;
                    idx.back() = i;
                    if (P.orient(idx.data()) != 0) {
                        best = i;
                        break;
                    }
                }
            }
            if (best < 0) throw DegeneracyError("points are affinely dependent");
            simplex.push_back(best);
            break;
        }
        if (best < 0) throw DegeneracyError("points are affinely dependent");
        std::vector<double> r;
        const double n2 = residual(best, &r);
        for (double& x : r) x /= std::sqrt(n2);
        basis.push_back(r);
        simplex.push_back(best);
    }

    std::vector<Facet> facets;
    facets.reserve(std::size_t(8) * n);
    std::vector<int> conflict_of(n, -1);
    std::array<int, kMaxDim + 1> idx{};

    auto orient_facet = [&](const Facet& f, int p) {
        for (int k = 0; k < d; ++k) idx[k] = f.v[k];
        idx[d] = p;
        return P.orient(idx.data());
    };

    for (int k = 0; k <= d; ++k) {
        Facet f;
        int pos = 0;
        for (int j = 0; j <= d; ++j)
            if (j != k) {
                f.v[pos] = simplex[j];
                f.nb[pos] = j;  // opposite facet across vertex simplex[j] is facet j
                ++pos;
            }
        if (orient_facet(f, simplex[k]) > 0) {
            std::swap(f.v[0], f.v[1]);
            std::swap(f.nb[0], f.nb[1]);
        }
        facets.push_back(std::move(f));
    }

    std::vector<char> in_simplex(n, 0);
    for (int s : simplex) in_simplex[s] = 1;
    for (int i : order) {
        if (in_simplex[i]) continue;
        for (int k = 0; k <= d; ++k)
            if (orient_facet(facets[k], i) > 0) {
                facets[k].conflicts.push_back(i);
                conflict_of[i] = k;
                break;
            }
    }

    std::vector<int> status;  // per facet: stamp-coded visibility
    std::vector<int> stamp;
    int cur = 0;
    std::vector<int> visible, stack;
    std::vector<std::pair<int, int>> horizon;
    std::unordered_map<RidgeKey, std::pair<int, int>, RidgeHash> open_ridges;

    for (int p : order) {
        const int f0 = conflict_of[p];
        if (f0 < 0) continue;
        ++cur;
        stamp.resize(facets.size(), 0);
        status.resize(facets.size(), 0);
        visible.clear();
        horizon.clear();
        stack.assign(1, f0);
        stamp[f0] = cur;
        status[f0] = 1;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            visible.push_back(f);
            for (int j = 0; j < d; ++j) {
                const int g = facets[f].nb[j];
                if (stamp[g] != cur) {
                    stamp[g] = cur;
                    status[g] = orient_facet(facets[g], p) > 0 ? 1 : 2;
                    if (status[g] == 1) stack.push_back(g);
                }
                if (status[g] == 2) horizon.emplace_back(f, j);
            }
        }

        const int first_new = int(facets.size());
        open_ridges.clear();
        for (auto [f, j] : horizon) {
            Facet g;
            g.v = facets[f].v;
            g.v[j] = p;
            const int h = facets[f].nb[j];
            g.nb[j] = h;
            const int gid = int(facets.size());
            for (int k = 0; k < d; ++k)
                if (facets[h].nb[k] == f) facets[h].nb[k] = gid;
            facets.push_back(std::move(g));
            for (int k = 0; k < d; ++k) {
                if (k == j) continue;
                RidgeKey key;
                key.v.fill(-1);
                int pos = 0;
                for (int t = 0; t < d; ++t)
                    if (t != k) key.v[pos++] = facets[gid].v[t];
                std::sort(key.v.begin(), key.v.begin() + pos);
                auto it = open_ridges.find(key);
                if (it == open_ridges.end()) {
                    open_ridges.emplace(key, std::make_pair(gid, k));
                } else {
                    facets[gid].nb[k] = it->second.first;
                    facets[it->second.first].nb[it->second.second] = gid;
                    open_ridges.erase(it);
                }
            }
        }
        if (!open_ridges.empty()) throw DegeneracyError("hull update left an open ridge");

        conflict_of[p] = -1;
        const int last_new = int(facets.size());
        for (int f : visible) {
            facets[f].alive = false;
            for (int q : facets[f].conflicts) {
                if (q == p) continue;
                conflict_of[q] = -1;
                for (int g = first_new; g < last_new; ++g)
                    if (orient_facet(facets[g], q) > 0) {
                        facets[g].conflicts.push_back(q);
                        conflict_of[q] = g;
                        break;
                    }
            }
            std::vector<int>().swap(facets[f].conflicts);
        }
    }

    std::vector<std::vector<int>> out;
    for (const auto& f : facets) {
        if (!f.alive) continue;
        // Outer normal points down exactly when the point straight above a
        // facet vertex lies inside, i.e. the spatial orientation is positive.
        if (P.spatial_orient(f.v.data()) > 0) out.emplace_back(f.v.begin(), f.v.begin() + d);
    }
    return out;
}

}  // namespace

std::vector<std::vector<int>> lower_hull(const std::vector<Vec>& lifted) {
    if (lifted.empty()) throw DegeneracyError("lower hull of an empty set");
    const std::size_t d = lifted[0].size();
    for (const auto& p : lifted)
        if (p.size() != d) throw ParameterError("inconsistent point dimensions");
    return lower_hull_impl(detail::LiftedPoints(lifted), true);
}

std::vector<std::vector<int>> lower_hull_weighted(const std::vector<WeightedPoint>& points) {
    if (points.empty()) throw DegeneracyError("lower hull of an empty set");
    const std::size_t m = points[0].v.size();
    for (const auto& p : points)
        if (p.v.size() != m) throw ParameterError("inconsistent point dimensions");
    return lower_hull_impl(detail::LiftedPoints(points), false);
}

Apex paraboloid_through(const std::vector<WeightedPoint>& pts) {
    if (pts.empty()) throw ParameterError("paraboloid_through needs points");
    const int m = int(pts[0].v.size());
    if (int(pts.size()) != m + 1) throw ParameterError("paraboloid_through needs exactly d points");
    // With u = w - v_0 and e_i = v_i - v_0: 2 <e_i, u> = h_i - h_0 + |e_i|^2.
    std::vector<double> a(std::size_t(m) * m), b(m), u;
    for (int i = 1; i <= m; ++i) {
        double e2 = 0.0;
        for (int k = 0; k < m; ++k) {
            const double e = pts[i].v[k] - pts[0].v[k];
            a[(i - 1) * m + k] = 2.0 * e;
            e2 += e * e;
        }
        b[i - 1] = pts[i].h - pts[0].h + e2;
    }
    Apex apex;
    apex.w.assign(m, 0.0);
    const bool ok = solve_linear(a, b, m, u);
    if (ok) {
        double u2 = 0.0;
        for (int k = 0; k < m; ++k) {
            apex.w[k] = pts[0].v[k] + u[k];
            u2 += u[k] * u[k];
        }
        apex.r = pts[0].h + u2;
        if (apex_residual(pts, apex) < 1e-9) return apex;
    }
    // Exact fallback on the same system.
    std::vector<mpq_class> ea(std::size_t(m) * m), eb(m), eu;
    for (int i = 1; i <= m; ++i) {
        mpq_class e2 = 0;
        for (int k = 0; k < m; ++k) {
            const mpq_class e = mpq_class(pts[i].v[k]) - mpq_class(pts[0].v[k]);
            ea[(i - 1) * m + k] = 2 * e;
            e2 += e * e;
        }
        eb[i - 1] = mpq_class(pts[i].h) - mpq_class(pts[0].h) + e2;
    }
    if (!solve_exact(ea, eb, m, eu)) throw DegeneracyError("spatial coordinates are affinely dependent");
    mpq_class u2 = 0;
    for (int k = 0; k < m; ++k) {
        apex.w[k] = mpq_class(mpq_class(pts[0].v[k]) + eu[k]).get_d();
        u2 += eu[k] * eu[k];
    }
    apex.r = mpq_class(mpq_class(pts[0].h) + u2).get_d();
    return apex;
}

double simplex_volume(const std::vector<Vec>& vertices) {
    if (vertices.empty()) return 0.0;
    const int m = int(vertices[0].size());
    if (int(vertices.size()) != m + 1) throw ParameterError("simplex_volume needs d points in R^{d-1}");
    std::vector<double> a(std::size_t(m) * m);
    for (int i = 1; i <= m; ++i)
        for (int k = 0; k < m; ++k) a[(i - 1) * m + k] = vertices[i][k] - vertices[0][k];
    double det = detail::det_double(a, m);
    // Divide by (m)! factor by factor to keep intermediate values moderate.
    for (int j = 2; j <= m; ++j) det /= j;
    return std::abs(det);
}

std::vector<SimplexCell> delaunay_cells(const std::vector<WeightedPoint>& points) {
    if (points.empty()) throw ParameterError("delaunay_cells needs points");
    const int m = int(points[0].v.size());
    const int d = m + 1;
    if (int(points.size()) < d) throw ParameterError("delaunay_cells needs at least d points");
    std::vector<std::vector<int>> facets;
    if (int(points.size()) == d) {
        std::vector<int> all(d);
        std::iota(all.begin(), all.end(), 0);
        std::vector<Vec> vs;
        for (const auto& p : points) vs.push_back(p.v);
        if (simplex_volume(vs) == 0.0) {
            detail::LiftedPoints lp(points);
            if (lp.spatial_orient(all.data()) == 0) throw DegeneracyError("spatial coordinates are affinely dependent");
        }
        facets.push_back(all);
    } else {
        facets = lower_hull_weighted(points);
        if (facets.empty()) throw DegeneracyError("spatial coordinates are affinely dependent");
    }
    std::vector<SimplexCell> cells;
    cells.reserve(facets.size());
    for (auto& f : facets) {
        std::sort(f.begin(), f.end());
        SimplexCell c;
        c.vertex_indices = f;
        std::vector<WeightedPoint> sub;
        for (int i : f) {
            c.vertices.push_back(points[i].v);
            c.heights.push_back(points[i].h);
            sub.push_back(points[i]);
        }
        c.apex = paraboloid_through(sub);
        c.volume = simplex_volume(c.vertices);
        cells.push_back(std::move(c));
    }
    std::sort(cells.begin(), cells.end(), [](const SimplexCell& a, const SimplexCell& b) {
        return a.vertex_indices < b.vertex_indices;
    });
    return cells;
}

bool empty_paraboloid(const SimplexCell& cell, const std::vector<WeightedPoint>& points,
                      double tol) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::binary_search(cell.vertex_indices.begin(), cell.vertex_indices.end(), int(i)))
            continue;
        if (power(cell.apex.w, points[i]) < cell.apex.r - tol) return false;
    }
    return true;
}

double growth_boundary_height(const Vec& w, const std::vector<WeightedPoint>& points) {
    if (points.empty()) throw ParameterError("growth_boundary_height needs points");
    double best = kInf;
    for (const auto& p : points) best = std::min(best, power(w, p));
    return best;
}

namespace {

// Enumerates vertices of {x : n_k . x <= b_k} in R^m by brute force over
// m-subsets of constraints.
std::vector<Vec> polytope_vertices(const std::vector<Halfspace>& hs, int m, double tol) {
    std::vector<Vec> verts;
    const int K = int(hs.size());
    std::vector<int> pick(m);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            std::vector<double> a(std::size_t(m) * m), b(m), x;
            for (int i = 0; i < m; ++i) {
                for (int k = 0; k < m; ++k) a[i * m + k] = hs[pick[i]].normal[k];
                b[i] = hs[pick[i]].offset;
            }
            if (!solve_linear(a, b, m, x, 1e-12)) return;
            for (const auto& h : hs) {
                double s = 0.0, scale = std::abs(h.offset);
                for (int k = 0; k < m; ++k) {
                    s += h.normal[k] * x[k];
                    scale = std::max(scale, std::abs(h.normal[k] * x[k]));
                }
                if (s > h.offset + tol * (1.0 + scale)) return;
            }
            for (const auto& v : verts) {
                double dist = 0.0;
                for (int k = 0; k < m; ++k) dist = std::max(dist, std::abs(v[k] - x[k]));
                if (dist <= tol * (1.0 + std::abs(x[0]))) return;
            }
            verts.push_back(x);
            return;
        }
        for (int i = start; i <= K - (m - depth); ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return verts;
}

int affine_rank(const std::vector<Vec>& pts, int m, double tol) {
    if (pts.empty()) return -1;
    std::vector<Vec> basis;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Vec r(m);
        for (int k = 0; k < m; ++k) r[k] = pts[i][k] - pts[0][k];
        for (const auto& b : basis) {
            double dot = 0.0;
            for (int k = 0; k < m; ++k) dot += r[k] * b[k];
            for (int k = 0; k < m; ++k) r[k] -= dot * b[k];
        }
        double n = 0.0;
        for (double x : r) n += x * x;
        n = std::sqrt(n);
        if (n > tol) {
            for (double& x : r) x /= n;
            basis.push_back(r);
        }
    }
    return int(basis.size());
}

}  // namespace

LaguerreCell laguerre_cell(int index, const std::vector<WeightedPoint>& points,
                           const BoundingBox& box) {
    if (index < 0 || index >= int(points.size())) throw ParameterError("laguerre_cell index out of range");
    const WeightedPoint& s = points[index];
    const int m = int(s.v.size());
    if (int(box.lo.size()) != m || int(box.hi.size()) != m) throw ParameterError("box dimension mismatch");
    LaguerreCell cell;
    cell.site = s;
    for (int j = 0; j < int(points.size()); ++j) {
        if (j == index) continue;
        const auto& o = points[j];
        Vec normal(m);
        double e2 = 0.0, ve = 0.0;
        bool zero = true;
        for (int k = 0; k < m; ++k) {
            const double e = o.v[k] - s.v[k];
            normal[k] = 2.0 * e;
            e2 += e * e;
            ve += s.v[k] * e;
            zero = zero && e == 0.0;
        }
        const double offset = e2 + o.h - s.h + 2.0 * ve;
        if (zero) {
            // Coincident sites: the lower height wins; exact ties go to the higher index.
            if (o.h > s.h) continue;
            if (o.h < s.h || j > index) cell.empty = true;
            continue;
        }
        cell.halfspaces.push_back({normal, offset});
    }
    for (int k = 0; k < m; ++k) {
        Vec up(m, 0.0), down(m, 0.0);
        up[k] = 1.0;
        down[k] = -1.0;
        cell.halfspaces.push_back({up, box.hi[k]});
        cell.halfspaces.push_back({down, -box.lo[k]});
    }
    if (cell.empty) return cell;
    if (m > 3) return cell;  // vertex enumeration only for d <= 4
    double scale = 1.0;
    for (int k = 0; k < m; ++k) scale = std::max({scale, std::abs(box.lo[k]), std::abs(box.hi[k])});
    cell.vertices = polytope_vertices(cell.halfspaces, m, 1e-9);
    cell.empty = affine_rank(cell.vertices, m, 1e-9 * scale) < m;
    if (cell.empty) cell.vertices.clear();
    return cell;
}

DualityReport dual_consistency_check(const std::vector<WeightedPoint>& points) {
    DualityReport rep;
    auto fail = [&](const std::string& why) {
        rep.ok = false;
        if (!rep.detail.empty()) rep.detail += "; ";
        rep.detail += why;
    };
    if (points.empty()) {
        fail("no points");
        return rep;
    }
    const int m = int(points[0].v.size());
    if (m + 1 > 3) {
        fail("dual check supports d <= 3 only");
        return rep;
    }
    std::vector<SimplexCell> cells;
    try {
        cells = delaunay_cells(points);
    } catch (const std::exception& e) {
        fail(std::string("triangulation failed: ") + e.what());
        return rep;
    }
    BoundingBox box{Vec(m, kInf), Vec(m, -kInf)};
    auto grow = [&](const Vec& x) {
        for (int k = 0; k < m; ++k) {
            box.lo[k] = std::min(box.lo[k], x[k]);
            box.hi[k] = std::max(box.hi[k], x[k]);
        }
    };
    for (const auto& p : points) grow(p.v);
    for (const auto& c : cells) grow(c.apex.w);
    double span = 1.0;
    for (int k = 0; k < m; ++k) span = std::max(span, box.hi[k] - box.lo[k]);
    for (int k = 0; k < m; ++k) {
        box.lo[k] -= 0.5 * span;
        box.hi[k] += 0.5 * span;
    }
    const double tol = 1e-7 * (1.0 + span * span);

    std::vector<LaguerreCell> lag;
    for (int i = 0; i < int(points.size()); ++i) lag.push_back(laguerre_cell(i, points, box));

    std::set<int> in_cells;
    for (const auto& c : cells) {
        for (int i : c.vertex_indices) {
            in_cells.insert(i);
            if (lag[i].empty) fail("cell vertex " + std::to_string(i) + " has an empty Laguerre cell");
            const double pi = power(c.apex.w, points[i]);
            for (int j = 0; j < int(points.size()); ++j)
                if (power(c.apex.w, points[j]) < pi - tol) {
                    fail("apex of a cell is not in the Laguerre cell of vertex " + std::to_string(i));
                    break;
                }
        }
    }
    for (int i = 0; i < int(points.size()); ++i)
        if (!lag[i].empty && !in_cells.count(i))
            fail("site " + std::to_string(i) + " has a Laguerre cell but no Delaunay cell");

    for (int i = 0; i < int(points.size()); ++i) {
        for (const auto& v : lag[i].vertices) {
            bool on_box = false;
            for (int k = 0; k < m; ++k)
                on_box = on_box || std::abs(v[k] - box.lo[k]) < tol || std::abs(v[k] - box.hi[k]) < tol;
            if (on_box) continue;
            bool matched = false;
            for (const auto& c : cells) {
                double dist = 0.0;
                for (int k = 0; k < m; ++k) dist = std::max(dist, std::abs(c.apex.w[k] - v[k]));
                if (dist < 1e-6 * (1.0 + span)) {
                    matched = true;
                    break;
                }
            }
            if (!matched) fail("Laguerre vertex of site " + std::to_string(i) + " has no dual cell");
        }
    }
    return rep;
}

}  // namespace ptess
