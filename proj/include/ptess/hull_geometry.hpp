#pragma once
// Power distances, paraboloid apexes, lower hulls of lifted points, weighted
// Delaunay cells and Laguerre cells.

#include <string>
#include <vector>

#include "ptess/point_processes.hpp"

namespace ptess {

struct Apex {
    Vec w;         // spatial coordinate (generalized centre)
    double r = 0;  // height of the apex
};

struct SimplexCell {
    std::vector<int> vertex_indices;  // ascending
    std::vector<Vec> vertices;
    std::vector<double> heights;
    Apex apex;
    double volume = 0;
};

struct Halfspace {
    Vec normal;     // constraint normal . w <= offset
    double offset;
};

struct BoundingBox {
    Vec lo, hi;
};

struct LaguerreCell {
    WeightedPoint site;
    std::vector<Halfspace> halfspaces;  // pow comparisons then box faces
    std::vector<Vec> vertices;          // only for d <= 4
    bool empty = false;
};

double power(const Vec& w, const WeightedPoint& p);

// (v, |v|^2 + h)
Vec lift(const WeightedPoint& p);

// Apex of the downward paraboloid h = r - |v - w|^2 through d points.
Apex paraboloid_through(const std::vector<WeightedPoint>& points);

// Facets (d indices each) of the lower convex hull of points in R^d. Each facet
// is ordered so that its outer normal points downward. Ties are broken by
// symbolic perturbation of the last coordinate in index order.
std::vector<std::vector<int>> lower_hull(const std::vector<Vec>& lifted);

// Same hull on weighted points, lifting exactly inside the predicates.
std::vector<std::vector<int>> lower_hull_weighted(const std::vector<WeightedPoint>& points);

std::vector<SimplexCell> delaunay_cells(const std::vector<WeightedPoint>& points);

// True when no point lies strictly inside the cell's downward paraboloid region
// (up to `tol` in power).
bool empty_paraboloid(const SimplexCell& cell, const std::vector<WeightedPoint>& points,
                      double tol = 1e-9);

// Height of the boundary of the paraboloid growth process above w (min power).
double growth_boundary_height(const Vec& w, const std::vector<WeightedPoint>& points);

LaguerreCell laguerre_cell(int index, const std::vector<WeightedPoint>& points,
                           const BoundingBox& box);

// Volume of the simplex spanned by d points in R^{d-1}.
double simplex_volume(const std::vector<Vec>& vertices);

struct DualityReport {
    bool ok = true;
    std::string detail;
    explicit operator bool() const { return ok; }
};

// Checks that Delaunay cells and Laguerre vertices are dual to each other (d <= 3).
DualityReport dual_consistency_check(const std::vector<WeightedPoint>& points);

}  // namespace ptess
