#pragma once
// Windowed simulation of the tessellations: truncation levels and spatial
// margin from the height bounds, coupled sampling, triangulation, validity
// flags, skeleta and face counts.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptess/height_bounds.hpp"
#include "ptess/hull_geometry.hpp"
#include "ptess/point_processes.hpp"

namespace ptess {

struct WindowSpec {
    double R = 1.0;        // target window B_R, R >= 1
    double epsilon = 0.1;  // failure budget in (0,1)
    ModelParams model;
};

void validate(const WindowSpec& window);

// Affine change of coordinates (v, h) -> (spatial * v, height_scale * h + height_shift)
// carrying the model onto a reference process: the Gaussian process with
// gamma = 1 or a rescaled Beta/BetaPrime process with gamma = sqrt(2 beta).
// height_scale == spatial^2, so power distances scale uniformly.
struct CanonicalMap {
    ModelParams reference;
    double spatial = 1.0;
    double height_scale = 1.0;
    double height_shift = 0.0;
    bool bounds_apply = false;  // reference process is covered by the height bounds
};

CanonicalMap canonical_map(const ModelParams& model);

struct HeightWindow {
    double t;  // lower level: P(inf over B_A < t) <= eps/2
    double T;  // upper level: P(sup over B_A > T) <= eps/2
};

// Inverts the sup/inf bounds over B_A for the model. Throws ParameterError
// naming the binding constraint when the bounds do not cover the model.
HeightWindow height_window(const ModelParams& model, double A, double epsilon);

// Audit record of the stabilization-radius computation in reference coordinates.
struct StabilizationReport {
    double r = 0.0;            // margin in model coordinates
    double r_reference = 0.0;  // margin in reference coordinates
    double R_reference = 0.0;
    double cube_side = 0.0;    // side a of the counting cubes
    double level_t = 0.0;      // lower level used for the inf event
    double p_outside = 0.0;    // bound on P(window influenced from outside | heights above t)
    double p_low = 0.0;        // bound on P(heights dip below t)
};

StabilizationReport stabilization_report(const ModelParams& model, double R, double epsilon);

// Conservative margin r such that the tessellation in B_R is determined by
// particles over B_{R+r} with probability at least 1 - epsilon.
double stabilization_radius(const ModelParams& model, double R, double epsilon);

// Coupled sample of the model on K(A, t) with heights >= hmin. Points are a pure
// function of (seed, substream) and the location: two regions sampled with the
// same seed agree on their intersection.
std::vector<WeightedPoint> sample_block_field(const ModelParams& model, const KRegion& region,
                                              std::uint64_t seed, std::uint64_t substream = 0);

// sup / inf over w in B_A of the growth-boundary height min_x pow(w, x);
// +inf for an empty point list.
double sup_growth_height(const std::vector<WeightedPoint>& points, double A);
double inf_growth_height(const std::vector<WeightedPoint>& points, double A);

struct SimOptions {
    double margin = -1.0;               // spatial margin override; < 0 uses stabilization_radius
    double max_expected_points = 5e6;   // sampling budget per level
    double tail_mass = 1e-12;           // intensity discarded below the lower height cut
};

struct Tessellation {
    WindowSpec window;
    std::vector<WeightedPoint> points;  // index order is a seeded random permutation
    std::vector<SimplexCell> cells;
    std::vector<char> valid;            // apex in B_R and apex height within the sampled level
    std::vector<std::vector<int>> neighbors;  // per cell, across the ridge opposite vertex k; -1 if none
    KRegion sample_region;              // K(R + margin, level) with heights >= hmin
    double margin = 0.0;
    std::string margin_source;          // "stabilization_bound", "override" or "a_posteriori"
    double t_window = -kInf, T_window = kInf;
    double tail_mass = 0.0;
    int levels = 0;                     // number of sampled height levels
    std::uint64_t seed = 0, substream = 0;
    bool empty = true;
    bool height_cap_reached = false;
    // Every cell meeting B_R has its apex inside the sampled region and no hull
    // boundary ridge meets B_R: the tessellation inside B_R is exact.
    bool window_determined = false;
};

Tessellation simulate(const WindowSpec& window, std::uint64_t seed, std::uint64_t substream = 0,
                      const SimOptions& options = {});

// Builds a tessellation record from given points (no sampling): all cells, with
// validity and determinism computed against B_R and an unbounded sample region.
Tessellation tessellate_points(const WindowSpec& window, std::vector<WeightedPoint> points);

bool cell_meets_ball(const SimplexCell& cell, double R);

struct SkeletonFace {
    std::vector<int> vertex_indices;  // the d-1 vertices spanning the face
    std::vector<Vec> points;          // d=2: the point; d=3: clipped segment endpoints
};

// Boundary faces of cells meeting B_R, deduplicated and clipped to B_R (d = 2, 3).
std::vector<SkeletonFace> skeleton(const Tessellation& tess);

struct FaceIntensityEstimate {
    std::vector<double> mean;       // gamma_0 .. gamma_{d-1}
    std::vector<double> std_error;
    std::vector<std::vector<double>> per_realization;
    std::size_t realizations = 0;
    std::size_t skipped = 0;        // realizations whose window was not determined
};

// j-faces whose lowest-index vertex lies in B_R, per unit volume.
FaceIntensityEstimate empirical_face_intensities(const std::vector<Tessellation>& tessellations);

nlohmann::json to_json(const Tessellation& tess);
std::string skeleton_svg(const Tessellation& tess);

}  // namespace ptess
