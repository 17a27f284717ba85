#pragma once
// Poisson processes on R^{d-1} x R with Beta, BetaPrime and Gaussian height laws.

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "ptess/numerics.hpp"
#include "ptess/rng.hpp"

namespace ptess {

using Vec = std::vector<double>;

struct WeightedPoint {
    Vec v;         // spatial coordinate in R^{d-1}
    double h = 0;  // height, also the Laguerre weight
};

enum class ModelKind { Beta, BetaPrime, Gaussian };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// d is the lift dimension; points live in R^{d-1} x R. With `rescaled` set the
// process is the image of the Beta/BetaPrime process under the map
// (v,h) -> (sqrt(2 beta) v, 2 beta (h -+ 1)), and all coordinates, regions and
// densities refer to the image space.
struct ModelParams {
    ModelKind kind = ModelKind::Gaussian;
    double beta = 0.0;
    double gamma = 1.0;
    int d = 2;
    bool rescaled = false;
};

ModelParams gaussian_model(int d, double gamma = 1.0);
ModelParams beta_model(int d, double beta, double gamma = 1.0);
ModelParams beta_prime_model(int d, double beta, double gamma = 1.0);
// Rescaled Beta/BetaPrime process with the default intensity gamma = sqrt(2 beta).
ModelParams rescaled_model(ModelKind kind, int d, double beta);
ModelParams rescaled_model(ModelKind kind, int d, double beta, double gamma);

void validate(const ModelParams& model);

// Normalizing constants of the Beta and BetaPrime height densities.
double beta_constant(int d, double beta);
double beta_prime_constant(int d, double beta);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// B_A x [hmin, hmax], ball centred at the origin.
struct Box {
    double A = 1.0;
    double hmin = -kInf;
    double hmax = 0.0;
};

// {(v,h) : |v - w|^2 + h <= t}
struct PowBall {
    Vec w;
    double t = 0.0;
};

// {(v,h) : dist(v, B_A)^2 + h <= t, h >= hmin}; hmin = -inf means the whole set.
struct KRegion {
    double A = 1.0;
    double t = 0.0;
    double hmin = -kInf;
};

using Region = std::variant<Box, PowBall, KRegion>;

bool region_contains(const Region& region, const WeightedPoint& p);

// Height support [lo, hi] of the model in its own coordinates.
struct HeightRange {
    double lo, hi;
};
HeightRange height_support(const ModelParams& model);

double intensity_density(const ModelParams& model, const WeightedPoint& p);

// Intensity of (unit spatial volume) x [a, b]; +inf when the slab reaches a
// non-integrable edge of the support.
double height_mass(const ModelParams& model, double a, double b);

// Inverse of the normalized height CDF restricted to [a, b]; u in (0,1).
double height_quantile(const ModelParams& model, double a, double b, double u);

// Expected number of points in the region; +inf signals an infinite measure.
double intensity_measure(const ModelParams& model, const Region& region);

// Height below which the region's remaining intensity is below tail_mass.
// Returns the support edge when that is finite.
double lower_height_cut(const ModelParams& model, const KRegion& region,
                        double tail_mass = 1e-12);

std::vector<WeightedPoint> sample_poisson(const ModelParams& model, const Region& region,
                                          std::uint64_t seed, std::uint64_t substream = 0);

// Uniform point in the ball of radius `radius` in R^m.
Vec sample_ball(Rng& rng, int m, double radius);

WeightedPoint rescale(const ModelParams& model, const WeightedPoint& p);
WeightedPoint rescale_inverse(const ModelParams& model, const WeightedPoint& p);

struct ProcessConvergenceRow {
    double beta;
    std::size_t box_index;
    double mean_count;
    double gaussian_mean;
    double discrepancy;
    double std_error;
    std::size_t reps;
};

// Mean counts of the rescaled Beta process (gamma = sqrt(2 beta)) in each box
// against the Gaussian(gamma = 1) intensity. Replications share substreams
// across beta values.
std::vector<ProcessConvergenceRow> empirical_process_convergence(
    const std::vector<double>& betas, const std::vector<Box>& boxes, int d, std::size_t reps,
    std::uint64_t seed);

// True when discrepancies for each box do not increase along the beta list by
// more than `z` combined standard errors.
bool discrepancies_monotone(const std::vector<ProcessConvergenceRow>& rows, double z = 3.0);

}  // namespace ptess
