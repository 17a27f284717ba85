#pragma once
// Volume-weighted typical cells of the Gaussian-Delaunay tessellation: the
// weighted Gaussian simplex law, its moments, angle sums and face intensities.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ptess/hull_geometry.hpp"
#include "ptess/tessellation_sim.hpp"

namespace ptess {

struct CellLawParams {
    int d = 2;
    double nu = -1.0;  // weight exponent, >= -1
    double s = 0.0;    // moment order
};

// Normalizing constant of the density Vol^{nu+1} prod exp(-|y_i|^2/2) over (R^{d-1})^d.
double alpha_hat(int d, double nu);

// E Vol(Z_nu)^s; needs s >= -nu-1.
double volume_moment(const CellLawParams& params);

struct GaussianSimplexSample {
    std::vector<Vec> vertices;
    double volume = 0.0;
    double importance_weight = 1.0;  // Vol^{nu+1} under the i.i.d. Gaussian base law, else 1
};

enum class CellSampler { Auto, Metropolis, Importance };

struct McmcSettings {
    long burn_in = 10000;
    int thinning = 10;
    double target_low = 0.25, target_high = 0.45;
};

struct TypicalCellRun {
    std::vector<GaussianSimplexSample> samples;
    std::string method;          // "exact", "metropolis" or "importance"
    double step = 0.0;           // tuned proposal scale (metropolis)
    double acceptance = 0.0;     // acceptance rate after burn-in (metropolis)
    long burn_in = 0;
    int thinning = 0;
};

// Auto: exact i.i.d. Gaussian vertices for nu = -1, Metropolis otherwise.
// Importance: i.i.d. Gaussian vertices carrying weight Vol^{nu+1}.
TypicalCellRun sample_typical_cell(const CellLawParams& params, std::size_t n, std::uint64_t seed,
                                   CellSampler sampler = CellSampler::Auto, const McmcSettings& mcmc = {});

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Self-normalized importance estimate of E Vol(Z_nu)^s from i.i.d. Gaussian simplices.
Estimate importance_moment(const CellLawParams& params, std::size_t n, std::uint64_t seed);

// Same estimate from given volumes of i.i.d. Gaussian simplices (shared across (nu, s)).
Estimate importance_moment_from_volumes(const std::vector<double>& volumes, double nu, double s);

// Volumes of n i.i.d. standard Gaussian simplices in R^{d-1}.
std::vector<double> gaussian_simplex_volumes(int d, std::size_t n, std::uint64_t seed);

// d * prod_{j=1}^{d-1} X_{j+nu+1} with independent chi-square variables.
std::vector<double> chisq_product_sample(const CellLawParams& params, std::size_t n, std::uint64_t seed);

// Normalized solid angle of the tangent cone of the simplex at the face spanned
// by `face` (vertex indices), by Monte Carlo over uniform directions.
Estimate internal_angle(const std::vector<int>& face, const std::vector<Vec>& simplex, std::size_t n_dirs,
                        std::uint64_t seed);

struct AngleSums {
    std::vector<double> sigma;      // sigma_1 .. sigma_d
    std::vector<double> std_error;
    double gram = 0.0;              // sum_k (-1)^{k-1} sigma_k
    double gram_std_error = 0.0;
};

// All faces share the same directions.
AngleSums angle_sums(const std::vector<Vec>& simplex, std::size_t n_dirs, std::uint64_t seed);

// Angle sums of the regular simplex with d vertices; exact for d <= 4.
std::vector<double> regular_simplex_angle_sums(int d, std::size_t n_dirs = 10000000, std::uint64_t seed = 1);

// gamma_0 .. gamma_{d-1} per unit volume.
std::vector<double> face_intensities_closed_form(int d);

using CellFunctional = std::function<double(const std::vector<Vec>& centred_vertices)>;

struct RatioEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t cells = 0;
    std::size_t realizations = 0;
    std::size_t skipped = 0;  // realizations whose window was not determined
};

// sum Vol^nu f(cell - z) / sum Vol^nu over valid cells, z the apex coordinate;
// standard error from the spread across realizations.
RatioEstimate empirical_weighted_cell_estimator(const std::vector<Tessellation>& tessellations, double nu,
                                                const CellFunctional& functional);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace ptess
