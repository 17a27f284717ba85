#pragma once
// Convergence experiments: capacity functionals on test sets, empirical
// frequencies for the growth-boundary bounds, and the L1 distance integral.

#include <cstdint>
#include <string>
#include <vector>

#include "ptess/height_bounds.hpp"
#include "ptess/tessellation_sim.hpp"
#include "ptess/typical_cells.hpp"

namespace ptess {

struct CompactTestSet {
    enum class Kind { Empty, Ball, Segment, Union };
    Kind kind = Kind::Empty;
    Vec center;
    double radius = 0.0;
    Vec a, b;
    std::vector<CompactTestSet> parts;

    static CompactTestSet empty() { return {}; }
    static CompactTestSet ball(Vec center, double radius);
    static CompactTestSet segment(Vec a, Vec b);
    static CompactTestSet finite_union(std::vector<CompactTestSet> parts);
};

// Largest distance from the origin over the set (-inf when empty).
double outer_radius(const CompactTestSet& c);

// True when the skeleton of the tessellation inside B_R meets the set.
bool skeleton_hits(const Tessellation& tess, const CompactTestSet& c);

struct CapacityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<char> hits;     // per replication; only realizations with a determined window
    std::size_t replications = 0;
    std::size_t skipped = 0;
};

// Throws ParameterError("undecidable margin") unless C lies in B_{R(1-margin)}.
CapacityEstimate capacity_estimate(const ModelParams& model, const CompactTestSet& c, const WindowSpec& window,
                                   std::size_t n_reps, std::uint64_t seed, double margin = 0.05);

// Multiple test sets on the same realizations; realizations are simulated once.
std::vector<CapacityEstimate> capacity_estimates(const ModelParams& model, const std::vector<CompactTestSet>& sets,
                                                 const WindowSpec& window, std::size_t n_reps, std::uint64_t seed,
                                                 double margin = 0.05, int threads = 0);

// Frequency of the event bounded by `which` for the reference process of the
// bound (rescaled Beta / BetaPrime with parameter q.beta, or the Gaussian process):
// sup over B_A of the growth boundary exceeding q.level, or inf below q.level.
Estimate empirical_bound_frequency(BoundId which, const BoundQuery& q, std::size_t n_seeds, std::uint64_t seed,
                                   int threads = 0);

ModelParams bound_reference_model(BoundId which, int d, double beta);

// Fixed grid of 20 admissible query points per bound (d in {2,3}, A in {0.5,1},
// five levels) where the event can be sampled with finitely many points.
std::vector<BoundQuery> admissible_bound_points(BoundId which);

// (3/2) kappa_{d-1} int_{-inf}^T (sqrt(T-s) + R + r)^{d-1} |g(s) - f_beta(s)| ds with
// g the Gaussian and f_beta the rescaled Beta (or BetaPrime) height density.
double tv_bound_integral(double beta, double R, double r, double T, int d, ModelKind kind = ModelKind::Beta);

struct ConvergenceRow {
    ModelKind kind;
    double beta;
    std::size_t compact;
    double t_beta;        // capacity estimate for the rescaled model
    double t_gauss;       // capacity estimate for the Gaussian model
    double delta;         // |t_beta - t_gauss|
    double std_error;     // paired standard error of the difference
    double tv_bound;
    std::size_t pairs;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> max_delta;       // per (kind, beta) in row order of kinds x betas
    std::vector<double> max_delta_se;
    bool monotone = true;                // max delta non-increasing up to 3 combined s.e., per kind
    double margin = 0.0;                 // Gaussian margin used for the tv column
    double T = 0.0;
};

ConvergenceTable convergence_experiment(const std::vector<ModelKind>& kinds, const std::vector<double>& betas,
                                        const std::vector<CompactTestSet>& compacts, const WindowSpec& window,
                                        std::size_t n_reps, std::uint64_t seed, int threads = 0);

// Worker count: explicit > 0, else the PTESS_THREADS environment variable, else hardware concurrency.
int resolve_threads(int requested);

}  // namespace ptess
