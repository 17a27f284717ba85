#pragma once
// Upper bounds on the probability that the growth-process boundary over B_A
// rises above a level (sup bounds) or dips below one (inf bounds).

#include <string>

#include "ptess/point_processes.hpp"

namespace ptess {

enum class BoundId { SupBeta, SupBetaPrime, SupGaussian, InfBeta, InfBetaPrime, InfGaussian };

std::string to_string(BoundId id);
BoundId parse_bound_id(const std::string& name);
ModelKind bound_model(BoundId id);
bool is_sup_bound(BoundId id);

struct BoundQuery {
    int d = 2;
    double A = 1.0;
    double level = 0.0;  // T for sup bounds, t for inf bounds
    double beta = 0.0;   // process parameter (unused for Gaussian)
    double beta0 = 0.0;  // auxiliary parameter, 1 <= beta0 <= beta for SupBeta,
                         // (d+1)/2 < beta0 <= beta for InfBetaPrime
};

// Each bound is evaluated exactly as its closed form reads, including the case
// splits. The bounds refer to the rescaled processes (gamma = sqrt(2 beta)) and
// the Gaussian process with gamma = 1.
double growth_bound(BoundId which, const BoundQuery& q);

}  // namespace ptess
