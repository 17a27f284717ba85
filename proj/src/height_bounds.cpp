#include "ptess/height_bounds.hpp"

#include <cmath>

namespace ptess {

std::string to_string(BoundId id) {
    switch (id) {
        case BoundId::SupBeta: return "sup_beta";
        case BoundId::SupBetaPrime: return "sup_beta_prime";
        case BoundId::SupGaussian: return "sup_gaussian";
        case BoundId::InfBeta: return "inf_beta";
        case BoundId::InfBetaPrime: return "inf_beta_prime";
        case BoundId::InfGaussian: return "inf_gaussian";
    }
    return "?";
}

BoundId parse_bound_id(const std::string& name) {
    for (BoundId id : {BoundId::SupBeta, BoundId::SupBetaPrime, BoundId::SupGaussian, BoundId::InfBeta,
                       BoundId::InfBetaPrime, BoundId::InfGaussian})
        if (to_string(id) == name) return id;
    throw ParameterError("unknown bound '" + name + "'");
}

ModelKind bound_model(BoundId id) {
    switch (id) {
        case BoundId::SupBeta:
        case BoundId::InfBeta: return ModelKind::Beta;
        case BoundId::SupBetaPrime:
        case BoundId::InfBetaPrime: return ModelKind::BetaPrime;
        default: return ModelKind::Gaussian;
    }
}

bool is_sup_bound(BoundId id) {
    return id == BoundId::SupBeta || id == BoundId::SupBetaPrime || id == BoundId::SupGaussian;
}

namespace {

// log(sqrt(pi) * Gamma((d+1)/2))
double log_sqrtpi_gamma(int d) { return 0.5 * std::log(M_PI) + std::lgamma(0.5 * (d + 1)); }

// 1 - exp(-exp(x)) and exp(-exp(x)) without cancellation.
double one_minus_exp_neg_exp(double x) { return -std::expm1(-std::exp(x)); }
double exp_neg_exp(double x) { return std::exp(-std::exp(x)); }

}  // namespace

double growth_bound(BoundId which, const BoundQuery& q) {
    const int d = q.d;
    const int m = d - 1;
    if (d < 2) throw ParameterError("d must be at least 2");
    if (!(q.A > 0.0)) throw ParameterError("A must be positive");
    const double A = q.A, lvl = q.level;
    const double h = 0.5 * (d + 1);
    switch (which) {
        case BoundId::SupBeta: {
            if (!(q.beta0 >= 1.0)) throw ParameterError("sup_beta needs beta0 >= 1");
            if (!(q.beta >= q.beta0)) throw ParameterError("sup_beta needs beta >= beta0");
            if (lvl <= 4 * A * A) return 1.0;
            const double x = m * std::log(A) - 0.5 * d * std::log(2.0) - log_sqrtpi_gamma(d) +
                             q.beta0 * std::log1p((lvl - 4 * A * A) / (2 * q.beta0));
            return exp_neg_exp(x);
        }
        case BoundId::SupBetaPrime: {
            if (!(q.beta > h)) throw ParameterError("sup_beta_prime needs beta > (d+1)/2");
            if (lvl >= 4 * A * A + 2 * q.beta) return 0.0;
            const double x = m * std::log(A) - 0.5 * d * std::log(2.0 * (d + 1)) - log_sqrtpi_gamma(d) +
                             0.5 * lvl - 2 * A * A;
            return exp_neg_exp(x);
        }
        case BoundId::SupGaussian: {
            const double x = m * std::log(A) - (0.5 * d - 1) * std::log(2.0) - log_sqrtpi_gamma(d) +
                             0.5 * lvl - 2 * A * A;
            return exp_neg_exp(x);
        }
        case BoundId::InfBeta: {
            if (!(q.beta > 1.0)) throw ParameterError("inf_beta needs beta > 1");
            const double x = std::log(2.0) + 0.5 * d * std::log(0.5 * d + 1) - 0.5 * std::log(M_PI) +
                             m * std::log(A + 1) + 0.5 * lvl;
            return one_minus_exp_neg_exp(x);
        }
        case BoundId::InfBetaPrime: {
            if (!(q.beta0 > h)) throw ParameterError("inf_beta_prime needs beta0 > (d+1)/2");
            if (!(q.beta >= q.beta0)) throw ParameterError("inf_beta_prime needs beta >= beta0");
            if (lvl >= 0.0) return 1.0;
            const double b0 = q.beta0;
            const double x = std::log(2.0) + b0 * std::log(2 * b0) + m * std::log(A + 1) -
                             0.5 * std::log(M_PI) - h * std::log(2 * b0 - d - 1) +
                             (h - b0) * std::log(2 * b0 - lvl);
            return one_minus_exp_neg_exp(x);
        }
        case BoundId::InfGaussian: {
            const double x = std::log(2.0) - 0.5 * std::log(M_PI) + m * std::log(A + 1) + 0.5 * lvl;
            return one_minus_exp_neg_exp(x);
        }
    }
    return 1.0;
}

}  // namespace ptess
