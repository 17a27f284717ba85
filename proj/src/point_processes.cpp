#include "ptess/point_processes.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ptess {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Beta: return "beta";
        case ModelKind::BetaPrime: return "betaprime";
        case ModelKind::Gaussian: return "gaussian";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "beta") return ModelKind::Beta;
    if (name == "betaprime" || name == "beta_prime" || name == "beta'") return ModelKind::BetaPrime;
    if (name == "gaussian") return ModelKind::Gaussian;
    throw ParameterError("unknown model '" + name + "' (expected beta, betaprime or gaussian)");
}

ModelParams gaussian_model(int d, double gamma) {
    return ModelParams{ModelKind::Gaussian, 0.0, gamma, d, false};
}
ModelParams beta_model(int d, double beta, double gamma) {
    return ModelParams{ModelKind::Beta, beta, gamma, d, false};
}
ModelParams beta_prime_model(int d, double beta, double gamma) {
    return ModelParams{ModelKind::BetaPrime, beta, gamma, d, false};
}
ModelParams rescaled_model(ModelKind kind, int d, double beta) {
    return rescaled_model(kind, d, beta, std::sqrt(2.0 * beta));
}
ModelParams rescaled_model(ModelKind kind, int d, double beta, double gamma) {
    return ModelParams{kind, beta, gamma, d, true};
}

void validate(const ModelParams& m) {
    if (m.d < 2 || m.d > 7) throw ParameterError("d must satisfy 2 <= d <= 7");
    if (!(m.gamma > 0.0) || !std::isfinite(m.gamma)) throw ParameterError("gamma must be positive");
    switch (m.kind) {
        case ModelKind::Beta:
            if (!(m.beta > -1.0)) throw ParameterError("beta model requires beta > -1");
            break;
        case ModelKind::BetaPrime:
            if (!(m.beta > 0.5 * (m.d + 1)))
                throw ParameterError("betaprime model requires beta > (d+1)/2");
            break;
        case ModelKind::Gaussian:
            if (m.rescaled) throw ParameterError("rescaling undefined for the Gaussian model");
            break;
    }
    if (m.rescaled && !(m.beta > 0.0)) throw ParameterError("rescaling requires beta > 0");
}

double beta_constant(int d, double beta) {
    return std::exp(std::lgamma(0.5 * d + beta + 1.0) - 0.5 * d * std::log(M_PI) -
                    std::lgamma(beta + 1.0));
}

double beta_prime_constant(int d, double beta) {
    return std::exp(std::lgamma(beta) - 0.5 * d * std::log(M_PI) - std::lgamma(beta - 0.5 * d));
}

namespace {

int spatial_dim(const ModelParams& m) { return m.d - 1; }

double scale_factor(const ModelParams& m) { return std::sqrt(2.0 * m.beta); }

// Height of the rescaling's fixed level: +1 for Beta, -1 for BetaPrime.
double anchor(const ModelParams& m) { return m.kind == ModelKind::Beta ? 1.0 : -1.0; }

double to_original_height(const ModelParams& m, double s) {
    return anchor(m) + s / (2.0 * m.beta);
}
double to_image_height(const ModelParams& m, double h) {
    return 2.0 * m.beta * (h - anchor(m));
}

ModelParams original_of(const ModelParams& m) {
    ModelParams o = m;
    o.rescaled = false;
    return o;
}

// Pointwise height density (including gamma) of a non-rescaled model.
double height_density(const ModelParams& m, double h) {
    switch (m.kind) {
        case ModelKind::Beta:
            if (h < 0.0) return 0.0;
            if (h == 0.0) return m.beta == 0.0 ? m.gamma * beta_constant(m.d, m.beta) : (m.beta > 0 ? 0.0 : kInf);
            return m.gamma * beta_constant(m.d, m.beta) * std::pow(h, m.beta);
        case ModelKind::BetaPrime:
            if (h >= 0.0) return 0.0;
            return m.gamma * beta_prime_constant(m.d, m.beta) * std::pow(-h, -m.beta);
        case ModelKind::Gaussian:
            return m.gamma * std::pow(2.0 * M_PI, -0.5 * m.d) * std::exp(0.5 * h);
    }
    return 0.0;
}

HeightRange original_support(const ModelParams& m) {
    switch (m.kind) {
        case ModelKind::Beta: return {0.0, kInf};
        case ModelKind::BetaPrime: return {-kInf, 0.0};
        case ModelKind::Gaussian: return {-kInf, kInf};
    }
    return {-kInf, kInf};
}

double original_height_mass(const ModelParams& m, double a, double b) {
    const HeightRange s = original_support(m);
    a = std::max(a, s.lo);
    b = std::min(b, s.hi);
    if (!(a < b)) return 0.0;
    switch (m.kind) {
        case ModelKind::Beta: {
            const double q = m.beta + 1.0;
            const double c = m.gamma * beta_constant(m.d, m.beta) / q;
            if (std::isinf(b)) return kInf;
            if (a == 0.0) return c * std::pow(b, q);
            return c * std::pow(b, q) * -std::expm1(q * std::log(a / b));
        }
        case ModelKind::BetaPrime: {
            if (b >= 0.0) return kInf;
            const double p = 1.0 - m.beta;
            const double c = m.gamma * beta_prime_constant(m.d, m.beta) / (m.beta - 1.0);
            const double top = std::pow(-b, p);
            if (std::isinf(a)) return c * top;
            return c * top * -std::expm1(p * std::log(a / b));
        }
        case ModelKind::Gaussian: {
            if (std::isinf(b)) return kInf;
            const double c = m.gamma * std::pow(2.0 * M_PI, -0.5 * m.d) * 2.0 * std::exp(0.5 * b);
            if (std::isinf(a)) return c;
            return c * -std::expm1(0.5 * (a - b));
        }
    }
    return 0.0;
}

double original_height_quantile(const ModelParams& m, double a, double b, double u) {
    const HeightRange s = original_support(m);
    a = std::max(a, s.lo);
    b = std::min(b, s.hi);
    if (!(a < b) || std::isinf(b)) throw ParameterError("height quantile needs a finite nonempty slab");
    switch (m.kind) {
        case ModelKind::Beta: {
            const double q = m.beta + 1.0;
            if (a == 0.0) return b * std::pow(u, 1.0 / q);
            const double r = std::exp(q * std::log(a / b));
            return b * std::pow(r + u * (1.0 - r), 1.0 / q);
        }
        case ModelKind::BetaPrime: {
            if (b >= 0.0) throw InfiniteMeasureError("betaprime slab touches h = 0");
            const double p = 1.0 - m.beta;
            const double r = std::isinf(a) ? 0.0 : std::exp(p * std::log(a / b));
            return b * std::pow(r + u * (1.0 - r), 1.0 / p);
        }
        case ModelKind::Gaussian: {
            const double r = std::isinf(a) ? 0.0 : std::exp(0.5 * (a - b));
            return b + 2.0 * std::log(u + (1.0 - u) * r);
        }
    }
    return 0.0;
}

Region preimage(const ModelParams& m, const Region& region) {
    const double k = scale_factor(m);
    return std::visit(
        [&](const auto& r) -> Region {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Box>) {
                return Box{r.A / k, to_original_height(m, r.hmin), to_original_height(m, r.hmax)};
            } else if constexpr (std::is_same_v<T, PowBall>) {
                Vec w = r.w;
                for (double& x : w) x /= k;
                return PowBall{w, to_original_height(m, r.t)};
            } else {
                return KRegion{r.A / k, to_original_height(m, r.t), to_original_height(m, r.hmin)};
            }
        },
        region);
}

// Intensity of {(v,h): dist(v, B_A(c))^2 + h <= t, h >= lo} for a non-rescaled model.
double paraboloid_region_measure(const ModelParams& m, double A, double t, double lo) {
    const int dim = spatial_dim(m);
    const double kappa = unit_ball_volume(dim);
    const HeightRange s = original_support(m);
    lo = std::max(lo, s.lo);
    if (!(lo < t)) return 0.0;
    if (m.kind == ModelKind::BetaPrime && t >= 0.0) return kInf;
    if (m.kind == ModelKind::Gaussian) {
        // Substitute y = t - h: sum of lower incomplete gamma functions.
        const double ymax = t - lo;
        double total = 0.0;
        for (int i = 0; i <= dim; ++i) {
            const double a = 0.5 * i + 1.0;
            const double g = std::isinf(ymax) ? std::tgamma(a)
                                              : boost::math::tgamma_lower(a, 0.5 * ymax);
            const double coef = boost::math::binomial_coefficient<double>(dim, i) *
                                (dim - i == 0 ? 1.0 : std::pow(A, dim - i));
            total += coef * std::pow(2.0, a) * g;
        }
        return m.gamma * kappa * std::pow(2.0 * M_PI, -0.5 * m.d) * std::exp(0.5 * t) * total;
    }
    auto f = [&](double h) {
        const double y = std::max(t - h, 0.0);
        return kappa * std::pow(A + std::sqrt(y), dim) * height_density(m, h);
    };
    return integrate(f, lo, t, 1e-11);
}

double paraboloid_tail_measure(const ModelParams& m, double A, double t, double H) {
    const int dim = spatial_dim(m);
    const double kappa = unit_ball_volume(dim);
    auto f = [&](double h) {
        return kappa * std::pow(A + std::sqrt(std::max(t - h, 0.0)), dim) * height_density(m, h);
    };
    return integrate(f, -kInf, H, 1e-8);
}

double original_lower_cut(const ModelParams& m, double A, double t, double hmin, double tail) {
    const HeightRange s = original_support(m);
    if (std::isfinite(s.lo)) return std::max(hmin, s.lo);
    double top = std::min(t, m.kind == ModelKind::BetaPrime ? -1e-300 : t);
    if (paraboloid_tail_measure(m, A, t, top) <= tail) return std::max(hmin, top);
    double step = 1.0;
    double lo = top - step;
    while (paraboloid_tail_measure(m, A, t, lo) > tail) {
        top = lo;
        step *= 2.0;
        lo = top - step;
        if (step > 1e30) throw InfiniteMeasureError("height tail does not decay");
    }
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + top);
        if (paraboloid_tail_measure(m, A, t, mid) > tail) top = mid;
        else lo = mid;
    }
    return std::max(hmin, lo);
}

double original_measure(const ModelParams& m, const Region& region) {
    const int dim = spatial_dim(m);
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Box>) {
                if (!(r.hmin < r.hmax) || r.A <= 0.0) return 0.0;
                const double mass = original_height_mass(m, r.hmin, r.hmax);
                if (mass == 0.0) return 0.0;
                return unit_ball_volume(dim) * std::pow(r.A, dim) * mass;
            } else if constexpr (std::is_same_v<T, PowBall>) {
                if (m.kind == ModelKind::Gaussian)
                    return m.gamma * std::sqrt(2.0 / M_PI) * std::exp(0.5 * r.t);
                return paraboloid_region_measure(m, 0.0, r.t, -kInf);
            } else {
                return paraboloid_region_measure(m, r.A, r.t, r.hmin);
            }
        },
        region);
}

void sample_slab(const ModelParams& m, const Vec& centre, double radius, double hlo, double hhi,
                 Rng& rng, std::vector<WeightedPoint>& out, const Region* keep) {
    const int dim = spatial_dim(m);
    const double mass = original_height_mass(m, hlo, hhi);
    if (mass == 0.0) return;
    if (std::isinf(mass)) throw InfiniteMeasureError("infinite intensity on sampled slab");
    const double mean = unit_ball_volume(dim) * std::pow(radius, dim) * mass;
    const long long n = poisson_inverse_cdf(mean, rng.uniform());
    for (long long i = 0; i < n; ++i) {
        WeightedPoint p;
        p.v = sample_ball(rng, dim, radius);
        for (int k = 0; k < dim; ++k) p.v[k] += centre[k];
        p.h = original_height_quantile(m, hlo, hhi, rng.uniform());
        if (keep == nullptr || region_contains(*keep, p)) out.push_back(std::move(p));
    }
}

// Rejection from a stack of enclosing boxes; each slab's box is at most 25%
// wider than the region's section at the slab top.
void sample_paraboloid_region(const ModelParams& m, const Region& region, const Vec& centre,
                              double A, double t, double lo, Rng& rng,
                              std::vector<WeightedPoint>& out) {
    const HeightRange s = original_support(m);
    const double top = std::min(t, s.hi);
    if (!(lo < top)) return;
    double root = std::sqrt(std::max(t - top, 0.0));
    double hhi = top;
    while (hhi > lo) {
        double next_root = std::max(1.25 * (A + root) - A, root + 0.5);
        double hlo = t - next_root * next_root;
        if (hlo < lo) {
            hlo = lo;
            next_root = std::sqrt(t - lo);
        }
        sample_slab(m, centre, A + next_root, hlo, hhi, rng, out, &region);
        hhi = hlo;
        root = next_root;
    }
}

std::vector<WeightedPoint> sample_original(const ModelParams& m, const Region& region,
                                           Rng& rng) {
    const double mu = original_measure(m, region);
    if (std::isinf(mu)) throw InfiniteMeasureError("region has infinite intensity measure");
    std::vector<WeightedPoint> out;
    if (mu == 0.0) return out;
    const int dim = spatial_dim(m);
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Box>) {
                sample_slab(m, Vec(dim, 0.0), r.A, r.hmin, r.hmax, rng, out, nullptr);
            } else if constexpr (std::is_same_v<T, PowBall>) {
                const double lo = original_lower_cut(m, 0.0, r.t, -kInf, 1e-12);
                sample_paraboloid_region(m, region, r.w, 0.0, r.t, lo, rng, out);
            } else {
                const double lo = original_lower_cut(m, r.A, r.t, r.hmin, 1e-12);
                sample_paraboloid_region(m, region, Vec(dim, 0.0), r.A, r.t, lo, rng, out);
            }
        },
        region);
    return out;
}

}  // namespace

bool region_contains(const Region& region, const WeightedPoint& p) {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            double n2 = 0.0;
            if constexpr (std::is_same_v<T, Box>) {
                for (double x : p.v) n2 += x * x;
                return n2 <= r.A * r.A && p.h >= r.hmin && p.h <= r.hmax;
            } else if constexpr (std::is_same_v<T, PowBall>) {
                for (std::size_t k = 0; k < p.v.size(); ++k) n2 += (p.v[k] - r.w[k]) * (p.v[k] - r.w[k]);
                return n2 + p.h <= r.t;
            } else {
                for (double x : p.v) n2 += x * x;
                const double gap = std::max(std::sqrt(n2) - r.A, 0.0);
                return gap * gap + p.h <= r.t && p.h >= r.hmin;
            }
        },
        region);
}

HeightRange height_support(const ModelParams& m) {
    HeightRange s = original_support(m);
    if (m.rescaled) {
        s.lo = std::isinf(s.lo) ? s.lo : to_image_height(m, s.lo);
        s.hi = std::isinf(s.hi) ? s.hi : to_image_height(m, s.hi);
    }
    return s;
}

double intensity_density(const ModelParams& m, const WeightedPoint& p) {
    validate(m);
    if (!m.rescaled) return height_density(m, p.h);
    const double jac = std::pow(2.0 * m.beta, -0.5 * (m.d + 1));
    return height_density(original_of(m), to_original_height(m, p.h)) * jac;
}

double height_mass(const ModelParams& m, double a, double b) {
    if (!m.rescaled) return original_height_mass(m, a, b);
    const double jac = std::pow(2.0 * m.beta, -0.5 * (m.d - 1));
    return jac * original_height_mass(original_of(m), to_original_height(m, a),
                                      to_original_height(m, b));
}

double height_quantile(const ModelParams& m, double a, double b, double u) {
    if (!m.rescaled) return original_height_quantile(m, a, b, u);
    return to_image_height(
        m, original_height_quantile(original_of(m), to_original_height(m, a),
                                    to_original_height(m, b), u));
}

double intensity_measure(const ModelParams& m, const Region& region) {
    validate(m);
    if (!m.rescaled) return original_measure(m, region);
    return original_measure(original_of(m), preimage(m, region));
}

double lower_height_cut(const ModelParams& m, const KRegion& r, double tail_mass) {
    validate(m);
    if (!m.rescaled) return original_lower_cut(m, r.A, r.t, r.hmin, tail_mass);
    const auto pre = std::get<KRegion>(preimage(m, KRegion{r.A, r.t, r.hmin}));
    const double h = original_lower_cut(original_of(m), pre.A, pre.t, pre.hmin, tail_mass);
    return std::isinf(h) ? h : to_image_height(m, h);
}

Vec sample_ball(Rng& rng, int m, double radius) {
    std::normal_distribution<double> normal;
    Vec v(m);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& x : v) {
            x = normal(rng);
            n2 += x * x;
        }
    } while (n2 == 0.0);
    const double scale = radius * std::pow(rng.uniform(), 1.0 / m) / std::sqrt(n2);
    for (double& x : v) x *= scale;
    return v;
}

std::vector<WeightedPoint> sample_poisson(const ModelParams& m, const Region& region,
                                          std::uint64_t seed, std::uint64_t substream) {
    validate(m);
    Rng rng(seed, substream);
    if (!m.rescaled) return sample_original(m, region, rng);
    const ModelParams o = original_of(m);
    std::vector<WeightedPoint> pts = sample_original(o, preimage(m, region), rng);
    for (auto& p : pts) p = rescale(m, p);
    return pts;
}

WeightedPoint rescale(const ModelParams& m, const WeightedPoint& p) {
    if (m.kind == ModelKind::Gaussian) throw ParameterError("rescaling undefined for the Gaussian model");
    if (!(m.beta > 0.0)) throw ParameterError("rescaling requires beta > 0");
    WeightedPoint q = p;
    const double k = scale_factor(m);
    for (double& x : q.v) x *= k;
    q.h = to_image_height(m, p.h);
    return q;
}

WeightedPoint rescale_inverse(const ModelParams& m, const WeightedPoint& p) {
    if (m.kind == ModelKind::Gaussian) throw ParameterError("rescaling undefined for the Gaussian model");
    if (!(m.beta > 0.0)) throw ParameterError("rescaling requires beta > 0");
    WeightedPoint q = p;
    const double k = scale_factor(m);
    for (double& x : q.v) x /= k;
    q.h = to_original_height(m, p.h);
    return q;
}

std::vector<ProcessConvergenceRow> empirical_process_convergence(
    const std::vector<double>& betas, const std::vector<Box>& boxes, int d, std::size_t reps,
    std::uint64_t seed) {
    if (reps < 2) throw ParameterError("need at least two replications");
    std::vector<ProcessConvergenceRow> rows;
    const ModelParams gauss = gaussian_model(d, 1.0);
    for (double beta : betas) {
        const ModelParams m = rescaled_model(ModelKind::Beta, d, beta);
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            const double target = intensity_measure(gauss, boxes[b]);
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const double n = double(sample_poisson(m, boxes[b], seed, combine_stream(b, r)).size());
                sum += n;
                sum2 += n * n;
            }
            const double mean = sum / double(reps);
            const double var = std::max(sum2 / double(reps) - mean * mean, 0.0) * reps / (reps - 1.0);
            rows.push_back({beta, b, mean, target, std::abs(mean - target),
                            std::sqrt(var / double(reps)), reps});
        }
    }
    return rows;
}

bool discrepancies_monotone(const std::vector<ProcessConvergenceRow>& rows, double z) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            if (rows[j].box_index != rows[i].box_index || rows[j].beta <= rows[i].beta) continue;
            const double se = std::hypot(rows[i].std_error, rows[j].std_error);
            if (rows[j].discrepancy > rows[i].discrepancy + z * se) return false;
            break;  // compare with the next beta only
        }
    }
    return true;
}

}  // namespace ptess
