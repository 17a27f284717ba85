#pragma once
// Shared numeric helpers: ball volumes, quadrature wrappers, Poisson inversion,
// and the error types used across the library.

#include <functional>
#include <stdexcept>
#include <string>

namespace ptess {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfiniteMeasureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Volume of the unit ball in R^n (n = 0 gives 1).
double unit_ball_volume(int n);

// Surface area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

double factorial(int n);

// Adaptive quadrature with relative tolerance; handles infinite endpoints.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// Smallest k with P(Poisson(mean) <= k) >= u; a monotone inverse CDF so that
// common uniforms couple counts across intensities.
long long poisson_inverse_cdf(double mean, double u);

}  // namespace ptess
