#include "ptess/numerics.hpp"

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace ptess {

double unit_ball_volume(int n) {
    return std::exp(0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0));
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

double factorial(int n) { return std::tgamma(n + 1.0); }

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (!(a < b)) return a == b ? 0.0 : -integrate(f, b, a, rel_tol);
    const double inf = std::numeric_limits<double>::infinity();
    if (std::isinf(a) && std::isinf(b)) {
        return integrate(f, -inf, 0.0, rel_tol) + integrate(f, 0.0, inf, rel_tol);
    }
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate([&](double x) { return f(a + x); }, 0.0, inf, rel_tol);
    }
    if (std::isinf(a)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate([&](double x) { return f(b - x); }, 0.0, inf, rel_tol);
    }
    // Kronrod handles smooth integrands cheaply; tanh-sinh copes with endpoint
    // singularities such as (t-s)^{1/2} or s^beta near zero.
    double err = 0.0;
    const double gk = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 15, rel_tol, &err);
    if (err <= rel_tol * std::abs(gk) || err < 1e-300) return gk;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, rel_tol);
}

long long poisson_inverse_cdf(double mean, double u) {
    if (!(mean >= 0.0) || std::isinf(mean)) throw ParameterError("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 600.0) {
        double pmf = std::exp(-mean);
        double cdf = pmf;
        long long k = 0;
        while (cdf < u) {
            ++k;
            pmf *= mean / double(k);
            cdf += pmf;
            if (pmf == 0.0 && double(k) > mean) break;  // u sits in rounding noise of the tail
        }
        return k;
    }
    using namespace boost::math::policies;
    using Pol = policy<discrete_quantile<integer_round_up>>;
    boost::math::poisson_distribution<double, Pol> dist(mean);
    return static_cast<long long>(boost::math::quantile(dist, u));
}

}  // namespace ptess
