#pragma once
// Orientation predicates on lifted points: floating-point filter, exact GMP
// fallback, and index-order symbolic perturbation of the lifted coordinate.

#include <gmpxx.h>

#include <vector>

#include "ptess/point_processes.hpp"

namespace ptess::detail {

// Determinant of an n x n row-major matrix by partial-pivot elimination.
double det_double(std::vector<double> a, int n);

int sign_det_exact(std::vector<mpq_class> a, int n);

class LiftedPoints {
public:
    // Lifted coordinates given directly; the last coordinate is exact input.
    explicit LiftedPoints(const std::vector<Vec>& lifted);
    // Weighted points; the lift |v|^2 + h is evaluated exactly when needed.
    explicit LiftedPoints(const std::vector<WeightedPoint>& points);

    int size() const { return n_; }
    int dim() const { return dim_; }  // d, the lifted dimension
    double coord(int i, int k) const { return x_[std::size_t(i) * dim_ + k]; }

    // Sign of det[[p_i, 1]] over the d+1 listed points, perturbed symbolically
    // unless `perturb` is false.
    int orient(const int* idx, bool perturb = true) const;

    // Sign of det[[v_i, 1]] over d listed points (spatial part only).
    int spatial_orient(const int* idx) const;

private:
    mpq_class exact_last(int i) const;

    int n_ = 0, dim_ = 0;
    std::vector<double> x_;        // n x d; last column is the (rounded) lift
    std::vector<double> last_err_;  // absolute error bound on the last column
    const std::vector<WeightedPoint>* weighted_ = nullptr;
};

}  // namespace ptess::detail
