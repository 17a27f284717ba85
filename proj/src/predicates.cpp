#include "predicates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ptess::detail {

double det_double(std::vector<double> a, int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        const double p = a[c * n + c];
        det *= p;
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / p;
            if (f == 0.0) continue;
            for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

int sign_det_exact(std::vector<mpq_class> a, int n) {
    int sign = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (sgn(a[r * n + c]) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            sign = -sign;
        }
        if (sgn(a[c * n + c]) < 0) sign = -sign;
        for (int r = c + 1; r < n; ++r) {
            if (sgn(a[r * n + c]) == 0) continue;
            const mpq_class f = a[r * n + c] / a[c * n + c];
            for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return sign;
}

LiftedPoints::LiftedPoints(const std::vector<Vec>& lifted) {
    n_ = int(lifted.size());
    dim_ = n_ ? int(lifted[0].size()) : 0;
    x_.reserve(std::size_t(n_) * dim_);
    for (const auto& p : lifted) x_.insert(x_.end(), p.begin(), p.end());
    last_err_.assign(n_, 0.0);
}

LiftedPoints::LiftedPoints(const std::vector<WeightedPoint>& points) : weighted_(&points) {
    n_ = int(points.size());
    dim_ = n_ ? int(points[0].v.size()) + 1 : 0;
    x_.reserve(std::size_t(n_) * dim_);
    last_err_.reserve(n_);
    for (const auto& p : points) {
        double n2 = 0.0;
        for (double c : p.v) n2 += c * c;
        x_.insert(x_.end(), p.v.begin(), p.v.end());
        x_.push_back(n2 + p.h);
        last_err_.push_back(4.0 * (dim_ + 1) * 0x1.0p-53 * (n2 + std::abs(p.h)));
    }
}

mpq_class LiftedPoints::exact_last(int i) const {
    if (!weighted_) return mpq_class(coord(i, dim_ - 1));
    const auto& p = (*weighted_)[i];
    mpq_class s(p.h);
    for (double c : p.v) {
        mpq_class q(c);
        s += q * q;
    }
    return s;
}

int LiftedPoints::orient(const int* idx, bool perturb) const {
    const int d = dim_;
    std::vector<double> rows(std::size_t(d) * d);
    double hadamard = 1.0, lift_err = 0.0;
    const double e0 = last_err_[idx[0]];
    std::vector<double> norms(d);
    for (int i = 1; i <= d; ++i) {
        double n2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double v = coord(idx[i], k) - coord(idx[0], k);
            rows[(i - 1) * d + k] = v;
            n2 += v * v;
        }
        norms[i - 1] = std::sqrt(n2);
        hadamard *= norms[i - 1];
    }
    if (hadamard > 0.0) {
        for (int i = 1; i <= d; ++i)
            lift_err += (last_err_[idx[i]] + e0) * (hadamard / norms[i - 1]);
        const double det = det_double(rows, d);
        const double thr = 1e-11 * hadamard + 2.0 * lift_err;
        if (std::abs(det) > thr) return (det > 0 ? 1 : -1) * (d % 2 ? -1 : 1);
    }

    const int n = d + 1;
    std::vector<mpq_class> m(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k + 1 < d; ++k) m[i * n + k] = coord(idx[i], k);
        m[i * n + d - 1] = exact_last(idx[i]);
        m[i * n + d] = 1;
    }
    const int s = sign_det_exact(m, n);
    if (s != 0 || !perturb) return s;

    // Lifted coordinate of point i raised by eps^(i+1): the lowest index dominates.
    std::vector<int> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    std::sort(pos.begin(), pos.end(), [&](int a, int b) { return idx[a] < idx[b]; });
    for (int p : pos) {
        std::vector<mpq_class> minor;
        minor.reserve(std::size_t(d) * d);
        for (int i = 0; i < n; ++i) {
            if (i == p) continue;
            for (int k = 0; k < n; ++k)
                if (k != d - 1) minor.push_back(m[i * n + k]);
        }
        const int c = sign_det_exact(minor, d);
        if (c != 0) return ((p + d - 1) % 2 ? -c : c);
    }
    return 0;
}

int LiftedPoints::spatial_orient(const int* idx) const {
    const int d = dim_;
    const int m = d - 1;
    std::vector<double> rows(std::size_t(m) * m);
    double hadamard = 1.0;
    for (int i = 1; i <= m; ++i) {
        double n2 = 0.0;
        for (int k = 0; k < m; ++k) {
            const double v = coord(idx[i], k) - coord(idx[0], k);
            rows[(i - 1) * m + k] = v;
            n2 += v * v;
        }
        hadamard *= std::sqrt(n2);
    }
    if (hadamard > 0.0) {
        const double det = det_double(rows, m);
        if (std::abs(det) > 1e-11 * hadamard) return (det > 0 ? 1 : -1) * (m % 2 ? -1 : 1);
    } else {
        return 0;
    }
    std::vector<mpq_class> a(std::size_t(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < m; ++k) a[i * d + k] = coord(idx[i], k);
        a[i * d + m] = 1;
    }
    return sign_det_exact(a, d);
}

}  // namespace ptess::detail
