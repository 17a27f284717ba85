#include "ptess/typical_cells.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ptess/rng.hpp"

namespace ptess {

namespace {

double normal(Rng& rng) { return -M_SQRT2 * boost::math::erfc_inv(2.0 * rng.uniform()); }

// |det| of the m x m matrix with rows v_k - v_0, divided by m!.
double volume_of(const double* y, int d) {
    const int m = d - 1;
    double a[64];
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) a[i * m + k] = y[(i + 1) * m + k] - y[k];
    double det = 1.0;
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
        if (a[piv * m + c] == 0.0) return 0.0;
        if (piv != c)
            for (int k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
        det *= a[c * m + c];
        for (int r = c + 1; r < m; ++r) {
            const double f = a[r * m + c] / a[c * m + c];
            for (int k = c + 1; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
        }
    }
    return std::abs(det) / std::tgamma(m + 1.0);
}

std::vector<Vec> unpack(const std::vector<double>& y, int d) {
    const int m = d - 1;
    std::vector<Vec> out(d, Vec(m));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < m; ++k) out[i][k] = y[i * m + k];
    return out;
}

void check_law(int d, double nu) {
    if (d < 2 || d > 9) throw ParameterError("d must lie in [2, 9]");
    if (!(nu >= -1.0)) throw ParameterError("nu must be >= -1");
}

// Inverse of the m x m matrix with columns cols[k] (row-major result).
std::vector<double> invert(const std::vector<Vec>& cols) {
    const int m = int(cols.size());
    std::vector<double> a(m * 2 * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) a[i * 2 * m + k] = cols[k][i];
        a[i * 2 * m + m + i] = 1.0;
    }
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(a[r * 2 * m + c]) > std::abs(a[piv * 2 * m + c])) piv = r;
        if (std::abs(a[piv * 2 * m + c]) < 1e-300) throw DegeneracyError("degenerate simplex");
        if (piv != c)
            for (int k = 0; k < 2 * m; ++k) std::swap(a[c * 2 * m + k], a[piv * 2 * m + k]);
        const double p = a[c * 2 * m + c];
        for (int k = 0; k < 2 * m; ++k) a[c * 2 * m + k] /= p;
        for (int r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = a[r * 2 * m + c];
            if (f == 0.0) continue;
            for (int k = 0; k < 2 * m; ++k) a[r * 2 * m + k] -= f * a[c * 2 * m + k];
        }
    }
    std::vector<double> inv(m * m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) inv[i * m + k] = a[i * 2 * m + m + k];
    return inv;
}

// Per base vertex b: the inverse of [v_k - v_b]_{k != b}, used to decompose
// directions over the cone generators.
struct ConeFrames {
    int d, m;
    std::vector<std::vector<double>> inv;  // per base vertex
    std::vector<std::vector<int>> others;  // vertex index of each coefficient

    explicit ConeFrames(const std::vector<Vec>& simplex) : d(int(simplex.size())), m(d - 1) {
        if (d < 2 || int(simplex[0].size()) != m) throw ParameterError("simplex needs d points in R^{d-1}");
        if (!(simplex_volume(simplex) > 0.0)) throw DegeneracyError("degenerate simplex");
        for (int b = 0; b < d; ++b) {
            std::vector<Vec> cols;
            std::vector<int> idx;
            for (int k = 0; k < d; ++k) {
                if (k == b) continue;
                Vec e(m);
                for (int i = 0; i < m; ++i) e[i] = simplex[k][i] - simplex[b][i];
                cols.push_back(e);
                idx.push_back(k);
            }
            inv.push_back(invert(cols));
            others.push_back(idx);
        }
    }

    // coefficient signs: bit k set when the coefficient of vertex k (base b) is negative
    unsigned negative_mask(int b, const double* u) const {
        unsigned mask = 0;
        for (int i = 0; i < m; ++i) {
            double c = 0.0;
            for (int k = 0; k < m; ++k) c += inv[b][i * m + k] * u[k];
            if (c < 0.0) mask |= 1u << others[b][i];
        }
        return mask;
    }
};

}  // namespace

double alpha_hat(int d, double nu) {
    check_law(d, nu);
    double l = -0.5 * (d - 1) * (d + nu + 1) * std::log(2.0) - 0.5 * d * (d - 1) * std::log(M_PI) +
               (nu + 1) * std::lgamma(double(d)) - 0.5 * (nu + 1) * std::log(double(d));
    for (int j = 1; j < d; ++j) l += std::lgamma(0.5 * j) - std::lgamma(0.5 * (j + nu + 1));
    return std::exp(l);
}

double volume_moment(const CellLawParams& p) {
    check_law(p.d, p.nu);
    if (!(p.s >= -p.nu - 1)) throw ParameterError("moment order needs s >= -nu-1");
    const int d = p.d;
    double l = 0.5 * p.s * (d - 1) * std::log(2.0) + 0.5 * p.s * std::log(double(d)) - p.s * std::lgamma(double(d));
    for (int j = 1; j < d; ++j) l += std::lgamma(0.5 * (j + p.s + p.nu + 1)) - std::lgamma(0.5 * (j + p.nu + 1));
    return std::exp(l);
}

std::vector<double> gaussian_simplex_volumes(int d, std::size_t n, std::uint64_t seed) {
    check_law(d, -1);
    Rng rng(seed, 0x51A9u);
    const int dim = d * (d - 1);
    std::vector<double> y(dim), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& c : y) c = normal(rng);
        out[i] = volume_of(y.data(), d);
    }
    return out;
}

TypicalCellRun sample_typical_cell(const CellLawParams& p, std::size_t n, std::uint64_t seed, CellSampler sampler,
                                   const McmcSettings& mcmc) {
    check_law(p.d, p.nu);
    const int d = p.d, dim = d * (d - 1);
    TypicalCellRun run;
    Rng rng(seed, 0x7C11u);
    std::vector<double> y(dim);
    auto draw_iid = [&] {
        for (double& c : y) c = normal(rng);
    };

    if (p.nu == -1.0 || sampler == CellSampler::Importance) {
        run.method = p.nu == -1.0 && sampler != CellSampler::Importance ? "exact" : "importance";
        run.samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            draw_iid();
            GaussianSimplexSample s;
            s.vertices = unpack(y, d);
            s.volume = volume_of(y.data(), d);
            s.importance_weight = run.method == "importance" ? std::pow(s.volume, p.nu + 1) : 1.0;
            run.samples.push_back(std::move(s));
        }
        return run;
    }

    // Random-walk Metropolis on Vol^{nu+1} prod exp(-|y_i|^2/2).
    run.method = "metropolis";
    run.burn_in = mcmc.burn_in;
    run.thinning = std::max(1, mcmc.thinning);
    auto log_target = [&](const std::vector<double>& x) {
        const double v = volume_of(x.data(), d);
        if (!(v > 0.0)) return -kInf;
        double q = 0.0;
        for (double c : x) q += c * c;
        return (p.nu + 1) * std::log(v) - 0.5 * q;
    };
    do draw_iid();
    while (!(volume_of(y.data(), d) > 0.0));
    double cur = log_target(y);
    double step = 2.4 / std::sqrt(double(dim));
    std::vector<double> prop(dim);
    long accepted = 0, window = 0;
    auto advance = [&] {
        for (int k = 0; k < dim; ++k) prop[k] = y[k] + step * normal(rng);
        const double next = log_target(prop);
        const bool ok = std::log(rng.uniform()) < next - cur;
        if (ok) {
            y.swap(prop);
            cur = next;
        }
        return ok;
    };
    const double target = 0.5 * (mcmc.target_low + mcmc.target_high);
    for (long it = 0; it < mcmc.burn_in; ++it) {
        accepted += advance();
        if (++window == 200) {
            const double rate = double(accepted) / window;
            if (rate < mcmc.target_low || rate > mcmc.target_high) step *= std::exp(2.0 * (rate - target));
            accepted = window = 0;
        }
    }
    run.step = step;
    accepted = 0;
    long steps = 0;
    run.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int t = 0; t < run.thinning; ++t, ++steps) accepted += advance();
        GaussianSimplexSample s;
        s.vertices = unpack(y, d);
        s.volume = volume_of(y.data(), d);
        run.samples.push_back(std::move(s));
    }
    run.acceptance = steps ? double(accepted) / steps : 0.0;
    return run;
}

Estimate importance_moment_from_volumes(const std::vector<double>& vols, double nu, double s) {
    if (!(s >= -nu - 1)) throw ParameterError("moment order needs s >= -nu-1");
    Estimate e;
    e.n = vols.size();
    if (vols.empty()) throw ParameterError("no samples");
    double sw = 0, swf = 0;
    for (double v : vols) {
        const double w = std::pow(v, nu + 1);
        sw += w;
        swf += w * std::pow(v, s);
    }
    e.value = swf / sw;
    // Delta method for the self-normalized ratio.
    const double wbar = sw / double(e.n);
    double acc = 0;
    for (double v : vols) {
        const double w = std::pow(v, nu + 1);
        const double r = w * (std::pow(v, s) - e.value);
        acc += r * r;
    }
    e.std_error = std::sqrt(acc / (double(e.n) * (double(e.n) - 1))) / wbar;
    return e;
}

Estimate importance_moment(const CellLawParams& p, std::size_t n, std::uint64_t seed) {
    check_law(p.d, p.nu);
    return importance_moment_from_volumes(gaussian_simplex_volumes(p.d, n, seed), p.nu, p.s);
}

std::vector<double> chisq_product_sample(const CellLawParams& p, std::size_t n, std::uint64_t seed) {
    check_law(p.d, p.nu);
    Rng rng(seed, 0xC415u);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = p.d;
        for (int j = 1; j < p.d; ++j) x *= 2.0 * boost::math::gamma_p_inv(0.5 * (j + p.nu + 1), rng.uniform());
        out[i] = x;
    }
    return out;
}

Estimate internal_angle(const std::vector<int>& face, const std::vector<Vec>& simplex, std::size_t n_dirs,
                        std::uint64_t seed) {
    const ConeFrames frames(simplex);
    const int d = frames.d, m = frames.m;
    if (face.empty()) throw ParameterError("face needs at least one vertex");
    unsigned fmask = 0;
    for (int v : face) {
        if (v < 0 || v >= d) throw ParameterError("face vertex out of range");
        fmask |= 1u << v;
    }
    const int base = *std::min_element(face.begin(), face.end());
    Rng rng(seed, 0xA9u);
    std::vector<double> u(m);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_dirs; ++i) {
        for (double& c : u) c = normal(rng);
        if ((frames.negative_mask(base, u.data()) & ~fmask) == 0) ++hits;
    }
    Estimate e;
    e.n = n_dirs;
    e.value = n_dirs ? double(hits) / double(n_dirs) : 0.0;
    e.std_error = n_dirs > 1 ? std::sqrt(e.value * (1 - e.value) / double(n_dirs - 1)) : 0.0;
    return e;
}

AngleSums angle_sums(const std::vector<Vec>& simplex, std::size_t n_dirs, std::uint64_t seed) {
    const ConeFrames frames(simplex);
    const int d = frames.d, m = frames.m;
    Rng rng(seed, 0xA9u);
    std::vector<double> u(m);
    std::vector<double> sum(d, 0.0), sum2(d, 0.0);
    double g = 0.0, g2 = 0.0;
    std::vector<unsigned> neg(d);
    std::vector<int> count(d);
    for (std::size_t i = 0; i < n_dirs; ++i) {
        for (double& c : u) c = normal(rng);
        for (int b = 0; b < d; ++b) neg[b] = frames.negative_mask(b, u.data());
        std::fill(count.begin(), count.end(), 0);
        for (unsigned f = 1; f < (1u << d); ++f) {
            const int base = std::countr_zero(f);
            if ((neg[base] & ~f) == 0) ++count[std::popcount(f) - 1];
        }
        double gi = 0.0;
        for (int k = 0; k < d; ++k) {
            sum[k] += count[k];
            sum2[k] += double(count[k]) * count[k];
            gi += (k % 2 ? -1.0 : 1.0) * count[k];
        }
        g += gi;
        g2 += gi * gi;
    }
    AngleSums out;
    const double n = double(n_dirs);
    auto se = [n](double s, double s2) { return n > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1)) / n) : 0.0; };
    for (int k = 0; k < d; ++k) {
        out.sigma.push_back(sum[k] / n);
        out.std_error.push_back(se(sum[k], sum2[k]));
    }
    out.gram = g / n;
    out.gram_std_error = se(g, g2);
    return out;
}

std::vector<double> regular_simplex_angle_sums(int d, std::size_t n_dirs, std::uint64_t seed) {
    if (d < 2) throw ParameterError("d must be at least 2");
    if (d == 2) return {1.0, 1.0};
    if (d == 3) return {0.5, 1.5, 1.0};
    if (d == 4) {
        // vertex solid angle arccos(23/27), dihedral angle arccos(1/3)
        return {std::acos(23.0 / 27.0) / M_PI, 3.0 * std::acos(1.0 / 3.0) / M_PI, 2.0, 1.0};
    }
    // Regular simplex in R^{d-1}: centred standard basis of R^d in an orthonormal frame.
    std::vector<Vec> basis;  // orthonormal basis of the sum-zero hyperplane
    for (int k = 1; k < d; ++k) {
        Vec e(d, 0.0);
        for (int i = 0; i < k; ++i) e[i] = 1.0;
        e[k] = -double(k);
        const double norm = std::sqrt(double(k) * (k + 1));
        for (double& x : e) x /= norm;
        basis.push_back(e);
    }
    std::vector<Vec> simplex(d, Vec(d - 1));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d - 1; ++k) simplex[i][k] = basis[k][i];
    auto s = angle_sums(simplex, n_dirs, seed).sigma;
    s[d - 1] = 1.0;
    s[d - 2] = 0.5 * d;
    return s;
}

std::vector<double> face_intensities_closed_form(int d) {
    const auto sigma = regular_simplex_angle_sums(d);
    const double mean_vol = volume_moment({d, 0.0, 1.0});
    std::vector<double> out;
    for (int j = 0; j < d; ++j) out.push_back(sigma[j] / mean_vol);
    return out;
}

RatioEstimate empirical_weighted_cell_estimator(const std::vector<Tessellation>& list, double nu,
                                                const CellFunctional& f) {
    RatioEstimate est;
    std::vector<double> num, den;
    for (const auto& tess : list) {
        if (!tess.window_determined) {
            ++est.skipped;
            continue;
        }
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < tess.cells.size(); ++c) {
            if (!tess.valid[c]) continue;
            const auto& cell = tess.cells[c];
            std::vector<Vec> centred = cell.vertices;
            for (auto& v : centred)
                for (std::size_t k = 0; k < v.size(); ++k) v[k] -= cell.apex.w[k];
            const double w = std::pow(cell.volume, nu);
            a += w * f(centred);
            b += w;
            ++est.cells;
        }
        num.push_back(a);
        den.push_back(b);
    }
    const double A = std::accumulate(num.begin(), num.end(), 0.0);
    const double B = std::accumulate(den.begin(), den.end(), 0.0);
    if (!(B > 0.0)) throw ParameterError("no valid cells: zero weight in the denominator");
    est.realizations = num.size();
    est.value = A / B;
    const double n = double(num.size());
    if (n > 1) {
        double acc = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            const double r = num[i] - est.value * den[i];
            acc += r * r;
        }
        est.std_error = std::sqrt(acc / (n * (n - 1))) / (B / n);
    }
    return est;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        dmax = std::max(dmax, std::abs(double(i) / na - double(j) / nb));
    }
    KsResult r;
    r.statistic = dmax;
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * dmax;
    // Kolmogorov tail series.
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        q += term;
        if (std::abs(term) < 1e-16) break;
    }
    r.p_value = lambda < 0.2 ? 1.0 : std::clamp(q, 0.0, 1.0);
    return r;
}

}  // namespace ptess
