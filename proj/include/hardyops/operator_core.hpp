#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/kernels.hpp"
#include "hardyops/nevanlinna.hpp"
#include "hardyops/parallel.hpp"
#include "hardyops/power_series.hpp"
#include "hardyops/quadrature.hpp"
#include "hardyops/self_map.hpp"

namespace hardyops {

/// The map-then-differentiate operator f |-> f^(n) o phi at a fixed
/// derivative order n >= 1.
struct OperatorHandle {
    SelfMap phi;
    int n = 1;
};

inline OperatorHandle make_operator(SelfMap phi, int n) {
    if (n < 1) throw PreconditionError("make_operator: derivative order must be at least 1");
    require_self_map(phi);
    return OperatorHandle{std::move(phi), n};
}

/// Image of a truncated series under the operator, itself truncated at
/// out_order. The input must carry enough orders to determine every
/// surviving coefficient.
inline PowerSeries apply(const OperatorHandle& op, const PowerSeries& f, int out_order) {
    if (out_order < 0) throw PreconditionError("apply: negative output order");
    if (f.truncation_order() < out_order + op.n)
        throw PreconditionError("apply: input series must be truncated at order >= M_out + n");
    const PowerSeries df = derivative(f, op.n);
    return compose_with(
        df, [&](Complex z) { return map_evaluate(op.phi, z); }, out_order);
}

namespace detail {

/// Map values on the grid circles, angular nodes offset by half a step.
struct CircleSamples {
    std::vector<double> radii;
    int angular = 0;
    std::vector<std::vector<Complex>> values;
};

inline CircleSamples sample_map_circles(const SelfMap& m, const GridSpec& grid) {
    grid.validate();
    CircleSamples s;
    s.radii = grid.radii;
    s.angular = grid.angular_nodes;
    s.values.assign(s.radii.size(), {});
    parallel_for(s.radii.size(), [&](std::size_t i) {
        const double r = s.radii[i];
        std::vector<Complex> row(static_cast<std::size_t>(s.angular));
        for (int j = 0; j < s.angular; ++j) {
            const double t = 2.0 * std::numbers::pi * (j + 0.5) / s.angular;
            row[static_cast<std::size_t>(j)] =
                map_evaluate(m, r * Complex(std::cos(t), std::sin(t)));
        }
        s.values[i] = std::move(row);
    });
    return s;
}

/// means[i][k] = angular mean of |phi|^{2k} on circle i, k = 0..k_max.
inline std::vector<std::vector<double>> abs_power_means(const CircleSamples& s, int k_max) {
    std::vector<std::vector<double>> means(s.radii.size());
    parallel_for(s.radii.size(), [&](std::size_t i) {
        const auto& row = s.values[i];
        std::vector<double> sq(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) sq[j] = std::norm(row[j]);
        std::vector<double> prod(row.size(), 1.0);
        std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
        for (int k = 0; k <= k_max; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) acc += prod[j];
            out[static_cast<std::size_t>(k)] = acc / static_cast<double>(row.size());
            if (k < k_max)
                for (std::size_t j = 0; j < row.size(); ++j) prod[j] *= sq[j];
        }
        means[i] = std::move(out);
    });
    return means;
}

/// Radial limit of circle means that are a priori confined to [0, 1]
/// (powers of a self-map). A divergence verdict can only be the rising
/// pre-asymptotic stretch of the ladder; the last sample then stands in
/// as a lower estimate.
inline double bounded_mean_limit(const std::vector<std::pair<double, double>>& samples) {
    for (const auto& [r, v] : samples) {
        (void)r;
        if (!std::isfinite(v) || v > 1.0 + 1e-6)
            throw QuadratureError("bounded_mean_limit: circle mean left [0, 1]");
    }
    const RadialTrend trend = radial_limit(samples);
    if (trend.verdict == Trend::Divergent)
        return std::clamp(samples.back().second, 0.0, 1.0);
    return std::clamp(trend.limit, 0.0, 1.0);
}

inline Complex bounded_moment_limit(const std::vector<std::pair<double, double>>& re,
                                    const std::vector<std::pair<double, double>>& im) {
    for (std::size_t i = 0; i < re.size(); ++i) {
        const double mag = std::hypot(re[i].second, im[i].second);
        if (!std::isfinite(mag) || mag > 1.0 + 1e-6)
            throw QuadratureError("bounded_moment_limit: circle moment left the unit ball");
    }
    const RadialTrend tr = radial_limit(re);
    const RadialTrend ti = radial_limit(im);
    const double x = tr.verdict == Trend::Divergent ? re.back().second : tr.limit;
    const double y = ti.verdict == Trend::Divergent ? im.back().second : ti.limit;
    return Complex(x, y);
}

inline double power_norm_limit(const CircleSamples& s,
                               const std::vector<std::vector<double>>& means, int k) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(s.radii.size());
    for (std::size_t i = 0; i < s.radii.size(); ++i)
        samples.emplace_back(s.radii[i], means[i][static_cast<std::size_t>(k)]);
    return bounded_mean_limit(samples);
}

}  // namespace detail

/// ||D z^m||^2 for the monomial basis, m = n..m_max, via circle means of
/// |phi|^{2(m-n)} extrapolated in the radius.
inline std::vector<double> column_norms_sq(const OperatorHandle& op, int m_max,
                                           const GridSpec& grid) {
    if (m_max < op.n) throw PreconditionError("column_norms_sq: need m_max >= n");
    const auto samples = detail::sample_map_circles(op.phi, grid);
    const int k_max = m_max - op.n;
    const auto means = detail::abs_power_means(samples, k_max);
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double scale = falling_factorial(op.n + k, op.n);
        out[static_cast<std::size_t>(k)] =
            scale * scale * detail::power_norm_limit(samples, means, k);
    }
    return out;
}

inline double column_norm_sq(const OperatorHandle& op, int m, const GridSpec& grid) {
    if (m < op.n) throw PreconditionError("column_norm_sq: need m >= n");
    return column_norms_sq(op, m, grid).back();
}

inline double hs_partial_sum(const OperatorHandle& op, int m_max, const GridSpec& grid) {
    const auto columns = column_norms_sq(op, m_max, grid);
    double acc = 0.0;
    for (double c : columns) acc += c;
    return acc;
}

struct HsSum {
    double value = 0.0;
    int terms = 0;  // highest basis index included
    bool converged = false;
};

/// Accumulates column norms until 16 consecutive terms contribute less
/// than increment_tol relative to the running sum, or the cap is hit.
inline HsSum hs_partial_sum_adaptive(const OperatorHandle& op, const GridSpec& grid,
                                     double increment_tol = 1e-8, int max_terms = 4096) {
    if (!(increment_tol > 0.0))
        throw PreconditionError("hs_partial_sum_adaptive: tolerance must be positive");
    if (max_terms < op.n + 16)
        throw PreconditionError("hs_partial_sum_adaptive: term cap too small");

    const auto samples = detail::sample_map_circles(op.phi, grid);
    const std::size_t rows = samples.radii.size();
    std::vector<std::vector<double>> sq(rows), prod(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = samples.values[i];
        sq[i].resize(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) sq[i][j] = std::norm(row[j]);
        prod[i].assign(row.size(), 1.0);
    }

    HsSum result;
    double window = 0.0;
    std::vector<double> recent;
    std::vector<std::pair<double, double>> level(rows);
    for (int m = op.n; m <= max_terms; ++m) {
        const int k = m - op.n;
        for (std::size_t i = 0; i < rows; ++i) {
            if (k > 0)
                for (std::size_t j = 0; j < prod[i].size(); ++j) prod[i][j] *= sq[i][j];
            double acc = 0.0;
            for (double p : prod[i]) acc += p;
            level[i] = {samples.radii[i], acc / static_cast<double>(prod[i].size())};
        }
        const double scale = falling_factorial(m, op.n);
        const double term = scale * scale * detail::bounded_mean_limit(level);
        result.value += term;
        result.terms = m;

        recent.push_back(term);
        window += term;
        if (recent.size() > 16) {
            window -= recent[recent.size() - 17];
        }
        if (recent.size() >= 16 &&
            window <= increment_tol * std::max(1.0, result.value)) {
            result.converged = true;
            break;
        }
    }
    return result;
}

struct GramMatrix {
    int n = 1;
    int max_index = 0;  // entries cover basis indices n..max_index
    Eigen::MatrixXcd entries;
};

/// Inner products of operator columns on the monomial basis. Diagonal
/// entries share the column-norm computation path; off-diagonal entries
/// come from complex circle moments with the same radial extrapolation.
inline GramMatrix gram_matrix(const OperatorHandle& op, int m_max, const GridSpec& grid) {
    if (m_max < op.n) throw PreconditionError("gram_matrix: need m_max >= n");
    const int dim = m_max - op.n + 1;
    if (dim > 512) throw PreconditionError("gram_matrix: dimension capped at 512");

    const auto samples = detail::sample_map_circles(op.phi, grid);
    const std::size_t rows = samples.radii.size();
    const int K = dim - 1;

    std::vector<Eigen::MatrixXcd> moments(rows);
    parallel_for(rows, [&](std::size_t i) {
        const auto& row = samples.values[i];
        const std::size_t width = row.size();
        Eigen::MatrixXcd powers(K + 1, width);
        for (std::size_t j = 0; j < width; ++j) {
            Complex p(1.0);
            for (int k = 0; k <= K; ++k) {
                powers(k, static_cast<Eigen::Index>(j)) = p;
                p *= row[j];
            }
        }
        Eigen::MatrixXcd m_local = (powers * powers.adjoint()) /
                                   Complex(static_cast<double>(width));
        moments[i] = std::move(m_local);
    });

    const auto means = detail::abs_power_means(samples, K);

    GramMatrix g;
    g.n = op.n;
    g.max_index = m_max;
    g.entries = Eigen::MatrixXcd::Zero(dim, dim);

    std::vector<double> scales(static_cast<std::size_t>(dim));
    for (int k = 0; k <= K; ++k)
        scales[static_cast<std::size_t>(k)] = falling_factorial(op.n + k, op.n);

    std::vector<std::pair<double, double>> re(rows), im(rows);
    for (int k = 0; k <= K; ++k) {
        for (int l = 0; l <= k; ++l) {
            Complex limit;
            if (l == k) {
                limit = Complex(detail::power_norm_limit(samples, means, k));
            } else {
                for (std::size_t i = 0; i < rows; ++i) {
                    const Complex v = moments[i](k, l);
                    re[i] = {samples.radii[i], v.real()};
                    im[i] = {samples.radii[i], v.imag()};
                }
                limit = detail::bounded_moment_limit(re, im);
            }
            const Complex entry = scales[static_cast<std::size_t>(k)] *
                                  scales[static_cast<std::size_t>(l)] * limit;
            g.entries(k, l) = entry;
            if (l != k) g.entries(l, k) = std::conj(entry);
        }
    }
    return g;
}

/// Largest singular value of the operator restricted to polynomials of
/// degree at most m_max: a certified lower bound for the operator norm,
/// nondecreasing in m_max.
inline double norm_lower_bound(const OperatorHandle& op, int m_max,
                               const GridSpec& grid = GridSpec::defaults()) {
    const GramMatrix g = gram_matrix(op, m_max, grid);
    const Eigen::MatrixXcd sym = 0.5 * (g.entries + g.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw RootFindingError("norm_lower_bound: eigensolver failed");
    const double top = solver.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

struct KernelImageNorm {
    double value = 0.0;
    double tail_estimate = 0.0;
};

/// Squared norm of the operator applied to a normalized reproducing
/// kernel, truncated at out_order, with a geometric estimate of the
/// dropped squared-coefficient mass.
inline KernelImageNorm kernel_image_norm_sq(const OperatorHandle& op, Complex lambda,
                                            int out_order) {
    const PowerSeries k = normalized_kernel(lambda, out_order + op.n);
    const PowerSeries img = apply(op, k, out_order);
    KernelImageNorm result;
    result.value = h2_norm_sq(img);
    std::vector<Complex> sq_coeffs;
    sq_coeffs.reserve(img.coefficients().size());
    for (const Complex& c : img.coefficients()) sq_coeffs.emplace_back(std::norm(c));
    result.tail_estimate = detail::geometric_tail_estimate(sq_coeffs);
    return result;
}

/// Hardy norm of g . phi by circle means of a pointwise weight: g_abs_sq
/// receives w = phi(z) and returns |g(w)|^2. Pointwise evaluation avoids
/// the r^-m noise amplification that coefficient extraction of the
/// composed series suffers at degree m, and needs no output truncation
/// (phi = z^k spreads input degrees k-fold). The angular grids refine per
/// radius because the weight can peak sharply as r approaches 1.
template <class G>
double composed_norm_sq_means(const SelfMap& phi, G&& g_abs_sq, const GridSpec& grid) {
    std::vector<std::pair<double, double>> samples(grid.radii.size());
    parallel_for(static_cast<int>(grid.radii.size()), [&](int i) {
        const double r = grid.radii[static_cast<std::size_t>(i)];
        // Radial extrapolation amplifies per-mean noise through its shrinking
        // difference denominators, so the means are held three decades below
        // the accuracy wanted of the limit.
        const double mean = circle_mean_adaptive(
            [&](Complex z) { return g_abs_sq(map_evaluate(phi, z)); }, r, 1e-12,
            grid.angular_nodes, 1 << 20);
        samples[static_cast<std::size_t>(i)] = {r, mean};
    });
    const RadialTrend trend = radial_limit_halving(samples);
    if (trend.verdict == Trend::Convergent) return trend.limit;
    // |g . phi|^2 is subharmonic, so a ladder still rising at the last
    // radius yields that final mean as a lower estimate.
    return samples.back().second;
}

/// Squared norm of the operator applied to f by the circle-mean route.
inline double applied_norm_sq_means(const OperatorHandle& op, const PowerSeries& f,
                                    const GridSpec& grid) {
    const PowerSeries g = derivative(f, op.n);
    return composed_norm_sq_means(
        op.phi, [&](Complex w) { return std::norm(evaluate(g, w)); }, grid);
}

namespace detail {

inline std::vector<double> hs_alpha_coefficients(int n) {
    if (n < 0) throw PreconditionError("hs_alpha_coefficients: negative order");
    auto fact = [](int v) {
        double acc = 1.0;
        for (int i = 2; i <= v; ++i) acc *= i;
        return acc;
    };
    std::vector<double> alphas(static_cast<std::size_t>(n) + 1);
    const double nf = fact(n);
    for (int k = 0; k <= n; ++k)
        alphas[static_cast<std::size_t>(k)] =
            nf * nf * fact(n + k) / (fact(k) * fact(k) * fact(n - k));
    return alphas;
}

/// min over t in [0,1] of sum alpha_k t^k (1-t)^(n-k), with 0^0 = 1.
inline double bernstein_min(const std::vector<double>& alphas, int n) {
    auto value_at = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < alphas.size(); ++k)
            acc += alphas[k] * std::pow(t, static_cast<double>(k)) *
                   std::pow(1.0 - t, static_cast<double>(n) - static_cast<double>(k));
        return acc;
    };
    const int scan = 1024;
    double best_t = 0.0, best = value_at(0.0);
    for (int i = 1; i <= scan; ++i) {
        const double t = static_cast<double>(i) / scan;
        const double v = value_at(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    double lo = std::max(0.0, best_t - 1.0 / scan);
    double hi = std::min(1.0, best_t + 1.0 / scan);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = value_at(a), fb = value_at(b);
    while (hi - lo > 1e-12) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = value_at(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = value_at(b);
        }
    }
    return std::min(best, std::min(fa, fb));
}

}  // namespace detail

struct HsBracket {
    double lower = 0.0;
    double upper = 0.0;
    double beta = 0.0;
    double alpha_sum = 0.0;
    double x_lower = 0.0;
    double x_upper = 0.0;
};

/// Two-sided enclosure for the full Hilbert-Schmidt sum. The lower leg
/// evaluates at x = ||phi||^2 (power means dominate powers of the mean),
/// the upper leg at the squared sup estimate; both collapse to the same
/// x for circularly symmetric maps.
inline HsBracket hs_bracket(const OperatorHandle& op, const GridSpec& grid) {
    const auto alphas = detail::hs_alpha_coefficients(op.n);
    HsBracket bracket;
    for (double a : alphas) bracket.alpha_sum += a;
    bracket.beta = detail::bernstein_min(alphas, op.n);
    bracket.x_lower = std::clamp(map_norm_sq(op.phi, grid), 0.0, 1.0 - 1e-15);
    const double sup = map_sup_estimate(op.phi);
    bracket.x_upper = std::min(1.0, sup * sup);
    const double expo = 2.0 * op.n + 1.0;
    bracket.lower = bracket.beta / std::pow(1.0 - bracket.x_lower, expo);
    // The sup is sampled strictly inside the disk; anything this close to 1
    // means the boundary is touched and no finite upper leg is justified.
    bracket.upper = bracket.x_upper >= 1.0 - 1e-6
                        ? std::numeric_limits<double>::infinity()
                        : bracket.alpha_sum / std::pow(1.0 - bracket.x_upper, expo);
    return bracket;
}

}  // namespace hardyops
