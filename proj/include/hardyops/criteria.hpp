#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/nevanlinna.hpp"
#include "hardyops/operator_core.hpp"
#include "hardyops/quadrature.hpp"
#include "hardyops/self_map.hpp"

namespace hardyops {

enum class Verdict { BoundedConsistent, CompactConsistent, UnboundedConsistent, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::BoundedConsistent: return "bounded-consistent";
        case Verdict::CompactConsistent: return "compact-consistent";
        case Verdict::UnboundedConsistent: return "unbounded-consistent";
        default: return "inconclusive";
    }
}

/// Trend classification of a radial statistic. Asymptotic order conditions
/// are undecidable from finitely many radii, so every verdict is a
/// "-consistent" label backed by the recorded evidence.
struct Diagnostic {
    std::string criterion;
    std::string map_label;
    int n = 1;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<double, double>> evidence;  // (radius, statistic)
};

namespace detail {

inline double factorial(int v) {
    double acc = 1.0;
    for (int i = 2; i <= v; ++i) acc *= i;
    return acc;
}

/// Max of a real statistic over an offset angular grid, with one doubling
/// pass folded in. Non-finite samples (interior counting spikes) are
/// skipped: the statistic tracks boundary growth, not the spike.
template <class F>
double circle_statistic_max(F&& f, double r, int base_nodes) {
    double best = 0.0;
    for (int nodes : {base_nodes, 2 * base_nodes}) {
        for (int j = 0; j < nodes; ++j) {
            const double t = 2.0 * std::numbers::pi * (j + 0.5) / nodes;
            const double v = f(r * Complex(std::cos(t), std::sin(t)));
            if (std::isfinite(v)) best = std::max(best, v);
        }
    }
    return best;
}

struct TrendSummary {
    bool zero_tail = false;
    bool all_below_low = true;   // last-3 ratios < 0.9
    bool all_below_mid = true;   // last-3 ratios < 1.1
    bool all_above_high = true;  // last-3 ratios >= 1.5
    bool tiny_final = false;     // final value < 1e-3 * max value
};

inline TrendSummary summarize_trend(const std::vector<std::pair<double, double>>& evidence) {
    TrendSummary s;
    const std::size_t count = evidence.size();
    if (count < 4) throw PreconditionError("summarize_trend: need at least 4 radii");

    const double floor = 1e-300;

    s.zero_tail = true;
    for (std::size_t i = count - 3; i < count; ++i)
        if (std::abs(evidence[i].second) > floor) s.zero_tail = false;
    s.tiny_final =
        std::abs(evidence.back().second) < 1e-3 * std::abs(evidence.front().second);

    for (std::size_t i = count - 3; i < count; ++i) {
        const double prev = evidence[i - 1].second;
        const double cur = evidence[i].second;
        const double ratio = std::abs(prev) <= floor
                                 ? (std::abs(cur) <= floor ? 1.0
                                                           : std::numeric_limits<double>::infinity())
                                 : std::abs(cur) / std::abs(prev);
        if (!(ratio < 0.9)) s.all_below_low = false;
        if (!(ratio < 1.1)) s.all_below_mid = false;
        if (!(ratio >= 1.5)) s.all_above_high = false;
    }
    return s;
}

}  // namespace detail

/// Growth statistic behind the boundedness and compactness diagnostics:
/// Q(r) = max over the circle of N(w) / [log(1/r)]^(2n+1).
inline std::vector<std::pair<double, double>> counting_growth_statistic(
    const OperatorHandle& op, const GridSpec& grid, int angular_nodes = 256) {
    grid.validate();
    const double expo = 2.0 * op.n + 1.0;
    std::vector<std::pair<double, double>> evidence(grid.radii.size());
    parallel_for(grid.radii.size(), [&](std::size_t i) {
        const double r = grid.radii[i];
        const double denom = std::pow(std::log(1.0 / r), expo);
        const double peak = detail::circle_statistic_max(
            [&](Complex w) { return counting_function(op.phi, w).value; }, r, angular_nodes);
        evidence[i] = {r, peak / denom};
    });
    return evidence;
}

inline Diagnostic boundedness_diagnostic(const OperatorHandle& op, const GridSpec& grid) {
    Diagnostic d;
    d.criterion = "counting-growth-bounded";
    d.map_label = render(op.phi);
    d.n = op.n;
    d.evidence = counting_growth_statistic(op, grid);
    const auto s = detail::summarize_trend(d.evidence);
    if (s.zero_tail || s.all_below_mid)
        d.verdict = Verdict::BoundedConsistent;
    else if (s.all_above_high)
        d.verdict = Verdict::UnboundedConsistent;
    else
        d.verdict = Verdict::Inconclusive;
    return d;
}

inline Diagnostic compactness_diagnostic(const OperatorHandle& op, const GridSpec& grid) {
    Diagnostic d;
    d.criterion = "counting-growth-compact";
    d.map_label = render(op.phi);
    d.n = op.n;
    d.evidence = counting_growth_statistic(op, grid);
    const auto s = detail::summarize_trend(d.evidence);
    if (s.zero_tail || (s.all_below_low && s.tiny_final))
        d.verdict = Verdict::CompactConsistent;
    else if (s.all_above_high)
        d.verdict = Verdict::UnboundedConsistent;
    else
        d.verdict = Verdict::Inconclusive;
    return d;
}

/// Statistic for declared-univalent maps:
/// R(r) = max over the circle of (1 - r) / (1 - |phi(w)|)^(2n+1).
inline Diagnostic univalent_ratio_diagnostic(const OperatorHandle& op, const GridSpec& grid) {
    if (!op.phi.univalent())
        throw NotUnivalentError(render(op.phi) + ": ratio criterion needs a univalent map");
    grid.validate();
    Diagnostic d;
    d.criterion = "univalent-ratio";
    d.map_label = render(op.phi);
    d.n = op.n;
    const double expo = 2.0 * op.n + 1.0;
    d.evidence.resize(grid.radii.size());
    parallel_for(grid.radii.size(), [&](std::size_t i) {
        const double r = grid.radii[i];
        const double peak = detail::circle_statistic_max(
            [&](Complex w) {
                const double gap = std::max(1e-300, 1.0 - std::abs(map_evaluate(op.phi, w)));
                return (1.0 - r) / std::pow(gap, expo);
            },
            r, 256);
        d.evidence[i] = {r, peak};
    });
    const auto s = detail::summarize_trend(d.evidence);
    if (s.zero_tail || (s.all_below_low && s.tiny_final))
        d.verdict = Verdict::CompactConsistent;
    else if (s.all_below_mid)
        d.verdict = Verdict::BoundedConsistent;
    else if (s.all_above_high)
        d.verdict = Verdict::UnboundedConsistent;
    else
        d.verdict = Verdict::Inconclusive;
    return d;
}

enum class HsVerdict { HsConsistent, NotHsConsistent, Inconclusive };

inline const char* to_string(HsVerdict v) {
    switch (v) {
        case HsVerdict::HsConsistent: return "HS-consistent";
        case HsVerdict::NotHsConsistent: return "not-HS-consistent";
        default: return "inconclusive";
    }
}

struct HsReport {
    HsVerdict verdict = HsVerdict::Inconclusive;
    double limit = 0.0;
    std::vector<std::pair<double, double>> evidence;  // (radius, circle mean)
};

/// Circle means of (1 - |phi|^2)^-(2n+1) classified by their radial trend.
inline HsReport hs_criterion(const OperatorHandle& op, const GridSpec& grid) {
    grid.validate();
    const double expo = -(2.0 * op.n + 1.0);
    HsReport report;
    report.evidence.resize(grid.radii.size());
    parallel_for(grid.radii.size(), [&](std::size_t i) {
        const double r = grid.radii[i];
        const double mean =
            circle_mean(
                [&](Complex z) {
                    const double gap =
                        std::max(1e-300, 1.0 - std::norm(map_evaluate(op.phi, z)));
                    return std::pow(gap, expo);
                },
                r, grid.angular_nodes)
                .value;
        report.evidence[i] = {r, mean};
    });
    const RadialTrend trend = radial_limit(report.evidence);
    switch (trend.verdict) {
        case Trend::Convergent:
            report.verdict = HsVerdict::HsConsistent;
            report.limit = trend.limit;
            break;
        case Trend::Divergent:
            report.verdict = HsVerdict::NotHsConsistent;
            report.limit = std::numeric_limits<double>::infinity();
            break;
        default:
            report.verdict = HsVerdict::Inconclusive;
            report.limit = trend.limit;
            break;
    }
    return report;
}

struct Lemma31Bounds {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double beta = 0.0;
};

/// Two-sided estimate for sums of the form
/// sum_k alpha_k x^k / (1-x)^(n+k+1): both legs have the single exponent
/// 2n+1, with beta the minimum of the weighted Bernstein-type factor.
inline Lemma31Bounds lemma31_bounds(const std::vector<double>& alphas, int n, double x) {
    if (n < 0) throw PreconditionError("lemma31_bounds: negative n");
    if (alphas.size() != static_cast<std::size_t>(n) + 1)
        throw PreconditionError("lemma31_bounds: need exactly n+1 coefficients");
    for (double a : alphas)
        if (!(a > 0.0)) throw PreconditionError("lemma31_bounds: coefficients must be positive");
    if (!(x >= 0.0) || x >= 1.0) throw PreconditionError("lemma31_bounds: need 0 <= x < 1");

    Lemma31Bounds out;
    double alpha_sum = 0.0;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        out.value += alphas[k] * std::pow(x, static_cast<double>(k)) /
                     std::pow(1.0 - x, static_cast<double>(n) + static_cast<double>(k) + 1.0);
        alpha_sum += alphas[k];
    }
    const double expo = 2.0 * n + 1.0;
    out.beta = detail::bernstein_min(alphas, n);
    out.lower = out.beta / std::pow(1.0 - x, expo);
    out.upper = alpha_sum / std::pow(1.0 - x, expo);
    const double slack = 1e-9 * std::max(1.0, out.value);
    if (out.lower > out.value + slack || out.value > out.upper + slack)
        throw ToleranceError("lemma31_bounds: bracket violated");
    return out;
}

struct Lemma32Report {
    double lhs_partial = 0.0;
    double rhs_closed = 0.0;
    double residual = 0.0;
};

/// Adaptive partial sum of sum_{m>=n} [m(m-1)...(m-n+1)]^2 x^(m-n)
/// against its closed form.
inline Lemma32Report lemma32_identity(int n, double x, double tol) {
    if (n < 0) throw PreconditionError("lemma32_identity: negative n");
    if (!(x >= 0.0) || x >= 1.0) throw PreconditionError("lemma32_identity: need 0 <= x < 1");
    if (!(tol > 0.0)) throw PreconditionError("lemma32_identity: tolerance must be positive");

    Lemma32Report report;
    const int term_cap = 2000000;
    double partial = 0.0;
    bool settled = false;
    for (int m = n; m <= term_cap; ++m) {
        const double scale = falling_factorial(m, n);
        const double term = scale * scale * std::pow(x, static_cast<double>(m - n));
        partial += term;
        // Geometric tail estimate: successive term ratios approach x.
        const double tail = x >= 1.0 ? std::numeric_limits<double>::infinity()
                                     : term * x / (1.0 - x);
        if (m - n >= 4 && tail <= 0.5 * tol * std::max(1.0, partial)) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw ToleranceError("lemma32_identity: partial sum did not settle at the term cap");
    report.lhs_partial = partial;

    const auto alphas = detail::hs_alpha_coefficients(n);
    for (std::size_t k = 0; k < alphas.size(); ++k)
        report.rhs_closed += alphas[k] * std::pow(x, static_cast<double>(k)) /
                             std::pow(1.0 - x, static_cast<double>(n) + static_cast<double>(k) + 1.0);
    report.residual = std::abs(report.lhs_partial - report.rhs_closed) / report.rhs_closed;
    return report;
}

struct ChainReport {
    double a = 0.0;  // squared norm of the operator on a normalized kernel
    double b = 0.0;  // weighted counting integral
    double c = 0.0;  // pointwise counting lower term
    bool holds = false;
};

/// Three-term chain a >= b >= c linking the kernel image norm, a weighted
/// counting integral, and a pointwise counting value at the kernel
/// parameter. Admissible lambda only: the pseudo-hyperbolic distance from
/// phi(0) to lambda must exceed 1/2.
inline ChainReport chain_2_22_check(const OperatorHandle& op, Complex lambda,
                                    const GridSpec& grid) {
    if (!(std::abs(lambda) < 1.0))
        throw PreconditionError("chain_2_22_check: need |lambda| < 1");
    const Complex at_origin = map_evaluate(op.phi, Complex(0.0));
    const double admissibility =
        std::abs((lambda - at_origin) / (1.0 - std::conj(lambda) * at_origin));
    if (!(admissibility > 0.5))
        throw PreconditionError(
            "chain_2_22_check: lambda within pseudo-hyperbolic distance 1/2 of phi(0)");

    const int n = op.n;
    const double lam_abs = std::abs(lambda);
    const double fac = detail::factorial(n + 1);
    const double lam_pow = std::pow(lam_abs, 2.0 * n + 2.0);
    const double one_minus = 1.0 - lam_abs * lam_abs;

    ChainReport report;
    // The normalized kernel has a closed-form n-th derivative,
    // |k^(n)(w)|^2 = (1-|lambda|^2) (n!)^2 |lambda|^(2n) / |1 - conj(lambda) w|^(2n+2),
    // so the image norm comes from circle means of that weight with no
    // series truncation at all.
    const double fac_n = detail::factorial(n);
    const double a_pre = one_minus * fac_n * fac_n * std::pow(lam_abs, 2.0 * n);
    report.a = composed_norm_sq_means(
        op.phi,
        [&](Complex w) {
            return a_pre / std::pow(std::abs(1.0 - std::conj(lambda) * w), 2.0 * n + 2.0);
        },
        grid);

    const double b_coef = 2.0 * fac * fac * lam_pow * one_minus;
    report.b = integrate_against_counting(
        op.phi,
        [&](Complex w) {
            return b_coef / std::pow(std::abs(1.0 - std::conj(lambda) * w),
                                     2.0 * n + 4.0);
        },
        grid);

    const double n_at_lambda = counting_function(op.phi, lambda).value;
    report.c = fac * fac * lam_pow * n_at_lambda /
               (std::pow(2.0, 2.0 * n + 1.0) * std::pow(one_minus, 2.0 * n + 1.0));

    const double tol = 1e-6;
    report.holds = report.a >= report.b - tol && report.b >= report.c - tol;
    return report;
}

struct GrowthReport {
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// Derivative growth estimate |f^(n)(z)| <= n! ||f|| / (1-|z|)^(n+1).
inline GrowthReport derivative_growth_check(const PowerSeries& f, int n, Complex z) {
    if (n < 0) throw PreconditionError("derivative_growth_check: negative order");
    if (!(std::abs(z) < 1.0)) throw PreconditionError("derivative_growth_check: need |z| < 1");
    GrowthReport report;
    report.lhs = std::abs(evaluate(derivative(f, n), z));
    report.bound = detail::factorial(n) * std::sqrt(h2_norm_sq(f)) /
                   std::pow(1.0 - std::abs(z), static_cast<double>(n) + 1.0);
    report.holds = report.lhs <= report.bound * (1.0 + 1e-12) + 1e-300;
    return report;
}

/// Max over [n+1, infinity) of prod_{i<n} (x-i)^2 / (x-n)^(2n); attained
/// at the left endpoint, where it equals ((n+1)!)^2.
inline double kappa_bound(int n) {
    if (n < 1) throw PreconditionError("kappa_bound: need n >= 1");
    auto value_at = [&](double x) {
        double num = 1.0;
        for (int i = 0; i < n; ++i) num *= (x - i) * (x - i);
        return num / std::pow(x - n, 2.0 * n);
    };
    double best = value_at(static_cast<double>(n) + 1.0);
    for (int j = 0; j <= 4096; ++j) {
        const double t = std::pow(10.0, -6.0 + 10.0 * j / 4096.0);
        best = std::max(best, value_at(static_cast<double>(n) + 1.0 + t));
    }
    return best;
}

}  // namespace hardyops
