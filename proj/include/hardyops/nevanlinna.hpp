#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/power_series.hpp"
#include "hardyops/quadrature.hpp"
#include "hardyops/self_map.hpp"

namespace hardyops {

struct CountingValue {
    double value = 0.0;
    /// Number of preimages counted (with multiplicity); -1 when the set is
    /// not enumerable (constant map at its own value).
    int preimage_count = 0;

    bool infinite() const { return std::isinf(value); }
};

/// Sum of log(1/|z|) over the in-disk solutions of phi(z) = w. Infinite
/// exactly at w = phi(0) (witnessed by the preimage at the origin); zero
/// off the image of the map.
inline CountingValue counting_function(const SelfMap& m, Complex w) {
    if (!is_finite(w) || std::abs(w) >= 1.0)
        throw PreconditionError("counting_function: target must satisfy |w| < 1");

    if (auto c = constant_value(m)) {
        if (std::abs(w - *c) < 1e-12)
            return {std::numeric_limits<double>::infinity(), -1};
        return {0.0, 0};
    }

    const Complex at_origin = map_evaluate(m, Complex(0.0));
    if (std::abs(w - at_origin) < 1e-12) {
        const auto pre = preimages(m, w);
        return {std::numeric_limits<double>::infinity(), static_cast<int>(pre.size())};
    }

    const auto pre = preimages(m, w);
    double acc = 0.0;
    for (const Complex& z : pre) acc += std::log(1.0 / std::abs(z));
    return {acc, static_cast<int>(pre.size())};
}

namespace detail {

/// Radii where the counting function is known to kink (image boundaries
/// that are circles about the origin).
inline std::vector<double> counting_breakpoints(const SelfMap& m) {
    struct Visitor {
        std::vector<double> operator()(const AffineMap& f) const {
            const double hub = std::abs(f.b), spoke = std::abs(f.a);
            return {std::abs(hub - spoke), hub + spoke};
        }
        std::vector<double> operator()(const MobiusMap&) const { return {}; }
        std::vector<double> operator()(const MonomialMap& f) const {
            return {std::abs(f.scale)};
        }
        std::vector<double> operator()(const PolyMap&) const { return {}; }
        std::vector<double> operator()(const BlaschkeMap&) const { return {}; }
        std::vector<double> operator()(const ContactMap&) const { return {}; }
        std::vector<double> operator()(const ComposedMap&) const { return {}; }
    };
    return std::visit(Visitor{}, m.variant());
}

}  // namespace detail

/// Integral over the disk of weight(w) N(w) dA(w) for a continuous weight.
/// The logarithmic spike of N at c = phi(0) is removed by subtracting
/// weight(c) log(1/|w - c|), whose disk integral is (1 - |c|^2)/2 in
/// closed form, and adding it back after quadrature.
template <class W>
double integrate_against_counting(const SelfMap& m, W&& weight, const GridSpec& grid) {
    if (constant_value(m)) return 0.0;

    const Complex c = map_evaluate(m, Complex(0.0));
    const double wc = weight(c);

    DiskIntegralOptions opt;
    opt.log_singularity = c;
    opt.radial_breakpoints = detail::counting_breakpoints(m);

    auto integrand = [&](Complex w) {
        const CountingValue n = counting_function(m, w);
        if (n.infinite())
            throw QuadratureError("integrate_against_counting: node collided with phi(0)");
        return weight(w) * n.value - wc * std::log(1.0 / std::abs(w - c));
    };
    const double smooth_part = disk_integral(integrand, grid, opt);
    return smooth_part + wc * 0.5 * (1.0 - std::norm(c));
}

/// Total counting mass: integral of N over the disk. Equals
/// (||phi||^2 - |phi(0)|^2) / 2 and is strictly below 1 for self-maps.
inline double counting_mass(const SelfMap& m, const GridSpec& grid) {
    return integrate_against_counting(m, [](Complex) { return 1.0; }, grid);
}

/// Squared Hardy norm of the map itself, via circle means of |phi|^2
/// extrapolated in the radius. Entirely pointwise, so it works for maps
/// whose series truncations converge slowly.
inline double map_norm_sq(const SelfMap& m, const GridSpec& grid) {
    grid.validate();
    std::vector<std::pair<double, double>> samples;
    samples.reserve(grid.radii.size());
    for (double r : grid.radii) {
        const double mean =
            circle_mean([&](Complex z) { return std::norm(map_evaluate(m, z)); }, r,
                        grid.angular_nodes)
                .value;
        samples.emplace_back(r, mean);
    }
    const RadialTrend trend = radial_limit(samples);
    if (trend.verdict == Trend::Divergent)
        throw QuadratureError("map_norm_sq: circle means diverged for a bounded map");
    return trend.limit;
}

struct LittlewoodPaleyReport {
    double lhs = 0.0;       // ||f o phi||^2 via composition coefficients
    double rhs = 0.0;       // |f(phi(0))|^2 + 2 integral of |f'|^2 N dA
    double residual = 0.0;  // |lhs - rhs| / max(1, lhs)
};

/// Checks the exact change-of-variable identity connecting the norm of a
/// composition to the counting function. Polynomial f only.
inline LittlewoodPaleyReport littlewood_paley_check(const PowerSeries& f, const SelfMap& m,
                                                    const GridSpec& grid) {
    grid.validate();
    const int out_order = std::max(256, 4 * f.truncation_order());
    const PowerSeries composed = compose_with(
        f, [&](Complex z) { return map_evaluate(m, z); }, out_order);

    LittlewoodPaleyReport report;
    report.lhs = h2_norm_sq(composed);

    const PowerSeries df = derivative(f);
    const Complex at_origin = map_evaluate(m, Complex(0.0));
    const double boundary_term = std::norm(evaluate(f, at_origin));
    const double area_term = integrate_against_counting(
        m, [&](Complex w) { return std::norm(evaluate(df, w)); }, grid);
    report.rhs = boundary_term + 2.0 * area_term;
    report.residual = std::abs(report.lhs - report.rhs) / std::max(1.0, report.lhs);
    return report;
}

struct SubMeanReport {
    double lhs = 0.0;       // N at the disk center
    double rhs_mean = 0.0;  // area mean of N over the disk
    bool holds = false;
};

/// Sub-mean-value property of the counting function on a disk D(center,
/// radius) that avoids phi(0): the center value is at most the area mean.
inline SubMeanReport sub_mean_value_check(const SelfMap& m, Complex center, double radius,
                                          const GridSpec& grid) {
    grid.validate();
    if (!(radius > 0.0) || std::abs(center) + radius >= 1.0)
        throw PreconditionError("sub_mean_value_check: disk must lie inside the unit disk");
    const Complex c = map_evaluate(m, Complex(0.0));
    if (std::abs(center - c) <= radius + 1e-9)
        throw PreconditionError("sub_mean_value_check: disk must avoid phi(0)");

    SubMeanReport report;
    report.lhs = counting_function(m, center).value;

    auto n_at = [&](Complex w) { return counting_function(m, w).value; };

    double previous = 0.0;
    bool have_previous = false;
    for (int level = 0; level < 5; ++level) {
        const auto& rule = gauss_legendre(16 << std::min(level, 2));
        const int angular = (grid.angular_nodes / 2) << level;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = 0.5 * radius * (rule.nodes[i] + 1.0);
            const double w = 0.5 * radius * rule.weights[i];
            double ring = 0.0;
            for (int j = 0; j < angular; ++j) {
                const double t = 2.0 * std::numbers::pi * (j + 0.5) / angular;
                ring += n_at(center + s * Complex(std::cos(t), std::sin(t)));
            }
            acc += w * 2.0 * s * (ring / angular);
        }
        const double mean = acc / (radius * radius);
        if (have_previous &&
            std::abs(mean - previous) <= grid.rel_tol * std::max(1.0, std::abs(mean))) {
            report.rhs_mean = mean;
            const double slack = std::max(1e-9, 2.0 * grid.rel_tol * std::max(1.0, mean));
            report.holds = report.lhs <= mean + slack;
            return report;
        }
        previous = mean;
        have_previous = true;
    }
    throw QuadratureError("sub_mean_value_check: disk mean did not converge");
}

}  // namespace hardyops
