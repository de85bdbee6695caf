#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "hardyops/errors.hpp"

namespace hardyops {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Falling factorial m (m-1) ... (m-k+1) as a double; k = 0 gives 1.
inline double falling_factorial(int m, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= static_cast<double>(m - i);
    return p;
}

/// Truncated Maclaurin series. Index m holds the coefficient of z^m, so a
/// series truncated at order M stores M+1 coefficients. Instances are
/// immutable; every operation returns a new series.
class PowerSeries {
public:
    explicit PowerSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(Complex(0.0));
        for (const Complex& c : coeffs_)
            if (!is_finite(c)) throw PreconditionError("PowerSeries: non-finite coefficient");
    }

    static PowerSeries zero(int order = 0) {
        return PowerSeries(std::vector<Complex>(static_cast<std::size_t>(order) + 1, Complex(0.0)));
    }

    static PowerSeries constant(Complex c) { return PowerSeries({c}); }

    /// scale * z^degree, truncated exactly at `degree`.
    static PowerSeries monomial(int degree, Complex scale = Complex(1.0)) {
        if (degree < 0) throw PreconditionError("PowerSeries::monomial: negative degree");
        std::vector<Complex> c(static_cast<std::size_t>(degree) + 1, Complex(0.0));
        c.back() = scale;
        return PowerSeries(std::move(c));
    }

    int truncation_order() const { return static_cast<int>(coeffs_.size()) - 1; }

    const std::vector<Complex>& coefficients() const { return coeffs_; }

    /// Coefficient of z^m; zero beyond the truncation order.
    Complex coefficient(int m) const {
        if (m < 0 || m >= static_cast<int>(coeffs_.size())) return Complex(0.0);
        return coeffs_[static_cast<std::size_t>(m)];
    }

    /// Re-truncate: drops coefficients above `order` or zero-pads up to it.
    PowerSeries truncated(int order) const {
        if (order < 0) throw PreconditionError("PowerSeries::truncated: negative order");
        std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
        const std::size_t keep = std::min(c.size(), coeffs_.size());
        std::copy_n(coeffs_.begin(), keep, c.begin());
        return PowerSeries(std::move(c));
    }

private:
    std::vector<Complex> coeffs_;
};

/// k-th term-by-term derivative. Differentiating past the truncation
/// order yields the zero series.
inline PowerSeries derivative(const PowerSeries& s, int k = 1) {
    if (k < 0) throw PreconditionError("derivative: negative order");
    if (k == 0) return s;
    const int m_top = s.truncation_order();
    if (k > m_top) return PowerSeries::zero(0);
    std::vector<Complex> out(static_cast<std::size_t>(m_top - k) + 1);
    for (int m = k; m <= m_top; ++m)
        out[static_cast<std::size_t>(m - k)] = falling_factorial(m, k) * s.coefficient(m);
    return PowerSeries(std::move(out));
}

/// Horner evaluation. Rejects |z| > 1: the series only represents a
/// function on the closed unit disk.
inline Complex evaluate(const PowerSeries& s, Complex z) {
    if (!is_finite(z)) throw PreconditionError("evaluate: non-finite point");
    if (std::abs(z) > 1.0) throw PreconditionError("evaluate: |z| > 1");
    const auto& c = s.coefficients();
    Complex acc = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * z + c[i];
    return acc;
}

/// Squared Hardy norm of the truncation: sum of |coefficient|^2.
inline double h2_norm_sq(const PowerSeries& s) {
    double acc = 0.0;
    for (const Complex& c : s.coefficients()) acc += std::norm(c);
    return acc;
}

inline PowerSeries add(const PowerSeries& a, const PowerSeries& b) {
    const int order = std::max(a.truncation_order(), b.truncation_order());
    std::vector<Complex> out(static_cast<std::size_t>(order) + 1);
    for (int m = 0; m <= order; ++m)
        out[static_cast<std::size_t>(m)] = a.coefficient(m) + b.coefficient(m);
    return PowerSeries(std::move(out));
}

inline PowerSeries scaled(const PowerSeries& a, Complex factor) {
    std::vector<Complex> out = a.coefficients();
    for (Complex& c : out) c *= factor;
    return PowerSeries(std::move(out));
}

/// Cauchy product truncated at `out_order`.
inline PowerSeries multiply(const PowerSeries& a, const PowerSeries& b, int out_order) {
    if (out_order < 0) throw PreconditionError("multiply: negative order");
    std::vector<Complex> out(static_cast<std::size_t>(out_order) + 1, Complex(0.0));
    const int na = std::min(a.truncation_order(), out_order);
    for (int i = 0; i <= na; ++i) {
        const Complex ai = a.coefficient(i);
        if (ai == Complex(0.0)) continue;
        const int nb = std::min(b.truncation_order(), out_order - i);
        for (int j = 0; j <= nb; ++j)
            out[static_cast<std::size_t>(i + j)] += ai * b.coefficient(j);
    }
    return PowerSeries(std::move(out));
}

/// Coefficient inner product <f, g> = sum f_m conj(g_m) over the shared range.
inline Complex inner_product(const PowerSeries& f, const PowerSeries& g) {
    const int top = std::min(f.truncation_order(), g.truncation_order());
    Complex acc(0.0);
    for (int m = 0; m <= top; ++m) acc += f.coefficient(m) * std::conj(g.coefficient(m));
    return acc;
}

struct ComposeOptions {
    /// Relative aliasing tolerance, checked between successive sample
    /// doublings on the circle-side coefficients (before the radius
    /// rescaling, which would amplify rounding noise at high index).
    double aliasing_tol = 1e-10;
    /// Hard cap on circle samples per doubling pass.
    int max_samples = 1 << 16;
    /// The sampled sup of the inner map must stay below 1 - margin.
    double self_map_margin = 1e-6;
};

namespace detail {

/// First power of two >= v (and >= 2).
inline int next_pow2(int v) {
    int p = 2;
    while (p < v) p *= 2;
    return p;
}

/// Trapezoid samples of h on the circle of radius rho, reusing previous
/// samples as the even-index subset when the count doubles.
template <class H>
std::vector<Complex> resample_circle(H&& h, double rho, int count,
                                     const std::vector<Complex>& previous) {
    std::vector<Complex> out(static_cast<std::size_t>(count));
    const double step = 2.0 * std::numbers::pi / count;
    for (int j = 0; j < count; ++j) {
        if (!previous.empty() && j % 2 == 0) {
            out[static_cast<std::size_t>(j)] = previous[static_cast<std::size_t>(j / 2)];
            continue;
        }
        const double t = step * j;
        out[static_cast<std::size_t>(j)] = h(rho * Complex(std::cos(t), std::sin(t)));
    }
    return out;
}

/// d_m = (1/N) sum_j F_j e^{-2 pi i m j / N} for m = 0..m_top. Direct
/// evaluation with a period-N twiddle table; sample counts stay small
/// enough that no FFT is warranted.
inline std::vector<Complex> circle_coefficients(const std::vector<Complex>& samples, int m_top) {
    const int n = static_cast<int>(samples.size());
    std::vector<Complex> twiddle(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        const double t = -2.0 * std::numbers::pi * l / n;
        twiddle[static_cast<std::size_t>(l)] = Complex(std::cos(t), std::sin(t));
    }
    std::vector<Complex> d(static_cast<std::size_t>(m_top) + 1);
    for (int m = 0; m <= m_top; ++m) {
        Complex acc(0.0);
        long idx = 0;
        for (int j = 0; j < n; ++j) {
            acc += samples[static_cast<std::size_t>(j)] * twiddle[static_cast<std::size_t>(idx)];
            idx += m;
            if (idx >= n) idx -= static_cast<long>(n) * (idx / n);
        }
        d[static_cast<std::size_t>(m)] = acc / static_cast<double>(n);
    }
    return d;
}

}  // namespace detail

/// Composition (f o g) truncated at `out_order`, for an inner map g with
/// sup |g| < 1 on the sampling circle. Samples f(g(rho e^{i theta})) on a
/// circle of radius rho, recovers the scaled coefficients by an inverse
/// DFT, and divides by rho^m. rho walks down the ladder 0.95, 0.90, ...
/// until the sampled sup of |g| clears the self-map margin; sample counts
/// double until two passes agree to the aliasing tolerance.
template <class G>
PowerSeries compose_with(const PowerSeries& f, G&& g, int out_order,
                         const ComposeOptions& opt = {}) {
    if (out_order < 0) throw PreconditionError("compose: negative output order");

    double rho = 0.0;
    {
        const int probes = 256;
        for (double cand = 0.95; cand > 0.04; cand -= 0.05) {
            double sup = 0.0;
            for (int j = 0; j < probes; ++j) {
                const double t = 2.0 * std::numbers::pi * j / probes;
                sup = std::max(sup, std::abs(g(cand * Complex(std::cos(t), std::sin(t)))));
            }
            if (sup < 1.0 - opt.self_map_margin) {
                rho = cand;
                break;
            }
        }
        if (rho == 0.0)
            throw SamplingRadiusError(
                "compose: no sampling radius keeps the inner map inside the disk");
    }

    auto h = [&](Complex z) { return evaluate(f, g(z)); };

    int count = detail::next_pow2(std::max(128, 2 * (out_order + 1)));
    std::vector<Complex> samples = detail::resample_circle(h, rho, count, {});
    std::vector<Complex> d = detail::circle_coefficients(samples, out_order);

    while (true) {
        if (2 * count > opt.max_samples)
            throw ToleranceError("compose: aliasing tolerance not met at the sample cap");
        count *= 2;
        samples = detail::resample_circle(h, rho, count, samples);
        std::vector<Complex> d_next = detail::circle_coefficients(samples, out_order);

        double scale = 1.0;
        for (const Complex& c : d_next) scale = std::max(scale, std::abs(c));
        double err = 0.0;
        for (int m = 0; m <= out_order; ++m)
            err = std::max(err, std::abs(d_next[static_cast<std::size_t>(m)] -
                                         d[static_cast<std::size_t>(m)]));
        d = std::move(d_next);
        if (err <= opt.aliasing_tol * scale) break;
    }

    std::vector<Complex> coeffs(static_cast<std::size_t>(out_order) + 1);
    double rho_pow = 1.0;
    for (int m = 0; m <= out_order; ++m) {
        coeffs[static_cast<std::size_t>(m)] = d[static_cast<std::size_t>(m)] / rho_pow;
        rho_pow *= rho;
    }
    return PowerSeries(std::move(coeffs));
}

inline PowerSeries compose(const PowerSeries& f, const PowerSeries& g, int out_order,
                           const ComposeOptions& opt = {}) {
    return compose_with(
        f, [&](Complex z) { return evaluate(g, z); }, out_order, opt);
}

/// Sup-norm estimate: max of |s| sampled on the circle of radius 1 - 1e-9.
/// The grid starts at angle zero so a boundary maximum on the positive
/// real axis is sampled exactly.
inline double hinf_estimate(const PowerSeries& s, int angular_samples = 4096) {
    if (angular_samples < 64) throw PreconditionError("hinf_estimate: need at least 64 samples");
    const double r = 1.0 - 1e-9;
    double sup = 0.0;
    for (int j = 0; j < angular_samples; ++j) {
        const double t = 2.0 * std::numbers::pi * j / angular_samples;
        sup = std::max(sup, std::abs(evaluate(s, r * Complex(std::cos(t), std::sin(t)))));
    }
    return sup;
}

}  // namespace hardyops
