#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/power_series.hpp"

namespace hardyops {

/// Point evaluation functional for the n-th derivative at w, |w| < 1.
/// n = 0 is the ordinary reproducing kernel.
struct KernelSpec {
    Complex w;
    int n = 0;

    void validate() const {
        if (!is_finite(w) || std::abs(w) >= 1.0)
            throw PreconditionError("KernelSpec: base point must satisfy |w| < 1");
        if (n < 0) throw PreconditionError("KernelSpec: derivative order must be >= 0");
    }
};

/// Maclaurin truncation of n! z^n / (1 - conj(w) z)^{n+1}: the coefficient
/// of z^m is m(m-1)...(m-n+1) conj(w)^{m-n} for m >= n, zero below.
inline PowerSeries kernel_series(const KernelSpec& spec, int order) {
    spec.validate();
    if (order < 0) throw PreconditionError("kernel_series: negative order");
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
    const Complex wc = std::conj(spec.w);
    Complex wpow(1.0);
    for (int m = spec.n; m <= order; ++m) {
        c[static_cast<std::size_t>(m)] = falling_factorial(m, spec.n) * wpow;
        wpow *= wc;
    }
    return PowerSeries(std::move(c));
}

/// Coefficient inner product <f, kernel>. For a series that is exact to
/// its truncation order this equals the n-th derivative of f at w.
inline Complex reproduce(const PowerSeries& f, const KernelSpec& spec) {
    return inner_product(f, kernel_series(spec, f.truncation_order()));
}

/// Unit-norm multiple of the order-0 kernel at w. Its squared Hardy norm
/// is 1 - |w|^{2(order+1)}, which tends to 1 as the truncation grows.
inline PowerSeries normalized_kernel(Complex w, int order) {
    KernelSpec spec{w, 0};
    spec.validate();
    if (order < 0) throw PreconditionError("normalized_kernel: negative order");
    const double scale = std::sqrt(1.0 - std::norm(w));
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
    const Complex wc = std::conj(w);
    Complex wpow(1.0);
    for (int m = 0; m <= order; ++m) {
        c[static_cast<std::size_t>(m)] = scale * wpow;
        wpow *= wc;
    }
    return PowerSeries(std::move(c));
}

/// Smallest truncation order whose dropped kernel tail
/// sum_{m > M} |w|^{2m} = |w|^{2(M+1)} / (1 - |w|^2) stays below tol.
inline int kernel_order_for_tail(double w_abs, double tol) {
    if (!(w_abs >= 0.0 && w_abs < 1.0)) throw PreconditionError("kernel_order_for_tail: |w| must be < 1");
    if (!(tol > 0.0)) throw PreconditionError("kernel_order_for_tail: tol must be positive");
    if (w_abs == 0.0) return 0;
    const double m = std::log(tol * (1.0 - w_abs * w_abs)) / (2.0 * std::log(w_abs)) - 1.0;
    return std::max(0, static_cast<int>(std::ceil(m)));
}

}  // namespace hardyops
