#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/power_series.hpp"

namespace hardyops {

namespace detail {

/// p(z) and p'(z) in one Horner sweep; coefficients ascending.
inline std::pair<Complex, Complex> horner2(const std::vector<Complex>& c, Complex z) {
    Complex p(0.0), dp(0.0);
    for (std::size_t i = c.size(); i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[i];
    }
    return {p, dp};
}

inline void newton_polish(const std::vector<Complex>& c, Complex& root) {
    for (int iter = 0; iter < 5; ++iter) {
        auto [p, dp] = horner2(c, root);
        if (std::abs(dp) == 0.0) return;
        const Complex step = p / dp;
        if (!is_finite(step)) return;
        root -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(root))) return;
    }
}

}  // namespace detail

/// All complex roots of the polynomial with ascending coefficients,
/// multiplicities repeated. Degrees 1 and 2 use stable closed forms;
/// higher degrees go through the companion-matrix eigenproblem, and every
/// root is Newton-polished afterwards. Leading coefficients within
/// 1e-13 of the coefficient scale are treated as zero.
inline std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
    double scale = 0.0;
    for (const Complex& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw RootFindingError("polynomial_roots: zero polynomial");
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-13 * scale) coeffs.pop_back();

    const int degree = static_cast<int>(coeffs.size()) - 1;
    if (degree == 0) return {};

    if (degree == 1) return {-coeffs[0] / coeffs[1]};

    if (degree == 2) {
        const Complex a = coeffs[2], b = coeffs[1], c = coeffs[0];
        const Complex disc = std::sqrt(b * b - 4.0 * a * c);
        // Pick the sign that avoids cancellation in b +- disc.
        const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc)
                                                                  : -0.5 * (b - disc);
        std::vector<Complex> roots;
        if (std::abs(q) == 0.0) {
            roots = {Complex(0.0), -b / a};
        } else {
            roots = {q / a, c / q};
        }
        for (Complex& r : roots) detail::newton_polish(coeffs, r);
        return roots;
    }

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw RootFindingError("polynomial_roots: eigenvalue iteration failed");

    std::vector<Complex> roots(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) {
        Complex r = solver.eigenvalues()(i);
        detail::newton_polish(coeffs, r);
        roots[static_cast<std::size_t>(i)] = r;
    }
    return roots;
}

}  // namespace hardyops
