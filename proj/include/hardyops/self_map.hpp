#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/power_series.hpp"
#include "hardyops/roots.hpp"

namespace hardyops {

class SelfMap;

// Analytic self-map families of the unit disk. Any representable parameter
// set is constructible; whether an instance really maps the disk into
// itself is a separate sampled check (validate_self_map), never assumed.

struct AffineMap {
    Complex a, b;  // z -> a z + b
};

struct MobiusMap {
    Complex lambda;  // z -> (lambda - z) / (1 - conj(lambda) z)
};

struct MonomialMap {
    int degree;  // z -> scale z^degree, degree >= 1
    Complex scale;
};

struct PolyMap {
    std::vector<Complex> coefficients;  // ascending
};

struct BlaschkeMap {
    std::vector<Complex> zeros;  // each inside the disk
    Complex rotation;            // unimodular
};

struct ContactMap {
    double exponent;  // z -> 1 - (1 - z)^alpha, 0 < alpha <= 1
};

struct ComposedMap {
    std::shared_ptr<const SelfMap> outer, inner;  // z -> outer(inner(z))
};

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_complex(Complex c) {
    const double re = c.real(), im = c.imag();
    if (im == 0.0) return format_real(re);
    const std::string imag_part = format_real(std::abs(im)) + "i";
    if (re == 0.0) return (im < 0.0 ? "-" : "") + imag_part;
    return format_real(re) + (im < 0.0 ? "-" : "+") + imag_part;
}

inline std::string format_complex_list(const std::vector<Complex>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_complex(values[i]);
    }
    return out + "]";
}

}  // namespace detail

/// A disk self-map candidate: one of the parametric families above or a
/// composition of two of them. Carries a declared univalence flag (fixed
/// per family, never inferred numerically) and a canonical spec-string
/// label. Immutable; compositions share subtrees.
class SelfMap {
public:
    using Variant =
        std::variant<AffineMap, MobiusMap, MonomialMap, PolyMap, BlaschkeMap, ContactMap, ComposedMap>;

    static SelfMap affine(Complex a, Complex b = Complex(0.0)) {
        require_finite(a, "affine: a");
        require_finite(b, "affine: b");
        return SelfMap(AffineMap{a, b}, a != Complex(0.0),
                       "affine a=" + detail::format_complex(a) + " b=" + detail::format_complex(b));
    }

    static SelfMap mobius(Complex lambda) {
        require_finite(lambda, "mobius: lambda");
        if (std::abs(lambda) >= 1.0) throw PreconditionError("mobius: |lambda| must be < 1");
        return SelfMap(MobiusMap{lambda}, true, "mobius lambda=" + detail::format_complex(lambda));
    }

    static SelfMap monomial(int degree, Complex scale = Complex(1.0)) {
        if (degree < 1) throw PreconditionError("monomial: degree must be >= 1");
        require_finite(scale, "monomial: scale");
        return SelfMap(MonomialMap{degree, scale}, degree == 1 && scale != Complex(0.0),
                       "monomial k=" + std::to_string(degree) +
                           " scale=" + detail::format_complex(scale));
    }

    static SelfMap poly(std::vector<Complex> coefficients) {
        if (coefficients.empty()) throw PreconditionError("poly: empty coefficient list");
        for (const Complex& c : coefficients) require_finite(c, "poly: coefficient");
        std::string label = "poly coeffs=" + detail::format_complex_list(coefficients);
        return SelfMap(PolyMap{std::move(coefficients)}, false, std::move(label));
    }

    static SelfMap blaschke(std::vector<Complex> zeros, Complex rotation = Complex(1.0)) {
        for (const Complex& z : zeros) {
            require_finite(z, "blaschke: zero");
            if (std::abs(z) >= 1.0) throw PreconditionError("blaschke: zeros must satisfy |a| < 1");
        }
        require_finite(rotation, "blaschke: rotation");
        if (std::abs(std::abs(rotation) - 1.0) > 1e-9)
            throw PreconditionError("blaschke: rotation must be unimodular");
        rotation /= std::abs(rotation);
        std::string label = "blaschke zeros=" + detail::format_complex_list(zeros) +
                            " rotation=" + detail::format_complex(rotation);
        return SelfMap(BlaschkeMap{std::move(zeros), rotation}, false, std::move(label));
    }

    static SelfMap contact(double exponent) {
        if (!(exponent > 0.0 && exponent <= 1.0))
            throw PreconditionError("contact: alpha must lie in (0, 1]");
        return SelfMap(ContactMap{exponent}, true, "contact alpha=" + detail::format_real(exponent));
    }

    static SelfMap composed(SelfMap outer, SelfMap inner) {
        const bool univalent = outer.univalent() && inner.univalent();
        std::string label = "compose(" + outer.label() + " ; " + inner.label() + ")";
        return SelfMap(ComposedMap{std::make_shared<SelfMap>(std::move(outer)),
                                   std::make_shared<SelfMap>(std::move(inner))},
                       univalent, std::move(label));
    }

    const Variant& variant() const { return variant_; }
    bool univalent() const { return univalent_; }
    const std::string& label() const { return label_; }

    /// Labels are canonical renderings, so label equality is map equality.
    bool operator==(const SelfMap& other) const { return label_ == other.label_; }

private:
    SelfMap(Variant v, bool univalent, std::string label)
        : variant_(std::move(v)), univalent_(univalent), label_(std::move(label)) {}

    static void require_finite(Complex c, const char* what) {
        if (!is_finite(c)) throw PreconditionError(std::string(what) + " must be finite");
    }

    Variant variant_;
    bool univalent_;
    std::string label_;
};

/// Canonical spec string; parses back to an equal map.
inline const std::string& render(const SelfMap& m) { return m.label(); }

inline Complex map_evaluate(const SelfMap& m, Complex z);

namespace detail {

struct EvaluateVisitor {
    Complex z;
    Complex operator()(const AffineMap& f) const { return f.a * z + f.b; }
    Complex operator()(const MobiusMap& f) const {
        return (f.lambda - z) / (1.0 - std::conj(f.lambda) * z);
    }
    Complex operator()(const MonomialMap& f) const {
        Complex p(1.0);
        for (int i = 0; i < f.degree; ++i) p *= z;
        return f.scale * p;
    }
    Complex operator()(const PolyMap& f) const {
        Complex acc = f.coefficients.back();
        for (std::size_t i = f.coefficients.size() - 1; i-- > 0;) acc = acc * z + f.coefficients[i];
        return acc;
    }
    Complex operator()(const BlaschkeMap& f) const {
        Complex acc = f.rotation;
        for (const Complex& a : f.zeros) acc *= (z - a) / (1.0 - std::conj(a) * z);
        return acc;
    }
    Complex operator()(const ContactMap& f) const {
        // 1 - z has nonnegative real part on the closed disk, so the
        // principal power is the right branch everywhere we evaluate.
        return 1.0 - std::pow(1.0 - z, f.exponent);
    }
    Complex operator()(const ComposedMap& f) const {
        return map_evaluate(*f.outer, map_evaluate(*f.inner, z));
    }
};

}  // namespace detail

inline Complex map_evaluate(const SelfMap& m, Complex z) {
    if (!is_finite(z) || std::abs(z) > 1.0 + 1e-12)
        throw PreconditionError("map_evaluate: point must lie in the closed disk");
    return std::visit(detail::EvaluateVisitor{z}, m.variant());
}

/// Constant maps need special handling in preimage-based operations:
/// their value is attained everywhere and nothing else is attained.
inline std::optional<Complex> constant_value(const SelfMap& m) {
    struct Visitor {
        std::optional<Complex> operator()(const AffineMap& f) const {
            if (f.a == Complex(0.0)) return f.b;
            return std::nullopt;
        }
        std::optional<Complex> operator()(const MobiusMap&) const { return std::nullopt; }
        std::optional<Complex> operator()(const MonomialMap& f) const {
            if (f.scale == Complex(0.0)) return Complex(0.0);
            return std::nullopt;
        }
        std::optional<Complex> operator()(const PolyMap& f) const {
            for (std::size_t i = 1; i < f.coefficients.size(); ++i)
                if (f.coefficients[i] != Complex(0.0)) return std::nullopt;
            return f.coefficients[0];
        }
        std::optional<Complex> operator()(const BlaschkeMap& f) const {
            if (f.zeros.empty()) return f.rotation;
            return std::nullopt;
        }
        std::optional<Complex> operator()(const ContactMap&) const { return std::nullopt; }
        std::optional<Complex> operator()(const ComposedMap& f) const {
            if (auto inner = constant_value(*f.inner)) return map_evaluate(*f.outer, *inner);
            if (auto outer = constant_value(*f.outer)) return *outer;
            return std::nullopt;
        }
    };
    return std::visit(Visitor{}, m.variant());
}

struct ValidationReport {
    bool passed = false;
    double sup = 0.0;       // max sampled |phi|
    Complex witness;        // sample point attaining the max
};

/// Samples |phi| on the circle of radius 1 - 1e-9. The map passes when the
/// sampled sup stays below 1 + 1e-9; the worst point is reported either way.
inline ValidationReport validate_self_map(const SelfMap& m, int samples = 512) {
    if (samples < 64) throw PreconditionError("validate_self_map: need at least 64 samples");
    const double r = 1.0 - 1e-9;
    ValidationReport report;
    for (int j = 0; j < samples; ++j) {
        const double t = 2.0 * std::numbers::pi * j / samples;
        const Complex z = r * Complex(std::cos(t), std::sin(t));
        const Complex w = map_evaluate(m, z);
        const double mag = is_finite(w) ? std::abs(w) : std::numeric_limits<double>::infinity();
        if (mag > report.sup || j == 0) {
            report.sup = mag;
            report.witness = z;
        }
    }
    report.passed = report.sup <= 1.0 + 1e-9;
    return report;
}

inline void require_self_map(const SelfMap& m, int samples = 512) {
    const ValidationReport report = validate_self_map(m, samples);
    if (!report.passed)
        throw NotSelfMapError(render(m) + ": |phi| reaches " + detail::format_real(report.sup) +
                              " near z = " + detail::format_complex(report.witness));
}

/// Sampled sup of |phi| on the circle of radius 1 - 1e-9.
inline double map_sup_estimate(const SelfMap& m, int samples = 4096) {
    return validate_self_map(m, samples).sup;
}

namespace detail {

/// Geometric extrapolation of the dropped-coefficient mass from the last
/// window of computed magnitudes. An estimate, not a bound.
inline double geometric_tail_estimate(const std::vector<Complex>& coeffs) {
    const std::size_t n = coeffs.size();
    if (n < 9) return 0.0;
    const double last = std::abs(coeffs[n - 1]);
    const double anchor = std::abs(coeffs[n - 9]);
    if (last < 1e-300) return 0.0;
    double q = anchor > 0.0 ? std::pow(last / anchor, 1.0 / 8.0) : 1.0;
    q = std::clamp(q, 0.0, 0.999);
    return last * q / (1.0 - q);
}

}  // namespace detail

/// Maclaurin truncation of the map at the given order. The estimated
/// dropped l^1 coefficient mass must clear tail_tol; slowly decaying
/// families (small contact exponents) need an explicitly loosened
/// tolerance or evaluation must stay pointwise.
inline PowerSeries to_series(const SelfMap& m, int order, double tail_tol = 1e-6) {
    if (order < 0) throw PreconditionError("to_series: negative order");
    if (!(tail_tol > 0.0)) throw PreconditionError("to_series: tail tolerance must be positive");

    struct Result {
        std::vector<Complex> coeffs;
        double tail;
    };

    struct Visitor {
        int order;
        double tail_tol;

        Result operator()(const AffineMap& f) const {
            std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
            c[0] = f.b;
            double tail = 0.0;
            if (order >= 1)
                c[1] = f.a;
            else
                tail = std::abs(f.a);
            return {std::move(c), tail};
        }
        Result operator()(const MobiusMap& f) const {
            // lambda - (1 - |lambda|^2) sum_{m>=1} conj(lambda)^{m-1} z^m
            std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
            c[0] = f.lambda;
            const Complex lc = std::conj(f.lambda);
            Complex factor = Complex(std::norm(f.lambda) - 1.0);
            for (int m = 1; m <= order; ++m) {
                c[static_cast<std::size_t>(m)] = factor;
                factor *= lc;
            }
            const double q = std::abs(f.lambda);
            const double tail = order >= 1 ? (1.0 + q) * std::pow(q, order) : 1.0 + q;
            return {std::move(c), tail};
        }
        Result operator()(const MonomialMap& f) const {
            std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
            double tail = 0.0;
            if (f.degree <= order)
                c[static_cast<std::size_t>(f.degree)] = f.scale;
            else
                tail = std::abs(f.scale);
            return {std::move(c), tail};
        }
        Result operator()(const PolyMap& f) const {
            std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
            double tail = 0.0;
            for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
                if (i <= static_cast<std::size_t>(order))
                    c[i] = f.coefficients[i];
                else
                    tail += std::abs(f.coefficients[i]);
            }
            return {std::move(c), tail};
        }
        Result operator()(const BlaschkeMap& f) const {
            PowerSeries acc = PowerSeries::constant(f.rotation);
            double q = 0.0;
            for (const Complex& a : f.zeros) {
                q = std::max(q, std::abs(a));
                // (z - a) / (1 - conj(a) z) = -a + (1 - |a|^2) sum_{j>=1} conj(a)^{j-1} z^j
                std::vector<Complex> fc(static_cast<std::size_t>(order) + 1, Complex(0.0));
                fc[0] = -a;
                const Complex ac = std::conj(a);
                Complex factor = Complex(1.0 - std::norm(a));
                for (int j = 1; j <= order; ++j) {
                    fc[static_cast<std::size_t>(j)] = factor;
                    factor *= ac;
                }
                acc = multiply(acc, PowerSeries(std::move(fc)), order);
            }
            std::vector<Complex> c = acc.truncated(order).coefficients();
            const double tail = q == 0.0 ? 0.0 : detail::geometric_tail_estimate(c);
            return {std::move(c), tail};
        }
        Result operator()(const ContactMap& f) const {
            // Coefficients of 1 - (1-z)^alpha by the binomial recurrence;
            // all nonnegative for alpha in (0, 1), and they sum to exactly 1,
            // so the dropped mass is 1 minus the retained partial sum.
            std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex(0.0));
            double binom = 1.0;  // (-1)^j C(alpha, j) at j = 0
            double kept = 0.0;
            for (int j = 1; j <= order; ++j) {
                binom *= (static_cast<double>(j - 1) - f.exponent) / static_cast<double>(j);
                c[static_cast<std::size_t>(j)] = -binom;
                kept += -binom;
            }
            const double tail = f.exponent == 1.0 ? 0.0 : std::max(0.0, 1.0 - kept);
            return {std::move(c), tail};
        }
        Result operator()(const ComposedMap& f) const {
            const PowerSeries outer = to_series(*f.outer, std::max(256, order), tail_tol * 0.5);
            PowerSeries series = compose_with(
                outer, [&](Complex z) { return map_evaluate(*f.inner, z); }, order);
            std::vector<Complex> c = series.coefficients();
            return {std::move(c), detail::geometric_tail_estimate(c)};
        }
    };

    Result r = std::visit(Visitor{order, tail_tol}, m.variant());
    if (r.tail > tail_tol)
        throw ToleranceError("to_series: estimated coefficient tail " +
                             detail::format_real(r.tail) + " exceeds tolerance " +
                             detail::format_real(tail_tol) + " for " + render(m));
    return PowerSeries(std::move(r.coeffs));
}

namespace detail {

/// Roots of p(z) = w inside the open disk, through the companion matrix,
/// with a residual certificate on every accepted root.
inline std::vector<Complex> poly_preimages(const std::vector<Complex>& coeffs, Complex w,
                                           const SelfMap& m) {
    std::vector<Complex> shifted = coeffs;
    shifted[0] -= w;
    std::vector<Complex> inside;
    for (Complex z : polynomial_roots(std::move(shifted))) {
        if (std::abs(z) >= 1.0) continue;
        if (std::abs(map_evaluate(m, z) - w) > 1e-9)
            throw RootFindingError("preimages: root residual exceeds 1e-9 for " + render(m));
        inside.push_back(z);
    }
    return inside;
}

}  // namespace detail

/// All solutions of phi(z) = w inside the open disk, multiplicities
/// repeated. Requires |w| < 1 and a non-constant map.
inline std::vector<Complex> preimages(const SelfMap& m, Complex w) {
    if (!is_finite(w) || std::abs(w) >= 1.0)
        throw PreconditionError("preimages: target must satisfy |w| < 1");
    if (constant_value(m))
        throw UnsupportedMapError("preimages: constant maps have no preimage enumeration");

    struct Visitor {
        Complex w;
        const SelfMap& m;

        std::vector<Complex> operator()(const AffineMap& f) const {
            const Complex z = (w - f.b) / f.a;
            return std::abs(z) < 1.0 ? std::vector<Complex>{z} : std::vector<Complex>{};
        }
        std::vector<Complex> operator()(const MobiusMap& f) const {
            // The map is an involution of the disk.
            return {(f.lambda - w) / (1.0 - std::conj(f.lambda) * w)};
        }
        std::vector<Complex> operator()(const MonomialMap& f) const {
            const Complex target = w / f.scale;
            if (target == Complex(0.0))
                return std::vector<Complex>(static_cast<std::size_t>(f.degree), Complex(0.0));
            const double r = std::pow(std::abs(target), 1.0 / f.degree);
            if (r >= 1.0) return {};
            const double t0 = std::arg(target);
            std::vector<Complex> out;
            out.reserve(static_cast<std::size_t>(f.degree));
            for (int j = 0; j < f.degree; ++j) {
                const double t = (t0 + 2.0 * std::numbers::pi * j) / f.degree;
                out.push_back(r * Complex(std::cos(t), std::sin(t)));
            }
            return out;
        }
        std::vector<Complex> operator()(const PolyMap& f) const {
            return detail::poly_preimages(f.coefficients, w, m);
        }
        std::vector<Complex> operator()(const BlaschkeMap& f) const {
            // rotation prod (z - a_i) - w prod (1 - conj(a_i) z) = 0
            std::vector<Complex> num{f.rotation};
            std::vector<Complex> den{Complex(1.0)};
            for (const Complex& a : f.zeros) {
                std::vector<Complex> next_num(num.size() + 1, Complex(0.0));
                std::vector<Complex> next_den(den.size() + 1, Complex(0.0));
                for (std::size_t i = 0; i < num.size(); ++i) {
                    next_num[i] += num[i] * (-a);
                    next_num[i + 1] += num[i];
                    next_den[i] += den[i];
                    next_den[i + 1] += den[i] * (-std::conj(a));
                }
                num = std::move(next_num);
                den = std::move(next_den);
            }
            std::vector<Complex> eq(num.size());
            for (std::size_t i = 0; i < num.size(); ++i) eq[i] = num[i] - w * den[i];
            std::vector<Complex> inside;
            for (Complex z : polynomial_roots(std::move(eq))) {
                if (std::abs(z) >= 1.0) continue;
                if (std::abs(map_evaluate(m, z) - w) > 1e-9)
                    throw RootFindingError("preimages: root residual exceeds 1e-9 for " + render(m));
                inside.push_back(z);
            }
            return inside;
        }
        std::vector<Complex> operator()(const ContactMap& f) const {
            // Candidate from the principal inverse branch; a residual
            // mismatch means w lies outside the image, not a failure.
            const Complex z = 1.0 - std::pow(1.0 - w, 1.0 / f.exponent);
            if (std::abs(z) >= 1.0) return {};
            if (std::abs(map_evaluate(m, z) - w) > 1e-9) return {};
            return {z};
        }
        std::vector<Complex> operator()(const ComposedMap& f) const {
            std::vector<Complex> out;
            for (const Complex& u : preimages(*f.outer, w)) {
                std::vector<Complex> inner = preimages(*f.inner, u);
                out.insert(out.end(), inner.begin(), inner.end());
            }
            return out;
        }
    };
    return std::visit(Visitor{w, m}, m.variant());
}

/// Unique preimage under a map declared univalent.
inline Complex inverse_at(const SelfMap& m, Complex w) {
    if (!m.univalent()) throw NotUnivalentError("inverse_at: map is not declared univalent");
    std::vector<Complex> pre = preimages(m, w);
    if (pre.empty()) throw NotInImageError("inverse_at: point has no preimage under " + render(m));
    if (pre.size() > 1)
        throw RootFindingError("inverse_at: multiple preimages under a univalent map");
    return pre[0];
}

}  // namespace hardyops
