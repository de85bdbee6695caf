#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "hardyops/power_series.hpp"

using hardyops::Complex;
using hardyops::PowerSeries;
using Catch::Matchers::WithinAbs;

namespace {

// Formal polynomial substitution via Horner on truncated products. Slow but
// entirely coefficient-side, so it exercises none of the sampling machinery
// it is used to check.
PowerSeries substitute(const PowerSeries& f, const PowerSeries& g, int out_order) {
    PowerSeries acc = PowerSeries::constant(f.coefficient(f.truncation_order()));
    for (int m = f.truncation_order() - 1; m >= 0; --m) {
        acc = hardyops::add(hardyops::multiply(acc, g, out_order),
                            PowerSeries::constant(f.coefficient(m)));
    }
    return acc.truncated(out_order);
}

PowerSeries random_poly(std::mt19937_64& rng, int degree, double amplitude) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
    for (auto& v : c) v = Complex(u(rng), u(rng));
    return PowerSeries(std::move(c));
}

}  // namespace

TEST_CASE("construction and coefficient access") {
    PowerSeries s({Complex(1.0), Complex(0.0, 2.0), Complex(-3.0)});
    REQUIRE(s.truncation_order() == 2);
    REQUIRE(s.coefficient(1) == Complex(0.0, 2.0));
    REQUIRE(s.coefficient(7) == Complex(0.0));
    REQUIRE(s.coefficient(-1) == Complex(0.0));

    REQUIRE(PowerSeries::monomial(3, 2.0).coefficient(3) == Complex(2.0));
    REQUIRE(PowerSeries::zero(5).truncation_order() == 5);

    SECTION("non-finite coefficients are rejected") {
        std::vector<Complex> bad{Complex(1.0), Complex(std::nan(""), 0.0)};
        REQUIRE_THROWS_AS(PowerSeries(std::move(bad)), hardyops::PreconditionError);
    }

    SECTION("truncation pads and drops") {
        REQUIRE(s.truncated(4).truncation_order() == 4);
        REQUIRE(s.truncated(4).coefficient(2) == Complex(-3.0));
        REQUIRE(s.truncated(1).truncation_order() == 1);
        REQUIRE(s.truncated(1).coefficient(1) == Complex(0.0, 2.0));
    }
}

TEST_CASE("derivative matches the term-by-term rule") {
    // f = 1 + 2z + 3z^2 + 4z^3 + 5z^4, f' = 2 + 6z + 12z^2 + 20z^3
    PowerSeries f({1.0, 2.0, 3.0, 4.0, 5.0});
    PowerSeries d1 = hardyops::derivative(f);
    REQUIRE(d1.truncation_order() == 3);
    REQUIRE(d1.coefficient(0) == Complex(2.0));
    REQUIRE(d1.coefficient(1) == Complex(6.0));
    REQUIRE(d1.coefficient(2) == Complex(12.0));
    REQUIRE(d1.coefficient(3) == Complex(20.0));

    // f'' = 6 + 24z + 60z^2, f^(4) = 120, f^(5) = 0
    PowerSeries d2 = hardyops::derivative(f, 2);
    REQUIRE(d2.coefficient(0) == Complex(6.0));
    REQUIRE(d2.coefficient(1) == Complex(24.0));
    REQUIRE(d2.coefficient(2) == Complex(60.0));
    REQUIRE(hardyops::derivative(f, 4).coefficient(0) == Complex(120.0));
    REQUIRE(hardyops::derivative(f, 5).truncation_order() == 0);
    REQUIRE(hardyops::derivative(f, 5).coefficient(0) == Complex(0.0));

    SECTION("linearity") {
        std::mt19937_64 rng(20240811);
        PowerSeries a = random_poly(rng, 12, 1.0);
        PowerSeries b = random_poly(rng, 9, 1.0);
        const Complex mu(0.3, -1.1);
        PowerSeries lhs = hardyops::derivative(hardyops::add(hardyops::scaled(a, mu), b), 2);
        PowerSeries rhs = hardyops::add(hardyops::scaled(hardyops::derivative(a, 2), mu),
                                        hardyops::derivative(b, 2));
        for (int m = 0; m <= lhs.truncation_order(); ++m)
            REQUIRE_THAT(std::abs(lhs.coefficient(m) - rhs.coefficient(m)), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("evaluate uses Horner and respects the disk") {
    // Geometric partial sum at z = 0.4: the truncation tail 0.4^65 / 0.6 is
    // far below one ulp of 1/0.6, so only rounding error remains.
    std::vector<Complex> ones(65, Complex(1.0));
    PowerSeries geo(std::move(ones));
    REQUIRE_THAT(hardyops::evaluate(geo, Complex(0.4)).real(), WithinAbs(1.0 / 0.6, 1e-15));

    PowerSeries f({Complex(1.0), Complex(0.0, -1.0), Complex(0.5)});
    const Complex z(0.3, 0.4);
    const Complex expect = Complex(1.0) + Complex(0.0, -1.0) * z + Complex(0.5) * z * z;
    REQUIRE_THAT(std::abs(hardyops::evaluate(f, z) - expect), WithinAbs(0.0, 1e-15));

    REQUIRE_THROWS_AS(hardyops::evaluate(f, Complex(1.0, 0.2)), hardyops::PreconditionError);
    REQUIRE_THROWS_AS(hardyops::evaluate(f, Complex(-1.2, 0.0)), hardyops::PreconditionError);
    REQUIRE_NOTHROW(hardyops::evaluate(f, Complex(1.0, 0.0)));
}

TEST_CASE("squared Hardy norm is the coefficient sum of squares") {
    PowerSeries f({Complex(3.0), Complex(0.0, 4.0)});
    REQUIRE_THAT(hardyops::h2_norm_sq(f), WithinAbs(25.0, 1e-15));
    REQUIRE(hardyops::h2_norm_sq(PowerSeries::zero(8)) == 0.0);

    SECTION("Pythagoras across disjoint supports") {
        PowerSeries a = PowerSeries::monomial(2, Complex(0.5, 0.5));
        PowerSeries b = PowerSeries::monomial(5, Complex(0.0, -2.0));
        REQUIRE_THAT(hardyops::h2_norm_sq(hardyops::add(a, b)),
                     WithinAbs(hardyops::h2_norm_sq(a) + hardyops::h2_norm_sq(b), 1e-15));
    }
}

TEST_CASE("multiply and inner product") {
    PowerSeries one_plus_z({1.0, 1.0});
    PowerSeries sq = hardyops::multiply(one_plus_z, one_plus_z, 4);
    REQUIRE(sq.coefficient(0) == Complex(1.0));
    REQUIRE(sq.coefficient(1) == Complex(2.0));
    REQUIRE(sq.coefficient(2) == Complex(1.0));
    REQUIRE(sq.coefficient(3) == Complex(0.0));

    PowerSeries f({Complex(1.0, 1.0), Complex(2.0)});
    REQUIRE(hardyops::inner_product(f, f).imag() == 0.0);
    REQUIRE_THAT(hardyops::inner_product(f, f).real(), WithinAbs(hardyops::h2_norm_sq(f), 1e-15));
}

TEST_CASE("compose recovers formal substitution") {
    // f = truncated 1/(1 - z/2), g = z/2 + z^2/10.
    std::vector<Complex> fc(81);
    double p = 1.0;
    for (auto& c : fc) {
        c = p;
        p *= 0.5;
    }
    PowerSeries f(std::move(fc));
    PowerSeries g({0.0, 0.5, 0.1});

    PowerSeries sampled = hardyops::compose(f, g, 20);
    PowerSeries formal = substitute(f, g, 20);
    for (int m = 0; m <= 20; ++m)
        REQUIRE_THAT(std::abs(sampled.coefficient(m) - formal.coefficient(m)),
                     WithinAbs(0.0, 1e-9));

    SECTION("linearity in the outer series") {
        std::mt19937_64 rng(77001);
        PowerSeries f1 = random_poly(rng, 10, 1.0);
        PowerSeries f2 = random_poly(rng, 14, 1.0);
        const Complex mu(-0.7, 0.2);
        PowerSeries lhs = hardyops::compose(hardyops::add(hardyops::scaled(f1, mu), f2), g, 16);
        PowerSeries rhs = hardyops::add(hardyops::scaled(hardyops::compose(f1, g, 16), mu),
                                        hardyops::compose(f2, g, 16));
        for (int m = 0; m <= 16; ++m)
            REQUIRE_THAT(std::abs(lhs.coefficient(m) - rhs.coefficient(m)), WithinAbs(0.0, 1e-8));
    }

    SECTION("associativity over two inner maps") {
        std::mt19937_64 rng(77002);
        PowerSeries f1 = random_poly(rng, 8, 1.0);
        PowerSeries h({0.0, 0.4, 0.0, 0.2});
        PowerSeries gh = hardyops::compose(g, h, 24);
        PowerSeries lhs = hardyops::compose(f1, gh, 12);
        PowerSeries rhs = hardyops::compose(hardyops::compose(f1, g, 24), h, 12);
        for (int m = 0; m <= 12; ++m)
            REQUIRE_THAT(std::abs(lhs.coefficient(m) - rhs.coefficient(m)), WithinAbs(0.0, 1e-8));
    }

    SECTION("inner map hugging the circle exhausts the radius ladder") {
        PowerSeries pinned = PowerSeries::constant(Complex(1.0 - 1e-9));
        REQUIRE_THROWS_AS(hardyops::compose(f, pinned, 4), hardyops::SamplingRadiusError);
    }
}

TEST_CASE("sup-norm estimate on the near-boundary circle") {
    PowerSeries half_shift({0.5, 0.5});  // (1+z)/2 peaks at z = 1
    REQUIRE_THAT(hardyops::hinf_estimate(half_shift), WithinAbs(1.0, 1e-6));

    PowerSeries bump({0.3, 0.3, 0.3});
    REQUIRE_THAT(hardyops::hinf_estimate(bump), WithinAbs(0.9, 1e-6));

    REQUIRE_THROWS_AS(hardyops::hinf_estimate(bump, 16), hardyops::PreconditionError);
}
