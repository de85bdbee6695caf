// Acceptance gate: every release-blocking check prints exactly one line.
// Exit status 0 only if all twelve pass. argv[1] names the CLI binary,
// needed by the determinism check.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hardyops/criteria.hpp"
#include "hardyops/map_parser.hpp"
#include "hardyops/report.hpp"

using namespace hardyops;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void line(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %02d %s: %s\n", ok ? "PASS" : "FAIL", idx, name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<SelfMap> catalog() {
    return {
        SelfMap::affine(Complex(0.5), Complex(0.0)),
        SelfMap::monomial(2),
        SelfMap::monomial(3, Complex(0.9)),
        SelfMap::mobius(Complex(0.3, 0.2)),
        SelfMap::blaschke({Complex(0.5), Complex(-0.3, 0.2)}),
    };
}

void c1_reproducing() {
    const double tol = 1e-12;
    const double time_limit = 5.0;
    const auto t0 = Clock::now();
    std::mt19937 rng(911);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> deg_dist(0, 30);
    std::uniform_int_distribution<int> n_dist(0, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Complex> coeffs(static_cast<std::size_t>(deg_dist(rng)) + 1);
        for (auto& c : coeffs) c = Complex(unit(rng), unit(rng));
        const PowerSeries f(coeffs);
        for (int s = 0; s < 50; ++s) {
            const KernelSpec spec{
                std::polar(0.75 * std::abs(unit(rng)), std::numbers::pi * unit(rng)),
                n_dist(rng)};
            const Complex via_kernel = reproduce(f, spec);
            const Complex direct = evaluate(derivative(f, spec.n), spec.w);
            worst = std::max(worst, std::abs(via_kernel - direct));
        }
    }
    const double elapsed = seconds_since(t0);
    line(1, "reproducing identity (200 f x 50 samples)", worst < tol && elapsed < time_limit,
         "max residual " + format_double(worst) + " (tol 1e-12), " + format_double(elapsed) +
             " s (limit 5 s)");
}

void c2_kernel_norm() {
    const double tol = 1e-10;
    double worst = 0.0;
    for (int i = 0; i <= 19; ++i) {
        const double r = 0.05 * i;
        const int order = kernel_order_for_tail(r, 1e-12);
        for (double ang : {0.0, 1.0, 2.5}) {
            const double norm = h2_norm_sq(kernel_series({std::polar(r, ang), 0}, order));
            worst = std::max(worst, std::abs(norm - 1.0 / (1.0 - r * r)));
        }
    }
    line(2, "kernel norm closed form (|w| <= 0.95, tail rule)", worst < tol,
         "max residual " + format_double(worst) + " (tol 1e-10)");
}

void c3_littlewood_paley() {
    const double tol = 1e-4;
    const double spot_tol = 1e-6;
    const double time_limit = 60.0;
    const auto t0 = Clock::now();
    const GridSpec grid = GridSpec::defaults();
    std::mt19937 rng(4117);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    for (const SelfMap& m : catalog()) {
        for (int trial = 0; trial < 2; ++trial) {
            std::vector<Complex> coeffs(9);
            for (auto& c : coeffs) c = 0.5 * Complex(unit(rng), unit(rng));
            worst = std::max(worst, littlewood_paley_check(PowerSeries(coeffs), m, grid).residual);
        }
    }
    const auto spot = littlewood_paley_check(PowerSeries::monomial(1), SelfMap::monomial(2), grid);
    const double spot_err = std::max(std::abs(spot.lhs - 1.0), std::abs(spot.rhs - 1.0));
    const double elapsed = seconds_since(t0);
    line(3, "littlewood_paley_check catalog + f=z phi=z^2",
         worst < tol && spot_err < spot_tol && elapsed < time_limit,
         "max residual " + format_double(worst) + " (tol 1e-04), spot vs 1: " +
             format_double(spot_err) + " (tol 1e-06), " + format_double(elapsed) +
             " s (limit 60 s)");
}

void c4_counting_mass() {
    const double tol = 1e-6;
    const GridSpec grid = GridSpec::defaults();
    double worst = 0.0;
    bool below_one = true;
    for (const SelfMap& m : catalog()) {
        const double mass = counting_mass(m, grid);
        const double norm_sq = h2_norm_sq(to_series(m, 256, 1e-10));
        const double expected = 0.5 * (norm_sq - std::norm(map_evaluate(m, Complex(0.0))));
        worst = std::max(worst, std::abs(mass - expected));
        below_one = below_one && mass < 1.0;
    }
    line(4, "counting mass vs coefficient route", worst < tol && below_one,
         "max residual " + format_double(worst) + " (tol 1e-06), all masses < 1");
}

void c5_moments() {
    const double tol = 1e-8;
    const double spot_tol = 1e-15;
    double worst = 0.0;
    for (int n : {1, 2, 3})
        for (int m = n + 1; m <= n + 10; ++m) {
            const double closed = moment_integral(m, n);
            worst = std::max(worst, std::abs(moment_integral_quadrature(m, n) - closed) / closed);
        }
    const double spot = std::abs(moment_integral(2, 1) - 0.75);
    line(5, "moment integrals vs closed form", worst < tol && spot < spot_tol,
         "max relative residual " + format_double(worst) + " (tol 1e-08), spot n=1 m=2 vs 3/4: " +
             format_double(spot) + " (tol 1e-15)");
}

void c6_lemma32() {
    const double tol = 1e-7;
    const double rhs_tol = 1e-9;
    double worst = 0.0;
    for (int n : {1, 2, 3})
        for (double x : {0.0, 0.1, 0.25, 0.5, 0.9})
            worst = std::max(worst, lemma32_identity(n, x, 1e-9).residual);
    const auto spot = lemma32_identity(1, 0.25, 1e-10);
    const double lhs_err = std::abs(spot.lhs_partial - 80.0 / 27.0);
    const double rhs_err = std::abs(spot.rhs_closed - 80.0 / 27.0);
    line(6, "lemma32_identity grid + spot 80/27",
         worst < tol && lhs_err < tol && rhs_err < rhs_tol,
         "max residual " + format_double(worst) + " (tol 1e-07), spot lhs " +
             format_double(lhs_err) + ", rhs " + format_double(rhs_err));
}

void c7_lemma31() {
    std::mt19937 rng(73214);
    std::uniform_real_distribution<double> alpha_dist(1e-3, 10.0);
    std::uniform_real_distribution<double> x_dist(0.0, 0.99);
    std::uniform_int_distribution<int> n_dist(1, 4);
    bool bracket_ok = true;
    bool beta_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = n_dist(rng);
        std::vector<double> alphas(static_cast<std::size_t>(n) + 1);
        for (double& a : alphas) a = alpha_dist(rng);
        const auto b = lemma31_bounds(alphas, n, x_dist(rng));
        const double slack = 1e-9 * std::max(1.0, std::abs(b.value));
        bracket_ok = bracket_ok && b.lower <= b.value + slack && b.value <= b.upper + slack;
        beta_ok = beta_ok && b.beta > 0.0;
    }
    line(7, "lemma31_bounds bracketing (1000 random instances)", bracket_ok && beta_ok,
         bracket_ok && beta_ok ? "lower <= value <= upper and beta > 0 throughout"
                               : "bracket or beta violated");
}

void c8_hs_closed_form() {
    const double tol = 1e-6;
    const GridSpec grid = GridSpec::defaults();
    const auto op = make_operator(SelfMap::affine(Complex(0.5)), 1);
    const double sum_target = 80.0 / 27.0;
    const HsSum sum = hs_partial_sum_adaptive(op, grid, 1e-10);
    const double sum_err = std::abs(sum.value - sum_target) / sum_target;
    const HsReport rep = hs_criterion(op, grid);
    const double limit_err = std::abs(rep.limit - 64.0 / 27.0) / (64.0 / 27.0);
    const HsBracket br = hs_bracket(op, grid);
    const bool contains = br.lower <= sum_target && sum_target <= br.upper;
    const bool ends = std::abs(br.lower - 64.0 / 27.0) < 1e-4 * (64.0 / 27.0) &&
                      std::abs(br.upper - 192.0 / 27.0) < 1e-4 * (192.0 / 27.0);
    line(8, "hs closed forms for phi=0.5z n=1",
         sum.converged && sum_err < tol && rep.verdict == HsVerdict::HsConsistent &&
             limit_err < tol && contains && ends,
         "partial sum vs 80/27: " + format_double(sum_err) + ", criterion limit vs 64/27: " +
             format_double(limit_err) + " (tol 1e-06), bracket [" + format_double(br.lower) +
             ", " + format_double(br.upper) + "] contains 80/27");
}

void c9_chain() {
    const GridSpec grid = GridSpec::defaults();
    const std::vector<SelfMap> maps = {
        SelfMap::affine(Complex(0.5), Complex(0.0)),
        SelfMap::mobius(Complex(0.2)),
        SelfMap::monomial(2),
    };
    bool all_hold = true;
    double worst = 0.0;
    for (const SelfMap& m : maps)
        for (int n : {1, 2})
            for (double lam : {0.8, 0.9, 0.95}) {
                const auto rep = chain_2_22_check(make_operator(m, n), Complex(lam), grid);
                all_hold = all_hold && rep.holds;
                worst = std::max({worst, rep.b - rep.a, rep.c - rep.b});
            }
    line(9, "chain_2_22_check catalog (3 maps x n in {1,2} x 3 lambdas)", all_hold,
         "max violation " + format_double(std::max(0.0, worst)) + " (tol 1e-06 absolute)");
}

void c10_diagnostics() {
    const GridSpec grid = GridSpec::defaults();
    bool ok = true;
    std::string detail;
    for (int n : {1, 2, 3}) {
        const auto op = make_operator(SelfMap::monomial(1), n);
        ok = ok && boundedness_diagnostic(op, grid).verdict == Verdict::UnboundedConsistent;
        ok = ok && hs_criterion(op, grid).verdict == HsVerdict::NotHsConsistent;
    }
    if (!ok) detail = "identity map misclassified";
    {
        const auto op = make_operator(SelfMap::affine(Complex(0.5)), 1);
        const bool here =
            boundedness_diagnostic(op, grid).verdict == Verdict::BoundedConsistent &&
            compactness_diagnostic(op, grid).verdict == Verdict::CompactConsistent &&
            hs_criterion(op, grid).verdict == HsVerdict::HsConsistent;
        if (!here && detail.empty()) detail = "phi=0.5z misclassified";
        ok = ok && here;
    }
    {
        const auto op = make_operator(SelfMap::affine(Complex(0.5), Complex(0.5)), 1);
        const bool here =
            univalent_ratio_diagnostic(op, grid).verdict == Verdict::UnboundedConsistent;
        if (!here && detail.empty()) detail = "phi=(1+z)/2 ratio misclassified";
        ok = ok && here;
    }
    {
        const auto op = make_operator(SelfMap::mobius(Complex(0.2)), 1);
        const bool here = boundedness_diagnostic(op, grid).verdict == Verdict::UnboundedConsistent;
        if (!here && detail.empty()) detail = "automorphism misclassified";
        ok = ok && here;
    }
    line(10, "diagnostic verdicts on landmark maps", ok,
         ok ? "identity unbounded/not-HS, 0.5z bounded/compact/HS, (1+z)/2 and automorphism unbounded"
            : detail);
}

void c11_monotonicity() {
    const GridSpec grid = GridSpec::defaults();
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> family(0, 3);
    std::uniform_int_distribution<int> n_dist(1, 3);
    std::uniform_int_distribution<int> k_dist(1, 3);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        SelfMap m = SelfMap::affine(Complex(0.5));
        switch (family(rng)) {
            case 0:
                m = SelfMap::affine(std::polar(0.3 + 0.3 * std::abs(unit(rng)),
                                               std::numbers::pi * unit(rng)),
                                    std::polar(0.3 * std::abs(unit(rng)),
                                               std::numbers::pi * unit(rng)));
                break;
            case 1:
                m = SelfMap::monomial(k_dist(rng),
                                      std::polar(0.4 + 0.6 * std::abs(unit(rng)),
                                                 std::numbers::pi * unit(rng)));
                break;
            case 2:
                m = SelfMap::mobius(std::polar(0.5 * std::abs(unit(rng)),
                                               std::numbers::pi * unit(rng)));
                break;
            default:
                m = SelfMap::blaschke({std::polar(0.6 * std::abs(unit(rng)),
                                                  std::numbers::pi * unit(rng)),
                                       std::polar(0.6 * std::abs(unit(rng)),
                                                  std::numbers::pi * unit(rng))});
                break;
        }
        const int n = n_dist(rng);
        const auto op = make_operator(m, n);
        const auto cols = column_norms_sq(op, n + 24, grid);
        double partial = 0.0;
        for (double term : cols) {
            if (term < -1e-12) ok = false;
            const double next = partial + std::max(0.0, term);
            if (next < partial) ok = false;
            partial = next;
        }
        double prev = 0.0;
        for (int mm : {n + 2, n + 6, n + 12, n + 20}) {
            const double got = norm_lower_bound(op, mm, grid);
            if (got < prev - 1e-9 * std::max(1.0, prev)) ok = false;
            prev = got;
        }
    }
    line(11, "monotone growth in truncation (20 random instances)", ok,
         ok ? "hs partial sums and norm lower bounds nondecreasing in M"
            : "monotonicity violated");
}

void c12_determinism(const char* cli) {
    if (cli == nullptr) {
        line(12, "byte-identical analyze reruns", false, "no CLI path supplied");
        return;
    }
    auto run = [&](const std::string& out) {
        const std::string cmd = std::string(cli) +
                                " analyze --map 'blaschke zeros=[0.5,-0.3+0.2i]' --order 2 --out " +
                                out + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool ran = run("accept_run_a.tmp") && run("accept_run_b.tmp");
    const std::string a = slurp("accept_run_a.tmp");
    const std::string b = slurp("accept_run_b.tmp");
    const bool ok = ran && !a.empty() && a == b;
    line(12, "byte-identical analyze reruns", ok,
         ok ? format_double(double(a.size())) + " bytes, identical"
            : "outputs differ or run failed");
}

}  // namespace

int main(int argc, char** argv) {
    c1_reproducing();
    c2_kernel_norm();
    c3_littlewood_paley();
    c4_counting_mass();
    c5_moments();
    c6_lemma32();
    c7_lemma31();
    c8_hs_closed_form();
    c9_chain();
    c10_diagnostics();
    c11_monotonicity();
    c12_determinism(argc > 1 ? argv[1] : nullptr);
    if (failures > 0) std::printf("%d of 12 criteria failing\n", failures);
    return failures == 0 ? 0 : 1;
}
