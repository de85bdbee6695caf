#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hardyops/criteria.hpp"
#include "hardyops/kernels.hpp"
#include "hardyops/map_parser.hpp"
#include "hardyops/nevanlinna.hpp"
#include "hardyops/operator_core.hpp"
#include "hardyops/power_series.hpp"
#include "hardyops/quadrature.hpp"
#include "hardyops/report.hpp"
#include "hardyops/self_map.hpp"

namespace {

using hardyops::Cell;
using hardyops::Complex;
using hardyops::GridSpec;
using hardyops::PowerSeries;
using hardyops::SelfMap;
using hardyops::Table;

struct Options {
    std::string map_spec;
    int order = 1;
    int radii_k = 14;
    int angular = 512;
    double tol = 1e-6;
    std::string format = "csv";
    std::string out = "-";
    std::string suite;
    std::string f_coeffs = "[0,1]";
    int max_terms = 4096;
};

GridSpec make_grid(const Options& opt) {
    GridSpec grid;
    grid.radii = GridSpec::dyadic_radii(opt.radii_k);
    grid.angular_nodes = opt.angular;
    grid.rel_tol = opt.tol;
    grid.validate();
    return grid;
}

SelfMap parse_and_check(const Options& opt) {
    SelfMap map = hardyops::parse_map(opt.map_spec);
    hardyops::require_self_map(map);
    return map;
}

void add_meta(Table& table, const Options& opt, const SelfMap& map) {
    auto row = [&](const char* key, Cell value) {
        table.add_row({"meta", "", key, "", std::move(value), ""});
    };
    row("version", hardyops::kToolVersion);
    row("map", hardyops::render(map));
    row("order", opt.order);
    row("radii", opt.radii_k);
    row("angular", opt.angular);
    row("tol", opt.tol);
}

void add_diagnostic(Table& table, const hardyops::Diagnostic& d) {
    for (const auto& [r, v] : d.evidence)
        table.add_row({"evidence", d.criterion, "statistic", r, v, ""});
    table.add_row({"verdict", d.criterion, "verdict", "", "", hardyops::to_string(d.verdict)});
}

int cmd_analyze(const Options& opt) {
    const SelfMap map = parse_and_check(opt);
    const GridSpec grid = make_grid(opt);
    const auto op = hardyops::make_operator(map, opt.order);

    Table table({"section", "criterion", "key", "radius", "value", "verdict"});
    add_meta(table, opt, map);

    add_diagnostic(table, hardyops::boundedness_diagnostic(op, grid));
    add_diagnostic(table, hardyops::compactness_diagnostic(op, grid));
    if (map.univalent()) add_diagnostic(table, hardyops::univalent_ratio_diagnostic(op, grid));

    const auto hs = hardyops::hs_criterion(op, grid);
    for (const auto& [r, v] : hs.evidence)
        table.add_row({"evidence", "hs-integral", "statistic", r, v, ""});
    table.add_row({"verdict", "hs-integral", "limit", "", hs.limit, hardyops::to_string(hs.verdict)});

    const double norm_lb = hardyops::norm_lower_bound(op, opt.order + 32, grid);
    table.add_row({"norm", "norm-lower-bound", "sqrt_max_eig", "", norm_lb, ""});

    hardyops::write_output(opt.out, table.render(opt.format));
    return 0;
}

int cmd_hs(const Options& opt) {
    const SelfMap map = parse_and_check(opt);
    const GridSpec grid = make_grid(opt);
    const auto op = hardyops::make_operator(map, opt.order);

    const auto sum = hardyops::hs_partial_sum_adaptive(op, grid, 1e-8, opt.max_terms);
    const auto bracket = hardyops::hs_bracket(op, grid);
    const auto columns = hardyops::column_norms_sq(op, sum.terms, grid);

    Table table({"M", "partial_sum", "increment", "lower_bracket", "upper_bracket"});
    double partial = 0.0;
    for (int m = op.n; m <= sum.terms; ++m) {
        const double increment = columns[static_cast<std::size_t>(m - op.n)];
        partial += increment;
        const bool pow2 = (m & (m - 1)) == 0;
        if (m == op.n || m == sum.terms || (pow2 && m > op.n))
            table.add_row({m, partial, increment, bracket.lower, bracket.upper});
    }
    hardyops::write_output(opt.out, table.render(opt.format));

    if (!sum.converged) {
        std::fprintf(stderr, "hs: partial sums still growing at the %d-term cap\n", opt.max_terms);
        return 4;
    }
    return 0;
}

int cmd_nevanlinna(const Options& opt) {
    const SelfMap map = parse_and_check(opt);
    const GridSpec grid = make_grid(opt);

    Table table({"r", "theta", "value"});
    for (double r : grid.radii) {
        for (int j = 0; j < grid.angular_nodes; ++j) {
            const double theta = 2.0 * std::numbers::pi * (j + 0.5) / grid.angular_nodes;
            const Complex w = r * Complex(std::cos(theta), std::sin(theta));
            table.add_row({r, theta, hardyops::counting_function(map, w).value});
        }
    }
    hardyops::write_output(opt.out, table.render(opt.format));
    return 0;
}

int cmd_lp_check(const Options& opt) {
    const SelfMap map = parse_and_check(opt);
    const GridSpec grid = make_grid(opt);

    const auto coeffs = hardyops::parse_complex_list(opt.f_coeffs);
    if (coeffs.empty())
        throw hardyops::PreconditionError("lp-check: f needs at least one coefficient");
    const PowerSeries f(coeffs);

    const auto lp = hardyops::littlewood_paley_check(f, map, grid);
    Table table({"f", "lhs", "rhs", "residual"});
    table.add_row({hardyops::detail::format_complex_list(coeffs), lp.lhs, lp.rhs, lp.residual});
    hardyops::write_output(opt.out, table.render(opt.format));
    return 0;
}

struct SuiteResult {
    std::string lines;
    bool ok = true;

    void record(const std::string& name, bool pass, const std::string& note) {
        ok = ok && pass;
        lines += std::string(pass ? "[PASS] " : "[FAIL] ") + name + ": " + note + "\n";
    }
    void residual_check(const std::string& name, double residual, double tol) {
        record(name, residual < tol,
               "residual " + hardyops::format_double(residual) + " (tol " +
                   hardyops::format_double(tol) + ")");
    }
};

void verify_kernels(SuiteResult& res) {
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
            const hardyops::KernelSpec spec{std::polar(0.75 * std::abs(unit(rng)),
                                                       std::numbers::pi * unit(rng)),
                                            n_dist(rng)};
            const Complex via_kernel = hardyops::reproduce(f, spec);
            const Complex direct = hardyops::evaluate(hardyops::derivative(f, spec.n), spec.w);
            worst = std::max(worst, std::abs(via_kernel - direct));
        }
    }
    res.residual_check("kernels/reproducing (200 random f x 50 samples)", worst, 1e-12);

    double worst_norm = 0.0;
    for (int i = 0; i <= 19; ++i) {
        const double r = 0.05 * i;
        const int order = hardyops::kernel_order_for_tail(r, 1e-12);
        for (double ang : {0.0, 1.0, 2.5}) {
            const double norm =
                hardyops::h2_norm_sq(hardyops::kernel_series({std::polar(r, ang), 0}, order));
            worst_norm = std::max(worst_norm, std::abs(norm - 1.0 / (1.0 - r * r)));
        }
    }
    res.residual_check("kernels/norm closed form (|w| <= 0.95)", worst_norm, 1e-10);
}

void verify_lp(SuiteResult& res) {
    const GridSpec grid = GridSpec::defaults();
    const std::vector<SelfMap> maps = {
        SelfMap::affine(Complex(0.5), Complex(0.0)),
        SelfMap::monomial(2),
        SelfMap::monomial(3, Complex(0.9)),
        SelfMap::mobius(Complex(0.3, 0.2)),
        SelfMap::blaschke({Complex(0.5), Complex(-0.3, 0.2)}),
    };
    std::mt19937 rng(4117);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double worst = 0.0;
    for (const SelfMap& m : maps) {
        for (int trial = 0; trial < 2; ++trial) {
            std::vector<Complex> coeffs(9);
            for (auto& c : coeffs) c = 0.5 * Complex(unit(rng), unit(rng));
            worst = std::max(worst,
                             hardyops::littlewood_paley_check(PowerSeries(coeffs), m, grid).residual);
        }
    }
    res.residual_check("lp/catalog (5 maps x 2 random deg-8 f)", worst, 1e-4);

    const auto spot =
        hardyops::littlewood_paley_check(PowerSeries::monomial(1), SelfMap::monomial(2), grid);
    res.residual_check("lp/f=z phi=z^2 lhs vs 1", std::abs(spot.lhs - 1.0), 1e-6);
    res.residual_check("lp/f=z phi=z^2 rhs vs 1", std::abs(spot.rhs - 1.0), 1e-6);
}

void verify_lemmas(SuiteResult& res) {
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
        const auto b = hardyops::lemma31_bounds(alphas, n, x_dist(rng));
        const double slack = 1e-9 * std::max(1.0, std::abs(b.value));
        bracket_ok = bracket_ok && b.lower <= b.value + slack && b.value <= b.upper + slack;
        beta_ok = beta_ok && b.beta > 0.0;
    }
    res.record("lemmas/lemma31_bounds bracketing (1000 random instances)", bracket_ok,
               bracket_ok ? "lower <= value <= upper throughout" : "bracket violated");
    res.record("lemmas/lemma31_bounds beta", beta_ok,
               beta_ok ? "beta > 0 in every instance" : "nonpositive beta seen");

    double worst = 0.0;
    for (int n : {1, 2, 3})
        for (double x : {0.0, 0.1, 0.25, 0.5, 0.9})
            worst = std::max(worst, hardyops::lemma32_identity(n, x, 1e-9).residual);
    res.residual_check("lemmas/lemma32_identity grid", worst, 1e-7);

    const auto spot = hardyops::lemma32_identity(1, 0.25, 1e-10);
    res.residual_check("lemmas/lemma32_identity spot lhs vs 80/27",
                       std::abs(spot.lhs_partial - 80.0 / 27.0), 1e-7);
    res.residual_check("lemmas/lemma32_identity spot rhs vs 80/27",
                       std::abs(spot.rhs_closed - 80.0 / 27.0), 1e-9);
}

void verify_moments(SuiteResult& res) {
    double worst = 0.0;
    for (int n : {1, 2, 3})
        for (int m = n + 1; m <= n + 10; ++m) {
            const double closed = hardyops::moment_integral(m, n);
            worst = std::max(worst,
                             std::abs(hardyops::moment_integral_quadrature(m, n) - closed) / closed);
        }
    res.residual_check("moments/quadrature vs closed form (relative)", worst, 1e-8);
    res.residual_check("moments/spot n=1 m=2 vs 3/4",
                       std::abs(hardyops::moment_integral(2, 1) - 0.75), 1e-15);
}

void verify_chain(SuiteResult& res) {
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
                const auto rep =
                    hardyops::chain_2_22_check(hardyops::make_operator(m, n), Complex(lam), grid);
                all_hold = all_hold && rep.holds;
                worst = std::max({worst, rep.b - rep.a, rep.c - rep.b});
            }
    res.record("chain/chain_2_22_check catalog (18 cases)", all_hold,
               "max violation " + hardyops::format_double(std::max(0.0, worst)) + " (tol 1e-06)");
}

int cmd_verify(const Options& opt) {
    SuiteResult res;
    const bool all = opt.suite == "all";
    if (all || opt.suite == "kernels") verify_kernels(res);
    if (all || opt.suite == "lp") verify_lp(res);
    if (all || opt.suite == "lemmas") verify_lemmas(res);
    if (all || opt.suite == "moments") verify_moments(res);
    if (all || opt.suite == "chain") verify_chain(res);
    hardyops::write_output(opt.out, res.lines);
    return res.ok ? 0 : 1;
}

int dispatch(const std::string& command, const Options& opt) {
    if (command == "analyze") return cmd_analyze(opt);
    if (command == "verify") return cmd_verify(opt);
    if (command == "hs") return cmd_hs(opt);
    if (command == "nevanlinna") return cmd_nevanlinna(opt);
    return cmd_lp_check(opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical diagnostics for derivative-composition operators on the Hardy space"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file; flags take precedence");

    Options opt;
    app.add_option("--map", opt.map_spec, "Map spec, e.g. \"affine a=0.5 b=0\"");
    app.add_option("--order", opt.order, "Derivative order n")->capture_default_str();
    app.add_option("--radii", opt.radii_k, "Number of dyadic radii 1 - 2^-k")->capture_default_str();
    app.add_option("--angular", opt.angular, "Angular nodes per circle (power of two)")
        ->capture_default_str();
    app.add_option("--tol", opt.tol, "Relative quadrature tolerance")->capture_default_str();
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    app.add_option("--out", opt.out, "Output path, - for stdout")->capture_default_str();

    app.add_subcommand("analyze", "Boundedness, compactness, and Hilbert-Schmidt diagnostics");
    auto* verify = app.add_subcommand("verify", "Run an identity suite and report pass/fail");
    verify->add_option("suite", opt.suite, "Suite name")
        ->required()
        ->check(CLI::IsMember({"kernels", "lp", "lemmas", "moments", "chain", "all"}));
    auto* hs = app.add_subcommand("hs", "Tabulate Hilbert-Schmidt partial sums with a bracket");
    hs->add_option("--max-terms", opt.max_terms, "Adaptive summation cap")->capture_default_str();
    app.add_subcommand("nevanlinna", "Dump the counting function over the radial grid");
    auto* lp = app.add_subcommand("lp-check", "Check the Littlewood-Paley identity for one f");
    lp->add_option("--f", opt.f_coeffs, "Maclaurin coefficients of f as [c0,c1,...]")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (command != "verify" && opt.map_spec.empty()) {
        std::fprintf(stderr, "hardyops %s: --map is required\n", command.c_str());
        return 2;
    }

    try {
        return dispatch(command, opt);
    } catch (const hardyops::ParseError& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 2;
    } catch (const hardyops::QuadratureError& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 4;
    } catch (const hardyops::ToleranceError& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 4;
    } catch (const hardyops::SamplingRadiusError& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 4;
    } catch (const hardyops::RootFindingError& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 4;
    } catch (const hardyops::Error& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "hardyops: %s\n", e.what());
        return 3;
    }
}
