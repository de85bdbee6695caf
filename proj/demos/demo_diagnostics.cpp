// Prints the boundedness ladder and HS verdict for a few standing examples.
#include <cstdio>

#include "hardyops/criteria.hpp"
#include "hardyops/map_parser.hpp"
#include "hardyops/report.hpp"

int main() {
    using namespace hardyops;
    const GridSpec grid = GridSpec::defaults();
    for (const char* spec : {"affine a=0.5 b=0", "monomial k=1", "mobius lambda=0.2"}) {
        const auto op = make_operator(parse_map(spec), 1);
        const Diagnostic bounded = boundedness_diagnostic(op, grid);
        const HsReport hs = hs_criterion(op, grid);
        std::printf("%-22s boundedness=%-22s hs=%-18s hs_limit=%s\n", spec,
                    to_string(bounded.verdict), to_string(hs.verdict),
                    format_double(hs.limit).c_str());
    }
    const auto op = make_operator(parse_map("affine a=0.5 b=0"), 1);
    const HsSum sum = hs_partial_sum_adaptive(op, grid, 1e-10);
    std::printf("phi=0.5z n=1: hs partial sum %s after %d terms (80/27 = %s)\n",
                format_double(sum.value).c_str(), sum.terms,
                format_double(80.0 / 27.0).c_str());
    return 0;
}
