// Round-trips a short series through composition and prints the result.
#include <cstdio>

#include "hardyops/power_series.hpp"

int main() {
    using hardyops::Complex;
    hardyops::PowerSeries f({1.0, 1.0, 1.0, 1.0});
    hardyops::PowerSeries g({0.0, 0.5, 0.1});
    hardyops::PowerSeries fg = hardyops::compose(f, g, 8);
    for (int m = 0; m <= fg.truncation_order(); ++m) {
        const Complex c = fg.coefficient(m);
        std::printf("z^%d: % .12f %+.12fi\n", m, c.real(), c.imag());
    }
    return 0;
}
