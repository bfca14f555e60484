#include "wavecrit/fit.hpp"

#include <cmath>
#include <string>

namespace wavecrit {

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw FitError("fit_slope: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw FitError("fit_slope: need at least 3 points, got " + std::to_string(n));
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw FitError("fit_slope: non-positive value at point " + std::to_string(i));
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit_slope: all x values coincide");
    SlopeFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - f.intercept - f.slope * lx[i];
        rss += r * r;
    }
    f.stderr_slope = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace wavecrit
