#pragma once

#include <cstddef>
#include <vector>

#include "wavecrit/params.hpp"

namespace wavecrit {

struct FitError : DomainError {
    using DomainError::DomainError;
};

/// Least-squares line through (log x, log y).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t points = 0;
};

/// Needs at least three points and strictly positive data.
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wavecrit
