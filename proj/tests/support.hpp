#pragma once

#include <cmath>
#include <random>

#include "wavecrit/params.hpp"

namespace testsupport {

inline bool close(double a, double b, double rtol, double atol = 0.0) {
    return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

inline bool close(wavecrit::cplx a, wavecrit::cplx b, double rtol, double atol = 0.0) {
    return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long long seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    wavecrit::cplx cuniform(double r) { return {uniform(-r, r), uniform(-r, r)}; }
};

}  // namespace testsupport
