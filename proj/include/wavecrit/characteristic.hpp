#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavecrit/params.hpp"

namespace wavecrit {

/// Parameters of the viscous modal matrix for modes exp(i(kx - omega t) - lambda y).
struct ModalMatrixSpec {
    double nu = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    double k = 0.0;
    double gamma = 0.0;
};

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

/// Columns act on (U, W, B, P).
Matrix4c build_matrix(const ModalMatrixSpec& spec, cplx lambda);

/// Degree-6 determinant polynomial; coeffs[j] multiplies lambda^j.
struct CharPoly {
    std::array<cplx, 7> coeffs{};

    cplx operator()(cplx lambda) const;
    cplx derivative(cplx lambda) const;
    /// Sum of |c_j| |lambda|^j, the natural scale of a rounding error in p(lambda).
    double magnitude(cplx lambda) const;
    double max_coeff() const;
};

CharPoly char_poly(const ModalMatrixSpec& spec);

enum class Regime { NonCritical, CriticalSmallDiff, CriticalDY, CriticalLargeDiff, NonOscillating };

std::string regime_name(Regime r);

struct RootSet {
    std::array<cplx, 6> roots{};
    /// labels[i] in 1..6 names roots[i] as lambda_label; 0 while unlabeled.
    std::array<int, 6> labels{};
    Regime regime = Regime::NonCritical;
    bool classified = false;
    /// Set when the regime lies inside a guard band; alt_regime is the neighbour.
    bool contested = false;
    std::optional<Regime> alt_regime;
    /// lambda_2 has magnitude below nu^{1/4}-banded threshold (boundary-layer-like) or above.
    bool lambda2_contested = false;
    /// NonOscillating: lambda_2 is kept for reporting but not used by packets.
    bool lambda2_discard_for_packets = false;
    std::vector<int> pos_real;
    std::string warning;
    double eps = 0.0;

    int index_of(int label) const;
    cplx lambda(int label) const;
};

struct ClassificationError : NumericError {
    ClassificationError(const std::string& what, cplx a, cplx b)
        : NumericError(what), candidate_a(a), candidate_b(b) {}
    cplx candidate_a;
    cplx candidate_b;
};

/// Roots of sum_j c[j] x^j with c.back() != 0, from the companion matrix.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& c);

/// Companion-matrix eigenvalues of the rescaled polynomial, then Newton polish.
RootSet solve_roots(const CharPoly& poly);

/// Picks the regime from |zeta|, |k|, |omega| against powers of nu and labels each root
/// by a minimum-cost match to the regime's asymptotic predictions.
RootSet classify_roots(RootSet roots, const ModalMatrixSpec& spec, double eps);

/// Convenience: char_poly, solve_roots and classify_roots in one call.
RootSet roots_for(const ModalMatrixSpec& spec, double eps);

struct Eigenvector {
    cplx U, W, B, P;
};

Eigenvector eigenvector(const ModalMatrixSpec& spec, cplx lambda);

}  // namespace wavecrit
