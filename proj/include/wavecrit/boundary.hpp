#pragma once

#include <array>
#include <utility>
#include <vector>

#include "wavecrit/characteristic.hpp"

namespace wavecrit {

/// Boundary data at y = 0: u, w and the normal derivative of b.
struct TraceTriple {
    cplx frak_u{};
    cplx frak_w{};
    cplx frak_b{};
};

enum class LiftKind { Critical, NonCriticalRW, NonCriticalBL, NonOscillating };

struct LiftMode {
    cplx amplitude;
    cplx lambda;
    Eigenvector vec;
    int label = 0;
};

/// Decaying modes exp(i(kx - omega t) - lambda y) lifting a trace triple.
struct BoundaryLift {
    LiftKind kind = LiftKind::Critical;
    double omega = 0.0;
    double k = 0.0;
    std::vector<LiftMode> modes;

    /// (u, w, d_y b) of the lift at y = 0.
    TraceTriple traces() const;
};

struct CriticalAmplitudes {
    cplx a2, a3, a5;
    /// 2-norm condition number of the column-equilibrated system.
    double condition = 0.0;
};

CriticalAmplitudes amplitudes_critical(const ModalMatrixSpec& spec, const RootSet& roots,
                                       const TraceTriple& traces);

/// Rescaled inputs of the eps -> 0 amplitude problem: omega ~ sin(gamma),
/// zeta = eps^2 zeta_bar, nu = nu0 eps^6, kappa = kappa0 eps^6.
struct DYLimitInput {
    double gamma = 0.0;
    double nu0 = 1.0;
    double kappa0 = 1.0;
    double omega = 0.0;
    double k = 1.0;
    double zeta_bar = 1.0;
};

struct DYLimitAmplitudes {
    cplx A2, A3, A5;
    /// Scaled rates: lambda_2,3 ~ Lambda/eps^2, lambda_5 ~ Lambda/eps^3.
    cplx Lambda2, Lambda3, Lambda5;
};

DYLimitAmplitudes limit_amplitudes_DY(const DYLimitInput& in, cplx frak_w);

BoundaryLift lift_critical(const ModalMatrixSpec& spec, const RootSet& roots, const TraceTriple& traces);

/// Reflected (lambda_2) part and boundary-layer (lambda_3, lambda_5) part.
std::pair<BoundaryLift, BoundaryLift> lift_noncritical(const ModalMatrixSpec& spec, const RootSet& roots,
                                                       const TraceTriple& traces);

struct NonOscLift {
    BoundaryLift lift;
    /// w-trace of the lift minus the requested one.
    cplx leftover_w;
};

NonOscLift lift_nonoscillating(const ModalMatrixSpec& spec, const RootSet& roots, const TraceTriple& traces);

/// (u, w, b) at one point; modes with Re(lambda) y > 700 are skipped.
std::array<cplx, 3> evaluate_lift(const BoundaryLift& lift, double t, double x, double y);

}  // namespace wavecrit
