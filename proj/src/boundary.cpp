#include "wavecrit/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace wavecrit {

namespace {

constexpr double kMaxCondition = 1e14;

/// Trace row of one mode: (u, w, d_y b) at y = 0 for unit amplitude.
Eigen::Vector3cd trace_column(cplx lambda, const Eigenvector& v) {
    return {v.U, v.W, -lambda * v.B};
}

/// Solves sum_j a_j col_j = rhs on the selected rows after column equilibration.
Eigen::VectorXcd solve_equilibrated(const Eigen::MatrixXcd& raw, const Eigen::VectorXcd& rhs, double* cond_out) {
    const auto n = raw.cols();
    Eigen::MatrixXcd m = raw;
    Eigen::VectorXd scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        scale(j) = m.col(j).cwiseAbs().maxCoeff();
        if (scale(j) == 0.0) throw NumericError("lift: zero trace column");
        m.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(n - 1);
    if (cond_out) *cond_out = cond;
    if (!(cond <= kMaxCondition)) throw NumericError("lift: ill-conditioned trace system, cond = " + std::to_string(cond));
    Eigen::VectorXcd y = m.fullPivLu().solve(rhs);
    return y.cwiseQuotient(scale.cast<cplx>());
}

struct ThreeModes {
    std::array<cplx, 3> lambda;
    std::array<Eigenvector, 3> vec;
    std::array<cplx, 3> amp;
    double condition = 0.0;
};

ThreeModes solve_three(const ModalMatrixSpec& spec, const RootSet& roots, const TraceTriple& tr) {
    ThreeModes out;
    const std::array<int, 3> labels{2, 3, 5};
    Eigen::Matrix3cd m;
    for (int j = 0; j < 3; ++j) {
        out.lambda[j] = roots.lambda(labels[j]);
        out.vec[j] = eigenvector(spec, out.lambda[j]);
        m.col(j) = trace_column(out.lambda[j], out.vec[j]);
    }
    Eigen::Vector3cd rhs(tr.frak_u, tr.frak_w, tr.frak_b);
    if (rhs.isZero(0.0)) {
        out.amp = {0.0, 0.0, 0.0};
        return out;
    }
    const Eigen::VectorXcd a = solve_equilibrated(m, rhs, &out.condition);
    for (int j = 0; j < 3; ++j) out.amp[j] = a(j);
    return out;
}

void require_labels(const RootSet& roots) {
    if (!roots.classified) throw DomainError("lift: roots are not classified");
}

}  // namespace

TraceTriple BoundaryLift::traces() const {
    TraceTriple t;
    for (const auto& m : modes) {
        t.frak_u += m.amplitude * m.vec.U;
        t.frak_w += m.amplitude * m.vec.W;
        t.frak_b += -m.amplitude * m.lambda * m.vec.B;
    }
    return t;
}

CriticalAmplitudes amplitudes_critical(const ModalMatrixSpec& spec, const RootSet& roots,
                                       const TraceTriple& traces) {
    require_labels(roots);
    if (roots.regime == Regime::NonCritical || roots.regime == Regime::NonOscillating)
        throw DomainError("amplitudes_critical: regime " + regime_name(roots.regime) + " is not critical");
    const auto s = solve_three(spec, roots, traces);
    return {s.amp[0], s.amp[1], s.amp[2], s.condition};
}

DYLimitAmplitudes limit_amplitudes_DY(const DYLimitInput& in, cplx frak_w) {
    const double sn = std::sin(in.gamma), cs = std::cos(in.gamma);
    const double sum = in.nu0 + in.kappa0;
    const auto cub = polynomial_roots({-2.0 * I * in.k * sn * cs, in.zeta_bar, 0.0, -I * in.omega * sum});
    std::vector<cplx> pos;
    for (const auto& r : cub)
        if (r.real() > 0.0) pos.push_back(r);
    if (pos.size() != 2) throw NumericError("limit_amplitudes_DY: expected two scaled roots with Re > 0");
    std::sort(pos.begin(), pos.end(), [](cplx a, cplx b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    DYLimitAmplitudes out;
    out.Lambda2 = pos[0];
    out.Lambda3 = pos[1];
    out.Lambda5 = std::sqrt(-I * in.omega * sum / (in.nu0 * in.kappa0));
    if (out.Lambda5.real() < 0.0) out.Lambda5 = -out.Lambda5;

    // Back substitution: the u-row forces A3 = -A2, the w-row fixes A2, the b-row A5.
    const cplx iw = I * in.omega;
    const cplx w_coef = I * in.k * (1.0 / out.Lambda2 - 1.0 / out.Lambda3);
    if (std::abs(w_coef) < 1e-300 || std::abs(out.Lambda5) < 1e-300)
        throw NumericError("limit_amplitudes_DY: singular limit system");
    out.A2 = frak_w / w_coef;
    out.A3 = -out.A2;
    out.A5 = -(out.Lambda2 - out.Lambda3) * out.A2 / iw * (iw + in.kappa0 * out.Lambda5 * out.Lambda5) / out.Lambda5;
    return out;
}

BoundaryLift lift_critical(const ModalMatrixSpec& spec, const RootSet& roots, const TraceTriple& traces) {
    const auto amps = amplitudes_critical(spec, roots, traces);
    BoundaryLift lift{LiftKind::Critical, spec.omega, spec.k, {}};
    if (amps.a2 == cplx(0.0) && amps.a3 == cplx(0.0) && amps.a5 == cplx(0.0)) return lift;
    const std::array<int, 3> labels{2, 3, 5};
    const std::array<cplx, 3> a{amps.a2, amps.a3, amps.a5};
    for (int j = 0; j < 3; ++j) {
        const cplx lam = roots.lambda(labels[j]);
        lift.modes.push_back({a[j], lam, eigenvector(spec, lam), labels[j]});
    }
    return lift;
}

std::pair<BoundaryLift, BoundaryLift> lift_noncritical(const ModalMatrixSpec& spec, const RootSet& roots,
                                                       const TraceTriple& traces) {
    require_labels(roots);
    const bool ok = roots.regime == Regime::NonCritical ||
                    (roots.contested && roots.alt_regime == Regime::NonCritical);
    if (!ok) throw DomainError("lift_noncritical: regime " + regime_name(roots.regime) + " is not non-critical");
    const auto s = solve_three(spec, roots, traces);
    BoundaryLift rw{LiftKind::NonCriticalRW, spec.omega, spec.k, {}};
    BoundaryLift bl{LiftKind::NonCriticalBL, spec.omega, spec.k, {}};
    if (s.amp[0] == cplx(0.0) && s.amp[1] == cplx(0.0) && s.amp[2] == cplx(0.0)) return {rw, bl};
    rw.modes.push_back({s.amp[0], s.lambda[0], s.vec[0], 2});
    bl.modes.push_back({s.amp[1], s.lambda[1], s.vec[1], 3});
    bl.modes.push_back({s.amp[2], s.lambda[2], s.vec[2], 5});
    return {rw, bl};
}

NonOscLift lift_nonoscillating(const ModalMatrixSpec& spec, const RootSet& roots, const TraceTriple& traces) {
    require_labels(roots);
    const std::array<int, 2> labels{3, 5};
    std::array<cplx, 2> lam;
    std::array<Eigenvector, 2> vec;
    Eigen::Matrix2cd m;
    for (int j = 0; j < 2; ++j) {
        lam[j] = roots.lambda(labels[j]);
        vec[j] = eigenvector(spec, lam[j]);
        m(0, j) = vec[j].U;
        m(1, j) = -lam[j] * vec[j].B;
    }
    NonOscLift out{{LiftKind::NonOscillating, spec.omega, spec.k, {}}, -traces.frak_w};
    const Eigen::Vector2cd rhs(traces.frak_u, traces.frak_b);
    if (rhs.isZero(0.0)) return out;
    const Eigen::VectorXcd a = solve_equilibrated(m, rhs, nullptr);
    cplx w_sum = 0.0;
    for (int j = 0; j < 2; ++j) {
        out.lift.modes.push_back({a(j), lam[j], vec[j], labels[j]});
        w_sum += vec[j].W * a(j);
    }
    out.leftover_w = w_sum - traces.frak_w;
    return out;
}

std::array<cplx, 3> evaluate_lift(const BoundaryLift& lift, double t, double x, double y) {
    std::array<cplx, 3> out{};
    const cplx phase = std::exp(I * (lift.k * x - lift.omega * t));
    for (const auto& m : lift.modes) {
        if (m.lambda.real() * y > 700.0) continue;
        const cplx e = m.amplitude * phase * std::exp(-m.lambda * y);
        out[0] += e * m.vec.U;
        out[1] += e * m.vec.W;
        out[2] += e * m.vec.B;
    }
    return out;
}

}  // namespace wavecrit
