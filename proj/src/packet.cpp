#include "wavecrit/packet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavecrit {

double chi(double s) {
    if (!(std::abs(s) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Envelope::amplitude(double k, double m) const {
    const double e2 = eps * eps;
    const double k0 = carrier.k0, m0 = carrier.m0;
    return (chi((k - k0) / e2) * chi((m - m0) / e2) + chi((k + k0) / e2) * chi((m + m0) / e2)) / e2;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Incident: return "incident";
        case Family::BLeps2: return "bl_eps2";
        case Family::BLeps3: return "bl_eps3";
        case Family::SecondHarmonic: return "second_harmonic";
        case Family::MeanFlow: return "mean_flow";
        case Family::Sum: return "sum";
    }
    return "?";
}

double W0Assembly::period_x() const { return 2.0 * std::numbers::pi / dk; }
double W0Assembly::half_period_y() const { return std::numbers::pi / dm; }

std::vector<double> trapezoid_nodes(int n) {
    if (n < 1) throw DomainError("trapezoid_nodes: need at least one node");
    std::vector<double> s(n);
    for (int i = 1; i <= n; ++i) s[i - 1] = -1.0 + 2.0 * i / (n + 1.0);
    return s;
}

W0Assembly assemble_W0(const PhysParams& params, const Envelope& env, const QuadratureSpec& quad, Branch branch) {
    params.validate();
    if (quad.nodes_k < 1 || quad.nodes_m < 1) throw DomainError("assemble_W0: empty quadrature");
    W0Assembly a;
    a.params = params;
    a.envelope = env;
    a.quad = quad;
    a.branch = branch;
    const double e2 = env.eps * env.eps;
    a.dk = 2.0 * e2 / (quad.nodes_k + 1.0);
    a.dm = 2.0 * e2 / (quad.nodes_m + 1.0);
    const double sn = params.sin_g(), cs = params.cos_g();
    const auto sk = trapezoid_nodes(quad.nodes_k);
    const auto sm = trapezoid_nodes(quad.nodes_m);
    a.bl_eps2.profile = a.bl_eps3.profile = a.incident.profile = Profile::Exponential;

    for (double si : sk)
        for (double sj : sm) {
            PacketNode n;
            n.k = env.carrier.k0 + e2 * si;
            n.m = env.carrier.m0 + e2 * sj;
            n.omega = dispersion_omega(n.k, n.m, params.gamma, branch);
            n.weight = env.amplitude(n.k, n.m) * a.dk * a.dm;
            if (n.m == 0.0 || n.omega == 0.0) throw DomainError("assemble_W0: node with m = 0 or omega = 0");
            const double num = n.k * cs - n.m * sn;
            n.polarization = {1.0, -n.k / n.m, I * num / (n.m * n.omega)};
            // Neumann datum: d_y of the incident b is i m times its amplitude.
            n.traces = {1.0, -n.k / n.m, -num / n.omega};

            const ModalMatrixSpec spec{params.nu(), params.kappa(), n.omega, n.k, params.gamma};
            n.roots = roots_for(spec, env.eps);
            if (n.roots.regime != Regime::CriticalDY && n.roots.regime != Regime::CriticalLargeDiff)
                throw DomainError("assemble_W0: node (k=" + std::to_string(n.k) + ", m=" + std::to_string(n.m) +
                                  ") classified " + regime_name(n.roots.regime));
            n.lift = lift_critical(spec, n.roots, n.traces);

            ModeTerm inc;
            for (int c = 0; c < 3; ++c) inc.amp[c] = n.weight * n.polarization[c];
            inc.l = n.k;
            inc.alpha = n.omega;
            inc.mu = -I * n.m;
            a.incident.add(inc);
            for (const auto& mode : n.lift.modes) {
                ModeTerm t;
                const cplx amp = -n.weight * mode.amplitude;
                t.amp = {amp * mode.vec.U, amp * mode.vec.W, amp * mode.vec.B};
                t.l = n.k;
                t.alpha = n.omega;
                t.mu = mode.lambda;
                (mode.label == 5 ? a.bl_eps3 : a.bl_eps2).add(t);
            }
            a.nodes.push_back(std::move(n));
        }
    return a;
}

std::vector<const ModeList*> family_lists(const W0Assembly& a, Family f) {
    switch (f) {
        case Family::Incident: return {&a.incident};
        case Family::BLeps2: return {&a.bl_eps2};
        case Family::BLeps3: return {&a.bl_eps3};
        case Family::Sum: return {&a.incident, &a.bl_eps2, &a.bl_eps3};
        default: throw DomainError("family_lists: " + family_name(f) + " is not a linear family");
    }
}

Grid default_grid(const W0Assembly& a, Family f, double pts_per_wave) {
    const double lx = a.period_x();
    const double kmax = a.envelope.carrier.k0 + a.envelope.eps * a.envelope.eps;
    Grid g;
    g.x = periodic_axis_for(lx, std::abs(kmax), pts_per_wave);
    const double mmax = std::abs(a.envelope.carrier.m0) + a.envelope.eps * a.envelope.eps;
    const double wave_dy = 2.0 * std::numbers::pi / mmax / pts_per_wave;
    const double ly = a.half_period_y();
    switch (f) {
        case Family::Incident:
            g.y = uniform_axis(ly, static_cast<std::size_t>(std::ceil(ly / wave_dy)) + 1);
            break;
        case Family::BLeps2:
        case Family::BLeps3: {
            const auto& list = f == Family::BLeps2 ? a.bl_eps2 : a.bl_eps3;
            const double slow = list.min_decay(), fast = list.max_decay();
            const double height = std::min(20.0 / slow, ly);
            g.y = stretched_axis(height, 0.1 / fast, 1.05, std::min(0.25 / slow, wave_dy));
            break;
        }
        case Family::Sum: {
            const double fast = std::max(a.bl_eps2.max_decay(), a.bl_eps3.max_decay());
            g.y = stretched_axis(ly, 0.1 / fast, 1.05, wave_dy);
            break;
        }
        default: throw DomainError("default_grid: " + family_name(f) + " is not a linear family");
    }
    return g;
}

FieldData evaluate_packet(const W0Assembly& a, Family f, double t, const Grid& grid) {
    return evaluate_field(family_lists(a, f), t, grid, {}, family_name(f));
}

namespace {

PacketNorms to_packet_norms(const Norms& n) {
    PacketNorms p{n.l2, n.linf, n, ""};
    if (n.top_edge > 1e-6)
        p.warning = "grid truncation: top-row amplitude " + std::to_string(n.top_edge) + " of max";
    return p;
}

}  // namespace

PacketNorms packet_norms(const FieldData& field) { return to_packet_norms(field_norms(field)); }

PacketNorms packet_norms(const W0Assembly& a, Family f, double t, const Grid& grid) {
    return to_packet_norms(stream_norms(family_lists(a, f), t, grid));
}

Anisotropy component_anisotropy(const W0Assembly& a, Family f) {
    if (f != Family::BLeps2 && f != Family::BLeps3 && f != Family::Incident)
        throw DomainError("component_anisotropy: unsupported family");
    const auto n = stream_norms(family_lists(a, f), 0.0, default_grid(a, f));
    return {n.comp_l2[1] / n.comp_l2[0], n.comp_linf[1] / n.comp_linf[0]};
}

}  // namespace wavecrit
