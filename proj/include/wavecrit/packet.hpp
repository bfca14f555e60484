#pragma once

#include <array>
#include <string>
#include <vector>

#include "wavecrit/boundary.hpp"
#include "wavecrit/field.hpp"

namespace wavecrit {

/// exp(-1/(1-s^2)) scaled to peak 1; zero outside (-1, 1).
double chi(double s);

/// A_hat(k, m) = eps^-2 [chi((k-k0)/eps^2) chi((m-m0)/eps^2) + same at -(k0, m0)].
struct Envelope {
    CriticalCarrier carrier;
    double eps = 0.2;

    double amplitude(double k, double m) const;
};

/// Tensor trapezoid rule on the support of one lobe, interior nodes only.
struct QuadratureSpec {
    int nodes_k = 9;
    int nodes_m = 9;
};

enum class Family { Incident, BLeps2, BLeps3, SecondHarmonic, MeanFlow, Sum };

std::string family_name(Family f);

/// One quadrature node of the +(k0, m0) lobe; the other lobe is its complex conjugate.
struct PacketNode {
    double k = 0.0;
    double m = 0.0;
    double omega = 0.0;
    double weight = 0.0;
    std::array<cplx, 3> polarization{};
    TraceTriple traces;
    RootSet roots;
    BoundaryLift lift;
};

struct W0Assembly {
    PhysParams params;
    Envelope envelope;
    QuadratureSpec quad;
    Branch branch = Branch::Plus;
    double dk = 0.0;
    double dm = 0.0;
    std::vector<PacketNode> nodes;
    ModeList incident;
    ModeList bl_eps2;
    ModeList bl_eps3;

    /// Period of the discrete packet in x, 2 pi / dk.
    double period_x() const;
    /// Half the vertical period of the discrete incident packet, pi / dm.
    double half_period_y() const;
};

/// Nodes s_i = -1 + 2i/(n+1), i = 1..n.
std::vector<double> trapezoid_nodes(int n);

W0Assembly assemble_W0(const PhysParams& params, const Envelope& env, const QuadratureSpec& quad,
                       Branch branch = Branch::Plus);

std::vector<const ModeList*> family_lists(const W0Assembly& a, Family f);

/// Grid resolving the family: periodic x over one packet period, y stretched from the wall.
Grid default_grid(const W0Assembly& a, Family f, double pts_per_wave = 16.0);

FieldData evaluate_packet(const W0Assembly& a, Family f, double t, const Grid& grid);

struct PacketNorms {
    double l2 = 0.0;
    double linf = 0.0;
    Norms detail;
    std::string warning;
};

PacketNorms packet_norms(const FieldData& field);
/// Same numbers without storing the field.
PacketNorms packet_norms(const W0Assembly& a, Family f, double t, const Grid& grid);

struct Anisotropy {
    double ratio_l2 = 0.0;
    double ratio_linf = 0.0;
};

/// ||w|| / ||u|| of a boundary-layer family on its default grid at t = 0.
Anisotropy component_anisotropy(const W0Assembly& a, Family f);

}  // namespace wavecrit
