#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "wavecrit/packet.hpp"

namespace wavecrit {

enum class Lobe { Zero, Double };

/// Ordered family pairs of the quadratic term Q(X, Y) = (u_X d_x + w_X d_y) Y.
enum class InteractionType { a1, a2, b1, b2, b3, c1, c2, c3, c4 };

std::string interaction_name(InteractionType t);
InteractionType interaction_of(Family left, Family right);
/// Rows a* and b* are corrected; c* rows stay in the residual.
bool is_corrected(InteractionType t);
bool is_type_a(InteractionType t);

/// One W0 mode: family, node index and root label (0 for the incident wave).
/// conj marks the mirrored lobe, i.e. the complex-conjugate partner.
struct ModeRef {
    Family family = Family::Incident;
    int node = 0;
    int label = 0;
    bool conj = false;
};

/// A W0 mode in field form: twice the real part of amp exp(i(l x - alpha t) - mu y).
struct PlainMode {
    std::array<cplx, 3> amp{};
    double l = 0.0;
    double alpha = 0.0;
    cplx mu{};
};

struct ModePair {
    ModeRef left;
    ModeRef right;
    double l = 0.0;
    double alpha = 0.0;
    cplx mu{};
    Lobe lobe = Lobe::Double;
    InteractionType itype = InteractionType::a1;
    /// Q(left, right) = coef * right.amp; coef = i l_R u_L - mu_R w_L.
    cplx coef{};
    std::array<cplx, 3> q{};
};

PlainMode plain_mode(const W0Assembly& w0, const ModeRef& ref);

/// Single-pair product term of Q, full three components, no projection.
ModePair make_pair(const W0Assembly& w0, const ModeRef& left, const ModeRef& right);

/// All ordered pairs: double lobe from (F, F), zero lobe from (F, conj F).
std::vector<ModePair> classify_interactions(const W0Assembly& w0);

/// Q(2 Re L, 2 Re R) as a mode list in the same twice-real-part form; exponential lists only.
ModeList quadratic_Q(const ModeList& left, const ModeList& right);

/// Pointwise (u d_x + w d_y) applied to the right field using analytic mode derivatives.
FieldData quadratic_Q_grid(const std::vector<const ModeList*>& left, const std::vector<const ModeList*>& right,
                           double t, const Grid& grid);

/// Pi_plus, Pi_minus projectors of the rotation block and the resonance denominators.
struct InteriorSolveA {
    std::array<std::array<cplx, 4>, 2> proj{};
    std::array<cplx, 2> denom{};
    /// min |-alpha +- sin gamma|.
    double margin = 0.0;
};

InteriorSolveA interior_solve_a(double alpha, double gamma);

struct InteriorSolveB {
    /// Row-major 2x2 matrix M mapping the (u, b) forcing to the (u, b) amplitude.
    std::array<cplx, 4> M{};
    cplx det_inv{};
    cplx m_bar{};
};

/// m_bar = mu eps^3 with the combined decay mu of the pair.
InteriorSolveB interior_solve_b(double alpha, cplx mu, const PhysParams& params);

/// One interior corrector mode: amplitude (u, w, b), forcing and rates.
struct InteriorMode {
    int pair = 0;
    std::array<cplx, 3> amp{};
    std::array<cplx, 3> forcing{};
    double l = 0.0;
    double alpha = 0.0;
    cplx mu{};
    Lobe lobe = Lobe::Double;
    InteractionType itype = InteractionType::a1;
    int left_node = 0;
    int right_node = 0;
};

/// Type-(a) pairs: V = sum Pi V' / (-i alpha +- i sin gamma), w restored by divergence.
std::vector<InteriorMode> solve_interior_a(const std::vector<ModePair>& pairs, const PhysParams& params,
                                           double omega0);
/// Type-(b) pairs: V = M V', w restored by divergence.
std::vector<InteriorMode> solve_interior_b(const std::vector<ModePair>& pairs, const PhysParams& params,
                                           double omega0);

struct NodePairTrace {
    int left_node = 0;
    int right_node = 0;
    Lobe lobe = Lobe::Double;
    double l = 0.0;
    double alpha = 0.0;
    TraceTriple from_a;
    TraceTriple from_b;

    TraceTriple total() const;
};

/// Sums (u, w, d_y b) at y = 0 of interior modes per lobe and node pair.
std::vector<NodePairTrace> collect_traces(const std::vector<InteriorMode>& modes);

struct SecondHarmonicLift {
    ModeList bl_eps3;
    ModeList rw;
    /// Per node pair: (l, alpha, Lambda_2).
    std::vector<std::array<cplx, 3>> lambda2;
};

SecondHarmonicLift lift_second_harmonic(const std::vector<NodePairTrace>& traces, const PhysParams& params);

struct MeanFlowLift {
    ModeList bl_eps3;
    ModeList mean_flow;
    int dropped_nodes = 0;
    double dropped_leftover = 0.0;
    /// Max |leftover w-trace| over node pairs.
    double max_leftover = 0.0;
};

MeanFlowLift lift_mean_flow(const std::vector<NodePairTrace>& traces, const PhysParams& params);

/// Closed-form limit of Lambda_2 at (2 k0, 2 omega0); both branches of the square root.
std::array<cplx, 2> second_harmonic_lambda0(double gamma, double k0);

struct CorrectorAssembly {
    PhysParams params;
    double omega0 = 0.0;
    ModeList bl_eps2;
    ModeList bl_eps3;
    ModeList second_harmonic;
    ModeList mean_flow;
    std::vector<ModePair> pairs;
    std::vector<InteriorMode> interior;
    std::vector<NodePairTrace> traces;
    std::vector<std::array<cplx, 3>> lambda2;
    int dropped_nodes = 0;
    std::map<std::string, int> pair_counts;

    std::vector<const ModeList*> lists() const;
};

CorrectorAssembly assemble_W1(const W0Assembly& w0);

enum class CorrectorFamily { BLeps2, BLeps3, SecondHarmonic, MeanFlow, Sum };

std::string corrector_family_name(CorrectorFamily f);
std::vector<const ModeList*> corrector_lists(const CorrectorAssembly& w1, CorrectorFamily f);
Grid corrector_grid(const W0Assembly& w0, const CorrectorAssembly& w1, CorrectorFamily f,
                    double pts_per_wave = 16.0);

/// Frequency in [0, max_freq] maximising the tapered DFT of one component sampled at (x, y)
/// over t in [0, window).
double dominant_frequency(const std::vector<const ModeList*>& lists, double x, double y, double window,
                          int samples, double max_freq, int comp = 0);

/// Max over x of |(u, w, d_y b)| of W1 at y = 0, relative to the same for the interior part alone.
struct TraceCheck {
    double combined = 0.0;
    double interior = 0.0;
    double relative = 0.0;
};

TraceCheck combined_trace(const W0Assembly& w0, const CorrectorAssembly& w1);

struct ResidualReport {
    double diffusion_incident = 0.0;
    double r1_interior = 0.0;
    double r1_mean_flow = 0.0;
    double uncorrected_c = 0.0;
    double cross = 0.0;
    double quadratic_w1 = 0.0;
    double total = 0.0;
    double grad_wapp_linf = 0.0;
    /// delta eps^2 + delta^2 + eps^6.
    double model = 0.0;
};

/// Residual of W0 + W1 in the full system; per-mode pressures are chosen to cancel
/// the normal-momentum residual, so the norm bounds the projected residual.
ResidualReport residual_Rapp(const W0Assembly& w0, const CorrectorAssembly& w1);

}  // namespace wavecrit
