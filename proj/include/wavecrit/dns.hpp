#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavecrit/corrector.hpp"

namespace wavecrit {

/// Quadratic damping toward zero over the top fraction of the domain.
struct SpongeSpec {
    double fraction = 0.2;
    double strength = 1.0;
};

struct SimConfig {
    PhysParams params;
    double Lx = 0.0;
    double Ly = 0.0;
    int nx = 256;
    int ny = 384;
    double dt = 0.01;
    double T = 1.0;
    SpongeSpec sponge;
    /// First cell height at the wall; 0 picks a quarter of the fastest layer scale.
    double dy0 = 0.0;
    double stretch = 1.08;
    /// Doubly periodic variant with a uniform y grid, used for modal checks.
    bool periodic_y = false;
    /// Switches the viscous and diffusive terms off (inviscid modal checks).
    bool diffusion = true;
    /// Carrier frequency used by the time-step check.
    double omega0 = 0.0;
    /// Run the per-mode solves and row loops with OpenMP.
    bool parallel = true;
};

/// Staggered y grid: u, b, p at cell centers, w on faces; x is Fourier.
struct DnsGrid {
    int nx = 0;
    int ny = 0;
    int nq = 0;
    int nfaces = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    bool periodic_y = false;
    std::vector<double> x;
    std::vector<double> l;
    std::vector<double> yf;
    std::vector<double> yc;
    /// Cell heights.
    std::vector<double> h;
    /// Distance between the centers adjacent to face f; boundary faces use zero.
    std::vector<double> dc;

    /// Stretched wall grid with ny cells, first cell dy0, growth ratio capped.
    static DnsGrid make(const SimConfig& cfg);
};

/// Per x-mode coefficient vectors, interleaved per level as (u, b, p, w).
struct State {
    std::vector<Eigen::VectorXcd> modes;
    double t = 0.0;
};

/// Real fields on the grid, row-major: u, b on centers (ny x nx), w on faces (nfaces x nx).
struct PhysicalFields {
    std::vector<double> u;
    std::vector<double> w;
    std::vector<double> b;
};

struct StepStats {
    /// E(n+1) - E(n) + 2 dt (dissipation + sponge) at the midpoint.
    double defect = 0.0;
    double dissipation = 0.0;
    double sponge = 0.0;
    double cfl = 0.0;
    double energy = 0.0;
};

class Solver {
public:
    explicit Solver(const SimConfig& cfg);
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    const DnsGrid& grid() const { return grid_; }
    const SimConfig& config() const { return cfg_; }
    int unknowns() const { return nunk_; }

    State zero_state() const;
    State from_physical(const PhysicalFields& f) const;
    PhysicalFields to_physical(const State& s) const;

    /// Orthogonal projection onto discretely divergence-free fields.
    void project(State& s) const;
    /// One CN/AB2 step; the first step after reset() uses Euler for advection.
    StepStats step(State& s);
    void reset();

    double energy(const State& s) const;
    /// Energy restricted to rows at or below ycut.
    double energy_below(const State& s, double ycut) const;
    /// 2 (nu |grad u|^2 + nu |grad w|^2 + kappa |grad b|^2) in the discrete norm.
    double dissipation_rate(const State& s) const;
    double sponge_rate(const State& s) const;
    /// Max |il u + d_y w| over the grid relative to max |grad|.
    double divergence(const State& s) const;
    /// <Adv(W), W> and ||W|| ||grad W|| for the skew-symmetry check.
    std::pair<double, double> advection_skewness(const State& s) const;
    /// Advection term -delta Adv(W) per mode.
    std::vector<Eigen::VectorXcd> nonlinear(const State& s) const;

    /// Weighted inner product over the whole grid (Parseval in x).
    double inner(const State& a, const State& b) const;

private:
    struct Impl;
    SimConfig cfg_;
    DnsGrid grid_;
    int nunk_ = 0;
    std::unique_ptr<Impl> impl_;
};

State difference(const State& a, const State& b);

/// Grid evaluation of the given mode lists at time t.
State sample_modes(const Solver& solver, const std::vector<const ModeList*>& lists, double t);

struct InitReport {
    double edge_ratio = 0.0;
    double divergence_before = 0.0;
    double divergence_after = 0.0;
    double projection_change = 0.0;
    std::string warning;
};

/// W_app(0) on the grid followed by a discrete projection. w1 may be null.
State init_from_Wapp(const Solver& solver, const W0Assembly& w0, const CorrectorAssembly* w1,
                     InitReport* report = nullptr);

/// Carrier wavenumber near k0 whose packet nodes are integer multiples of the node spacing,
/// so the discrete packet is periodic over 2 pi / dk.
double snapped_k0(double k0, double eps, int nodes_k);

/// Number of cell centers within `thickness` of the wall.
int layer_points(const DnsGrid& grid, double thickness);

/// Domain matched to the packet: Lx is the packet period, Ly half the vertical period.
SimConfig default_sim_config(const W0Assembly& w0, int nx = 256, int ny = 384);

struct TrajectorySample {
    double t = 0.0;
    double energy = 0.0;
    double dissipated = 0.0;
    double defect = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<State> states;
    double initial_energy = 0.0;
    int steps = 0;
};

/// Marches to cfg.T and stores a state every `every` steps (and the last one).
Trajectory run(Solver& solver, State s, int every);

struct EnergyLedger {
    /// |sum of step defects| / E(0) / T.
    double defect_per_time = 0.0;
    double max_step_defect = 0.0;
    /// Largest E(n+1) - E(n) relative to E(n).
    double max_increase = 0.0;
    /// Final E + dissipated - E(0), relative.
    double final_balance = 0.0;
};

EnergyLedger energy_budget(const Trajectory& traj);

struct StabilityPoint {
    double t = 0.0;
    double diff_l2 = 0.0;
    double floor = 0.0;
    double bound_thm = 0.0;
    double bound_alt = 0.0;
    double diff_nonlinear = 0.0;
};

struct StabilityReport {
    std::vector<StabilityPoint> series;
    double ycut = 0.0;
    bool within_thm = true;
    bool within_alt = true;
};

/// ||W_app - W|| below the sponge at each stored time. The floor is the same
/// difference for the delta = 0 control run against W0; diff_nonlinear compares
/// (W - W_control) with W1.
StabilityReport compare_stability(const Solver& solver, const Trajectory& run, const Trajectory& control,
                                  const W0Assembly& w0, const CorrectorAssembly* w1);

}  // namespace wavecrit
