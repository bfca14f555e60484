#pragma once

#include <array>
#include <string>
#include <vector>

#include "wavecrit/params.hpp"

namespace wavecrit {

/// Grid axis with trapezoid quadrature weights.
struct Axis {
    std::vector<double> pts;
    std::vector<double> weights;
    bool periodic = false;

    std::size_t size() const { return pts.size(); }
};

/// n points on [-L/2, L/2) with uniform weights L/n.
Axis periodic_axis(double length, std::size_t n);

/// Points from 0 to height: spacing starts at dy0, grows by ratio, capped at dy_max.
Axis stretched_axis(double height, double dy0, double ratio, double dy_max);

/// Uniform points 0..height inclusive.
Axis uniform_axis(double height, std::size_t n);

struct Grid {
    Axis x;
    Axis y;
};

/// Smooth cutoff: 1 for s <= 1, 0 for s >= 2; entries are theta and its first three derivatives.
std::array<double, 4> theta_jet(double s);

enum class Profile { Exponential, MeanFlow };

/// One complex term amp_c * phi_c(y) * exp(i(l x - alpha t)); the field is twice its real part.
/// Exponential: phi_c = exp(-mu y). MeanFlow: phi_u = theta'(s y), phi_w = theta(s y), phi_b = 0
/// with s = profile_scale.
struct ModeTerm {
    std::array<cplx, 3> amp{};
    double l = 0.0;
    double alpha = 0.0;
    cplx mu{};
    int lkey = 0;
};

struct ModeList {
    Profile profile = Profile::Exponential;
    double profile_scale = 1.0;
    std::vector<ModeTerm> terms;
    /// Distinct tangential wavenumbers; term.lkey indexes this table.
    std::vector<double> lvals;

    void add(const ModeTerm& t, double ltol = 1e-12);
    void append(const ModeList& other);
    bool empty() const { return terms.empty(); }
    double max_abs_l() const;
    /// Smallest Re(mu) over terms (Exponential), or +inf.
    double min_decay() const;
    double max_decay() const;
};

/// Derivative orders applied to every component.
struct Deriv {
    int dx = 0;
    int dy = 0;
};

/// Complex per-component y-profile factor phi_c^{(dy)}(y) including the (il)^dx factor.
std::array<cplx, 3> term_profile(const ModeList& list, const ModeTerm& term, double y, Deriv d);

/// Serial per-point evaluation of the real field.
std::array<double, 3> evaluate_point(const ModeList& list, double t, double x, double y, Deriv d = {});

/// Exponential terms below exp(-kRowDecayCutoff) of their wall value are skipped row-wise.
inline constexpr double kRowDecayCutoff = 45.0;

/// Row-at-a-time evaluator: grouping by tangential wavenumber makes a row cost
/// O(terms + distinct_l * nx).
class RowEvaluator {
public:
    RowEvaluator(const ModeList& list, const Axis& x, double t);

    /// Writes the three real components of row y into out[c][0..nx).
    void row(double y, Deriv d, std::array<std::vector<double>, 3>& out) const;
    /// Adds the row into out instead of overwriting.
    void add_row(double y, Deriv d, std::array<std::vector<double>, 3>& out) const;

private:
    const ModeList* list_;
    std::size_t nx_;
    double t_;
    std::vector<cplx> phase_;  // [lkey * nx + i] = exp(i l x_i)
    std::vector<cplx> tphase_;
};

/// Real field on a grid, row-major [iy * nx + ix].
struct FieldData {
    Grid grid;
    double t = 0.0;
    std::string family;
    std::array<std::vector<double>, 3> comp;

    double at(int c, std::size_t iy, std::size_t ix) const { return comp[c][iy * grid.x.size() + ix]; }
};

/// Parallel over rows.
FieldData evaluate_field(const std::vector<const ModeList*>& lists, double t, const Grid& grid, Deriv d = {},
                         const std::string& family = "");
/// Point-by-point reference used by the tests and the benchmark.
FieldData evaluate_field_serial(const std::vector<const ModeList*>& lists, double t, const Grid& grid,
                                Deriv d = {}, const std::string& family = "");

struct Norms {
    double l2 = 0.0;
    double linf = 0.0;
    std::array<double, 3> comp_l2{};
    std::array<double, 3> comp_linf{};
    /// Largest |value| on the top row, relative to linf.
    double top_edge = 0.0;
};

/// Trapezoid L2 and max norms streamed row by row without storing the field.
Norms stream_norms(const std::vector<const ModeList*>& lists, double t, const Grid& grid, Deriv d = {});
Norms field_norms(const FieldData& f);

/// Periodic x-axis of given length with about pts_per_wave points on the shortest wavelength.
Axis periodic_axis_for(double length, double max_abs_l, double pts_per_wave = 16.0, std::size_t min_n = 64);

}  // namespace wavecrit
