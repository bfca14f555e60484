#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavecrit/corrector.hpp"

namespace wavecrit {

namespace {

/// Mode-list part of the residual: incident diffusion, interior solves with their
/// pressure choice, and the uncorrected product rows.
struct ResidualLists {
    ModeList diffusion;
    ModeList interior;
    ModeList uncorrected;
};

ResidualLists residual_lists(const W0Assembly& w0, const CorrectorAssembly& w1) {
    const PhysParams& pp = w0.params;
    const double nu = pp.nu(), kappa = pp.kappa(), s = pp.sin_g(), c = pp.cos_g();
    ResidualLists r;
    for (const auto& t : w0.incident.terms) {
        const cplx lap = t.l * t.l - t.mu * t.mu;
        ModeTerm d = t;
        d.amp = {nu * lap * t.amp[0], nu * lap * t.amp[1], kappa * lap * t.amp[2]};
        r.diffusion.add(d);
    }
    for (const auto& m : w1.interior) {
        const cplx lap = m.l * m.l - m.mu * m.mu;
        const cplx du = -I * m.alpha + nu * lap, db = -I * m.alpha + kappa * lap;
        const auto& v = m.amp;
        const auto& f = m.forcing;
        // Pressure cancelling the normal-momentum residual.
        const cplx p = (du * v[1] - c * v[2] - f[1]) / m.mu;
        ModeTerm t;
        t.amp = {du * v[0] - s * v[2] + I * m.l * p - f[0], 0.0, s * v[0] + c * v[1] + db * v[2] - f[2]};
        t.l = m.l;
        t.alpha = m.alpha;
        t.mu = m.mu;
        r.interior.add(t);
    }
    for (const auto& p : w1.pairs) {
        if (is_corrected(p.itype)) continue;
        ModeTerm t;
        for (int k = 0; k < 3; ++k) t.amp[k] = pp.delta * p.q[k];
        t.l = p.l;
        t.alpha = p.alpha;
        t.mu = p.mu;
        r.uncorrected.add(t);
    }
    return r;
}

/// Mean-flow residual with zero pressure, synthesised row by row.
class MeanFlowResidual {
public:
    MeanFlowResidual(const ModeList& mf, const PhysParams& pp, const Axis& x, double t)
        : mf_(mf), pp_(pp), nx_(x.size()), phase_(mf.lvals.size() * x.size()) {
        for (std::size_t k = 0; k < mf.lvals.size(); ++k)
            for (std::size_t i = 0; i < nx_; ++i) phase_[k * nx_ + i] = std::exp(I * mf.lvals[k] * x.pts[i]);
        for (const auto& term : mf.terms) tphase_.push_back(std::exp(-I * term.alpha * t));
    }

    void add_row(double y, std::array<std::vector<double>, 3>& out) const {
        const double sc = mf_.profile_scale;
        const auto th = theta_jet(sc * y);
        if (th[0] == 0.0 && th[1] == 0.0) return;
        const double nu = pp_.nu(), s = pp_.sin_g(), c = pp_.cos_g();
        const std::size_t nl = mf_.lvals.size();
        std::vector<cplx> g(3 * nl, cplx(0.0));
        for (std::size_t n = 0; n < mf_.terms.size(); ++n) {
            const auto& term = mf_.terms[n];
            const double l = term.l;
            const cplx au = term.amp[0], aw = term.amp[1];
            // u = au theta'(sc y), w = aw theta(sc y).
            const cplx u = au * th[1], w = aw * th[0];
            const cplx uyy = au * sc * sc * th[3], wyy = aw * sc * sc * th[2];
            const cplx ru = -I * term.alpha * u - nu * (uyy - l * l * u);
            const cplx rw = -I * term.alpha * w - nu * (wyy - l * l * w);
            const cplx rb = s * u + c * w;
            const cplx tp = tphase_[n];
            g[3 * term.lkey] += ru * tp;
            g[3 * term.lkey + 1] += rw * tp;
            g[3 * term.lkey + 2] += rb * tp;
        }
        for (std::size_t k = 0; k < nl; ++k)
            for (int cc = 0; cc < 3; ++cc) {
                const cplx gk = g[3 * k + cc];
                const cplx* ph = &phase_[k * nx_];
                for (std::size_t i = 0; i < nx_; ++i)
                    out[cc][i] += 2.0 * (gk.real() * ph[i].real() - gk.imag() * ph[i].imag());
            }
    }

private:
    const ModeList& mf_;
    const PhysParams& pp_;
    std::size_t nx_;
    std::vector<cplx> phase_;
    std::vector<cplx> tphase_;
};

struct Acc {
    double diffusion = 0.0, interior = 0.0, mean_flow = 0.0, unc = 0.0, cross = 0.0, quad = 0.0, total = 0.0;
    double grad = 0.0;

    void merge(const Acc& o) {
        diffusion += o.diffusion;
        interior += o.interior;
        mean_flow += o.mean_flow;
        unc += o.unc;
        cross += o.cross;
        quad += o.quad;
        total += o.total;
        grad = std::max(grad, o.grad);
    }
};

using Row = std::array<std::vector<double>, 3>;

double row_sq(const Row& r, const Axis& x) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < r[c].size(); ++i) s += x.weights[i] * r[c][i] * r[c][i];
    return s;
}

void zero(Row& r, std::size_t nx) {
    for (auto& c : r) c.assign(nx, 0.0);
}

}  // namespace

ResidualReport residual_Rapp(const W0Assembly& w0, const CorrectorAssembly& w1) {
    const PhysParams& pp = w0.params;
    const auto lists = residual_lists(w0, w1);
    const double t = 0.0;
    const double cap = w0.half_period_y();

    double lmax = 0.0, fast = 0.0;
    for (const auto* l : {&w0.incident, &w0.bl_eps2, &w0.bl_eps3, &w1.bl_eps2, &w1.bl_eps3, &w1.second_harmonic}) {
        lmax = std::max(lmax, l->max_abs_l());
        fast = std::max(fast, l->max_decay());
    }
    const double mmax = std::abs(w0.envelope.carrier.m0) + pp.eps * pp.eps;
    const double wave = 2.0 * std::numbers::pi / std::max(lmax, mmax) / 16.0;

    // Region near the wall holds every piece; above it only the slowly decaying mode lists survive.
    double near = std::min(2.0 / (pp.eps * pp.eps), cap);
    if (!w1.second_harmonic.empty())
        near = std::max(near, std::min(kRowDecayCutoff / w1.second_harmonic.min_decay(), cap));
    near = std::min(near, cap);

    Grid g;
    g.x = periodic_axis_for(w0.period_x(), lmax, 16.0);
    const Axis y_near = stretched_axis(near, std::min(0.1 / fast, wave), 1.05, wave);
    Axis y_far;
    if (cap - near > wave) {
        y_far = uniform_axis(cap - near, static_cast<std::size_t>(std::ceil((cap - near) / wave)) + 1);
        for (auto& y : y_far.pts) y += near;
    }
    const std::size_t nx = g.x.size();

    std::vector<const ModeList*> w0l = {&w0.incident, &w0.bl_eps2, &w0.bl_eps3};
    std::vector<const ModeList*> w1l = w1.lists();
    auto make = [&](const std::vector<const ModeList*>& ls) {
        std::vector<RowEvaluator> ev;
        for (const auto* l : ls) ev.emplace_back(*l, g.x, t);
        return ev;
    };
    const auto ev0 = make(w0l), ev1 = make(w1l);
    const RowEvaluator ev_diff(lists.diffusion, g.x, t), ev_int(lists.interior, g.x, t),
        ev_unc(lists.uncorrected, g.x, t);
    const MeanFlowResidual ev_mf(w1.mean_flow, pp, g.x, t);

    auto sweep = [&](const Axis& ya, bool with_products) {
        Acc total;
#pragma omp parallel
        {
            Acc local;
            Row diff, inter, mf, unc, v0, dx0, dy0, v1, dx1, dy1, cross, quad, sum;
#pragma omp for schedule(dynamic, 4) nowait
            for (std::size_t j = 0; j < ya.size(); ++j) {
                const double y = ya.pts[j], wy = ya.weights[j];
                for (Row* r : {&diff, &inter, &mf, &unc, &cross, &quad}) zero(*r, nx);
                ev_diff.add_row(y, {}, diff);
                ev_int.add_row(y, {}, inter);
                ev_unc.add_row(y, {}, unc);
                if (with_products) {
                    ev_mf.add_row(y, mf);
                    for (Row* r : {&v0, &dx0, &dy0, &v1, &dx1, &dy1}) zero(*r, nx);
                    for (const auto& e : ev0) {
                        e.add_row(y, {}, v0);
                        e.add_row(y, {1, 0}, dx0);
                        e.add_row(y, {0, 1}, dy0);
                    }
                    for (const auto& e : ev1) {
                        e.add_row(y, {}, v1);
                        e.add_row(y, {1, 0}, dx1);
                        e.add_row(y, {0, 1}, dy1);
                    }
                    for (int c = 0; c < 3; ++c)
                        for (std::size_t i = 0; i < nx; ++i) {
                            cross[c][i] = pp.delta * (v0[0][i] * dx1[c][i] + v0[1][i] * dy1[c][i] +
                                                      v1[0][i] * dx0[c][i] + v1[1][i] * dy0[c][i]);
                            quad[c][i] = pp.delta * (v1[0][i] * dx1[c][i] + v1[1][i] * dy1[c][i]);
                            local.grad = std::max({local.grad, std::abs(dx0[c][i] + dx1[c][i]),
                                                   std::abs(dy0[c][i] + dy1[c][i])});
                        }
                }
                zero(sum, nx);
                for (const Row* r : {&diff, &inter, &mf, &unc, &cross, &quad})
                    for (int c = 0; c < 3; ++c)
                        for (std::size_t i = 0; i < nx; ++i) sum[c][i] += (*r)[c][i];
                local.diffusion += wy * row_sq(diff, g.x);
                local.interior += wy * row_sq(inter, g.x);
                local.mean_flow += wy * row_sq(mf, g.x);
                local.unc += wy * row_sq(unc, g.x);
                local.cross += wy * row_sq(cross, g.x);
                local.quad += wy * row_sq(quad, g.x);
                local.total += wy * row_sq(sum, g.x);
            }
#pragma omp critical
            total.merge(local);
        }
        return total;
    };

    Acc acc = sweep(y_near, true);
    if (!y_far.pts.empty()) acc.merge(sweep(y_far, false));

    ResidualReport r;
    r.diffusion_incident = std::sqrt(acc.diffusion);
    r.r1_interior = std::sqrt(acc.interior);
    r.r1_mean_flow = std::sqrt(acc.mean_flow);
    r.uncorrected_c = std::sqrt(acc.unc);
    r.cross = std::sqrt(acc.cross);
    r.quadratic_w1 = std::sqrt(acc.quad);
    r.total = std::sqrt(acc.total);
    r.grad_wapp_linf = acc.grad;
    const double e2 = pp.eps * pp.eps;
    r.model = pp.delta * e2 + pp.delta * pp.delta + e2 * e2 * e2;
    return r;
}

}  // namespace wavecrit
