#include "wavecrit/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wavecrit {

Axis periodic_axis(double length, std::size_t n) {
    if (n == 0 || !(length > 0.0)) throw DomainError("periodic_axis: empty axis");
    Axis a;
    a.periodic = true;
    a.pts.resize(n);
    a.weights.assign(n, length / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) a.pts[i] = -0.5 * length + length * static_cast<double>(i) / static_cast<double>(n);
    return a;
}

Axis periodic_axis_for(double length, double max_abs_l, double pts_per_wave, std::size_t min_n) {
    const double waves = length * max_abs_l / (2.0 * std::numbers::pi);
    std::size_t n = static_cast<std::size_t>(std::ceil(waves * pts_per_wave));
    n = std::max(n, min_n);
    n += n % 2;
    return periodic_axis(length, n);
}

Axis stretched_axis(double height, double dy0, double ratio, double dy_max) {
    if (!(height > 0.0) || !(dy0 > 0.0) || !(ratio >= 1.0)) throw DomainError("stretched_axis: bad spacing");
    Axis a;
    a.pts.push_back(0.0);
    double dy = dy0;
    while (a.pts.back() + dy < height) {
        a.pts.push_back(a.pts.back() + dy);
        dy = std::min(dy * ratio, dy_max);
    }
    if (a.pts.size() > 1 && height - a.pts.back() < 0.25 * (a.pts.back() - a.pts[a.pts.size() - 2]))
        a.pts.pop_back();
    a.pts.push_back(height);
    const std::size_t n = a.pts.size();
    a.weights.assign(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = a.pts[j + 1] - a.pts[j];
        a.weights[j] += 0.5 * h;
        a.weights[j + 1] += 0.5 * h;
    }
    return a;
}

Axis uniform_axis(double height, std::size_t n) {
    if (n < 2) throw DomainError("uniform_axis: need two points");
    Axis a;
    const double h = height / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) a.pts.push_back(h * static_cast<double>(j));
    a.weights.assign(n, h);
    a.weights.front() = a.weights.back() = 0.5 * h;
    return a;
}

namespace {

/// Truncated Taylor series c0 + c1 h + c2 h^2 + c3 h^3.
struct Jet {
    std::array<double, 4> c{};
};

Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    for (int i = 0; i < 4; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; i + j < 4; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

Jet recip(const Jet& a) {
    Jet r;
    r.c[0] = 1.0 / a.c[0];
    for (int n = 1; n < 4; ++n) {
        double s = 0.0;
        for (int j = 1; j <= n; ++j) s += a.c[j] * r.c[n - j];
        r.c[n] = -s / a.c[0];
    }
    return r;
}

Jet jexp(const Jet& a) {
    const double e = std::exp(a.c[0]);
    const double c1 = a.c[1], c2 = a.c[2], c3 = a.c[3];
    return {{e, e * c1, e * (c2 + 0.5 * c1 * c1), e * (c3 + c1 * c2 + c1 * c1 * c1 / 6.0)}};
}

}  // namespace

std::array<double, 4> theta_jet(double s) {
    if (s <= 1.0) return {1.0, 0.0, 0.0, 0.0};
    if (s >= 2.0) return {0.0, 0.0, 0.0, 0.0};
    // q = exp(-1/(s-1) + 1/(2-s)); theta = 1/(1+q).
    const Jet a = recip(Jet{{s - 1.0, 1.0, 0.0, 0.0}});
    const Jet b = recip(Jet{{2.0 - s, -1.0, 0.0, 0.0}});
    Jet arg = b + a * Jet{{-1.0, 0.0, 0.0, 0.0}};
    if (arg.c[0] > 700.0) return {0.0, 0.0, 0.0, 0.0};
    if (arg.c[0] < -700.0) return {1.0, 0.0, 0.0, 0.0};
    const Jet one{{1.0, 0.0, 0.0, 0.0}};
    Jet th;
    if (arg.c[0] > 0.0) {
        // 1/(1+q) = r/(1+r) with r = 1/q avoids overflow in the jet of q.
        const Jet r = jexp(arg * Jet{{-1.0, 0.0, 0.0, 0.0}});
        th = r * recip(one + r);
    } else {
        th = recip(one + jexp(arg));
    }
    return {th.c[0], th.c[1], 2.0 * th.c[2], 6.0 * th.c[3]};
}

void ModeList::add(const ModeTerm& t, double ltol) {
    ModeTerm term = t;
    auto it = std::find_if(lvals.begin(), lvals.end(),
                           [&](double l) { return std::abs(l - t.l) <= ltol * std::max(1.0, std::abs(l)); });
    if (it == lvals.end()) {
        lvals.push_back(t.l);
        term.lkey = static_cast<int>(lvals.size()) - 1;
    } else {
        term.lkey = static_cast<int>(it - lvals.begin());
        term.l = *it;
    }
    terms.push_back(term);
}

void ModeList::append(const ModeList& other) {
    if (!other.terms.empty() && !terms.empty() &&
        (other.profile != profile || other.profile_scale != profile_scale))
        throw DomainError("ModeList::append: profile mismatch");
    if (terms.empty()) {
        profile = other.profile;
        profile_scale = other.profile_scale;
    }
    for (const auto& t : other.terms) add(t);
}

double ModeList::max_abs_l() const {
    double m = 0.0;
    for (double l : lvals) m = std::max(m, std::abs(l));
    return m;
}

double ModeList::min_decay() const {
    double m = std::numeric_limits<double>::infinity();
    if (profile != Profile::Exponential) return m;
    for (const auto& t : terms) m = std::min(m, t.mu.real());
    return m;
}

double ModeList::max_decay() const {
    double m = 0.0;
    if (profile != Profile::Exponential) return m;
    for (const auto& t : terms) m = std::max(m, t.mu.real());
    return m;
}

std::array<cplx, 3> term_profile(const ModeList& list, const ModeTerm& term, double y, Deriv d) {
    cplx dxf = 1.0;
    for (int i = 0; i < d.dx; ++i) dxf *= I * term.l;
    if (list.profile == Profile::Exponential) {
        if (term.mu.real() * y > 700.0) return {0.0, 0.0, 0.0};
        cplx f = std::exp(-term.mu * y) * dxf;
        for (int i = 0; i < d.dy; ++i) f *= -term.mu;
        return {f, f, f};
    }
    if (d.dy > 2) throw DomainError("term_profile: mean-flow profile supports d_y up to 2");
    const double s = list.profile_scale;
    const auto th = theta_jet(s * y);
    const double sp = std::pow(s, d.dy);
    return {dxf * sp * th[1 + d.dy], dxf * sp * th[d.dy], 0.0};
}

std::array<double, 3> evaluate_point(const ModeList& list, double t, double x, double y, Deriv d) {
    std::array<cplx, 3> acc{};
    for (const auto& term : list.terms) {
        const auto p = term_profile(list, term, y, d);
        const cplx ph = std::exp(I * (term.l * x - term.alpha * t));
        for (int c = 0; c < 3; ++c) acc[c] += term.amp[c] * p[c] * ph;
    }
    return {2.0 * acc[0].real(), 2.0 * acc[1].real(), 2.0 * acc[2].real()};
}

RowEvaluator::RowEvaluator(const ModeList& list, const Axis& x, double t)
    : list_(&list), nx_(x.size()), t_(t), phase_(list.lvals.size() * x.size()) {
    for (std::size_t k = 0; k < list.lvals.size(); ++k)
        for (std::size_t i = 0; i < nx_; ++i) phase_[k * nx_ + i] = std::exp(I * list.lvals[k] * x.pts[i]);
    tphase_.reserve(list.terms.size());
    for (const auto& term : list.terms) tphase_.push_back(std::exp(-I * term.alpha * t));
}

void RowEvaluator::row(double y, Deriv d, std::array<std::vector<double>, 3>& out) const {
    for (auto& o : out) o.assign(nx_, 0.0);
    add_row(y, d, out);
}

void RowEvaluator::add_row(double y, Deriv d, std::array<std::vector<double>, 3>& out) const {
    const std::size_t nl = list_->lvals.size();
    std::vector<cplx> g(3 * nl, cplx(0.0));
    const bool expo = list_->profile == Profile::Exponential;
    for (std::size_t n = 0; n < list_->terms.size(); ++n) {
        const auto& term = list_->terms[n];
        if (expo && term.mu.real() * y > kRowDecayCutoff) continue;
        const auto p = term_profile(*list_, term, y, d);
        for (int c = 0; c < 3; ++c) g[3 * term.lkey + c] += term.amp[c] * p[c] * tphase_[n];
    }
    for (auto& o : out)
        if (o.size() != nx_) o.assign(nx_, 0.0);
    for (std::size_t k = 0; k < nl; ++k) {
        const cplx* ph = &phase_[k * nx_];
        for (int c = 0; c < 3; ++c) {
            const cplx gk = g[3 * k + c];
            if (gk == cplx(0.0)) continue;
            double* o = out[c].data();
            for (std::size_t i = 0; i < nx_; ++i) o[i] += 2.0 * (gk.real() * ph[i].real() - gk.imag() * ph[i].imag());
        }
    }
}

FieldData evaluate_field(const std::vector<const ModeList*>& lists, double t, const Grid& grid, Deriv d,
                         const std::string& family) {
    const std::size_t nx = grid.x.size(), ny = grid.y.size();
    FieldData f{grid, t, family, {}};
    for (auto& c : f.comp) c.assign(nx * ny, 0.0);
    std::vector<RowEvaluator> evals;
    for (const auto* l : lists) evals.emplace_back(*l, grid.x, t);
#pragma omp parallel
    {
        std::array<std::vector<double>, 3> buf;
#pragma omp for schedule(dynamic, 4)
        for (std::size_t j = 0; j < ny; ++j) {
            for (auto& b : buf) b.assign(nx, 0.0);
            for (const auto& ev : evals) ev.add_row(grid.y.pts[j], d, buf);
            for (int c = 0; c < 3; ++c) std::copy(buf[c].begin(), buf[c].end(), f.comp[c].begin() + j * nx);
        }
    }
    return f;
}

FieldData evaluate_field_serial(const std::vector<const ModeList*>& lists, double t, const Grid& grid, Deriv d,
                                const std::string& family) {
    const std::size_t nx = grid.x.size(), ny = grid.y.size();
    FieldData f{grid, t, family, {}};
    for (auto& c : f.comp) c.assign(nx * ny, 0.0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            for (const auto* l : lists) {
                const auto v = evaluate_point(*l, t, grid.x.pts[i], grid.y.pts[j], d);
                for (int c = 0; c < 3; ++c) f.comp[c][j * nx + i] += v[c];
            }
    return f;
}

namespace {

struct NormAcc {
    std::array<double, 3> sq{};
    std::array<double, 3> mx{};
    double top = 0.0;

    void merge(const NormAcc& o) {
        for (int c = 0; c < 3; ++c) {
            sq[c] += o.sq[c];
            mx[c] = std::max(mx[c], o.mx[c]);
        }
        top = std::max(top, o.top);
    }
};

Norms finish(const NormAcc& acc) {
    Norms n;
    double tot = 0.0;
    for (int c = 0; c < 3; ++c) {
        n.comp_l2[c] = std::sqrt(acc.sq[c]);
        n.comp_linf[c] = acc.mx[c];
        tot += acc.sq[c];
        n.linf = std::max(n.linf, acc.mx[c]);
    }
    n.l2 = std::sqrt(tot);
    n.top_edge = n.linf > 0.0 ? acc.top / n.linf : 0.0;
    return n;
}

void accumulate_row(NormAcc& acc, const std::array<std::vector<double>, 3>& buf, const Axis& x, double wy,
                    bool top) {
    for (int c = 0; c < 3; ++c) {
        double s = 0.0, m = 0.0;
        for (std::size_t i = 0; i < buf[c].size(); ++i) {
            s += x.weights[i] * buf[c][i] * buf[c][i];
            m = std::max(m, std::abs(buf[c][i]));
        }
        acc.sq[c] += wy * s;
        acc.mx[c] = std::max(acc.mx[c], m);
        if (top) acc.top = std::max(acc.top, m);
    }
}

}  // namespace

Norms stream_norms(const std::vector<const ModeList*>& lists, double t, const Grid& grid, Deriv d) {
    const std::size_t nx = grid.x.size(), ny = grid.y.size();
    std::vector<RowEvaluator> evals;
    for (const auto* l : lists) evals.emplace_back(*l, grid.x, t);
    NormAcc total;
#pragma omp parallel
    {
        NormAcc local;
        std::array<std::vector<double>, 3> buf;
#pragma omp for schedule(dynamic, 4) nowait
        for (std::size_t j = 0; j < ny; ++j) {
            for (auto& b : buf) b.assign(nx, 0.0);
            for (const auto& ev : evals) ev.add_row(grid.y.pts[j], d, buf);
            accumulate_row(local, buf, grid.x, grid.y.weights[j], j + 1 == ny);
        }
#pragma omp critical
        total.merge(local);
    }
    return finish(total);
}

Norms field_norms(const FieldData& f) {
    const std::size_t nx = f.grid.x.size(), ny = f.grid.y.size();
    NormAcc acc;
    std::array<std::vector<double>, 3> buf;
    for (std::size_t j = 0; j < ny; ++j) {
        for (int c = 0; c < 3; ++c) buf[c].assign(f.comp[c].begin() + j * nx, f.comp[c].begin() + (j + 1) * nx);
        accumulate_row(acc, buf, f.grid.x, f.grid.y.weights[j], j + 1 == ny);
    }
    return finish(acc);
}

}  // namespace wavecrit
