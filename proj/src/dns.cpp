#include "wavecrit/dns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace wavecrit {

namespace {

using CSp = Eigen::SparseMatrix<cplx>;
using RSp = Eigen::SparseMatrix<double>;
using VecC = Eigen::VectorXcd;

/// Slot map of the interleaved per-level unknowns.
struct Layout {
    int ny = 0;
    bool periodic = false;

    int cell(int j) const { return periodic ? ((j % ny) + ny) % ny : j; }
    int u(int j) const { return 4 * cell(j); }
    int b(int j) const { return 4 * cell(j) + 1; }
    int p(int j) const { return 4 * cell(j) + 2; }
    /// -1 for the wall and top faces, where w = 0.
    int w(int f) const {
        if (periodic) return 4 * cell(f) + 3;
        return (f >= 1 && f <= ny - 1) ? 4 * (f - 1) + 3 : -1;
    }
    int size() const { return periodic ? 4 * ny : 4 * ny - 1; }
    /// Faces carrying an unknown w: [face_begin, ny).
    int face_begin() const { return periodic ? 0 : 1; }
    /// Row of face f in the physical w array.
    int face_row(int f) const { return periodic ? cell(f) : f; }
};

double sponge_profile(double y, const SimConfig& cfg) {
    if (cfg.periodic_y || cfg.sponge.strength <= 0.0) return 0.0;
    const double start = (1.0 - cfg.sponge.fraction) * cfg.Ly;
    if (y <= start) return 0.0;
    const double r = (y - start) / (cfg.sponge.fraction * cfg.Ly);
    return cfg.sponge.strength * r * r;
}

double parseval_factor(int q) { return q == 0 ? 1.0 : 2.0; }

}  // namespace

DnsGrid DnsGrid::make(const SimConfig& cfg) {
    if (cfg.nx < 8 || cfg.nx % 2 != 0) throw DomainError("DnsGrid: nx must be even and at least 8");
    if (cfg.ny < 4) throw DomainError("DnsGrid: ny must be at least 4");
    if (!(cfg.Lx > 0.0) || !(cfg.Ly > 0.0)) throw DomainError("DnsGrid: domain sizes must be positive");
    DnsGrid g;
    g.nx = cfg.nx;
    g.ny = cfg.ny;
    g.nq = cfg.nx / 2 + 1;
    g.Lx = cfg.Lx;
    g.Ly = cfg.Ly;
    g.periodic_y = cfg.periodic_y;
    g.nfaces = cfg.periodic_y ? cfg.ny : cfg.ny + 1;
    g.x = periodic_axis(cfg.Lx, cfg.nx).pts;
    g.l.resize(g.nq);
    for (int q = 0; q < g.nq; ++q) g.l[q] = 2.0 * std::numbers::pi * q / cfg.Lx;

    const int ny = cfg.ny;
    g.h.assign(ny, cfg.Ly / ny);
    if (!cfg.periodic_y && cfg.dy0 > 0.0 && cfg.dy0 * ny < cfg.Ly) {
        if (!(cfg.stretch >= 1.0)) throw DomainError("DnsGrid: stretch ratio must be at least 1");
        auto heights = [&](double cap) {
            std::vector<double> h(ny);
            double d = cfg.dy0;
            for (int j = 0; j < ny; ++j) {
                h[j] = std::min(d, cap);
                d *= cfg.stretch;
            }
            return h;
        };
        auto total = [&](double cap) {
            double s = 0.0;
            for (double v : heights(cap)) s += v;
            return s;
        };
        if (total(cfg.Ly) < cfg.Ly)
            throw DomainError("DnsGrid: stretch ratio too small to reach Ly with ny cells");
        double lo = cfg.dy0, hi = cfg.Ly;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (total(mid) < cfg.Ly ? lo : hi) = mid;
        }
        g.h = heights(hi);
        const double scale = cfg.Ly / total(hi);
        for (auto& v : g.h) v *= scale;
    }
    g.yf.assign(ny + 1, 0.0);
    for (int j = 0; j < ny; ++j) g.yf[j + 1] = g.yf[j] + g.h[j];
    g.yf[ny] = cfg.Ly;
    g.yc.resize(ny);
    for (int j = 0; j < ny; ++j) g.yc[j] = 0.5 * (g.yf[j] + g.yf[j + 1]);
    g.dc.assign(ny + 1, 0.0);
    for (int f = 1; f < ny; ++f) g.dc[f] = g.yc[f] - g.yc[f - 1];
    if (cfg.periodic_y) {
        g.dc[0] = 0.5 * (g.h[ny - 1] + g.h[0]);
        g.dc[ny] = g.dc[0];
    }
    return g;
}

struct Solver::Impl {
    Layout lay;
    int nq = 0;
    int nx = 0;
    double dt = 0.0;
    /// Energy weight, diffusivity, sponge rate and u/w/b mask per slot.
    Eigen::VectorXd weight, diff, sponge, mask;
    CSp rot, lap;
    std::vector<std::unique_ptr<Eigen::SparseLU<CSp>>> step_lu;
    std::vector<std::unique_ptr<Eigen::SparseLU<RSp>>> proj_lu;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    std::vector<VecC> prev_nl;
    bool have_prev = false;

    ~Impl() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }

    VecC apply_L(const VecC& x, double l) const {
        VecC y = rot * x;
        VecC lx = lap * x - (l * l) * x;
        for (int i = 0; i < x.size(); ++i) y[i] += diff[i] * lx[i] - sponge[i] * x[i];
        return y;
    }

    /// Spectral row (nq entries) to nx real samples; the Nyquist entry is dropped.
    void to_row(const cplx* c, double* out) const {
        std::vector<cplx> buf(c, c + nq);
        buf[nq - 1] = 0.0;
        buf[0] = buf[0].real();
        fftw_execute_dft_c2r(c2r, reinterpret_cast<fftw_complex*>(buf.data()), out);
    }

    void from_row(const double* in, cplx* out) const {
        std::vector<double> buf(in, in + nx);
        fftw_execute_dft_r2c(r2c, buf.data(), reinterpret_cast<fftw_complex*>(out));
        for (int q = 0; q < nq; ++q) out[q] /= static_cast<double>(nx);
        out[nq - 1] = 0.0;
    }
};

Solver::Solver(const SimConfig& cfg) : cfg_(cfg), grid_(DnsGrid::make(cfg)), impl_(std::make_unique<Impl>()) {
    if (!(cfg.dt > 0.0) || !(cfg.T >= 0.0)) throw DomainError("Solver: dt must be positive and T non-negative");
    if (cfg.omega0 > 0.0 && cfg.dt > 0.1 / cfg.omega0)
        throw DomainError("Solver: dt exceeds 0.1 / omega0");
    if (cfg.diffusion) cfg.params.validate();
    Impl& m = *impl_;
    m.lay = {cfg.ny, cfg.periodic_y};
    m.nq = grid_.nq;
    m.nx = grid_.nx;
    m.dt = cfg.dt;
    const Layout& L = m.lay;
    const int n = L.size();
    nunk_ = n;
    const int ny = cfg.ny;
    const auto& g = grid_;
    const double nu = cfg.diffusion ? cfg.params.nu() : 0.0;
    const double kappa = cfg.diffusion ? cfg.params.kappa() : 0.0;
    const double s = cfg.params.sin_g(), c = cfg.params.cos_g();

    m.weight = m.diff = m.sponge = m.mask = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < ny; ++j) {
        m.weight[L.u(j)] = m.weight[L.b(j)] = g.h[j];
        m.diff[L.u(j)] = nu;
        m.diff[L.b(j)] = kappa;
        m.sponge[L.u(j)] = m.sponge[L.b(j)] = sponge_profile(g.yc[j], cfg);
        m.mask[L.u(j)] = m.mask[L.b(j)] = 1.0;
    }
    for (int f = L.face_begin(); f < ny; ++f) {
        const int k = L.w(f);
        m.weight[k] = g.dc[f];
        m.diff[k] = nu;
        m.sponge[k] = sponge_profile(g.yf[f], cfg);
        m.mask[k] = 1.0;
    }

    std::vector<Eigen::Triplet<cplx>> rt, lt;
    auto dcf = [&](int f) { return g.dc[cfg.periodic_y ? L.cell(f) : f]; };
    for (int j = 0; j < ny; ++j) {
        const double hj = g.h[j];
        // Lower and upper face fluxes of the centered Laplacian.
        const bool has_lower = cfg.periodic_y || j >= 1;
        const bool has_upper = cfg.periodic_y || j + 1 <= ny - 1;
        for (int var = 0; var < 2; ++var) {
            const int row = var == 0 ? L.u(j) : L.b(j);
            auto slot = [&](int jj) { return var == 0 ? L.u(jj) : L.b(jj); };
            if (has_upper) {
                const double k = 1.0 / (dcf(j + 1) * hj);
                lt.emplace_back(row, slot(j + 1), k);
                lt.emplace_back(row, row, -k);
            }
            if (has_lower) {
                const double k = 1.0 / (dcf(j) * hj);
                lt.emplace_back(row, slot(j - 1), k);
                lt.emplace_back(row, row, -k);
            } else if (var == 0) {
                // No-slip: the wall value enters through the half-cell distance.
                lt.emplace_back(row, row, -1.0 / (g.yc[0] * hj));
            }
        }
        rt.emplace_back(L.u(j), L.b(j), s);
        rt.emplace_back(L.b(j), L.u(j), -s);
        for (int f : {j, j + 1}) {
            const int k = L.w(f);
            if (k >= 0) rt.emplace_back(L.b(j), k, -0.5 * c);
        }
    }
    for (int f = L.face_begin(); f < ny; ++f) {
        const int row = L.w(f);
        const double d = dcf(f);
        const int below = L.cell(f - 1), above = L.cell(f);
        rt.emplace_back(row, L.b(below), c * g.h[below] / (2.0 * d));
        rt.emplace_back(row, L.b(above), c * g.h[above] / (2.0 * d));
        const double ka = 1.0 / (g.h[above] * d), kb = 1.0 / (g.h[below] * d);
        lt.emplace_back(row, row, -ka - kb);
        if (const int up = L.w(f + 1); up >= 0) lt.emplace_back(row, up, ka);
        if (const int dn = L.w(f - 1); dn >= 0) lt.emplace_back(row, dn, kb);
    }
    m.rot.resize(n, n);
    m.rot.setFromTriplets(rt.begin(), rt.end());
    m.lap.resize(n, n);
    m.lap.setFromTriplets(lt.begin(), lt.end());

    m.step_lu.resize(m.nq);
    m.proj_lu.resize(m.nq);
    for (int q = 0; q < m.nq; ++q) {
        const double l = g.l[q];
        const bool pin = q == 0;
        std::vector<Eigen::Triplet<cplx>> at;
        // I/dt - L/2 on the u, w, b rows.
        for (int k = 0; k < n; ++k)
            if (m.mask[k] > 0.0) at.emplace_back(k, k, 1.0 / cfg.dt + 0.5 * (m.sponge[k] + m.diff[k] * l * l));
        for (int o = 0; o < m.rot.outerSize(); ++o)
            for (CSp::InnerIterator it(m.rot, o); it; ++it) at.emplace_back(it.row(), it.col(), -0.5 * it.value());
        for (int o = 0; o < m.lap.outerSize(); ++o)
            for (CSp::InnerIterator it(m.lap, o); it; ++it)
                at.emplace_back(it.row(), it.col(), -0.5 * m.diff[it.row()] * it.value());
        for (int j = 0; j < ny; ++j) {
            at.emplace_back(L.u(j), L.p(j), I * l);
            if (pin && j == ny - 1) {
                at.emplace_back(L.p(j), L.p(j), 1.0);
                continue;
            }
            at.emplace_back(L.p(j), L.u(j), I * l);
            if (const int k = L.w(j + 1); k >= 0) at.emplace_back(L.p(j), k, 1.0 / g.h[j]);
            if (const int k = L.w(j); k >= 0) at.emplace_back(L.p(j), k, -1.0 / g.h[j]);
        }
        for (int f = L.face_begin(); f < ny; ++f) {
            const double d = dcf(f);
            at.emplace_back(L.w(f), L.p(f), 1.0 / d);
            at.emplace_back(L.w(f), L.p(f - 1), -1.0 / d);
        }
        CSp A(n, n);
        A.setFromTriplets(at.begin(), at.end());
        m.step_lu[q] = std::make_unique<Eigen::SparseLU<CSp>>(A);
        if (m.step_lu[q]->info() != Eigen::Success) throw NumericError("Solver: step matrix factorization failed");

        // Neumann Laplacian minus l^2 for the projection.
        std::vector<Eigen::Triplet<double>> pt;
        for (int j = 0; j < ny; ++j) {
            if (pin && j == ny - 1) {
                pt.emplace_back(j, j, 1.0);
                continue;
            }
            pt.emplace_back(j, j, -l * l);
            for (int f : {j, j + 1}) {
                if (L.w(f) < 0) continue;
                const double k = 1.0 / (dcf(f) * g.h[j]);
                const int nb = L.cell(f == j ? j - 1 : j + 1);
                pt.emplace_back(j, nb, k);
                pt.emplace_back(j, j, -k);
            }
        }
        RSp P(ny, ny);
        P.setFromTriplets(pt.begin(), pt.end());
        m.proj_lu[q] = std::make_unique<Eigen::SparseLU<RSp>>(P);
        if (m.proj_lu[q]->info() != Eigen::Success) throw NumericError("Solver: projection factorization failed");
    }

    std::vector<double> rin(m.nx);
    std::vector<cplx> cbuf(m.nq);
    m.r2c = fftw_plan_dft_r2c_1d(m.nx, rin.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    m.c2r = fftw_plan_dft_c2r_1d(m.nx, reinterpret_cast<fftw_complex*>(cbuf.data()), rin.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!m.r2c || !m.c2r) throw NumericError("Solver: FFT planning failed");
}

Solver::~Solver() = default;

State Solver::zero_state() const {
    State s;
    s.modes.assign(grid_.nq, VecC::Zero(nunk_));
    return s;
}

State Solver::from_physical(const PhysicalFields& f) const {
    const Impl& m = *impl_;
    const int ny = grid_.ny, nx = grid_.nx, nq = grid_.nq;
    if (f.u.size() != static_cast<std::size_t>(ny * nx) || f.b.size() != f.u.size() ||
        f.w.size() != static_cast<std::size_t>(grid_.nfaces * nx))
        throw DomainError("from_physical: field sizes do not match the grid");
    State s = zero_state();
    std::vector<cplx> rows(static_cast<std::size_t>(2 * ny + grid_.nfaces) * nq);
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int r = 0; r < 2 * ny + grid_.nfaces; ++r) {
        const double* src = r < ny ? &f.u[r * nx] : r < 2 * ny ? &f.b[(r - ny) * nx] : &f.w[(r - 2 * ny) * nx];
        m.from_row(src, &rows[static_cast<std::size_t>(r) * nq]);
    }
    for (int q = 0; q < nq; ++q) {
        auto& x = s.modes[q];
        for (int j = 0; j < ny; ++j) {
            x[m.lay.u(j)] = rows[static_cast<std::size_t>(j) * nq + q];
            x[m.lay.b(j)] = rows[static_cast<std::size_t>(ny + j) * nq + q];
        }
        for (int fc = m.lay.face_begin(); fc < ny; ++fc)
            x[m.lay.w(fc)] = rows[static_cast<std::size_t>(2 * ny + m.lay.face_row(fc)) * nq + q];
    }
    return s;
}

PhysicalFields Solver::to_physical(const State& s) const {
    const Impl& m = *impl_;
    const int ny = grid_.ny, nx = grid_.nx, nq = grid_.nq, nf = grid_.nfaces;
    std::vector<cplx> rows(static_cast<std::size_t>(2 * ny + nf) * nq, cplx(0.0));
    for (int q = 0; q < nq; ++q) {
        const auto& x = s.modes[q];
        for (int j = 0; j < ny; ++j) {
            rows[static_cast<std::size_t>(j) * nq + q] = x[m.lay.u(j)];
            rows[static_cast<std::size_t>(ny + j) * nq + q] = x[m.lay.b(j)];
        }
        for (int fc = m.lay.face_begin(); fc < ny; ++fc)
            rows[static_cast<std::size_t>(2 * ny + m.lay.face_row(fc)) * nq + q] = x[m.lay.w(fc)];
    }
    PhysicalFields f;
    f.u.assign(static_cast<std::size_t>(ny) * nx, 0.0);
    f.b = f.u;
    f.w.assign(static_cast<std::size_t>(nf) * nx, 0.0);
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int r = 0; r < 2 * ny + nf; ++r) {
        double* dst = r < ny ? &f.u[r * nx] : r < 2 * ny ? &f.b[(r - ny) * nx] : &f.w[(r - 2 * ny) * nx];
        m.to_row(&rows[static_cast<std::size_t>(r) * nq], dst);
    }
    return f;
}

void Solver::project(State& s) const {
    const Impl& m = *impl_;
    const Layout& L = m.lay;
    const int ny = grid_.ny;
    const auto& g = grid_;
    auto dcf = [&](int f) { return g.dc[g.periodic_y ? L.cell(f) : f]; };
#pragma omp parallel for if (cfg_.parallel) schedule(dynamic)
    for (int q = 0; q < grid_.nq; ++q) {
        auto& x = s.modes[q];
        const double l = g.l[q];
        Eigen::VectorXd rr(ny), ri(ny);
        for (int j = 0; j < ny; ++j) {
            cplx d = I * l * x[L.u(j)];
            if (const int k = L.w(j + 1); k >= 0) d += x[k] / g.h[j];
            if (const int k = L.w(j); k >= 0) d -= x[k] / g.h[j];
            rr[j] = d.real();
            ri[j] = d.imag();
        }
        if (q == 0) rr[ny - 1] = ri[ny - 1] = 0.0;
        const Eigen::VectorXd pr = m.proj_lu[q]->solve(rr), pi = m.proj_lu[q]->solve(ri);
        auto phi = [&](int j) { return cplx(pr[L.cell(j)], pi[L.cell(j)]); };
        for (int j = 0; j < ny; ++j) x[L.u(j)] -= I * l * phi(j);
        for (int f = L.face_begin(); f < ny; ++f) x[L.w(f)] -= (phi(f) - phi(f - 1)) / dcf(f);
    }
}

std::vector<VecC> Solver::nonlinear(const State& s) const {
    std::vector<VecC> out(grid_.nq, VecC::Zero(nunk_));
    if (cfg_.params.delta == 0.0) return out;
    const Impl& m = *impl_;
    const Layout& L = m.lay;
    const int ny = grid_.ny, nx = grid_.nx, nq = grid_.nq, nf = grid_.nfaces;
    const auto& g = grid_;
    const double scale = -cfg_.params.delta;

    // Physical values and x-derivatives: rows u, b (centers), w (faces).
    const int nrows = 2 * ny + nf;
    std::vector<cplx> spec(static_cast<std::size_t>(nrows) * nq, cplx(0.0));
    for (int q = 0; q < nq; ++q) {
        const auto& x = s.modes[q];
        for (int j = 0; j < ny; ++j) {
            spec[static_cast<std::size_t>(j) * nq + q] = x[L.u(j)];
            spec[static_cast<std::size_t>(ny + j) * nq + q] = x[L.b(j)];
        }
        for (int f = L.face_begin(); f < ny; ++f)
            spec[static_cast<std::size_t>(2 * ny + L.face_row(f)) * nq + q] = x[L.w(f)];
    }
    std::vector<double> val(static_cast<std::size_t>(nrows) * nx), dx(val.size());
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int r = 0; r < nrows; ++r) {
        const cplx* c = &spec[static_cast<std::size_t>(r) * nq];
        std::vector<cplx> d(nq);
        for (int q = 0; q < nq; ++q) d[q] = I * g.l[q] * c[q];
        m.to_row(c, &val[static_cast<std::size_t>(r) * nx]);
        m.to_row(d.data(), &dx[static_cast<std::size_t>(r) * nx]);
    }
    auto U = [&](int j) { return &val[static_cast<std::size_t>(L.cell(j)) * nx]; };
    auto Ux = [&](int j) { return &dx[static_cast<std::size_t>(L.cell(j)) * nx]; };
    auto B = [&](int j) { return &val[static_cast<std::size_t>(ny + L.cell(j)) * nx]; };
    auto Bx = [&](int j) { return &dx[static_cast<std::size_t>(ny + L.cell(j)) * nx]; };
    auto W = [&](int f) { return &val[static_cast<std::size_t>(2 * ny + L.face_row(f)) * nx]; };
    auto Wx = [&](int f) { return &dx[static_cast<std::size_t>(2 * ny + L.face_row(f)) * nx]; };
    auto has_face = [&](int f) { return L.w(f) >= 0; };

    // Per output row: A (collocated part) and Bf (flux under d_x).
    std::vector<double> A(val.size(), 0.0), Bf(val.size(), 0.0);
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int j = 0; j < ny; ++j) {
        const double hj = g.h[j];
        const bool lo = has_face(j), hi = has_face(j + 1);
        const double *w0 = W(j), *w1 = W(j + 1), *u = U(j);
        for (int var = 0; var < 2; ++var) {
            const double* phi = var == 0 ? U(j) : B(j);
            const double* phx = var == 0 ? Ux(j) : Bx(j);
            const double* below = lo ? (var == 0 ? U(j - 1) : B(j - 1)) : nullptr;
            const double* above = hi ? (var == 0 ? U(j + 1) : B(j + 1)) : nullptr;
            double* a = &A[static_cast<std::size_t>(var * ny + j) * nx];
            double* bf = &Bf[static_cast<std::size_t>(var * ny + j) * nx];
            for (int i = 0; i < nx; ++i) {
                const double wl = lo ? w0[i] : 0.0, wu = hi ? w1[i] : 0.0;
                const double Fl = lo ? wl * 0.5 * (below[i] + phi[i]) : 0.0;
                const double Fu = hi ? wu * 0.5 * (phi[i] + above[i]) : 0.0;
                a[i] = 0.5 * u[i] * phx[i] + (Fu - Fl) / hj - 0.5 * phi[i] * (wu - wl) / hj;
                bf[i] = 0.5 * u[i] * phi[i];
            }
        }
    }
    auto dcf = [&](int f) { return g.dc[g.periodic_y ? L.cell(f) : f]; };
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int f = L.face_begin(); f < ny; ++f) {
        const int cb = L.cell(f - 1), ca = L.cell(f);
        const double d = dcf(f);
        const double *ub = U(cb), *ua = U(ca), *w = W(f), *wx = Wx(f);
        const double* wdn = has_face(f - 1) ? W(f - 1) : nullptr;
        const double* wup = has_face(f + 1) ? W(f + 1) : nullptr;
        double* a = &A[static_cast<std::size_t>(2 * ny + L.face_row(f)) * nx];
        double* bf = &Bf[static_cast<std::size_t>(2 * ny + L.face_row(f)) * nx];
        for (int i = 0; i < nx; ++i) {
            const double uf = (g.h[cb] * ub[i] + g.h[ca] * ua[i]) / (2.0 * d);
            const double wc_b = 0.5 * ((wdn ? wdn[i] : 0.0) + w[i]);
            const double wc_a = 0.5 * (w[i] + (wup ? wup[i] : 0.0));
            a[i] = 0.5 * uf * wx[i] + (wc_a * wc_a - wc_b * wc_b) / d - 0.5 * w[i] * (wc_a - wc_b) / d;
            bf[i] = 0.5 * uf * w[i];
        }
    }
    std::vector<cplx> sa(spec.size()), sb(spec.size());
#pragma omp parallel for if (cfg_.parallel) schedule(static)
    for (int r = 0; r < nrows; ++r) {
        m.from_row(&A[static_cast<std::size_t>(r) * nx], &sa[static_cast<std::size_t>(r) * nq]);
        m.from_row(&Bf[static_cast<std::size_t>(r) * nx], &sb[static_cast<std::size_t>(r) * nq]);
    }
    for (int q = 0; q < nq; ++q) {
        auto& o = out[q];
        const double l = g.l[q];
        auto term = [&](int row) {
            const std::size_t k = static_cast<std::size_t>(row) * nq + q;
            return scale * (sa[k] + I * l * sb[k]);
        };
        for (int j = 0; j < ny; ++j) {
            o[L.u(j)] = term(j);
            o[L.b(j)] = term(ny + j);
        }
        for (int f = L.face_begin(); f < ny; ++f) o[L.w(f)] = term(2 * ny + L.face_row(f));
    }
    (void)U;
    return out;
}

double Solver::inner(const State& a, const State& b) const {
    const Impl& m = *impl_;
    double s = 0.0;
    for (int q = 0; q < grid_.nq; ++q) {
        double sq = 0.0;
        for (int k = 0; k < nunk_; ++k) sq += m.weight[k] * (std::conj(a.modes[q][k]) * b.modes[q][k]).real();
        s += parseval_factor(q) * sq;
    }
    return grid_.Lx * s;
}

double Solver::energy(const State& s) const { return inner(s, s); }

double Solver::energy_below(const State& s, double ycut) const {
    const Impl& m = *impl_;
    const Layout& L = m.lay;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nunk_);
    for (int j = 0; j < grid_.ny; ++j)
        if (grid_.yc[j] <= ycut) w[L.u(j)] = w[L.b(j)] = m.weight[L.u(j)];
    for (int f = L.face_begin(); f < grid_.ny; ++f)
        if (grid_.yf[f] <= ycut) w[L.w(f)] = m.weight[L.w(f)];
    double e = 0.0;
    for (int q = 0; q < grid_.nq; ++q) {
        double sq = 0.0;
        for (int k = 0; k < nunk_; ++k) sq += w[k] * std::norm(s.modes[q][k]);
        e += parseval_factor(q) * sq;
    }
    return grid_.Lx * e;
}

namespace {

/// -<X, diag(coef) (Lap - l^2) X> summed over modes.
double gradient_form(const Solver& solver, const State& s, const Eigen::VectorXd& weight,
                     const Eigen::VectorXd& coef, const CSp& lap) {
    const auto& g = solver.grid();
    double total = 0.0;
    for (int q = 0; q < g.nq; ++q) {
        const auto& x = s.modes[q];
        const VecC lx = lap * x - (g.l[q] * g.l[q]) * x;
        double sq = 0.0;
        for (int k = 0; k < x.size(); ++k) sq -= weight[k] * coef[k] * (std::conj(x[k]) * lx[k]).real();
        total += parseval_factor(q) * sq;
    }
    return g.Lx * total;
}

}  // namespace

double Solver::dissipation_rate(const State& s) const {
    return 2.0 * gradient_form(*this, s, impl_->weight, impl_->diff, impl_->lap);
}

double Solver::sponge_rate(const State& s) const {
    const Impl& m = *impl_;
    double e = 0.0;
    for (int q = 0; q < grid_.nq; ++q) {
        double sq = 0.0;
        for (int k = 0; k < nunk_; ++k) sq += m.weight[k] * m.sponge[k] * std::norm(s.modes[q][k]);
        e += parseval_factor(q) * sq;
    }
    return 2.0 * grid_.Lx * e;
}

double Solver::divergence(const State& s) const {
    const Impl& m = *impl_;
    const Layout& L = m.lay;
    double num = 0.0, den = 0.0;
    for (int q = 0; q < grid_.nq; ++q) {
        const auto& x = s.modes[q];
        const double l = grid_.l[q];
        for (int j = 0; j < grid_.ny; ++j) {
            const cplx a = I * l * x[L.u(j)];
            cplx up = 0.0, dn = 0.0;
            if (const int k = L.w(j + 1); k >= 0) up = x[k] / grid_.h[j];
            if (const int k = L.w(j); k >= 0) dn = x[k] / grid_.h[j];
            num = std::max(num, std::abs(a + up - dn));
            den = std::max({den, std::abs(a), std::abs(up), std::abs(dn)});
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

std::pair<double, double> Solver::advection_skewness(const State& s) const {
    const double delta = cfg_.params.delta;
    if (delta == 0.0) throw DomainError("advection_skewness: needs delta > 0");
    const auto nl = nonlinear(s);
    State n = zero_state();
    n.modes = nl;
    const double form = std::abs(inner(n, s)) / delta;
    const Eigen::VectorXd ones = impl_->mask;
    const double grad = std::sqrt(std::max(0.0, gradient_form(*this, s, impl_->weight, ones, impl_->lap)));
    return {form, std::sqrt(energy(s)) * grad};
}

void Solver::reset() {
    impl_->prev_nl.clear();
    impl_->have_prev = false;
}

StepStats Solver::step(State& s) {
    Impl& m = *impl_;
    StepStats st;
    const double e_old = energy(s);
    auto nl = nonlinear(s);
    if (cfg_.params.delta > 0.0) {
        // Advective CFL from the physical velocities.
        const auto ph = to_physical(s);
        double cu = 0.0, cw = 0.0;
        for (double v : ph.u) cu = std::max(cu, std::abs(v));
        for (int f = 0; f < grid_.nfaces; ++f) {
            const int below = m.lay.cell(f - 1), above = m.lay.cell(std::min(f, grid_.ny - 1));
            const double hmin = std::min(grid_.h[std::max(below, 0)], grid_.h[above]);
            for (int i = 0; i < grid_.nx; ++i)
                cw = std::max(cw, std::abs(ph.w[static_cast<std::size_t>(f) * grid_.nx + i]) / hmin);
        }
        st.cfl = cfg_.params.delta * cfg_.dt * (cu * grid_.nx / grid_.Lx + cw);
        if (st.cfl > 0.5) throw NumericError("step: advective CFL " + std::to_string(st.cfl) + " exceeds 0.5 at t = " +
                                             std::to_string(s.t));
    }
    std::vector<VecC> ab(grid_.nq);
    for (int q = 0; q < grid_.nq; ++q) ab[q] = m.have_prev ? VecC(1.5 * nl[q] - 0.5 * m.prev_nl[q]) : nl[q];
    State mid = zero_state();
    bool finite = true;
#pragma omp parallel for if (cfg_.parallel) schedule(dynamic) reduction(&& : finite)
    for (int q = 0; q < grid_.nq; ++q) {
        auto& x = s.modes[q];
        VecC rhs = m.apply_L(x, grid_.l[q]) * 0.5;
        for (int k = 0; k < nunk_; ++k) rhs[k] = m.mask[k] > 0.0 ? rhs[k] + x[k] / m.dt + ab[q][k] : cplx(0.0);
        VecC xn = m.step_lu[q]->solve(rhs);
        finite = finite && xn.allFinite();
        mid.modes[q] = 0.5 * (x + xn);
        x = std::move(xn);
    }
    if (!finite) throw NumericError("step: non-finite state at t = " + std::to_string(s.t));
    m.prev_nl = std::move(nl);
    m.have_prev = true;
    s.t += cfg_.dt;
    st.energy = energy(s);
    st.dissipation = dissipation_rate(mid);
    st.sponge = sponge_rate(mid);
    st.defect = st.energy - e_old + cfg_.dt * (st.dissipation + st.sponge);
    return st;
}

State difference(const State& a, const State& b) {
    if (a.modes.size() != b.modes.size()) throw DomainError("difference: state shapes differ");
    State d;
    d.t = a.t;
    d.modes.resize(a.modes.size());
    for (std::size_t q = 0; q < a.modes.size(); ++q) d.modes[q] = a.modes[q] - b.modes[q];
    return d;
}

State sample_modes(const Solver& solver, const std::vector<const ModeList*>& lists, double t) {
    const auto& g = solver.grid();
    const Axis xa = periodic_axis(g.Lx, g.nx);
    std::vector<RowEvaluator> ev;
    for (const auto* l : lists) ev.emplace_back(*l, xa, t);
    PhysicalFields f;
    const std::size_t nx = g.nx;
    f.u.assign(g.ny * nx, 0.0);
    f.b = f.u;
    f.w.assign(g.nfaces * nx, 0.0);
    const int face_lo = g.periodic_y ? 0 : 1, face_hi = g.ny;
    const int nrows = g.ny + (face_hi - face_lo);
#pragma omp parallel if (solver.config().parallel)
    {
        std::array<std::vector<double>, 3> row;
#pragma omp for schedule(dynamic, 4)
        for (int r = 0; r < nrows; ++r) {
            const bool center = r < g.ny;
            const int idx = center ? r : face_lo + (r - g.ny);
            const double y = center ? g.yc[idx] : g.yf[idx];
            for (auto& c : row) c.assign(nx, 0.0);
            for (const auto& e : ev) e.add_row(y, {}, row);
            if (center) {
                std::copy(row[0].begin(), row[0].end(), f.u.begin() + idx * nx);
                std::copy(row[2].begin(), row[2].end(), f.b.begin() + idx * nx);
            } else {
                std::copy(row[1].begin(), row[1].end(), f.w.begin() + idx * nx);
            }
        }
    }
    State s = solver.from_physical(f);
    s.t = t;
    return s;
}

State init_from_Wapp(const Solver& solver, const W0Assembly& w0, const CorrectorAssembly* w1, InitReport* report) {
    auto lists = family_lists(w0, Family::Sum);
    if (w1 && w1->params.delta > 0.0)
        for (const auto* l : w1->lists()) lists.push_back(l);
    State s = sample_modes(solver, lists, 0.0);
    InitReport rep;
    {
        const auto ph = solver.to_physical(s);
        const auto& g = solver.grid();
        double peak = 0.0, top = 0.0;
        for (const auto* v : {&ph.u, &ph.b})
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double a = std::abs((*v)[static_cast<std::size_t>(j) * g.nx + i]);
                    peak = std::max(peak, a);
                    if (j == g.ny - 1) top = std::max(top, a);
                }
        rep.edge_ratio = peak > 0.0 ? top / peak : 0.0;
        if (rep.edge_ratio > 1e-6)
            rep.warning = "packet overflow: top-row amplitude " + std::to_string(rep.edge_ratio) + " of max";
    }
    rep.divergence_before = solver.divergence(s);
    const State before = s;
    solver.project(s);
    rep.divergence_after = solver.divergence(s);
    const double e = solver.energy(before);
    rep.projection_change = e > 0.0 ? std::sqrt(solver.energy(difference(s, before)) / e) : 0.0;
    if (report) *report = rep;
    return s;
}

double snapped_k0(double k0, double eps, int nodes_k) {
    const double e2 = eps * eps;
    const double dk = 2.0 * e2 / (nodes_k + 1.0);
    return e2 + std::round((k0 - e2) / dk) * dk;
}

int layer_points(const DnsGrid& grid, double thickness) {
    return static_cast<int>(std::count_if(grid.yc.begin(), grid.yc.end(), [&](double y) { return y <= thickness; }));
}

SimConfig default_sim_config(const W0Assembly& w0, int nx, int ny) {
    SimConfig cfg;
    cfg.params = w0.params;
    cfg.Lx = w0.period_x();
    cfg.Ly = w0.half_period_y();
    cfg.nx = nx;
    cfg.ny = ny;
    for (const auto& n : w0.nodes) {
        const double r = n.k / w0.dk;
        if (std::abs(r - std::round(r)) > 1e-8)
            throw DomainError("default_sim_config: node k = " + std::to_string(n.k) +
                              " is not a multiple of dk; use snapped_k0");
    }
    double fast = std::max(w0.bl_eps3.max_decay(), w0.bl_eps2.max_decay());
    cfg.dy0 = 0.25 / fast;
    cfg.omega0 = std::abs(w0.envelope.carrier.omega0);
    cfg.dt = std::min(0.01, 0.1 / cfg.omega0);
    return cfg;
}

Trajectory run(Solver& solver, State s, int every) {
    if (every < 1) throw DomainError("run: sampling interval must be positive");
    Trajectory tr;
    solver.reset();
    tr.initial_energy = solver.energy(s);
    tr.samples.push_back({s.t, tr.initial_energy, 0.0, 0.0});
    tr.states.push_back(s);
    const int nsteps = static_cast<int>(std::lround(solver.config().T / solver.config().dt));
    double dissipated = 0.0;
    for (int n = 1; n <= nsteps; ++n) {
        const StepStats st = solver.step(s);
        dissipated += solver.config().dt * (st.dissipation + st.sponge);
        tr.samples.push_back({s.t, st.energy, dissipated, st.defect});
        if (n % every == 0 || n == nsteps) tr.states.push_back(s);
    }
    tr.steps = nsteps;
    return tr;
}

EnergyLedger energy_budget(const Trajectory& traj) {
    EnergyLedger led;
    if (traj.samples.size() < 2 || !(traj.initial_energy > 0.0)) return led;
    const double e0 = traj.initial_energy;
    double sum = 0.0;
    for (std::size_t n = 1; n < traj.samples.size(); ++n) {
        const auto& a = traj.samples[n - 1];
        const auto& b = traj.samples[n];
        sum += b.defect;
        led.max_step_defect = std::max(led.max_step_defect, std::abs(b.defect) / e0);
        led.max_increase = std::max(led.max_increase, (b.energy - a.energy) / a.energy);
    }
    const double span = traj.samples.back().t - traj.samples.front().t;
    led.defect_per_time = std::abs(sum) / e0 / span;
    led.final_balance = (traj.samples.back().energy + traj.samples.back().dissipated - e0) / e0;
    return led;
}

StabilityReport compare_stability(const Solver& solver, const Trajectory& run, const Trajectory& control,
                                  const W0Assembly& w0, const CorrectorAssembly* w1) {
    if (run.states.size() != control.states.size())
        throw DomainError("compare_stability: run and control store different times");
    const PhysParams& pp = solver.config().params;
    StabilityReport rep;
    rep.ycut = (1.0 - solver.config().sponge.fraction) * solver.grid().Ly;
    const auto lin = family_lists(w0, Family::Sum);
    auto full = lin;
    std::vector<const ModeList*> corr;
    if (w1) {
        corr = w1->lists();
        for (const auto* l : corr) full.push_back(l);
    }
    const double e2 = pp.eps * pp.eps, delta = pp.delta;
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        const State& w = run.states[k];
        const State& c = control.states[k];
        const double t = w.t;
        if (std::abs(c.t - t) > 1e-9) throw DomainError("compare_stability: sample times differ");
        StabilityPoint p;
        p.t = t;
        p.diff_l2 = std::sqrt(solver.energy_below(difference(sample_modes(solver, full, t), w), rep.ycut));
        p.floor = std::sqrt(solver.energy_below(difference(sample_modes(solver, lin, t), c), rep.ycut));
        if (!corr.empty())
            p.diff_nonlinear =
                std::sqrt(solver.energy_below(difference(difference(w, c), sample_modes(solver, corr, t)), rep.ycut));
        p.bound_thm = delta * e2 * std::exp((delta / e2 + 1.0) * t);
        p.bound_alt = std::sqrt(delta) * e2 * pp.eps * std::exp(delta / e2 * t);
        rep.within_thm = rep.within_thm && p.diff_l2 - p.floor <= p.bound_thm;
        rep.within_alt = rep.within_alt && p.diff_l2 - p.floor <= p.bound_alt;
        rep.series.push_back(p);
    }
    return rep;
}

}  // namespace wavecrit
