#include "wavecrit/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace wavecrit {

std::vector<cplx> polynomial_roots(const std::vector<cplx>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return {};
    if (n == 1) return {-c[0] / c[1]};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericError("companion eigen-solve did not converge");
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

namespace {

double rel_dist(cplx z, const std::vector<cplx>& cands) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
        const double scale = std::max({std::abs(c), std::abs(z), 1e-300});
        best = std::min(best, std::abs(z - c) / scale);
    }
    return best;
}

cplx sqrt_pos(cplx z) {
    cplx r = std::sqrt(z);
    return r.real() < 0.0 ? -r : r;
}

struct Assignment {
    std::vector<int> perm;  // perm[slot] = root index
    double cost;
};

/// Minimum-cost assignment of roots (given indices) to slots with candidate sets;
/// ties go to the ordering that gives lower labels the roots with smaller |Im|.
std::vector<int> match(const std::array<cplx, 6>& roots, const std::vector<int>& idx,
                       const std::vector<int>& slots,
                       const std::array<std::vector<cplx>, 6>& cands) {
    std::vector<int> perm = idx;
    std::sort(perm.begin(), perm.end());
    std::vector<Assignment> all;
    do {
        double cost = 0.0;
        for (std::size_t s = 0; s < slots.size(); ++s) cost += rel_dist(roots[perm[s]], cands[slots[s]]);
        all.push_back({perm, cost});
    } while (std::next_permutation(perm.begin(), perm.end()));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : all) best = std::min(best, a.cost);
    const double tol = 1e-9 * best + 1e-14;
    std::vector<const Assignment*> tied;
    for (const auto& a : all)
        if (a.cost <= best + tol) tied.push_back(&a);
    if (tied.size() == 1) return tied.front()->perm;
    auto key = [&](const Assignment* a) {
        std::vector<double> k;
        for (int r : a->perm) k.push_back(std::abs(roots[r].imag()));
        for (int r : a->perm) k.push_back(roots[r].imag());
        return k;
    };
    std::sort(tied.begin(), tied.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
    if (key(tied[0]) == key(tied[1])) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const cplx ra = roots[tied[0]->perm[s]], rb = roots[tied[1]->perm[s]];
            if (std::abs(ra - rb) > 1e-12 * std::max(std::abs(ra), 1.0))
                throw ClassificationError("ambiguous root assignment", ra, rb);
        }
    }
    return tied[0]->perm;
}

}  // namespace

Matrix4c build_matrix(const ModalMatrixSpec& sp, cplx lambda) {
    const double s = std::sin(sp.gamma), c = std::cos(sp.gamma);
    const cplx d = sp.k * sp.k - lambda * lambda;
    const cplx ik = I * sp.k;
    Matrix4c A;
    A << -I * sp.omega + sp.nu * d, 0.0, -s, ik,
         0.0, -I * sp.omega + sp.nu * d, -c, -lambda,
         s, c, -I * sp.omega + sp.kappa * d, 0.0,
         ik, -lambda, 0.0, 0.0;
    return A;
}

cplx CharPoly::operator()(cplx lambda) const {
    cplx acc = coeffs[6];
    for (int j = 5; j >= 0; --j) acc = acc * lambda + coeffs[j];
    return acc;
}

cplx CharPoly::derivative(cplx lambda) const {
    cplx acc = 6.0 * coeffs[6];
    for (int j = 5; j >= 1; --j) acc = acc * lambda + static_cast<double>(j) * coeffs[j];
    return acc;
}

double CharPoly::magnitude(cplx lambda) const {
    const double r = std::abs(lambda);
    double acc = 0.0, p = 1.0;
    for (int j = 0; j <= 6; ++j, p *= r) acc += std::abs(coeffs[j]) * p;
    return acc;
}

double CharPoly::max_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

CharPoly char_poly(const ModalMatrixSpec& sp) {
    const double s = std::sin(sp.gamma), c = std::cos(sp.gamma);
    const double nk = sp.nu * sp.kappa, sum = sp.nu + sp.kappa;
    const double k2 = sp.k * sp.k, w = sp.omega;
    const double zeta = w * w - s * s;
    CharPoly p;
    p.coeffs[6] = -nk;
    p.coeffs[5] = 0.0;
    p.coeffs[4] = -I * w * sum + 3.0 * nk * k2;
    p.coeffs[3] = 0.0;
    p.coeffs[2] = zeta + 2.0 * I * w * sum * k2 - 3.0 * nk * k2 * k2;
    p.coeffs[1] = -2.0 * I * sp.k * s * c;
    p.coeffs[0] = k2 * (c * c - w * w - I * w * sum * k2 + nk * k2 * k2);
    return p;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::NonCritical: return "NonCritical";
        case Regime::CriticalSmallDiff: return "CriticalSmallDiff";
        case Regime::CriticalDY: return "CriticalDY";
        case Regime::CriticalLargeDiff: return "CriticalLargeDiff";
        case Regime::NonOscillating: return "NonOscillating";
    }
    return "?";
}

int RootSet::index_of(int label) const {
    for (int i = 0; i < 6; ++i)
        if (labels[i] == label) return i;
    throw NumericError("RootSet: label lambda_" + std::to_string(label) + " not assigned");
}

cplx RootSet::lambda(int label) const { return roots[index_of(label)]; }

RootSet solve_roots(const CharPoly& poly) {
    if (poly.coeffs[6] == cplx(0.0)) throw DomainError("solve_roots: leading coefficient is zero");
    int j0 = 0;
    while (j0 < 6 && poly.coeffs[j0] == cplx(0.0)) ++j0;
    RootSet out;
    std::vector<cplx> found(j0, cplx(0.0));
    if (j0 < 6) {
        const double scale =
            std::pow(std::abs(poly.coeffs[j0] / poly.coeffs[6]), 1.0 / (6 - j0));
        std::vector<cplx> d(7 - j0);
        for (int j = j0; j <= 6; ++j) d[j - j0] = poly.coeffs[j] * std::pow(scale, j - 6) / poly.coeffs[6];
        for (const auto& mu : polynomial_roots(d)) found.push_back(mu * scale);
    }
    // Aberth-Ehrlich polishing keeps the iterates of nearly double roots apart.
    std::vector<cplx> z(found.begin(), found.end());
    std::array<bool, 6> done{};
    for (int i = 0; i < j0; ++i) done[i] = true;
    for (int it = 0; it < 60; ++it) {
        bool moved = false;
        for (int i = 0; i < 6; ++i) {
            if (done[i]) continue;
            const cplx pz = poly(z[i]);
            if (std::abs(pz) <= 1e-16 * poly.magnitude(z[i])) {
                done[i] = true;
                continue;
            }
            const cplx dp = poly.derivative(z[i]);
            if (dp == cplx(0.0)) continue;
            const cplx w = pz / dp;
            cplx sum = 0.0;
            for (int j = 0; j < 6; ++j)
                if (j != i && z[j] != z[i]) sum += 1.0 / (z[i] - z[j]);
            const cplx step = w / (1.0 - w * sum);
            z[i] -= step;
            if (std::abs(step) <= 1e-15 * std::abs(z[i])) done[i] = true;
            moved = true;
        }
        if (!moved) break;
    }
    for (int i = 0; i < 6; ++i) {
        const double bound = 1e-10 * poly.max_coeff() * std::pow(std::max(1.0, std::abs(z[i])), 6);
        const double res = std::abs(poly(z[i]));
        if (!(res <= bound)) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "solve_roots: residual %.3e above bound %.3e", res, bound);
            throw NumericError(msg);
        }
        out.roots[i] = z[i];
    }
    for (int i = 0; i < 6; ++i)
        if (out.roots[i].real() > 0.0) out.pos_real.push_back(i);
    return out;
}

RootSet classify_roots(RootSet rs, const ModalMatrixSpec& sp, double eps) {
    const double s = std::sin(sp.gamma), c = std::cos(sp.gamma);
    const double nubar = 0.5 * (sp.nu + sp.kappa);
    const double n13 = std::cbrt(nubar), n14 = std::pow(nubar, 0.25);
    const double zeta = criticality_zeta(sp.omega, sp.gamma);
    const double az = std::abs(zeta);
    const double osc = std::max(std::abs(sp.k), std::abs(sp.omega));
    constexpr double kNonOsc = 4.0, kGuard = 3.0;

    auto zeta_regime = [&](bool& contested, std::optional<Regime>& alt) {
        if (az >= 0.5) {
            if (az < 0.5 * kGuard) { contested = true; alt = Regime::CriticalSmallDiff; }
            return Regime::NonCritical;
        }
        const double r = az / n13;
        if (r < 0.1) {
            if (r > 0.1 / kGuard) { contested = true; alt = Regime::CriticalDY; }
            return Regime::CriticalLargeDiff;
        }
        if (r <= 10.0) {
            if (r < 0.1 * kGuard) { contested = true; alt = Regime::CriticalLargeDiff; }
            if (r > 10.0 / kGuard) { contested = true; alt = Regime::CriticalSmallDiff; }
            return Regime::CriticalDY;
        }
        if (r < 10.0 * kGuard) { contested = true; alt = Regime::CriticalDY; }
        if (az > 0.5 / kGuard) { contested = true; alt = Regime::NonCritical; }
        return Regime::CriticalSmallDiff;
    };

    rs.contested = false;
    rs.alt_regime.reset();
    if (osc <= kNonOsc * n13) {
        rs.regime = Regime::NonOscillating;
        if (osc > kNonOsc * n13 / kGuard) {
            bool dummy = false;
            std::optional<Regime> a;
            rs.contested = true;
            rs.alt_regime = zeta_regime(dummy, a);
        }
    } else {
        rs.regime = zeta_regime(rs.contested, rs.alt_regime);
        if (osc <= kNonOsc * n13 * kGuard) {
            rs.contested = true;
            rs.alt_regime = Regime::NonOscillating;
        }
    }
    rs.lambda2_contested = rs.regime == Regime::CriticalSmallDiff && az > n14 / kGuard && az < n14 * kGuard;
    rs.lambda2_discard_for_packets = rs.regime == Regime::NonOscillating;
    rs.eps = eps;

    // Asymptotic predictions per slot (slot j is lambda_{j+1}).
    const double w = sp.omega, k = sp.k, nk = sp.nu * sp.kappa, sum = sp.nu + sp.kappa;
    std::array<std::vector<cplx>, 6> cand;
    const cplx l1 = -I * k * (c * c - w * w) / (2.0 * s * c);
    const cplx bl3 = sqrt_pos(zeta / (I * w * sum));
    const cplx bl5 = sqrt_pos(-I * w * sum / nk);
    switch (rs.regime) {
        case Regime::NonCritical: {
            const auto small = polynomial_roots({k * k * (c * c - w * w), -2.0 * I * k * s * c, zeta});
            const auto sq = polynomial_roots({zeta, -I * w * sum, -nk});
            cplx qa = sq[0], qb = sq[1];
            if (std::abs(qa) > std::abs(qb)) std::swap(qa, qb);
            cand[0] = cand[1] = small;
            cand[2] = cand[3] = {sqrt_pos(qa), -sqrt_pos(qa)};
            cand[4] = cand[5] = {sqrt_pos(qb), -sqrt_pos(qb)};
            break;
        }
        case Regime::CriticalSmallDiff:
            cand[0] = {l1};
            cand[1] = {2.0 * I * k * s * c / zeta};
            cand[2] = cand[3] = {bl3, -bl3};
            cand[4] = cand[5] = {bl5, -bl5};
            break;
        case Regime::CriticalDY: {
            const auto cub = polynomial_roots({-2.0 * I * k * s * c, zeta, 0.0, -I * w * sum});
            cand[0] = {l1};
            cand[1] = cand[2] = cand[3] = cub;
            cand[4] = cand[5] = {bl5, -bl5};
            break;
        }
        case Regime::CriticalLargeDiff: {
            const auto cub = polynomial_roots({-2.0 * I * k * s * c, 0.0, 0.0, I * w * sum});
            cand[0] = {l1};
            cand[1] = cand[2] = cand[3] = cub;
            cand[4] = cand[5] = {bl5, -bl5};
            break;
        }
        case Regime::NonOscillating: {
            const cplx l12 = -I * k / std::tan(sp.gamma);
            const auto quart = polynomial_roots({s * s / nk, 0.0, 0.0, 0.0, 1.0});
            cand[0] = cand[1] = {l12};
            cand[2] = cand[3] = cand[4] = cand[5] = quart;
            break;
        }
    }

    std::vector<int> pos, neg;
    for (int i = 0; i < 6; ++i) (rs.roots[i].real() > 0.0 ? pos : neg).push_back(i);
    rs.labels.fill(0);
    if (pos.size() == 3) {
        const std::vector<int> pslots{1, 2, 4}, nslots{0, 3, 5};
        const auto pp = match(rs.roots, pos, pslots, cand);
        const auto nn = match(rs.roots, neg, nslots, cand);
        for (int q = 0; q < 3; ++q) {
            rs.labels[pp[q]] = pslots[q] + 1;
            rs.labels[nn[q]] = nslots[q] + 1;
        }
    } else {
        std::vector<int> all(6);
        std::iota(all.begin(), all.end(), 0);
        const auto pp = match(rs.roots, all, {0, 1, 2, 3, 4, 5}, cand);
        for (int q = 0; q < 6; ++q) rs.labels[pp[q]] = q + 1;
        for (int lo : {1, 3, 5}) {
            const int a = rs.index_of(lo), b = rs.index_of(lo + 1);
            // lambda_2, lambda_3, lambda_5 carry the larger real part in each pair.
            const int hi_label = lo == 1 ? 2 : lo;
            const int other = lo == 1 ? 1 : lo + 1;
            if (rs.roots[a].real() > rs.roots[b].real()) {
                rs.labels[a] = hi_label;
                rs.labels[b] = other;
            } else {
                rs.labels[b] = hi_label;
                rs.labels[a] = other;
            }
        }
        rs.warning = "positive-real-part count is " + std::to_string(pos.size());
    }
    rs.pos_real = pos;
    rs.classified = true;
    return rs;
}

RootSet roots_for(const ModalMatrixSpec& spec, double eps) {
    return classify_roots(solve_roots(char_poly(spec)), spec, eps);
}

Eigenvector eigenvector(const ModalMatrixSpec& sp, cplx lambda) {
    const CharPoly poly = char_poly(sp);
    if (std::abs(poly(lambda)) > 1e-8 * poly.magnitude(lambda))
        throw DomainError("eigenvector: lambda is not a root of the characteristic polynomial");
    if (lambda == cplx(0.0)) throw DomainError("eigenvector: lambda = 0 has no (U, ik/lambda U) form");
    const double s = std::sin(sp.gamma), c = std::cos(sp.gamma);
    const cplx d = sp.k * sp.k - lambda * lambda;
    const cplx den = I * sp.omega - sp.kappa * d;
    if (std::abs(den) < 1e-14) throw NumericError("eigenvector: singular buoyancy denominator");
    Eigenvector v;
    v.U = 1.0;
    v.W = I * sp.k / lambda;
    v.B = (s + v.W * c) / den;
    if (sp.k != 0.0)
        v.P = (I * sp.omega - sp.nu * d + s * v.B) / (I * sp.k);
    else
        v.P = ((-I * sp.omega + sp.nu * d) * v.W - c * v.B) / lambda;
    return v;
}

}  // namespace wavecrit
