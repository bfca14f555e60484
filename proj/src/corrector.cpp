#include "wavecrit/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace wavecrit {

std::string interaction_name(InteractionType t) {
    switch (t) {
        case InteractionType::a1: return "a1";
        case InteractionType::a2: return "a2";
        case InteractionType::b1: return "b1";
        case InteractionType::b2: return "b2";
        case InteractionType::b3: return "b3";
        case InteractionType::c1: return "c1";
        case InteractionType::c2: return "c2";
        case InteractionType::c3: return "c3";
        case InteractionType::c4: return "c4";
    }
    return "?";
}

InteractionType interaction_of(Family left, Family right) {
    using F = Family;
    using T = InteractionType;
    if (left == F::BLeps2 && right == F::BLeps2) return T::a1;
    if (left == F::Incident && right == F::BLeps2) return T::a2;
    if (left == F::BLeps2 && right == F::BLeps3) return T::b1;
    if (left == F::Incident && right == F::BLeps3) return T::b2;
    if (left == F::BLeps3 && right == F::BLeps2) return T::b3;
    if (left == F::BLeps2 && right == F::Incident) return T::c1;
    if (left == F::Incident && right == F::Incident) return T::c2;
    if (left == F::BLeps3 && right == F::BLeps3) return T::c3;
    if (left == F::BLeps3 && right == F::Incident) return T::c4;
    throw DomainError("interaction_of: " + family_name(left) + " x " + family_name(right) + " is not a W0 pair");
}

bool is_corrected(InteractionType t) {
    return t == InteractionType::a1 || t == InteractionType::a2 || t == InteractionType::b1 ||
           t == InteractionType::b2 || t == InteractionType::b3;
}

bool is_type_a(InteractionType t) { return t == InteractionType::a1 || t == InteractionType::a2; }

PlainMode plain_mode(const W0Assembly& w0, const ModeRef& ref) {
    if (ref.node < 0 || ref.node >= static_cast<int>(w0.nodes.size())) throw DomainError("plain_mode: bad node");
    const auto& n = w0.nodes[ref.node];
    PlainMode p;
    p.l = n.k;
    p.alpha = n.omega;
    if (ref.family == Family::Incident) {
        for (int c = 0; c < 3; ++c) p.amp[c] = n.weight * n.polarization[c];
        p.mu = -I * n.m;
    } else {
        const auto it = std::find_if(n.lift.modes.begin(), n.lift.modes.end(),
                                     [&](const LiftMode& m) { return m.label == ref.label; });
        if (it == n.lift.modes.end()) throw DomainError("plain_mode: node has no mode with that label");
        const cplx a = -n.weight * it->amplitude;
        p.amp = {a * it->vec.U, a * it->vec.W, a * it->vec.B};
        p.mu = it->lambda;
    }
    if (ref.conj) {
        for (auto& a : p.amp) a = std::conj(a);
        p.l = -p.l;
        p.alpha = -p.alpha;
        p.mu = std::conj(p.mu);
    }
    return p;
}

namespace {

ModePair pair_from(const PlainMode& x, const PlainMode& y) {
    ModePair p;
    p.l = x.l + y.l;
    p.alpha = x.alpha + y.alpha;
    p.mu = x.mu + y.mu;
    p.coef = I * y.l * x.amp[0] - y.mu * x.amp[1];
    for (int c = 0; c < 3; ++c) p.q[c] = p.coef * y.amp[c];
    return p;
}

std::vector<ModeRef> w0_modes(const W0Assembly& w0) {
    std::vector<ModeRef> out;
    for (int i = 0; i < static_cast<int>(w0.nodes.size()); ++i) {
        out.push_back({Family::Incident, i, 0, false});
        for (const auto& m : w0.nodes[i].lift.modes)
            out.push_back({m.label == 5 ? Family::BLeps3 : Family::BLeps2, i, m.label, false});
    }
    return out;
}

}  // namespace

ModePair make_pair(const W0Assembly& w0, const ModeRef& left, const ModeRef& right) {
    ModePair p = pair_from(plain_mode(w0, left), plain_mode(w0, right));
    p.left = left;
    p.right = right;
    p.lobe = left.conj == right.conj ? Lobe::Double : Lobe::Zero;
    p.itype = interaction_of(left.family, right.family);
    return p;
}

std::vector<ModePair> classify_interactions(const W0Assembly& w0) {
    const auto refs = w0_modes(w0);
    std::vector<PlainMode> plain, plain_conj;
    for (auto r : refs) {
        plain.push_back(plain_mode(w0, r));
        r.conj = true;
        plain_conj.push_back(plain_mode(w0, r));
    }
    std::vector<ModePair> out;
    out.reserve(2 * refs.size() * refs.size());
    for (std::size_t a = 0; a < refs.size(); ++a)
        for (std::size_t b = 0; b < refs.size(); ++b)
            for (bool zero : {false, true}) {
                ModePair p = pair_from(plain[a], zero ? plain_conj[b] : plain[b]);
                p.left = refs[a];
                p.right = refs[b];
                p.right.conj = zero;
                p.lobe = zero ? Lobe::Zero : Lobe::Double;
                p.itype = interaction_of(refs[a].family, refs[b].family);
                out.push_back(p);
            }
    return out;
}

ModeList quadratic_Q(const ModeList& left, const ModeList& right) {
    if (left.profile != Profile::Exponential || right.profile != Profile::Exponential)
        throw DomainError("quadratic_Q: exponential mode lists only");
    ModeList out;
    auto as_plain = [](const ModeTerm& t, bool conj) {
        PlainMode p{t.amp, t.l, t.alpha, t.mu};
        if (conj) {
            for (auto& a : p.amp) a = std::conj(a);
            p.l = -p.l;
            p.alpha = -p.alpha;
            p.mu = std::conj(p.mu);
        }
        return p;
    };
    for (const auto& x : left.terms)
        for (const auto& y : right.terms)
            for (bool conj : {false, true}) {
                const ModePair p = pair_from(as_plain(x, false), as_plain(y, conj));
                out.add({p.q, p.l, p.alpha, p.mu, 0});
            }
    return out;
}

FieldData quadratic_Q_grid(const std::vector<const ModeList*>& left, const std::vector<const ModeList*>& right,
                           double t, const Grid& grid) {
    const std::size_t nx = grid.x.size(), ny = grid.y.size();
    FieldData f{grid, t, "Q", {}};
    for (auto& c : f.comp) c.assign(nx * ny, 0.0);
    std::vector<RowEvaluator> le, re;
    for (const auto* l : left) le.emplace_back(*l, grid.x, t);
    for (const auto* r : right) re.emplace_back(*r, grid.x, t);
#pragma omp parallel
    {
        std::array<std::vector<double>, 3> vel, dx, dy;
#pragma omp for schedule(dynamic, 4)
        for (std::size_t j = 0; j < ny; ++j) {
            const double y = grid.y.pts[j];
            for (auto* b : {&vel, &dx, &dy})
                for (auto& c : *b) c.assign(nx, 0.0);
            for (const auto& e : le) e.add_row(y, {}, vel);
            for (const auto& e : re) {
                e.add_row(y, {1, 0}, dx);
                e.add_row(y, {0, 1}, dy);
            }
            for (int c = 0; c < 3; ++c)
                for (std::size_t i = 0; i < nx; ++i)
                    f.comp[c][j * nx + i] = vel[0][i] * dx[c][i] + vel[1][i] * dy[c][i];
        }
    }
    return f;
}

InteriorSolveA interior_solve_a(double alpha, double gamma) {
    const double s = std::sin(gamma);
    InteriorSolveA r;
    // Pi_pm = 1/2 [[1, +-i], [-+i, 1]] project onto the +-i sin(gamma) eigenvectors of the rotation block.
    r.proj[0] = {0.5, 0.5 * I, -0.5 * I, 0.5};
    r.proj[1] = {0.5, -0.5 * I, 0.5 * I, 0.5};
    r.denom = {-I * alpha + I * s, -I * alpha - I * s};
    r.margin = std::min(std::abs(-alpha + s), std::abs(-alpha - s));
    return r;
}

InteriorSolveB interior_solve_b(double alpha, cplx mu, const PhysParams& params) {
    const double s = params.sin_g();
    InteriorSolveB r;
    r.m_bar = mu * std::pow(params.eps, 3);
    const cplx a = -I * alpha - params.nu0 * r.m_bar * r.m_bar;
    const cplx d = -I * alpha - params.kappa0 * r.m_bar * r.m_bar;
    r.det_inv = a * d + s * s;
    r.M = {d / r.det_inv, s / r.det_inv, -s / r.det_inv, a / r.det_inv};
    return r;
}

namespace {

InteriorMode interior_from(const ModePair& p, int index, const PhysParams& params) {
    InteriorMode m;
    m.pair = index;
    m.l = p.l;
    m.alpha = p.alpha;
    m.mu = p.mu;
    m.lobe = p.lobe;
    m.itype = p.itype;
    m.left_node = p.left.node;
    m.right_node = p.right.node;
    for (int c = 0; c < 3; ++c) m.forcing[c] = -params.delta * p.q[c];
    return m;
}

void restore_w(InteriorMode& m) {
    if (m.mu == cplx(0.0)) throw NumericError("interior solve: zero combined decay rate");
    m.amp[1] = I * m.l * m.amp[0] / m.mu;
}

}  // namespace

std::vector<InteriorMode> solve_interior_a(const std::vector<ModePair>& pairs, const PhysParams& params,
                                           double omega0) {
    std::vector<InteriorMode> out;
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const auto& p = pairs[n];
        if (!is_type_a(p.itype)) continue;
        const auto sa = interior_solve_a(p.alpha, params.gamma);
        if (sa.margin < 0.5 * omega0)
            throw NumericError("solve_interior_a: resonant frequency alpha = " + std::to_string(p.alpha));
        InteriorMode m = interior_from(p, static_cast<int>(n), params);
        const cplx fu = m.forcing[0], fb = m.forcing[2];
        for (int k = 0; k < 2; ++k) {
            const auto& P = sa.proj[k];
            m.amp[0] += (P[0] * fu + P[1] * fb) / sa.denom[k];
            m.amp[2] += (P[2] * fu + P[3] * fb) / sa.denom[k];
        }
        restore_w(m);
        out.push_back(m);
    }
    return out;
}

std::vector<InteriorMode> solve_interior_b(const std::vector<ModePair>& pairs, const PhysParams& params,
                                           double omega0) {
    std::vector<InteriorMode> out;
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const auto& p = pairs[n];
        if (!is_corrected(p.itype) || is_type_a(p.itype)) continue;
        const auto sb = interior_solve_b(p.alpha, p.mu, params);
        if (std::abs(sb.det_inv) < 0.05 * omega0 * omega0)
            throw NumericError("solve_interior_b: near-singular operator, alpha = " + std::to_string(p.alpha));
        InteriorMode m = interior_from(p, static_cast<int>(n), params);
        const cplx fu = m.forcing[0], fb = m.forcing[2];
        m.amp[0] = sb.M[0] * fu + sb.M[1] * fb;
        m.amp[2] = sb.M[2] * fu + sb.M[3] * fb;
        restore_w(m);
        out.push_back(m);
    }
    return out;
}

TraceTriple NodePairTrace::total() const {
    return {from_a.frak_u + from_b.frak_u, from_a.frak_w + from_b.frak_w, from_a.frak_b + from_b.frak_b};
}

std::vector<NodePairTrace> collect_traces(const std::vector<InteriorMode>& modes) {
    std::map<std::tuple<int, int, int>, NodePairTrace> acc;
    for (const auto& m : modes) {
        auto [it, fresh] = acc.try_emplace({m.lobe == Lobe::Zero ? 0 : 1, m.left_node, m.right_node});
        auto& t = it->second;
        if (fresh) {
            t.left_node = m.left_node;
            t.right_node = m.right_node;
            t.lobe = m.lobe;
            t.l = m.l;
            t.alpha = m.alpha;
        }
        TraceTriple& dst = is_type_a(m.itype) ? t.from_a : t.from_b;
        dst.frak_u += m.amp[0];
        dst.frak_w += m.amp[1];
        dst.frak_b += -m.mu * m.amp[2];
    }
    std::vector<NodePairTrace> out;
    out.reserve(acc.size());
    for (auto& [key, t] : acc) out.push_back(t);
    return out;
}

namespace {

TraceTriple negated(const TraceTriple& t) { return {-t.frak_u, -t.frak_w, -t.frak_b}; }

void add_lift(ModeList& list, const BoundaryLift& lift) {
    for (const auto& m : lift.modes) {
        ModeTerm t;
        t.amp = {m.amplitude * m.vec.U, m.amplitude * m.vec.W, m.amplitude * m.vec.B};
        t.l = lift.k;
        t.alpha = lift.omega;
        t.mu = m.lambda;
        list.add(t);
    }
}

/// k = omega = 0: the polynomial is -nu kappa lambda^6 - s^2 lambda^2, so the roots are known in
/// closed form and the two decaying quartic roots are conjugate; label 3 takes Im > 0.
RootSet roots_at_rest(const PhysParams& params) {
    const double r = std::pow(params.sin_g() * params.sin_g() / (params.nu() * params.kappa()), 0.25);
    const cplx q = std::polar(r, std::numbers::pi / 4.0);
    RootSet rs;
    rs.roots = {0.0, 0.0, q, -q, std::conj(q), -std::conj(q)};
    rs.labels = {1, 2, 3, 4, 5, 6};
    rs.regime = Regime::NonOscillating;
    rs.classified = true;
    rs.lambda2_discard_for_packets = true;
    rs.pos_real = {2, 4};
    rs.warning = "k = omega = 0: closed-form roots";
    rs.eps = params.eps;
    return rs;
}

}  // namespace

SecondHarmonicLift lift_second_harmonic(const std::vector<NodePairTrace>& traces, const PhysParams& params) {
    SecondHarmonicLift out;
    for (const auto& t : traces) {
        if (t.lobe != Lobe::Double) continue;
        const ModalMatrixSpec spec{params.nu(), params.kappa(), t.alpha, t.l, params.gamma};
        const RootSet roots = roots_for(spec, params.eps);
        std::pair<BoundaryLift, BoundaryLift> lifts;
        try {
            lifts = lift_noncritical(spec, roots, negated(t.total()));
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " at node pair (" + std::to_string(t.left_node) + ", " +
                              std::to_string(t.right_node) + "), l = " + std::to_string(t.l) +
                              ", alpha = " + std::to_string(t.alpha));
        }
        const auto& [rw, bl] = lifts;
        add_lift(out.rw, rw);
        add_lift(out.bl_eps3, bl);
        out.lambda2.push_back({t.l, t.alpha, roots.lambda(2)});
    }
    return out;
}

MeanFlowLift lift_mean_flow(const std::vector<NodePairTrace>& traces, const PhysParams& params) {
    MeanFlowLift out;
    const double e2 = params.eps * params.eps;
    out.mean_flow.profile = Profile::MeanFlow;
    out.mean_flow.profile_scale = e2;
    for (const auto& t : traces) {
        if (t.lobe != Lobe::Zero) continue;
        if (std::abs(t.l) > 8.0 * e2 || std::abs(t.alpha) > 8.0 * e2)
            throw DomainError("lift_mean_flow: zero-lobe node outside |l|, |alpha| <= 8 eps^2");
        const ModalMatrixSpec spec{params.nu(), params.kappa(), t.alpha, t.l, params.gamma};
        const RootSet roots = t.l == 0.0 && t.alpha == 0.0 ? roots_at_rest(params) : roots_for(spec, params.eps);
        const NonOscLift lift = lift_nonoscillating(spec, roots, negated(t.total()));
        add_lift(out.bl_eps3, lift.lift);
        const double left = std::abs(lift.leftover_w);
        out.max_leftover = std::max(out.max_leftover, left);
        if (std::abs(t.l) < 1e-14) {
            ++out.dropped_nodes;
            out.dropped_leftover += left;
            continue;
        }
        const cplx g = -lift.leftover_w / (I * t.l);
        ModeTerm m;
        m.amp = {-g * e2, I * t.l * g, 0.0};
        m.l = t.l;
        m.alpha = t.alpha;
        out.mean_flow.add(m);
    }
    return out;
}

std::array<cplx, 2> second_harmonic_lambda0(double gamma, double k0) {
    const double s = std::sin(gamma), c = std::cos(gamma);
    const cplx root = std::sqrt(cplx(s * s * (3.0 * s * s - c * c)));
    const cplx base = 2.0 * I * k0 * s * c;
    return {(base + 4.0 * k0 * root) / (3.0 * s * s), (base - 4.0 * k0 * root) / (3.0 * s * s)};
}

std::vector<const ModeList*> CorrectorAssembly::lists() const {
    return {&bl_eps2, &bl_eps3, &second_harmonic, &mean_flow};
}

CorrectorAssembly assemble_W1(const W0Assembly& w0) {
    CorrectorAssembly w1;
    w1.params = w0.params;
    w1.omega0 = std::abs(w0.envelope.carrier.omega0);
    w1.pairs = classify_interactions(w0);
    for (const auto& p : w1.pairs) ++w1.pair_counts[interaction_name(p.itype)];

    w1.interior = solve_interior_a(w1.pairs, w0.params, w1.omega0);
    auto b = solve_interior_b(w1.pairs, w0.params, w1.omega0);
    w1.interior.insert(w1.interior.end(), b.begin(), b.end());
    for (const auto& m : w1.interior)
        (is_type_a(m.itype) ? w1.bl_eps2 : w1.bl_eps3).add({m.amp, m.l, m.alpha, m.mu, 0});

    w1.traces = collect_traces(w1.interior);
    auto sh = lift_second_harmonic(w1.traces, w0.params);
    w1.second_harmonic = std::move(sh.rw);
    w1.bl_eps3.append(sh.bl_eps3);
    w1.lambda2 = std::move(sh.lambda2);
    auto mf = lift_mean_flow(w1.traces, w0.params);
    w1.bl_eps3.append(mf.bl_eps3);
    w1.mean_flow = std::move(mf.mean_flow);
    w1.dropped_nodes = mf.dropped_nodes;
    return w1;
}

std::string corrector_family_name(CorrectorFamily f) {
    switch (f) {
        case CorrectorFamily::BLeps2: return "W1_bl_eps2";
        case CorrectorFamily::BLeps3: return "W1_bl_eps3";
        case CorrectorFamily::SecondHarmonic: return "W1_second_harmonic";
        case CorrectorFamily::MeanFlow: return "W1_mean_flow";
        case CorrectorFamily::Sum: return "W1_sum";
    }
    return "?";
}

std::vector<const ModeList*> corrector_lists(const CorrectorAssembly& w1, CorrectorFamily f) {
    switch (f) {
        case CorrectorFamily::BLeps2: return {&w1.bl_eps2};
        case CorrectorFamily::BLeps3: return {&w1.bl_eps3};
        case CorrectorFamily::SecondHarmonic: return {&w1.second_harmonic};
        case CorrectorFamily::MeanFlow: return {&w1.mean_flow};
        case CorrectorFamily::Sum: return w1.lists();
    }
    return {};
}

namespace {

/// Height past which the family is below the row cutoff, capped at the packet half period.
double family_height(const ModeList& list, double cap) {
    if (list.empty()) return 0.0;
    if (list.profile == Profile::MeanFlow) return std::min(2.0 / list.profile_scale, cap);
    return std::min(kRowDecayCutoff / 2.0 / list.min_decay(), cap);
}

}  // namespace

Grid corrector_grid(const W0Assembly& w0, const CorrectorAssembly& w1, CorrectorFamily f, double pts_per_wave) {
    const auto lists = corrector_lists(w1, f);
    double lmax = 0.0, fast = 0.0, height = 0.0, slow = 0.0;
    const double cap = w0.half_period_y();
    for (const auto* l : lists) {
        lmax = std::max(lmax, l->max_abs_l());
        fast = std::max(fast, l->max_decay());
        height = std::max(height, family_height(*l, cap));
        if (l->profile == Profile::Exponential && !l->empty())
            slow = std::max(slow, std::abs(l->min_decay()) > 0.0 ? 1.0 / std::abs(l->min_decay()) : 0.0);
    }
    if (!(height > 0.0)) throw DomainError("corrector_grid: empty family");
    Grid g;
    g.x = periodic_axis_for(w0.period_x(), lmax, pts_per_wave);
    const double dy0 = fast > 0.0 ? 0.1 / fast : height / 200.0;
    double dy_max = height / 200.0;
    if (lmax > 0.0) dy_max = std::min(dy_max, 2.0 * std::numbers::pi / lmax / pts_per_wave);
    if (slow > 0.0) dy_max = std::min(dy_max, 0.25 * slow);
    g.y = stretched_axis(height, std::min(dy0, dy_max), 1.05, dy_max);
    return g;
}

double dominant_frequency(const std::vector<const ModeList*>& lists, double x, double y, double window,
                          int samples, double max_freq, int comp) {
    if (samples < 8 || !(window > 0.0) || !(max_freq > 0.0)) throw DomainError("dominant_frequency: bad window");
    std::vector<double> f(samples);
    const double dt = window / samples;
    for (int n = 0; n < samples; ++n) {
        double v = 0.0;
        for (const auto* l : lists) v += evaluate_point(*l, n * dt, x, y)[comp];
        // Hann taper.
        f[n] = v * std::pow(std::sin(std::numbers::pi * n / samples), 2);
    }
    const double step = 2.0 * std::numbers::pi / window / 16.0;
    double best = 0.0, best_freq = 0.0;
    for (double w = 0.0; w <= max_freq; w += step) {
        cplx acc = 0.0;
        for (int n = 0; n < samples; ++n) acc += f[n] * std::exp(I * w * (n * dt));
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_freq = w;
        }
    }
    return best_freq;
}

TraceCheck combined_trace(const W0Assembly& w0, const CorrectorAssembly& w1) {
    Grid g;
    g.x = periodic_axis_for(w0.period_x(), 2.0 * (std::abs(w0.envelope.carrier.k0) + 1.0), 16.0);
    g.y.pts = {0.0};
    g.y.weights = {1.0};
    ModeList interior;
    for (const auto& m : w1.interior) interior.add({m.amp, m.l, m.alpha, m.mu, 0});
    auto trace_max = [&](const std::vector<const ModeList*>& lists) {
        const auto v = evaluate_field(lists, 0.0, g);
        const auto db = evaluate_field(lists, 0.0, g, {0, 1});
        double mx = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i)
            mx = std::max({mx, std::abs(v.comp[0][i]), std::abs(v.comp[1][i]), std::abs(db.comp[2][i])});
        return mx;
    };
    TraceCheck r;
    r.combined = trace_max(w1.lists());
    r.interior = trace_max({&interior});
    r.relative = r.interior > 0.0 ? r.combined / r.interior : 0.0;
    return r;
}

}  // namespace wavecrit
