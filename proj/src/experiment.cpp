#include "wavecrit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

namespace wavecrit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::pair<double, double>> ExperimentConfig::points() const {
    if (sweep.empty()) return {{params.eps, params.delta}};
    return sweep;
}

void ExperimentConfig::validate() const {
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
        throw DomainError("unknown experiment '" + experiment + "'");
    params.validate();
    const auto pts = points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [e, d] = pts[i];
        if (!(e > 0.0 && e < 1.0)) throw DomainError("sweep: eps must lie in (0, 1)");
        if (!(d >= 0.0)) throw DomainError("sweep: delta must be non-negative");
        if (i > 0 && !(e < pts[i - 1].first)) throw DomainError("sweep: eps values must be strictly decreasing");
        if (experiment == "stability" && d > e * e) throw DomainError("stability runs need delta <= eps^2");
    }
    if (nodes_k < 1 || nodes_m < 1) throw DomainError("nodes_k and nodes_m must be positive");
    if (k0 == 0.0) throw DomainError("k0 must be nonzero");
    if (nx < 8 || ny < 4 || !(dt > 0.0) || !(T > 0.0) || sample_every < 1)
        throw DomainError("invalid DNS resolution or time step");
    if ((experiment == "dns" || experiment == "stability") && pts.size() != 1)
        throw DomainError(experiment + " runs take a single (eps, delta) point");
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["params"] = {{"gamma", c.params.gamma}, {"nu0", c.params.nu0},     {"kappa0", c.params.kappa0},
                   {"eps", c.params.eps},     {"delta", c.params.delta}};
    j["experiment"] = c.experiment;
    json sw = json::array();
    for (const auto& [e, d] : c.sweep) sw.push_back({e, d});
    j["sweep"] = sw;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["packet"] = {{"k0", c.k0},
                   {"branch", c.branch == Branch::Plus ? "plus" : "minus"},
                   {"nodes_k", c.nodes_k},
                   {"nodes_m", c.nodes_m}};
    j["mode"] = {{"omega", c.omega}, {"k", c.k}};
    if (c.has_traces)
        j["traces"] = {{"u", {c.traces.frak_u.real(), c.traces.frak_u.imag()}},
                       {"w", {c.traces.frak_w.real(), c.traces.frak_w.imag()}},
                       {"b", {c.traces.frak_b.real(), c.traces.frak_b.imag()}}};
    j["dns"] = {{"nx", c.nx},         {"ny", c.ny}, {"dt", c.dt}, {"T", c.T}, {"sample_every", c.sample_every},
                {"refine", c.refine}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("params")) {
        const auto& p = j["params"];
        c.params.gamma = p.value("gamma", c.params.gamma);
        c.params.nu0 = p.value("nu0", c.params.nu0);
        c.params.kappa0 = p.value("kappa0", c.params.kappa0);
        c.params.eps = p.value("eps", c.params.eps);
        c.params.delta = p.value("delta", c.params.delta);
    }
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("sweep"))
        for (const auto& pt : j["sweep"]) {
            if (!pt.is_array() || pt.size() != 2) throw DomainError("sweep entries must be [eps, delta] pairs");
            c.sweep.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("packet")) {
        const auto& p = j["packet"];
        c.k0 = p.value("k0", c.k0);
        const std::string br = p.value("branch", std::string("plus"));
        if (br != "plus" && br != "minus") throw DomainError("packet.branch must be 'plus' or 'minus'");
        c.branch = br == "plus" ? Branch::Plus : Branch::Minus;
        c.nodes_k = p.value("nodes_k", c.nodes_k);
        c.nodes_m = p.value("nodes_m", c.nodes_m);
    }
    if (j.contains("mode")) {
        c.omega = j["mode"].value("omega", c.omega);
        c.k = j["mode"].value("k", c.k);
    }
    if (j.contains("traces")) {
        auto read = [&](const char* key) {
            const auto& v = j["traces"].at(key);
            return cplx(v.at(0).get<double>(), v.at(1).get<double>());
        };
        c.has_traces = true;
        c.traces = {read("u"), read("w"), read("b")};
    }
    if (j.contains("dns")) {
        const auto& d = j["dns"];
        c.nx = d.value("nx", c.nx);
        c.ny = d.value("ny", c.ny);
        c.dt = d.value("dt", c.dt);
        c.T = d.value("T", c.T);
        c.sample_every = d.value("sample_every", c.sample_every);
        c.refine = d.value("refine", c.refine);
    }
    return c;
}

W0Assembly build_W0(const ExperimentConfig& c, double eps, double delta, bool snap) {
    PhysParams p = c.params;
    p.eps = eps;
    p.delta = delta;
    const double k0 = snap ? snapped_k0(c.k0, eps, c.nodes_k) : c.k0;
    const Envelope env{critical_carrier(p.gamma, k0, c.branch), eps};
    return assemble_W0(p, env, {c.nodes_k, c.nodes_m}, c.branch);
}

std::vector<FamilyNorm> corrector_norms(const W0Assembly& w0, const CorrectorAssembly& w1) {
    std::vector<FamilyNorm> out;
    for (auto f : {CorrectorFamily::BLeps2, CorrectorFamily::BLeps3, CorrectorFamily::SecondHarmonic,
                   CorrectorFamily::MeanFlow}) {
        const auto lists = corrector_lists(w1, f);
        bool empty = true;
        for (const auto* l : lists) empty = empty && l->empty();
        FamilyNorm n{corrector_family_name(f), 0.0, 0.0};
        if (!empty) {
            const auto s = stream_norms(lists, 0.0, corrector_grid(w0, w1, f));
            n.l2 = s.l2;
            n.linf = s.linf;
        }
        out.push_back(n);
    }
    return out;
}

CsvTable fit_table(const std::vector<double>& eps,
                   const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    CsvTable t;
    t.columns = {"series", "slope", "stderr", "points"};
    for (const auto& [name, vals] : series) {
        try {
            const auto f = fit_slope(eps, vals);
            t.add_row({name, fmt(f.slope), fmt(f.stderr_slope), std::to_string(f.points)});
        } catch (const FitError& e) {
            t.add_row({name, "nan", "nan", std::to_string(vals.size())});
        }
    }
    return t;
}

namespace {

std::string regime_label(const RootSet& rs) { return regime_name(rs.regime); }

struct Output {
    fs::path dir;
    std::vector<std::string> artifacts;

    void csv(const std::string& name, const CsvTable& t) {
        write_csv(dir / name, t);
        artifacts.push_back(name);
    }
};

ModalMatrixSpec mode_spec(const ExperimentConfig& c, double eps, TraceTriple* carrier_traces) {
    PhysParams p = c.params;
    p.eps = eps;
    const auto car = critical_carrier(p.gamma, c.k0, c.branch);
    const double k = c.k != 0.0 ? c.k : car.k0;
    const double omega = c.omega != 0.0 ? c.omega : car.omega0;
    if (carrier_traces) {
        const double num = car.k0 * p.cos_g() - car.m0 * p.sin_g();
        *carrier_traces = {1.0, -car.k0 / car.m0, -num / car.omega0};
    }
    return {p.nu(), p.kappa(), omega, k, p.gamma};
}

void run_roots(const ExperimentConfig& c, Output& out) {
    CsvTable t;
    t.columns = {"eps", "delta", "index", "re", "im", "label", "regime"};
    for (const auto& [eps, delta] : c.points()) {
        const auto rs = roots_for(mode_spec(c, eps, nullptr), eps);
        for (int i = 0; i < 6; ++i)
            t.add_row({fmt(eps), fmt(delta), std::to_string(i), fmt(rs.roots[i].real()), fmt(rs.roots[i].imag()),
                       std::to_string(rs.labels[i]), regime_label(rs)});
    }
    out.csv("roots.csv", t);
}

void run_lift(const ExperimentConfig& c, Output& out) {
    CsvTable modes, traces;
    modes.columns = {"eps", "kind", "label", "lambda_re", "lambda_im", "amp_re", "amp_im"};
    traces.columns = {"eps", "component", "target_re", "target_im", "lifted_re", "lifted_im", "leftover_re",
                      "leftover_im"};
    auto add_modes = [&](double eps, const BoundaryLift& l, const std::string& kind) {
        for (const auto& m : l.modes)
            modes.add_row({fmt(eps), kind, std::to_string(m.label), fmt(m.lambda.real()), fmt(m.lambda.imag()),
                           fmt(m.amplitude.real()), fmt(m.amplitude.imag())});
    };
    for (const auto& [eps, delta] : c.points()) {
        (void)delta;
        TraceTriple car;
        const auto spec = mode_spec(c, eps, &car);
        const TraceTriple target = c.has_traces ? c.traces : car;
        const auto rs = roots_for(spec, eps);
        TraceTriple got;
        cplx leftover = 0.0;
        switch (rs.regime) {
            case Regime::NonCritical: {
                const auto [rw, bl] = lift_noncritical(spec, rs, target);
                add_modes(eps, rw, "noncritical_rw");
                add_modes(eps, bl, "noncritical_bl");
                const auto a = rw.traces(), b = bl.traces();
                got = {a.frak_u + b.frak_u, a.frak_w + b.frak_w, a.frak_b + b.frak_b};
                break;
            }
            case Regime::NonOscillating: {
                const auto r = lift_nonoscillating(spec, rs, target);
                add_modes(eps, r.lift, "nonoscillating");
                got = r.lift.traces();
                leftover = r.leftover_w;
                break;
            }
            default: {
                const auto l = lift_critical(spec, rs, target);
                add_modes(eps, l, "critical");
                got = l.traces();
            }
        }
        const std::array<std::pair<const char*, std::pair<cplx, cplx>>, 3> rows = {
            {{"u", {target.frak_u, got.frak_u}}, {"w", {target.frak_w, got.frak_w}}, {"b", {target.frak_b, got.frak_b}}}};
        for (const auto& [name, v] : rows) {
            const cplx lo = std::string(name) == "w" ? leftover : cplx(0.0);
            traces.add_row({fmt(eps), name, fmt(v.first.real()), fmt(v.first.imag()), fmt(v.second.real()),
                            fmt(v.second.imag()), fmt(lo.real()), fmt(lo.imag())});
        }
    }
    out.csv("lift_modes.csv", modes);
    out.csv("lift_traces.csv", traces);
}

void run_packet_norms(const ExperimentConfig& c, Output& out) {
    CsvTable t;
    t.columns = {"eps", "family", "l2", "linf", "aniso_l2", "aniso_linf", "warning"};
    std::vector<double> eps_list;
    std::map<std::string, std::vector<double>> series;
    for (const auto& [eps, delta] : c.points()) {
        const auto w0 = build_W0(c, eps, delta);
        eps_list.push_back(eps);
        for (Family f : {Family::Incident, Family::BLeps2, Family::BLeps3}) {
            const auto n = packet_norms(w0, f, 0.0, default_grid(w0, f));
            std::string al2 = "", alinf = "";
            if (f != Family::Incident) {
                const auto a = component_anisotropy(w0, f);
                al2 = fmt(a.ratio_l2);
                alinf = fmt(a.ratio_linf);
                series[family_name(f) + ":aniso_l2"].push_back(a.ratio_l2);
                series[family_name(f) + ":aniso_linf"].push_back(a.ratio_linf);
            }
            series[family_name(f) + ":l2"].push_back(n.l2);
            series[family_name(f) + ":linf"].push_back(n.linf);
            t.add_row({fmt(eps), family_name(f), fmt(n.l2), fmt(n.linf), al2, alinf, n.warning});
        }
    }
    out.csv("packet_norms.csv", t);
    if (eps_list.size() >= 3) out.csv("fits.csv", fit_table(eps_list, {series.begin(), series.end()}));
}

void run_corrector(const ExperimentConfig& c, Output& out) {
    CsvTable t, chk;
    t.columns = {"eps", "delta", "family", "l2", "linf"};
    chk.columns = {"eps", "delta", "trace_relative", "interior_pairs", "dropped_nodes", "max_lambda2_shift"};
    std::vector<double> eps_list;
    std::map<std::string, std::vector<double>> series;
    for (const auto& [eps, delta] : c.points()) {
        const auto w0 = build_W0(c, eps, delta);
        const auto w1 = assemble_W1(w0);
        eps_list.push_back(eps);
        for (const auto& n : corrector_norms(w0, w1)) {
            t.add_row({fmt(eps), fmt(delta), n.family, fmt(n.l2), fmt(n.linf)});
            series[n.family + ":l2"].push_back(n.l2);
            series[n.family + ":linf"].push_back(n.linf);
        }
        const auto tc = combined_trace(w0, w1);
        const auto l0 = second_harmonic_lambda0(c.params.gamma, w0.envelope.carrier.k0);
        double shift = 0.0;
        for (const auto& r : w1.lambda2)
            shift = std::max(shift, std::min(std::abs(r[2] - l0[0]), std::abs(r[2] - l0[1])));
        chk.add_row({fmt(eps), fmt(delta), fmt(tc.relative), std::to_string(w1.interior.size()),
                     std::to_string(w1.dropped_nodes), fmt(shift)});
    }
    out.csv("corrector_norms.csv", t);
    out.csv("corrector_checks.csv", chk);
    if (eps_list.size() >= 3) out.csv("fits.csv", fit_table(eps_list, {series.begin(), series.end()}));
}

void run_residual(const ExperimentConfig& c, Output& out) {
    CsvTable t;
    t.columns = {"eps",   "delta", "diffusion_incident", "interior", "mean_flow", "uncorrected_c",
                 "cross", "quadratic_w1", "total", "grad_wapp_linf", "model"};
    std::vector<double> eps_list, total, model;
    for (const auto& [eps, delta] : c.points()) {
        const auto w0 = build_W0(c, eps, delta);
        const auto w1 = assemble_W1(w0);
        const auto r = residual_Rapp(w0, w1);
        eps_list.push_back(eps);
        total.push_back(r.total);
        model.push_back(r.model);
        t.add_row({fmt(eps), fmt(delta), fmt(r.diffusion_incident), fmt(r.r1_interior), fmt(r.r1_mean_flow),
                   fmt(r.uncorrected_c), fmt(r.cross), fmt(r.quadratic_w1), fmt(r.total), fmt(r.grad_wapp_linf),
                   fmt(r.model)});
    }
    out.csv("residual.csv", t);
    if (eps_list.size() >= 3) out.csv("fits.csv", fit_table(eps_list, {{"total", total}, {"model", model}}));
}

SimConfig sim_config(const ExperimentConfig& c, const W0Assembly& w0, int ny, double dt) {
    SimConfig s = default_sim_config(w0, c.nx, c.ny);
    // Refined levels split every cell of the base grid.
    for (int n = c.ny; n < ny; n *= 2) {
        s.dy0 *= 0.5;
        s.stretch = std::sqrt(s.stretch);
    }
    s.ny = ny;
    s.dt = dt;
    s.T = c.T;
    return s;
}

void dump_state(const Solver& solver, const State& s, const fs::path& stem, Output& out) {
    const auto& g = solver.grid();
    const auto ph = solver.to_physical(s);
    FieldDump centers;
    centers.names = {"u", "b"};
    centers.arrays = {ph.u, ph.b};
    centers.ny = g.ny;
    centers.nx = g.nx;
    centers.x = g.x;
    centers.y = g.yc;
    centers.meta = {{"t", s.t}, {"staggering", "cell centers"}};
    write_field_dump(stem.string() + "_centers", centers);
    FieldDump faces;
    faces.names = {"w"};
    faces.arrays = {ph.w};
    faces.ny = g.nfaces;
    faces.nx = g.nx;
    faces.x = g.x;
    faces.y.assign(g.yf.begin(), g.yf.begin() + g.nfaces);
    faces.meta = {{"t", s.t}, {"staggering", "cell faces"}};
    write_field_dump(stem.string() + "_faces", faces);
    const std::string base = stem.filename().string();
    for (const char* suffix : {"_centers.bin", "_centers.json", "_faces.bin", "_faces.json"})
        out.artifacts.push_back(base + suffix);
}

CsvTable ledger_table(const EnergyLedger& led) {
    CsvTable t;
    t.columns = {"defect_per_time", "max_step_defect", "max_increase", "final_balance"};
    t.add_row({fmt(led.defect_per_time), fmt(led.max_step_defect), fmt(led.max_increase), fmt(led.final_balance)});
    return t;
}

std::string run_dns(const ExperimentConfig& c, Output& out) {
    const auto [eps, delta] = c.points().front();
    const auto w0 = build_W0(c, eps, delta, true);
    std::unique_ptr<CorrectorAssembly> w1;
    if (delta > 0.0) w1 = std::make_unique<CorrectorAssembly>(assemble_W1(w0));
    Solver solver(sim_config(c, w0, c.ny, c.dt));
    InitReport rep;
    State s = init_from_Wapp(solver, w0, w1.get(), &rep);
    const auto tr = run(solver, s, c.sample_every);
    CsvTable ts;
    ts.columns = {"t", "energy", "dissipation", "defect"};
    for (const auto& p : tr.samples) ts.add_row({fmt(p.t), fmt(p.energy), fmt(p.dissipated), fmt(p.defect)});
    out.csv("dns_timeseries.csv", ts);
    const auto led = energy_budget(tr);
    out.csv("energy_ledger.csv", ledger_table(led));
    dump_state(solver, tr.states.back(), out.dir / "final_state", out);
    std::ostringstream os;
    os << "energy defect per unit time " << led.defect_per_time;
    if (!rep.warning.empty()) os << "; " << rep.warning;
    return os.str();
}

std::string run_stability(const ExperimentConfig& c, Output& out) {
    const auto [eps, delta] = c.points().front();
    const auto w0 = build_W0(c, eps, delta, true);
    const auto w00 = build_W0(c, eps, 0.0, true);
    const auto w1 = assemble_W1(w0);
    struct Level {
        StabilityReport rep;
        Trajectory tr;
    };
    auto level = [&](int ny, double dt, int every) {
        SimConfig cfg = sim_config(c, w0, ny, dt);
        SimConfig cfg0 = cfg;
        cfg0.params.delta = 0.0;
        Solver solver(cfg), control(cfg0);
        auto tr = run(solver, init_from_Wapp(solver, w0, &w1), every);
        const auto tr0 = run(control, init_from_Wapp(control, w00, nullptr), every);
        auto rep = compare_stability(solver, tr, tr0, w0, &w1);
        return Level{std::move(rep), std::move(tr)};
    };
    const Level base = level(c.ny, c.dt, c.sample_every);
    std::unique_ptr<Level> fine;
    if (c.refine) fine = std::make_unique<Level>(level(2 * c.ny, c.dt / 2, 2 * c.sample_every));
    CsvTable t;
    t.columns = {"t", "energy", "dissipation", "diff_L2", "bound_thm", "bound_alt", "floor", "diff_nonlinear"};
    if (fine) t.columns.push_back("floor_refined");
    const int every = c.sample_every;
    for (std::size_t k = 0; k < base.rep.series.size(); ++k) {
        const auto& p = base.rep.series[k];
        const std::size_t idx = std::min(k * every, base.tr.samples.size() - 1);
        const auto& smp = base.tr.samples[idx];
        std::vector<std::string> row = {fmt(p.t),         fmt(smp.energy),    fmt(smp.dissipated), fmt(p.diff_l2),
                                        fmt(p.bound_thm), fmt(p.bound_alt),   fmt(p.floor),        fmt(p.diff_nonlinear)};
        if (fine) row.push_back(fmt(fine->rep.series[k].floor));
        t.add_row(row);
    }
    out.csv("stability.csv", t);
    out.csv("energy_ledger.csv", ledger_table(energy_budget(base.tr)));
    std::ostringstream os;
    os << "within stability envelope after floor subtraction: " << (base.rep.within_thm ? "yes" : "no");
    return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
    c.validate();
    Output out{fs::path(c.output_dir), {}};
    fs::create_directories(out.dir);
    ExperimentResult r;
    if (c.experiment == "roots") run_roots(c, out);
    else if (c.experiment == "lift") run_lift(c, out);
    else if (c.experiment == "packet-norms") run_packet_norms(c, out);
    else if (c.experiment == "corrector") run_corrector(c, out);
    else if (c.experiment == "residual") run_residual(c, out);
    else if (c.experiment == "dns") r.summary = run_dns(c, out);
    else r.summary = run_stability(c, out);
    write_manifest(out.dir, to_json(c), out.artifacts);
    r.artifacts = out.artifacts;
    r.artifacts.push_back("manifest.json");
    return r;
}

}  // namespace wavecrit
