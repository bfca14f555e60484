#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "wavecrit/experiment.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<double> eps, delta, gamma, nu0, kappa0, k0, omega, k, dt, T;
    std::optional<int> nodes_k, nodes_m, nx, ny, every;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::vector<std::string> sweep;
    std::vector<double> trace_u, trace_w, trace_b;
    bool refine = false;
};

void add_options(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--eps", o.eps, "Viscosity scale epsilon");
    app.add_option("--delta", o.delta, "Nonlinear amplitude delta");
    app.add_option("--gamma", o.gamma, "Slope angle in radians");
    app.add_option("--nu0", o.nu0);
    app.add_option("--kappa0", o.kappa0);
    app.add_option("--k0", o.k0, "Carrier tangential wavenumber");
    app.add_option("--nodes-k", o.nodes_k);
    app.add_option("--nodes-m", o.nodes_m);
    app.add_option("--omega", o.omega, "Frequency for roots/lift (default: carrier)");
    app.add_option("--k", o.k, "Wavenumber for roots/lift (default: carrier)");
    app.add_option("--trace-u", o.trace_u, "u trace as RE IM")->expected(2);
    app.add_option("--trace-w", o.trace_w, "w trace as RE IM")->expected(2);
    app.add_option("--trace-b", o.trace_b, "d_y b trace as RE IM")->expected(2);
    app.add_option("--sweep", o.sweep, "Sweep points EPS:DELTA, eps strictly decreasing");
    app.add_option("--nx", o.nx);
    app.add_option("--ny", o.ny);
    app.add_option("--dt", o.dt);
    app.add_option("--T", o.T, "Final time");
    app.add_option("--sample-every", o.every, "Stored-state interval in steps");
    app.add_flag("--refine", o.refine, "Add one refinement level to stability runs");
    app.add_option("--seed", o.seed);
    app.add_option("--output-dir,-o", o.output_dir);
}

wavecrit::ExperimentConfig build(const std::string& name, const Overrides& o) {
    wavecrit::ExperimentConfig c;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        c = wavecrit::config_from_json(nlohmann::json::parse(in));
    }
    c.experiment = name;
    auto set = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    set(c.params.eps, o.eps);
    set(c.params.delta, o.delta);
    set(c.params.gamma, o.gamma);
    set(c.params.nu0, o.nu0);
    set(c.params.kappa0, o.kappa0);
    set(c.k0, o.k0);
    set(c.nodes_k, o.nodes_k);
    set(c.nodes_m, o.nodes_m);
    set(c.omega, o.omega);
    set(c.k, o.k);
    set(c.nx, o.nx);
    set(c.ny, o.ny);
    set(c.dt, o.dt);
    set(c.T, o.T);
    set(c.sample_every, o.every);
    set(c.seed, o.seed);
    set(c.output_dir, o.output_dir);
    if (o.refine) c.refine = true;
    if (!o.sweep.empty()) {
        c.sweep.clear();
        for (const auto& s : o.sweep) {
            const auto colon = s.find(':');
            if (colon == std::string::npos) throw wavecrit::DomainError("--sweep expects EPS:DELTA, got '" + s + "'");
            c.sweep.emplace_back(std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1)));
        }
    }
    if (!o.trace_u.empty() || !o.trace_w.empty() || !o.trace_b.empty()) {
        auto z = [](const std::vector<double>& v) { return v.empty() ? wavecrit::cplx(0.0) : wavecrit::cplx(v[0], v[1]); };
        c.has_traces = true;
        c.traces = {z(o.trace_u), z(o.trace_w), z(o.trace_b)};
    }
    return c;
}

const std::map<std::string, std::string> kDescriptions = {
    {"roots", "Six characteristic roots with regime labels"},
    {"lift", "Boundary-layer amplitudes for given wall traces"},
    {"packet-norms", "Per-family norms of the leading packet over an eps sweep"},
    {"corrector", "Quadratic corrector traces and second-harmonic roots"},
    {"residual", "Residual norms of the approximate solution"},
    {"dns", "Reference simulation with energy ledger"},
    {"stability", "Reference run against the approximate solution"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical internal-wave reflection: asymptotic construction and reference solver"};
    app.require_subcommand(1);
    Overrides o;
    for (const auto& name : wavecrit::kExperiments) add_options(*app.add_subcommand(name, kDescriptions.at(name)), o);
    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = build(name, o);
        const auto r = wavecrit::run_experiment(cfg);
        for (const auto& a : r.artifacts) std::cout << cfg.output_dir << "/" << a << "\n";
        if (!r.summary.empty()) std::cout << r.summary << "\n";
        return r.status;
    } catch (const wavecrit::DomainError& e) {
        std::cerr << "wavecrit " << name << ": invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "wavecrit " << name << ": " << e.what() << "\n";
        return 1;
    }
}
