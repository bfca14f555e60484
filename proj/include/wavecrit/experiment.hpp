#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavecrit/dns.hpp"
#include "wavecrit/fit.hpp"
#include "wavecrit/io.hpp"

namespace wavecrit {

inline const std::vector<std::string> kExperiments = {"roots",    "lift",     "packet-norms", "corrector",
                                                      "residual", "dns",      "stability"};

struct ExperimentConfig {
    PhysParams params;
    std::string experiment = "roots";
    /// (eps, delta) points; empty means the single point in params.
    std::vector<std::pair<double, double>> sweep;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    double k0 = 1.0;
    Branch branch = Branch::Plus;
    int nodes_k = 5;
    int nodes_m = 5;

    /// Mode for roots and lift; zero selects the carrier.
    double omega = 0.0;
    double k = 0.0;
    /// Requested traces for lift; unset means the incident-wave traces of the carrier.
    bool has_traces = false;
    TraceTriple traces;

    int nx = 256;
    int ny = 384;
    double dt = 0.01;
    double T = 1.0;
    int sample_every = 10;
    /// Adds one refinement level (2 ny, dt / 2) to the stability run.
    bool refine = false;

    std::vector<std::pair<double, double>> points() const;
    /// Throws DomainError on an invalid configuration.
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// W0 for one sweep point. snap moves k0 onto the periodic node lattice.
W0Assembly build_W0(const ExperimentConfig& c, double eps, double delta, bool snap = false);

struct FamilyNorm {
    std::string family;
    double l2 = 0.0;
    double linf = 0.0;
};

std::vector<FamilyNorm> corrector_norms(const W0Assembly& w0, const CorrectorAssembly& w1);

/// Least-squares slopes of value(eps) per (family, norm) key; rows need at least three eps values.
CsvTable fit_table(const std::vector<double>& eps, const std::vector<std::pair<std::string, std::vector<double>>>& series);

struct ExperimentResult {
    int status = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

/// Runs the configured experiment and writes CSV artifacts plus a manifest into output_dir.
ExperimentResult run_experiment(const ExperimentConfig& c);

}  // namespace wavecrit
