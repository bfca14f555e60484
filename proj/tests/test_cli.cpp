#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "wavecrit/experiment.hpp"

using namespace wavecrit;
using testsupport::close;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wavecrit_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fit: exact power laws") {
    const std::vector<double> x{0.4, 0.3, 0.2, 0.1};
    std::vector<double> y2, y15;
    for (double v : x) {
        y2.push_back(3.0 * v * v);
        y15.push_back(0.5 * std::pow(v, 1.5));
    }
    const auto a = fit_slope(x, y2);
    CHECK(close(a.slope, 2.0, 1e-12));
    CHECK(close(std::exp(a.intercept), 3.0, 1e-12));
    CHECK(a.stderr_slope < 1e-12);
    CHECK(a.points == 4);
    CHECK(close(fit_slope(x, y15).slope, 1.5, 1e-12));
}

TEST_CASE("fit: noisy data lands within two standard errors") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.05);
    int inside = 0;
    const int trials = 200;
    for (int n = 0; n < trials; ++n) {
        std::vector<double> x, y;
        for (double v = 0.4; v > 0.05; v *= 0.8) {
            x.push_back(v);
            y.push_back(std::pow(v, 3.0) * std::exp(noise(rng)));
        }
        const auto f = fit_slope(x, y);
        if (std::abs(f.slope - 3.0) <= 2.0 * f.stderr_slope) ++inside;
    }
    // About 95 % coverage expected; the t correction for 10 points widens it slightly.
    CHECK(inside >= 170);
}

TEST_CASE("fit: invalid input") {
    CHECK_THROWS_AS(fit_slope({1, 2}, {1, 2}), FitError);
    CHECK_THROWS_AS(fit_slope({1, 2, 3}, {1, -2, 3}), FitError);
    CHECK_THROWS_AS(fit_slope({1, 1, 1}, {1, 2, 3}), FitError);
    CHECK_THROWS_AS(fit_slope({1, 2, 3}, {1, 2}), FitError);
}

TEST_CASE("io: FNV-1a and number formatting") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
    CHECK(std::stod(fmt(0.1)) == 0.1);
    CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("io: CSV round trip") {
    const auto dir = scratch_dir("csv");
    CsvTable t;
    t.columns = {"a", "b"};
    t.add_row({"1", fmt(0.25)});
    t.add_row({"2", fmt(-3.5)});
    CHECK_THROWS_AS(t.add_row({"1"}), DomainError);
    write_csv(dir / "t.csv", t);
    const auto r = read_csv(dir / "t.csv");
    CHECK(r.columns == t.columns);
    CHECK(r.rows == t.rows);
    CHECK(!fs::exists(dir / "t.csv.tmp"));
}

TEST_CASE("io: field dump round trip") {
    const auto dir = scratch_dir("dump");
    FieldDump d;
    d.names = {"u", "b"};
    d.ny = 3;
    d.nx = 4;
    d.x = {0, 1, 2, 3};
    d.y = {0.0, 0.5, 1.5};
    for (int c = 0; c < 2; ++c) {
        std::vector<double> a(12);
        for (int i = 0; i < 12; ++i) a[i] = c * 100 + i + 0.125;
        d.arrays.push_back(a);
    }
    d.meta["t"] = 0.5;
    write_field_dump(dir / "state", d);
    CHECK(fs::file_size(dir / "state.bin") == 2 * 12 * sizeof(double));
    const auto side = nlohmann::json::parse(slurp(dir / "state.json"));
    CHECK(side.at("dtype") == "float64");
    CHECK(side.at("endianness") == "little");
    const auto r = read_field_dump(dir / "state");
    CHECK(r.names == d.names);
    CHECK(r.arrays == d.arrays);
    CHECK(r.y == d.y);
    CHECK(r.meta.at("t") == 0.5);
}

TEST_CASE("config: JSON round trip and validation") {
    ExperimentConfig c;
    c.experiment = "corrector";
    c.sweep = {{0.3, 0.027}, {0.2, 0.008}};
    c.k0 = 0.75;
    c.nodes_m = 7;
    c.has_traces = true;
    c.traces = {cplx(1, 2), cplx(0, -1), cplx(0.5, 0)};
    c.refine = true;
    const auto j = to_json(c);
    const auto back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.sweep == c.sweep);
    CHECK(back.traces.frak_u == cplx(1, 2));
    CHECK_NOTHROW(back.validate());

    auto bad = c;
    bad.sweep = {{0.2, 0.0}, {0.3, 0.0}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.experiment = "nope";
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.experiment = "stability";
    bad.sweep = {{0.2, 0.1}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.sweep = {{0.3, 0.01}, {0.2, 0.008}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sweep": [[0.2]]})")), DomainError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"packet": {"branch": "up"}})")), DomainError);
}

TEST_CASE("experiment: roots writes six labelled roots, reruns are byte-identical") {
    ExperimentConfig c;
    c.experiment = "roots";
    c.params.gamma = 0.45;
    c.params.eps = 0.2;
    c.output_dir = scratch_dir("roots").string();
    const auto r = run_experiment(c);
    CHECK(r.status == 0);
    const auto t = read_csv(fs::path(c.output_dir) / "roots.csv");
    REQUIRE(t.rows.size() == 6);
    const auto col = [&](const std::string& name) {
        return std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin();
    };
    int positive = 0;
    for (const auto& row : t.rows) positive += std::stod(row[col("re")]) > 0.0;
    CHECK(positive == 3);
    CHECK(!fs::exists(fs::path(c.output_dir) / "fits.csv"));
    const auto first = slurp(fs::path(c.output_dir) / "roots.csv");
    const auto manifest = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "manifest.json"));
    CHECK(manifest.at("config_hash") == "fnv1a64:" + hex64(fnv1a64(to_json(c).dump())));
    run_experiment(c);
    CHECK(slurp(fs::path(c.output_dir) / "roots.csv") == first);
}

TEST_CASE("experiment: packet-norm sweep writes slope fits") {
    ExperimentConfig c;
    c.experiment = "packet-norms";
    c.sweep = {{0.4, 0.0}, {0.3, 0.0}, {0.2, 0.0}};
    c.output_dir = scratch_dir("packet").string();
    run_experiment(c);
    const auto fits = read_csv(fs::path(c.output_dir) / "fits.csv");
    CHECK(fits.columns.front() == "series");
    CHECK(!fits.rows.empty());
}

TEST_CASE("experiment: invalid configuration is rejected before any output") {
    ExperimentConfig c;
    c.experiment = "roots";
    c.params.nu0 = -1.0;
    c.output_dir = scratch_dir("invalid").string();
    CHECK_THROWS_AS(run_experiment(c), DomainError);
    CHECK(!fs::exists(fs::path(c.output_dir) / "manifest.json"));
}
