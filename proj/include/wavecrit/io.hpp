#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace wavecrit {

/// Round-trip formatting (17 significant digits) so reruns are byte-identical.
std::string fmt(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Named real arrays sharing one (ny, nx) shape.
struct FieldDump {
    std::vector<std::string> names;
    std::vector<std::vector<double>> arrays;
    std::size_t ny = 0;
    std::size_t nx = 0;
    std::vector<double> x;
    std::vector<double> y;
    nlohmann::json meta = nlohmann::json::object();
};

/// stem.bin holds the arrays back to back as little-endian float64; stem.json describes them.
void write_field_dump(const std::filesystem::path& stem, const FieldDump& dump);
FieldDump read_field_dump(const std::filesystem::path& stem);

/// manifest.json: config, its FNV-1a hash, artifact list and library versions.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& config,
                    const std::vector<std::string>& artifacts);

}  // namespace wavecrit
