#include "wavecrit/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <fftw3.h>

#include "wavecrit/params.hpp"

namespace wavecrit {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw DomainError("CsvTable: row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return os.str();
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("read_csv: cannot open " + path.string());
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    CsvTable t;
    std::string line;
    if (std::getline(in, line)) t.columns = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("write_atomic: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DomainError("write_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_csv(const fs::path& path, const CsvTable& table) { write_atomic(path, table.str()); }

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string le_bytes(const std::vector<double>& a) {
    std::string out(a.size() * sizeof(double), '\0');
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(a[i]);
        for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    return out;
}

double from_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_field_dump(const fs::path& stem, const FieldDump& d) {
    if (d.names.size() != d.arrays.size()) throw DomainError("write_field_dump: names and arrays differ");
    std::string bin;
    for (const auto& a : d.arrays) {
        if (a.size() != d.ny * d.nx) throw DomainError("write_field_dump: array size does not match shape");
        bin += le_bytes(a);
    }
    fs::path bpath = stem, jpath = stem;
    bpath += ".bin";
    jpath += ".json";
    nlohmann::json j;
    j["dtype"] = "float64";
    j["endianness"] = "little";
    j["shape"] = {d.ny, d.nx};
    j["components"] = d.names;
    j["layout"] = "component-major, row-major [y][x]";
    j["x"] = d.x;
    j["y"] = d.y;
    j["meta"] = d.meta;
    j["binary"] = bpath.filename().string();
    write_atomic(bpath, bin);
    write_atomic(jpath, j.dump(2) + "\n");
}

FieldDump read_field_dump(const fs::path& stem) {
    fs::path bpath = stem, jpath = stem;
    bpath += ".bin";
    jpath += ".json";
    std::ifstream jin(jpath);
    if (!jin) throw DomainError("read_field_dump: missing " + jpath.string());
    const auto j = nlohmann::json::parse(jin);
    FieldDump d;
    d.names = j.at("components").get<std::vector<std::string>>();
    d.ny = j.at("shape")[0].get<std::size_t>();
    d.nx = j.at("shape")[1].get<std::size_t>();
    d.x = j.at("x").get<std::vector<double>>();
    d.y = j.at("y").get<std::vector<double>>();
    d.meta = j.at("meta");
    std::ifstream bin(bpath, std::ios::binary);
    const std::string raw((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    const std::size_t n = d.ny * d.nx;
    if (raw.size() != n * d.names.size() * 8) throw DomainError("read_field_dump: binary size mismatch");
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    for (std::size_t c = 0; c < d.names.size(); ++c) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = from_le(p + (c * n + i) * 8);
        d.arrays.push_back(std::move(a));
    }
    return d;
}

void write_manifest(const fs::path& dir, const nlohmann::json& config, const std::vector<std::string>& artifacts) {
    nlohmann::json m;
    const std::string canon = config.dump();
    m["config"] = config;
    m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(canon));
    m["artifacts"] = artifacts;
    auto& v = m["versions"];
    v["wavecrit"] = "0.1.0";
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    v["fftw"] = std::string(fftw_version);
    v["compiler"] = std::string(__VERSION__);
    write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace wavecrit
