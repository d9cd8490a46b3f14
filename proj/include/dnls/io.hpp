#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

// Shortest-roundtrip-safe text form (%.17g).
std::string format_double(double x);

// Field text format: a "# {json}" header line, then "site re im" per row.
void write_field(std::ostream& os, const LatticeField& u, const nlohmann::json& meta = nlohmann::json::object());
void write_field(const std::filesystem::path& path, const LatticeField& u,
                 const nlohmann::json& meta = nlohmann::json::object());
void write_field(const std::filesystem::path& path, const RealField& u,
                 const nlohmann::json& meta = nlohmann::json::object());

LatticeField read_field(std::istream& is, nlohmann::json* meta = nullptr);
LatticeField read_field(const std::filesystem::path& path, nlohmann::json* meta = nullptr);
RealField read_real_field(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);
std::string hash_field(const RealField& f);

// Comma-separated table with a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    size_t width_;
};

}  // namespace dnls
