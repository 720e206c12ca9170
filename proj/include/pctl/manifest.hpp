#pragma once

#include <filesystem>

#include <json.hpp>

#include "pctl/threet.hpp"

namespace pctl {

/// A 3T system on disk: one JSON manifest naming five files,
///
///   {"n": 4, "A_r": "sys_A_r.mtx", "A_i": ..., "A_e": ...,
///    "d_r": "sys_d_r.txt", "d_i": ..., "meta": {...}}
///
/// Block files are Matrix Market "coordinate real symmetric" with the lower
/// triangle stored; vector files hold one value per line. Relative paths are
/// resolved against the manifest's directory. Values are written with 17
/// significant digits so a write/read cycle is bit-exact.
struct Manifest {
  ThreeTMatrix matrix;
  nlohmann::json meta = nlohmann::json::object();
};

Manifest read_manifest(const std::filesystem::path& path);

/// Writes `path` plus <stem>_A_r.mtx, <stem>_A_i.mtx, <stem>_A_e.mtx,
/// <stem>_d_r.txt, <stem>_d_i.txt beside it.
void write_manifest(const ThreeTMatrix& m, const std::filesystem::path& path,
                    const nlohmann::json& meta = nlohmann::json::object());

SparseSym read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const SparseSym& m, const std::filesystem::path& path);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::span<const double> v, const std::filesystem::path& path);

/// "%.17g" formatting used by every text output.
std::string format_real(double v);

}  // namespace pctl
