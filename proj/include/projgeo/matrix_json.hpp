#pragma once

// Library-wide matrix interchange format:
//   {"rows": n, "cols": m, "data": [[re, im], ...]}   (n*m pairs, row-major)

#include <filesystem>
#include <string>

#include <json.hpp>

#include "projgeo/matcore.hpp"

namespace projgeo {

nlohmann::json matrix_to_json(const ComplexMatrix& a);
/// Throws ErrorKind::Input on a malformed document.
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json reals_to_json(const RealVector& v);

/// Writes `text` to `path` through a temporary file and a rename.  Throws
/// std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
/// Throws std::runtime_error when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace projgeo
