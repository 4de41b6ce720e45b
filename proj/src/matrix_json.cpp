#include "projgeo/matrix_json.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace projgeo {

nlohmann::json matrix_to_json(const ComplexMatrix& a) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      data.push_back({a(i, j).real(), a(i, j).imag()});
    }
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorKind::Input, "matrix JSON must be an object");
    const auto rows = j.at("rows").get<std::int64_t>();
    const auto cols = j.at("cols").get<std::int64_t>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols)) {
      throw Error(ErrorKind::Input, "matrix JSON shape does not match data length");
    }
    ComplexMatrix a(rows, cols);
    std::size_t k = 0;
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t c = 0; c < cols; ++c, ++k) {
        const auto& pair = data[k];
        if (!pair.is_array() || pair.size() != 2) {
          throw Error(ErrorKind::Input, "matrix JSON entries must be [re, im] pairs");
        }
        a(r, c) = Complex(pair[0].get<double>(), pair[1].get<double>());
      }
    }
    require_finite(a);
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Input, std::string("malformed matrix JSON: ") + e.what());
  }
}

nlohmann::json reals_to_json(const RealVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace projgeo
