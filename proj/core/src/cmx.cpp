#include "repstab/cmx.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "repstab/errors.hpp"

namespace repstab::cmx {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'X', '1'};

std::string fmt15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void check_dims(std::uint64_t rows, std::uint64_t cols) {
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20))
    fail(errc::io, "cmx: unreasonable dimensions");
}

} // namespace

std::string to_json_text(const ComplexMatrix& m) {
  std::ostringstream out;
  out << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"data\": [";
  bool first = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!first) out << ", ";
      first = false;
      out << fmt15(m(i, j).real()) << ", " << fmt15(m(i, j).imag());
    }
  out << "]}";
  return out.str();
}

ComplexMatrix from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::io, std::string("cmx: JSON parse error: ") + e.what());
  }
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    fail(errc::io, "cmx: missing rows/cols/data");
  const auto rows = j["rows"].get<std::uint64_t>();
  const auto cols = j["cols"].get<std::uint64_t>();
  check_dims(rows, cols);
  const auto& data = j["data"];
  if (!data.is_array() || data.size() != 2 * rows * cols)
    fail(errc::io, "cmx: data length does not match dimensions");
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::size_t p = 0;
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t c = 0; c < cols; ++c) {
      const double re = data[p].get<double>();
      const double im = data[p + 1].get<double>();
      p += 2;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = complexd(re, im);
    }
  if (!all_finite(m)) fail(errc::validation, "cmx: non-finite entries");
  return m;
}

ComplexMatrix load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cmx: cannot open " + path);
  char head[4] = {0, 0, 0, 0};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0) {
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in) fail(errc::io, "cmx: truncated header in " + path);
    check_dims(rows, cols);
    ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::vector<double> buf(2 * cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
      in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
      if (!in) fail(errc::io, "cmx: truncated data in " + path);
      for (std::uint64_t c = 0; c < cols; ++c)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            complexd(buf[2 * c], buf[2 * c + 1]);
    }
    if (!all_finite(m)) fail(errc::validation, "cmx: non-finite entries in " + path);
    return m;
  }
  // JSON variant.
  std::ifstream jin(path);
  std::stringstream ss;
  ss << jin.rdbuf();
  return from_json_text(ss.str());
}

void save(const std::string& path, const ComplexMatrix& m, Format format) {
  if (format == Format::json) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cmx: cannot write " + path);
    out << to_json_text(m) << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cmx: cannot write " + path);
  out.write(kMagic, 4);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  std::vector<double> buf(2 * cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf[2 * static_cast<std::size_t>(c)] = m(i, c).real();
      buf[2 * static_cast<std::size_t>(c) + 1] = m(i, c).imag();
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
}

} // namespace repstab::cmx
