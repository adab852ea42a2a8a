#include "beltrami/serialize.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace beltrami::io {

namespace {

json wave_json(const WaveVector& k) { return json::array({k.x, k.y, k.z}); }

WaveVector wave_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("wave vector must be an array of three integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

json vec3(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

json to_json(const VectorField& v) {
  json modes = json::array();
  for (const auto& [k, c] : v.modes()) {
    if (!k.is_canonical()) continue;
    modes.push_back({{"k", wave_json(k)}, {"re", vec3(c.real())}, {"im", vec3(c.imag())}});
  }
  return {{"truncation_radius", v.truncation()}, {"modes", modes}};
}

json to_json(const ScalarField& f) {
  json modes = json::array();
  for (const auto& [k, c] : f.modes()) {
    if (!k.is_canonical()) continue;
    modes.push_back({{"k", wave_json(k)}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"truncation_radius", f.truncation()}, {"modes", modes}};
}

VectorField vector_field_from_json(const json& j) {
  VectorField v(j.at("truncation_radius").get<int>());
  for (const auto& m : j.at("modes")) {
    const WaveVector k = wave_from(m.at("k"));
    const auto re = m.at("re").get<std::vector<double>>(), im = m.at("im").get<std::vector<double>>();
    if (re.size() != 3 || im.size() != 3) throw std::invalid_argument("vector mode needs three components");
    Vector3c c;
    for (int i = 0; i < 3; ++i) c[i] = Complex(re[std::size_t(i)], im[std::size_t(i)]);
    v.add_real_mode(k, c);
  }
  return v;
}

ScalarField scalar_field_from_json(const json& j) {
  ScalarField f(j.at("truncation_radius").get<int>());
  for (const auto& m : j.at("modes"))
    f.add_real_mode(wave_from(m.at("k")), Complex(m.at("re").get<double>(), m.at("im").get<double>()));
  return f;
}

// c e^{ikx} + conj = 2 Re c cos kx - 2 Im c sin kx.
json terms(const ScalarField& f) {
  json out = json::array();
  for (const auto& [k, c] : f.modes()) {
    if (k.is_zero()) {
      out.push_back({{"type", "const"}, {"k", wave_json(k)}, {"coefficient", c.real()}});
      continue;
    }
    if (!k.is_canonical()) continue;
    if (c.real() != 0.0) out.push_back({{"type", "cos"}, {"k", wave_json(k)}, {"coefficient", 2.0 * c.real()}});
    if (c.imag() != 0.0) out.push_back({{"type", "sin"}, {"k", wave_json(k)}, {"coefficient", -2.0 * c.imag()}});
  }
  return out;
}

json terms(const VectorField& v) {
  json out = json::array();
  for (const auto& [k, c] : v.modes()) {
    if (k.is_zero()) {
      out.push_back({{"type", "const"}, {"k", wave_json(k)}, {"coefficient", vec3(c.real())}});
      continue;
    }
    if (!k.is_canonical()) continue;
    if (!c.real().isZero(0.0))
      out.push_back({{"type", "cos"}, {"k", wave_json(k)}, {"coefficient", vec3(2.0 * c.real())}});
    if (!c.imag().isZero(0.0))
      out.push_back({{"type", "sin"}, {"k", wave_json(k)}, {"coefficient", vec3(-2.0 * c.imag())}});
  }
  return out;
}

json to_json(const TensorField& t) {
  json out = json::object();
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out[std::to_string(i + 1) + std::to_string(j + 1)] = terms(t(i, j));
  return out;
}

json to_json(const MetricField& g) {
  json out = {{"polynomial", to_json(g.polynomial())}, {"epsilon", g.epsilon()}};
  out["closed_form"] = g.is_polynomial() ? "polynomial" : "g + eps beta_xi beta_xi + phi(eps q) g_xi";
  return out;
}

json to_json(const CompatibilityReport& r) {
  return {{"unit_norm", r.unit_norm}, {"star_d", r.star_d}, {"volume", r.volume}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string content_hash(const json& j) { return sha256_hex(j.dump()); }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable matrix_table(const std::string& name, const Eigen::MatrixXd& m) {
  CsvTable t{name, {"row", "col", "value"}, {}};
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) t.rows.push_back({double(i), double(j), m(i, j)});
  return t;
}

std::string write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(bytes.data(), std::streamsize(bytes.size()));
  if (!os) throw std::runtime_error("write failed for " + path.string());
  return sha256_hex(bytes);
}

}  // namespace beltrami::io
