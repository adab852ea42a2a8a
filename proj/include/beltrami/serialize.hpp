#pragma once

#include "beltrami/contact.hpp"
#include "beltrami/fourier_series.hpp"

#include <Eigen/Core>
#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace beltrami::io {

using nlohmann::json;

/// {truncation_radius, modes: [{k, re, im}]}, one entry per +-k pair (the
/// canonical representative), modes in lexicographic order.
json to_json(const VectorField& v);
json to_json(const ScalarField& f);
VectorField vector_field_from_json(const json& j);
ScalarField scalar_field_from_json(const json& j);

/// Trigonometric-term trees: [{"type": "const"|"cos"|"sin", "k": [..], "coefficient": ..}].
json terms(const ScalarField& f);
json terms(const VectorField& v);
json to_json(const TensorField& t);  ///< {"11": terms, "12": terms, ...}
json to_json(const MetricField& g);
json to_json(const CompatibilityReport& r);

std::string sha256_hex(const std::string& bytes);
/// Hash of the canonical JSON dump.
std::string content_hash(const json& j);

/// Shortest round-trip decimal for a double.
std::string format_number(double x);

struct CsvTable {
  std::string name;  ///< file name
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
/// Nonzero entries as (row, col, value), zero-based.
CsvTable matrix_table(const std::string& name, const Eigen::MatrixXd& m);

/// Writes bytes and returns their SHA-256.
std::string write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace beltrami::io
