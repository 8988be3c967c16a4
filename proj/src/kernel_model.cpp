#include "gssl/kernel_model.hpp"

#include "gssl/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gssl {

using nlohmann::json;

Matrix gaussian_gram(const Matrix& a, const Matrix& b, double sigma) {
  if (a.cols() != b.cols()) throw InvalidParameter("gram: feature dimensions differ");
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return (-(d2.array().max(0.0)) * inv).exp().matrix();
}

Vector KernelModel::raw_output(const Vector& x) const {
  return raw_outputs(x.transpose()).row(0).transpose();
}

Matrix KernelModel::raw_outputs(const Matrix& xs) const {
  if (xs.cols() != support_points.cols())
    throw InvalidParameter("query dimension " + std::to_string(xs.cols()) +
                           " does not match model dimension " +
                           std::to_string(support_points.cols()));
  Matrix out = gaussian_gram(xs, support_points, sigma) * coefficients;
  if (has_bias) out.rowwise() += bias.transpose();
  return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Index expected_cols, const char* name) {
  if (!j.is_array()) throw ParseError(std::string("model field '") + name + "' must be an array");
  const Index rows = static_cast<Index>(j.size());
  Index cols = expected_cols;
  if (cols < 0) cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError(std::string("model field '") + name + "' is ragged at row " +
                       std::to_string(i));
    for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

std::string serialize_model(const KernelModel& model) {
  json doc;
  doc["kind"] = model.kind;
  doc["sigma"] = model.sigma;
  doc["regularization"] = model.regularization;
  doc["has_bias"] = model.has_bias;
  doc["support_points"] = matrix_to_json(model.support_points);
  doc["coefficients"] = matrix_to_json(model.coefficients);
  json bias = json::array();
  for (Index c = 0; c < model.bias.size(); ++c) bias.push_back(model.bias[c]);
  doc["bias"] = std::move(bias);
  return doc.dump(2);
}

KernelModel parse_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  try {
    KernelModel m;
    m.kind = doc.at("kind").get<std::string>();
    m.sigma = doc.at("sigma").get<double>();
    m.regularization = doc.at("regularization").get<double>();
    m.has_bias = doc.at("has_bias").get<bool>();
    m.support_points = matrix_from_json(doc.at("support_points"), -1, "support_points");
    m.coefficients = matrix_from_json(doc.at("coefficients"), -1, "coefficients");
    const auto& bias = doc.at("bias");
    m.bias.resize(static_cast<Index>(bias.size()));
    for (std::size_t c = 0; c < bias.size(); ++c) m.bias[static_cast<Index>(c)] = bias[c].get<double>();
    if (m.coefficients.rows() != m.support_points.rows())
      throw ParseError("model has " + std::to_string(m.coefficients.rows()) +
                       " coefficient rows for " + std::to_string(m.support_points.rows()) +
                       " support points");
    if (m.bias.size() != m.coefficients.cols())
      throw ParseError("model bias length does not match output count");
    if (!(m.sigma > 0.0)) throw ParseError("model sigma must be positive");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
}

void save_model(const KernelModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize_model(model) << '\n';
}

KernelModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace gssl
