#pragma once

#include "gssl/dataset.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gssl {

/// Gaussian-kernel expansion f(x) = sum_i A_i k(x_i, x) + b, one output per class.
///
/// Used for posterior-regression models (with bias) and deformed-Laplacian
/// inductive models (bias-free).
struct KernelModel {
  std::string kind;             // "pdl" or "deformed"
  Matrix support_points;        // m x d
  Matrix coefficients;          // m x c
  Vector bias;                  // c, zero when has_bias is false
  bool has_bias = true;
  double sigma = 1.0;
  double regularization = 1.0;  // gamma for pdl, alpha_rkhs for deformed

  Index num_outputs() const { return coefficients.cols(); }
  Vector raw_output(const Vector& x) const;
  Matrix raw_outputs(const Matrix& xs) const;
};

/// k(a_i, b_j) = exp(-|a_i - b_j|^2 / 2 sigma^2).
Matrix gaussian_gram(const Matrix& a, const Matrix& b, double sigma);

/// JSON document; doubles are written in shortest round-trip form.
std::string serialize_model(const KernelModel& model);
KernelModel parse_model(std::string_view json_text);
void save_model(const KernelModel& model, const std::filesystem::path& path);
KernelModel load_model(const std::filesystem::path& path);

}  // namespace gssl
