/*
 * Copyright 2026 The typosim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "error.hpp"

namespace typosim {
namespace {

// X X^T as a full symmetric matrix.
Matrix row_gram(const MatrixRef& x) {
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  return detail::compensated_dot(a.data(), b.data(), a.size());
}

Matrix center_columns(const MatrixRef& x) {
  const Eigen::RowVectorXd means = x.colwise().mean();
  return x.rowwise() - means;
}

void require_nonempty(const MatrixRef& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + " is empty");
  }
}

double finish_ratio(double numerator, double self_a, double self_b) {
  if (!(self_a > 0.0) || !(self_b > 0.0) || !std::isfinite(self_a) || !std::isfinite(self_b)) {
    fail(ErrorCode::DegenerateInput, "zero Gram norm (all-zero or constant input)");
  }
  const double value = std::max(numerator, 0.0) / (std::sqrt(self_a) * std::sqrt(self_b));
  if (!std::isfinite(value)) fail(ErrorCode::DegenerateInput, "non-finite similarity");
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

namespace detail {

double compensated_dot(const double* a, const double* b, Eigen::Index size) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const double term = a[i] * b[i];
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double frobenius_sq(const MatrixRef& m) noexcept {
  double scale = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) scale = std::max(scale, std::abs(m(i, j)));
  }
  if (scale == 0.0 || !std::isfinite(scale)) return scale == 0.0 ? 0.0 : scale;
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double r = m(i, j) / scale;
      const double term = r * r;
      const double t = sum + term;
      comp += sum >= term ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
  }
  return (sum + comp) * scale * scale;
}

}  // namespace detail

std::string_view centering_name(Centering mode) noexcept {
  return mode == Centering::Centered ? "centered" : "uncentered";
}

Centering parse_centering(std::string_view text) {
  if (text == "centered") return Centering::Centered;
  if (text == "uncentered") return Centering::Uncentered;
  fail(ErrorCode::InvalidArgument, "unknown centering mode '" + std::string(text) + "'");
}

double gram_frobenius_product(const MatrixRef& x, const MatrixRef& y) {
  require_nonempty(x, "X");
  require_nonempty(y, "Y");
  if (x.rows() != y.rows()) {
    fail(ErrorCode::ShapeMismatch, "row counts differ: " + std::to_string(x.rows()) + " vs " +
                                       std::to_string(y.rows()));
  }
  const double n = static_cast<double>(x.rows());
  const double px = static_cast<double>(x.cols());
  const double py = static_cast<double>(y.cols());
  if (n * (px + py) <= 2.0 * px * py) {
    // vec(X X^T) . vec(Y Y^T)
    return frobenius_dot(row_gram(x), row_gram(y));
  }
  const Matrix cross = y.transpose() * x;
  return detail::frobenius_sq(cross);
}

double linear_cka(const MatrixRef& x, const MatrixRef& y, Centering mode) {
  if (x.rows() != y.rows()) {
    fail(ErrorCode::ShapeMismatch, "row counts differ: " + std::to_string(x.rows()) + " vs " +
                                       std::to_string(y.rows()));
  }
  if (mode == Centering::Centered) {
    const Matrix xc = center_columns(x);
    const Matrix yc = center_columns(y);
    return finish_ratio(gram_frobenius_product(xc, yc), gram_frobenius_product(xc, xc),
                        gram_frobenius_product(yc, yc));
  }
  return finish_ratio(gram_frobenius_product(x, y), gram_frobenius_product(x, x),
                      gram_frobenius_product(y, y));
}

Matrix block_embed(const MatrixRef& w) {
  require_nonempty(w, "W");
  const Eigen::Index n = w.rows();
  const Eigen::Index p = w.cols();
  Matrix f = Matrix::Zero(n + p, p + n);
  f.topLeftCorner(n, p) = w;
  f.bottomRightCorner(p, n) = w.transpose();
  return f;
}

double bicka_direct(const MatrixRef& w1, const MatrixRef& w2, Centering mode) {
  require_nonempty(w1, "W1");
  require_nonempty(w2, "W2");
  if (w1.rows() != w2.rows() || w1.cols() != w2.cols()) {
    fail(ErrorCode::ShapeMismatch,
         "shapes differ: (" + std::to_string(w1.rows()) + "," + std::to_string(w1.cols()) +
             ") vs (" + std::to_string(w2.rows()) + "," + std::to_string(w2.cols()) + ")");
  }
  return linear_cka(block_embed(w1), block_embed(w2), mode);
}

BickaOperand prepare_operand(const MatrixRef& w, Centering mode) {
  require_nonempty(w, "W");
  BickaOperand op;
  op.mode = mode;
  if (w.rows() <= w.cols()) {
    op.w = w;
  } else {
    op.w = w.transpose();
  }
  op.gram = row_gram(op.w);
  op.gram_sq = frobenius_dot(op.gram, op.gram);
  // ||F^T F||_F^2 = ||W^T W||_F^2 + ||W W^T||_F^2 = 2 ||W W^T||_F^2
  op.self_sq = 2.0 * op.gram_sq;

  if (mode == Centering::Centered) {
    const double total = static_cast<double>(op.w.rows() + op.w.cols());
    const Eigen::VectorXd a = op.w.colwise().sum().transpose() / total;
    const Eigen::VectorXd b = op.w.rowwise().sum() / total;
    op.row_img = op.w * a;
    op.col_img = op.w.transpose() * b;
    op.mean_sq = a.squaredNorm() + b.squaredNorm();
    const double quad = op.row_img.squaredNorm() + op.col_img.squaredNorm();
    op.self_sq = op.self_sq - 2.0 * total * quad + total * total * op.mean_sq * op.mean_sq;
  }
  return op;
}

double bicka_prepared(const BickaOperand& a, const BickaOperand& b) {
  if (a.mode != b.mode) fail(ErrorCode::InvalidArgument, "operands prepared with different modes");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::ShapeMismatch,
         "shapes differ: (" + std::to_string(a.rows()) + "," + std::to_string(a.cols()) +
             ") vs (" + std::to_string(b.rows()) + "," + std::to_string(b.cols()) + ")");
  }
  // ||W2^T W1||^2 via the s x s Grams, ||W2 W1^T||^2 directly.
  const double cols_term = frobenius_dot(a.gram, b.gram);
  const Matrix cross = b.w * a.w.transpose();
  const double rows_term = detail::frobenius_sq(cross);
  double numerator = cols_term + rows_term;

  if (a.mode == Centering::Centered) {
    const double total = static_cast<double>(a.rows() + a.cols());
    const double bilinear = detail::compensated_dot(b.row_img.data(), a.row_img.data(),
                                                    a.row_img.size()) +
                            detail::compensated_dot(b.col_img.data(), a.col_img.data(),
                                                    a.col_img.size());
    numerator = numerator - 2.0 * total * bilinear + total * total * a.mean_sq * b.mean_sq;
  }
  return finish_ratio(numerator, a.self_sq, b.self_sq);
}

double bicka_fast(const MatrixRef& w1, const MatrixRef& w2, Centering mode) {
  require_nonempty(w1, "W1");
  require_nonempty(w2, "W2");
  if (w1.rows() != w2.rows() || w1.cols() != w2.cols()) {
    fail(ErrorCode::ShapeMismatch,
         "shapes differ: (" + std::to_string(w1.rows()) + "," + std::to_string(w1.cols()) +
             ") vs (" + std::to_string(w2.rows()) + "," + std::to_string(w2.cols()) + ")");
  }
  return bicka_prepared(prepare_operand(w1, mode), prepare_operand(w2, mode));
}

}  // namespace typosim
