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

#pragma once

#include <string_view>

#include <Eigen/Core>

namespace typosim {

using Matrix = Eigen::MatrixXd;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

enum class Centering { Centered, Uncentered };

std::string_view centering_name(Centering mode) noexcept;
Centering parse_centering(std::string_view text);

/// ||Y^T X||_F^2 for matrices sharing their row count. Evaluated on whichever
/// side of the identity trace(X X^T Y Y^T) = ||Y^T X||_F^2 is cheaper.
double gram_frobenius_product(const MatrixRef& x, const MatrixRef& y);

/// Linear CKA, ||Y^T X||_F^2 / (||X^T X||_F ||Y^T Y||_F), optionally on
/// column-centered inputs.
double linear_cka(const MatrixRef& x, const MatrixRef& y, Centering mode);

/// F(W) = [[W, 0], [0, W^T]], shape (n+p) x (p+n).
Matrix block_embed(const MatrixRef& w);

/// linear_cka(F(W1), F(W2)). Materializes both embeddings; used as the
/// reference route for the closed form below.
double bicka_direct(const MatrixRef& w1, const MatrixRef& w2, Centering mode);

/// Per-matrix statistics that the closed-form biCKA needs. Stored with the
/// short side as rows (transposition leaves biCKA unchanged), so operands
/// whose checkpoints use opposite orientation conventions compare directly.
struct BickaOperand {
  Centering mode = Centering::Centered;
  Matrix w;                 // s x l, s <= l
  Matrix gram;              // w w^T (s x s), full symmetric
  double gram_sq = 0.0;     // ||w w^T||_F^2 == ||w^T w||_F^2
  Eigen::VectorXd row_img;  // w a, a = column sums / N   (centered only)
  Eigen::VectorXd col_img;  // w^T b, b = row sums / N    (centered only)
  double mean_sq = 0.0;     // ||a||^2 + ||b||^2 = squared norm of F(W)'s column means
  double self_sq = 0.0;     // ||F~^T F~||_F^2
  Eigen::Index rows() const noexcept { return w.rows(); }
  Eigen::Index cols() const noexcept { return w.cols(); }
};

BickaOperand prepare_operand(const MatrixRef& w, Centering mode);

/// Closed-form biCKA from two prepared operands. No (n+p)-sized matrix is
/// formed; centering enters as rank-1 corrections of the block Grams.
double bicka_prepared(const BickaOperand& a, const BickaOperand& b);

double bicka_fast(const MatrixRef& w1, const MatrixRef& w2, Centering mode);

namespace detail {

// Compensated (Neumaier) sum of a[i]*b[i] in storage order.
double compensated_dot(const double* a, const double* b, Eigen::Index size) noexcept;

// Squared Frobenius norm, scaled two-pass evaluation.
double frobenius_sq(const MatrixRef& m) noexcept;

}  // namespace detail

}  // namespace typosim
