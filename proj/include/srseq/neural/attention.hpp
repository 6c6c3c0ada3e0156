#pragma once

// Scaled dot-product attention with an additive {0, -inf} mask.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace srseq::neural {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

struct AttentionResult {
  Matrix output;   // Tq x dv
  Matrix weights;  // Tq x Tk, rows sum to 1
};

/// Row-wise softmax of `scores`; -inf entries get exactly zero weight.
/// Throws when a row has no finite entry.
inline Matrix masked_softmax(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double top = scores.row(r).maxCoeff();
    if (!std::isfinite(top)) throw std::domain_error("attention row " + std::to_string(r) + " is fully masked");
    double sum = 0.0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const double s = scores(r, c);
      const double e = std::isinf(s) ? 0.0 : std::exp(s - top);
      out(r, c) = e;
      sum += e;
    }
    out.row(r) /= sum;
  }
  return out;
}

/// softmax(q k^T / sqrt(d) + mask) v, with d the key width. An empty mask
/// means no masking.
inline AttentionResult masked_attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& mask = {}) {
  if (q.cols() != k.cols() || k.rows() != v.rows())
    throw std::invalid_argument("attention shape mismatch");
  Matrix scores = (q * k.transpose()) / std::sqrt(static_cast<double>(k.cols()));
  if (mask.size() != 0) {
    if (mask.rows() != scores.rows() || mask.cols() != scores.cols())
      throw std::invalid_argument("attention mask shape mismatch");
    scores += mask;
  }
  AttentionResult r;
  r.weights = masked_softmax(scores);
  r.output = r.weights * v;
  return r;
}

}  // namespace srseq::neural
