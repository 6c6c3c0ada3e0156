#pragma once

// Reverse-mode autodiff over dense matrices. A Tape records the forward
// computation; backward() runs the recorded closures in reverse.
// With recording off the tape is a plain evaluator.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "srseq/neural/attention.hpp"

namespace srseq::neural {

struct Var {
  int id = -1;
};

class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  const Matrix& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external ? *n.external : n.value;
  }

  /// Gradient of the last backward() target; zero-sized when unreached.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }

  Var leaf(Matrix value) { return push(std::move(value), nullptr); }

  /// Leaf reading `*value` in place; the matrix must outlive the tape.
  Var ref(const Matrix* value) {
    Node n;
    n.external = value;
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  void backward(Var scalar) {
    if (!record_) throw std::logic_error("backward on a non-recording tape");
    if (value(scalar).size() != 1) throw std::invalid_argument("backward needs a scalar");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    nodes_[scalar.id].grad = Matrix::Ones(1, 1);
    for (int i = scalar.id; i >= 0; --i)
      if (nodes_[i].back && nodes_[i].grad.size() != 0) nodes_[i].back();
  }

  Var matmul(Var a, Var b) {
    return push(value(a) * value(b), [=, this] {
      const Matrix& g = grad_of(out_id());
      accumulate(a, g * value(b).transpose());
      accumulate(b, value(a).transpose() * g);
    });
  }

  Var add(Var a, Var b) {
    return push(value(a) + value(b), [=, this] {
      accumulate(a, grad_of(out_id()));
      accumulate(b, grad_of(out_id()));
    });
  }

  /// a + row, with the 1 x c row broadcast over every row of a.
  Var add_row(Var a, Var row) {
    Matrix out = value(a);
    out.rowwise() += value(row).row(0);
    return push(std::move(out), [=, this] {
      const Matrix& g = grad_of(out_id());
      accumulate(a, g);
      accumulate(row, g.colwise().sum());
    });
  }

  Var scale(Var a, double s) {
    return push(value(a) * s, [=, this] { accumulate(a, grad_of(out_id()) * s); });
  }

  Var relu(Var a) {
    return push(value(a).cwiseMax(0.0), [=, this] {
      accumulate(a, grad_of(out_id()).cwiseProduct((value(a).array() > 0.0).cast<double>().matrix()));
    });
  }

  /// Row-wise normalization with gain g and bias b (both 1 x c).
  Var layer_norm(Var x, Var g, Var b, double eps = 1e-5) {
    const Matrix& in = value(x);
    const auto cols = static_cast<double>(in.cols());
    Matrix xhat(in.rows(), in.cols());
    Eigen::VectorXd inv_std(in.rows());
    for (Eigen::Index r = 0; r < in.rows(); ++r) {
      const double mean = in.row(r).mean();
      const double var = (in.row(r).array() - mean).square().sum() / cols;
      inv_std(r) = 1.0 / std::sqrt(var + eps);
      xhat.row(r) = (in.row(r).array() - mean) * inv_std(r);
    }
    Matrix out = xhat.array().rowwise() * value(g).row(0).array();
    out.rowwise() += value(b).row(0);
    return push(std::move(out), [=, this] {
      const Matrix& dy = grad_of(out_id());
      accumulate(g, (dy.cwiseProduct(xhat)).colwise().sum());
      accumulate(b, dy.colwise().sum());
      const Matrix dxhat = dy.array().rowwise() * value(g).row(0).array();
      Matrix dx(dxhat.rows(), dxhat.cols());
      for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
        const double m1 = dxhat.row(r).mean();
        const double m2 = dxhat.row(r).dot(xhat.row(r)) / cols;
        dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
      }
      accumulate(x, dx);
    });
  }

  /// Rows of `table` selected by ids.
  Var gather(Var table, const std::vector<int>& ids) {
    const Matrix& t = value(table);
    Matrix out(static_cast<Eigen::Index>(ids.size()), t.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= t.rows()) throw std::out_of_range("embedding id out of range");
      out.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
    }
    return push(std::move(out), [=, this] {
      const Matrix& g = grad_of(out_id());
      Matrix dt = Matrix::Zero(value(table).rows(), value(table).cols());
      for (std::size_t i = 0; i < ids.size(); ++i) dt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
      accumulate(table, dt);
    });
  }

  /// [a; b] stacked vertically.
  Var stack_rows(Var a, Var b) {
    const Eigen::Index ra = value(a).rows();
    Matrix out(ra + value(b).rows(), value(a).cols());
    out << value(a), value(b);
    return push(std::move(out), [=, this] {
      const Matrix& g = grad_of(out_id());
      accumulate(a, g.topRows(ra));
      accumulate(b, g.bottomRows(g.rows() - ra));
    });
  }

  /// Multi-head attention over already projected q, k, v. Head h uses the
  /// h-th block of columns and masks[h] (empty = unmasked). When `weights`
  /// is non-null it receives each head's attention matrix.
  Var attention(Var q, Var k, Var v, int heads, const std::vector<Matrix>& masks,
                std::vector<Matrix>* weights = nullptr) {
    const Matrix& Q = value(q);
    const Matrix& K = value(k);
    const Matrix& V = value(v);
    if (Q.cols() % heads != 0) throw std::invalid_argument("heads must divide the model width");
    const Eigen::Index dk = Q.cols() / heads;
    auto probs = std::make_shared<std::vector<Matrix>>();
    Matrix out(Q.rows(), V.cols());
    for (int h = 0; h < heads; ++h) {
      const Matrix& mask = masks.empty() ? Matrix() : masks[h];
      AttentionResult r = masked_attention(Q.middleCols(h * dk, dk), K.middleCols(h * dk, dk),
                                           V.middleCols(h * dk, dk), mask);
      out.middleCols(h * dk, dk) = r.output;
      probs->push_back(std::move(r.weights));
    }
    if (weights) *weights = *probs;
    return push(std::move(out), [=, this] {
      const Matrix& g = grad_of(out_id());
      const double s = 1.0 / std::sqrt(static_cast<double>(dk));
      Matrix dq = Matrix::Zero(value(q).rows(), value(q).cols());
      Matrix dk_ = Matrix::Zero(value(k).rows(), value(k).cols());
      Matrix dv = Matrix::Zero(value(v).rows(), value(v).cols());
      for (int h = 0; h < heads; ++h) {
        const Matrix& A = (*probs)[h];
        const Matrix go = g.middleCols(h * dk, dk);
        const Matrix dA = go * value(v).middleCols(h * dk, dk).transpose();
        dv.middleCols(h * dk, dk) += A.transpose() * go;
        const Eigen::VectorXd rowdot = (dA.cwiseProduct(A)).rowwise().sum();
        const Matrix dS = A.cwiseProduct(dA - rowdot.replicate(1, dA.cols()));
        dq.middleCols(h * dk, dk) += dS * value(k).middleCols(h * dk, dk) * s;
        dk_.middleCols(h * dk, dk) += dS.transpose() * value(q).middleCols(h * dk, dk) * s;
      }
      accumulate(q, dq);
      accumulate(k, dk_);
      accumulate(v, dv);
    });
  }

  /// Inverted dropout; identity when rate is 0.
  Var dropout(Var x, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return x;
    std::bernoulli_distribution keep(1.0 - rate);
    Matrix m(value(x).rows(), value(x).cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
    return push(value(x).cwiseProduct(m), [=, this] { accumulate(x, grad_of(out_id()).cwiseProduct(m)); });
  }

  /// Mean label-smoothed cross-entropy of row-wise softmax(logits) against
  /// targets. The smoothed target puts 1 - eps + eps/V on the gold token and
  /// eps/V elsewhere.
  Var cross_entropy(Var logits, const std::vector<int>& targets, double eps) {
    const Matrix& L = value(logits);
    if (static_cast<std::size_t>(L.rows()) != targets.size()) throw std::invalid_argument("target length mismatch");
    const auto T = static_cast<double>(L.rows());
    const auto V = static_cast<double>(L.cols());
    Matrix p(L.rows(), L.cols());
    double loss = 0.0;
    for (Eigen::Index r = 0; r < L.rows(); ++r) {
      const double top = L.row(r).maxCoeff();
      const double lse = top + std::log((L.row(r).array() - top).exp().sum());
      const auto logp = (L.row(r).array() - lse).eval();
      p.row(r) = logp.exp().matrix();
      loss -= (1.0 - eps) * logp(targets[r]) + eps / V * logp.sum();
    }
    loss /= T;
    return push(Matrix::Constant(1, 1, loss), [=, this] {
      const double up = grad_of(out_id())(0, 0);
      Matrix d = p.array() - eps / V;
      for (Eigen::Index r = 0; r < d.rows(); ++r) d(r, targets[r]) -= 1.0 - eps;
      accumulate(logits, d * (up / T));
    });
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> back;
    const Matrix* external = nullptr;
  };

  // Closures look themselves up through current_; backward() sets it.
  int out_id() const { return current_; }
  const Matrix& grad_of(int id) const { return nodes_[id].grad; }

  template <typename Expr>
  void accumulate(Var v, const Expr& g) {
    Matrix& dst = nodes_[v.id].grad;
    if (dst.size() == 0) dst = Matrix::Zero(value(v).rows(), value(v).cols());
    dst += g;
  }

  Var push(Matrix value, std::function<void()> back) {
    Node n;
    n.value = std::move(value);
    if (record_ && back) {
      const int id = static_cast<int>(nodes_.size());
      n.back = [this, id, f = std::move(back)] {
        current_ = id;
        f();
      };
    }
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  bool record_;
  int current_ = -1;
  std::vector<Node> nodes_;
};

}  // namespace srseq::neural
