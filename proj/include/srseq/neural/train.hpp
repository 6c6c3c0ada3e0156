#pragma once

// Teacher-forced training with Adam and an inverse square root schedule,
// plus a finite-difference gradient check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "srseq/decoder.hpp"
#include "srseq/metrics.hpp"
#include "srseq/neural/model.hpp"
#include "srseq/neural/predict.hpp"

namespace srseq::neural {

/// Linear warm-up from warmup_init_lr to lr over `warmup` updates, then
/// lr * sqrt(warmup / step), never below min_lr. Steps count from 1.
inline double learning_rate(const ModelConfig& cfg, long long step) {
  if (step < 1) step = 1;
  double lr;
  if (cfg.warmup > 0 && step <= cfg.warmup)
    lr = cfg.warmup_init_lr + (cfg.lr - cfg.warmup_init_lr) * static_cast<double>(step) / cfg.warmup;
  else
    lr = cfg.lr * std::sqrt(static_cast<double>(std::max(cfg.warmup, 1)) / static_cast<double>(step));
  return std::max(lr, cfg.min_lr);
}

class Adam {
 public:
  explicit Adam(const Parameters& params) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.push_back(Matrix::Zero(params[i].rows(), params[i].cols()));
      v_.push_back(m_.back());
    }
  }

  long long steps() const { return t_; }

  void update(Parameters& params, const std::vector<Matrix>& grads, const ModelConfig& cfg) {
    ++t_;
    const double lr = learning_rate(cfg, t_);
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg.beta1 * m_[i] + (1.0 - cfg.beta1) * grads[i];
      v_[i] = cfg.beta2 * v_[i] + (1.0 - cfg.beta2) * grads[i].cwiseProduct(grads[i]);
      params[i].array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg.adam_eps);
    }
  }

 private:
  std::vector<Matrix> m_, v_;
  long long t_ = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;  // mean example loss
  double lr = 0.0;    // learning rate at the last update
  std::optional<double> exact_match;
};

struct TrainOptions {
  int jobs = 1;
  int eval_every = 0;          // greedy exact-match check on the training set; 0 = never
  bool stop_at_exact = false;  // stop once that check reaches 1.0
  std::function<void(const EpochStats&)> on_epoch;
};

struct Model {
  ModelConfig config;
  Scheme scheme;
  Vocabulary vocab;
  Parameters params;
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;
};

namespace detail {

// Gradients of examples [first, last) summed in index order.
inline double batch_gradients(const Parameters& params, const ModelConfig& cfg, const std::vector<Example>& data,
                              const std::vector<std::size_t>& order, std::size_t first, std::size_t last,
                              int jobs, std::vector<std::mt19937_64>& rngs, std::vector<Matrix>& total) {
  const std::size_t count = last - first;
  std::vector<std::vector<Matrix>> grads(count);
  std::vector<double> losses(count);
  auto work = [&](std::size_t i) {
    std::mt19937_64* rng = cfg.dropout > 0.0 ? &rngs[i] : nullptr;
    losses[i] = example_loss(params, cfg, data[order[first + i]], &grads[i], rng);
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, count); ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += threads) work(i);
      });
    for (auto& t : pool) t.join();
  }
  total = grads[0];
  double loss = losses[0];
  for (std::size_t i = 1; i < count; ++i) {
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += grads[i][j];
    loss += losses[i];
  }
  for (auto& g : total) g /= static_cast<double>(count);
  return loss;
}

}  // namespace detail

/// Fraction of trees reproduced exactly by legality-masked search.
inline double training_exact_match(const Model& model, const std::vector<ConstituentTree>& trees, int beam) {
  std::vector<ConstituentTree> predicted;
  for (const auto& t : trees) {
    const auto pred = predict(model.params, model.config, model.vocab, model.scheme, t.words(), beam);
    predicted.push_back(decode(t.words(), pred.tokens, model.scheme).tree);
  }
  return exact_match(trees, predicted);
}

inline TrainResult train(const std::vector<ConstituentTree>& trees, const Scheme& scheme, const ModelConfig& cfg,
                         const TrainOptions& opt = {}) {
  cfg.check();
  if (trees.empty()) throw std::invalid_argument("empty training set");
  TrainResult out;
  out.model.config = cfg;
  out.model.scheme = scheme;
  out.model.vocab = Vocabulary::build(trees, scheme);
  out.model.params = init_parameters(cfg, out.model.vocab, cfg.seed);
  Model& model = out.model;

  std::vector<Example> data;
  for (const auto& t : trees) data.push_back(make_example(t, model.vocab, scheme));

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Adam adam(model.params);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += batch) {
      const std::size_t last = std::min(order.size(), first + batch);
      std::vector<std::mt19937_64> drop_rngs;
      for (std::size_t i = first; i < last; ++i) drop_rngs.emplace_back(rng());
      std::vector<Matrix> grads;
      const double loss = detail::batch_gradients(model.params, cfg, data, order, first, last, opt.jobs, drop_rngs, grads);
      if (!std::isfinite(loss))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", update " +
                            std::to_string(adam.steps() + 1));
      loss_sum += loss;
      adam.update(model.params, grads, cfg);
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(data.size()), learning_rate(cfg, adam.steps()), {}};
    const bool last_epoch = epoch == cfg.epochs;
    if (opt.eval_every > 0 && (epoch % opt.eval_every == 0 || last_epoch))
      stats.exact_match = training_exact_match(model, trees, 1);
    out.history.push_back(stats);
    if (opt.on_epoch) opt.on_epoch(stats);
    if (opt.stop_at_exact && stats.exact_match && *stats.exact_match == 1.0) break;
  }
  return out;
}

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "name[index]" of the worst entry
};

/// Analytic gradients of the summed example losses against central
/// differences, entry by entry. Relative error is
/// |a - f| / max(|a|, |f|, floor), which keeps entries whose true gradient
/// is zero from dividing noise by noise.
inline GradCheckReport grad_check(Parameters params, const ModelConfig& cfg, const std::vector<Example>& batch,
                                  double step = 1e-5, double floor = 1e-6) {
  auto total_loss = [&](const Parameters& p) {
    double s = 0.0;
    for (const auto& ex : batch) s += example_loss(p, cfg, ex);
    return s;
  };
  std::vector<Matrix> analytic;
  for (const auto& ex : batch) {
    std::vector<Matrix> g;
    example_loss(params, cfg, ex, &g);
    if (analytic.empty()) {
      analytic = std::move(g);
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) analytic[i] += g[i];
    }
  }
  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (Eigen::Index j = 0; j < params[i].size(); ++j) {
      const double keep = params[i](j);
      params[i](j) = keep + step;
      const double up = total_loss(params);
      params[i](j) = keep - step;
      const double down = total_loss(params);
      params[i](j) = keep;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[i](j);
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), floor});
      report.max_absolute_error = std::max(report.max_absolute_error, abs_err);
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst = params.name(i) + "[" + std::to_string(j) + "]";
      }
      ++report.checked;
    }
  }
  return report;
}

}  // namespace srseq::neural
