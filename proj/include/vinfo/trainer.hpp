#ifndef VINFO_TRAINER_HPP
#define VINFO_TRAINER_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/probes.hpp"
#include "vinfo/random.hpp"

namespace vinfo {

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

struct TrainConfig {
  double lr0 = 0.001;
  double lr_decay = 0.5;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 40;
  double min_lr = 1e-6;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lr_decay > 0.0 && lr_decay < 1.0)) throw ConfigError("lr_decay must lie in (0, 1)");
    if (!(lr0 > 0.0)) throw ConfigError("lr0 must be positive");
    if (!(min_lr < lr0)) throw ConfigError("min_lr must be below lr0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0))
      throw ConfigError("adam betas must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  }

  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  double train_bits = 0.0;
  double dev_bits = 0.0;
  double lr = 0.0;
  bool operator==(const EpochRecord&) const = default;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::vector<EpochRecord> history)
      : Error(ErrorKind::Training, what), history_(std::move(history)) {}
  const std::vector<EpochRecord>& history() const { return history_; }

 private:
  std::vector<EpochRecord> history_;
};

/// Adam moments plus hyperparameters; one instance per training run.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

/// Bias-corrected Adam update of `params` in place. Rejects non-finite
/// gradients before touching any state.
inline void adam_step(AdamState& state, ProbeParams& params, const ProbeParams& grads, double lr, int epoch = -1) {
  if (grads.size() != params.size()) throw ShapeError("gradient and parameter shapes differ");
  if (!(lr > 0.0)) throw ArgumentError("learning rate must be positive");
  if (!grads.all_finite())
    throw NumericError("non-finite gradient" + (epoch >= 0 ? " in epoch " + std::to_string(epoch) : std::string{}));
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  std::span<double> theta = params.theta();
  std::span<const double> g = grads.theta();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

struct ScheduleResult {
  double lr;
  double best_dev_loss;
};

/// Keeps the rate after a new best dev loss, otherwise multiplies it by `decay`.
inline ScheduleResult schedule_step(double current_lr, double dev_loss, double best_dev_loss, double decay = 0.5) {
  if (dev_loss < best_dev_loss) return {current_lr, dev_loss};
  return {current_lr * decay, best_dev_loss};
}

/// Probe inputs for every example with unknown slots already replaced.
class AssembledInputs {
 public:
  AssembledInputs(const ExampleTable& table, const PredictiveFamilySpec& family, const KnownSetSpec& known)
      : dim_(family.total_dim()) {
    if (table.slot_dims != family.slot_dims) throw ShapeError("example slots do not match the family's slots");
    known.validate(family);
    data_.resize(table.size * dim_);
    std::vector<std::span<const double>> slots(family.num_slots());
    for (std::size_t i = 0; i < table.size; ++i) {
      for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = table.slot_value(s, i);
      assemble_input_into(row_mut(i), family, slots, known);
    }
  }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(data_).subspan(i * dim_, dim_); }

 private:
  std::span<double> row_mut(std::size_t i) { return std::span<double>(data_).subspan(i * dim_, dim_); }
  std::size_t dim_;
  std::vector<double> data_;
};

struct EvaluationResult {
  double nll_bits = 0.0;
  double accuracy = 0.0;
  std::vector<std::uint32_t> predictions;
};

namespace detail {

inline EvaluationResult evaluate_rows(const ProbeParams& params, const AssembledInputs& inputs,
                                      const ExampleTable& table, const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw ArgumentError("evaluation split is empty");
  EvaluationResult r;
  r.predictions.reserve(rows.size());
  double total = 0.0;
  std::size_t correct = 0;
  Activations act;
  for (std::size_t i : rows) {
    compute_logits(params, inputs.row(i), act);
    const double z_y = act.logits[table.labels[i]];
    total += softmax_inplace(act.logits) - z_y;
    const auto pred = static_cast<std::uint32_t>(DistributionOverLabels{act.logits}.argmax());
    r.predictions.push_back(pred);
    if (pred == table.labels[i]) ++correct;
  }
  r.nll_bits = nats_to_bits(total / static_cast<double>(rows.size()));
  r.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return r;
}

}  // namespace detail

/// Mean NLL in bits and argmax accuracy of `params` on one partition.
inline EvaluationResult evaluate(const ProbeParams& params, const ExampleTable& table, SplitPart part,
                                 const KnownSetSpec& known) {
  const auto& rows = table.part(part);
  if (rows.empty()) throw ArgumentError("evaluation split is empty");
  AssembledInputs inputs(table, params.family(), known);
  return detail::evaluate_rows(params, inputs, table, rows);
}

struct TrainResult {
  ProbeParams params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// Minimizes train cross-entropy with Adam, halving the rate after every
/// epoch without a new best dev loss. Stops after max_epochs or once the rate
/// drops below min_lr, and returns the best-dev-loss checkpoint.
inline TrainResult train_probe(const ExampleTable& table, const PredictiveFamilySpec& family,
                               const KnownSetSpec& known, const TrainConfig& cfg) {
  cfg.validate();
  family.validate();
  if (table.train.empty() || table.dev.empty()) throw DataError("training needs non-empty train and dev portions");
  if (family.num_classes < table.num_classes)
    throw ArgumentError("family has " + std::to_string(family.num_classes) + " classes, data has " +
                        std::to_string(table.num_classes));

  const AssembledInputs inputs(table, family, known);
  std::uint64_t seed_state = cfg.seed;
  const std::uint64_t init_seed = splitmix64(seed_state);
  Rng order_rng(splitmix64(seed_state));

  TrainResult result{init_params(family, init_seed), {}, 0};
  ProbeParams params = result.params;
  AdamState adam{cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, {}, {}, 0};
  std::vector<std::size_t> order = table.train;
  std::vector<LabeledInput> batch;
  batch.reserve(cfg.batch_size);

  double lr = cfg.lr0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.max_epochs && lr >= cfg.min_lr; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back({inputs.row(order[k]), table.labels[order[k]]});
      LossAndGradient lg = loss_and_gradient(params, batch);
      if (!std::isfinite(lg.mean_nll_nats))
        throw TrainingError("non-finite training loss in epoch " + std::to_string(epoch), result.history);
      try {
        adam_step(adam, params, lg.grads, lr, static_cast<int>(epoch));
      } catch (const NumericError& e) {
        throw TrainingError(e.what(), result.history);
      }
    }
    const double train_bits = detail::evaluate_rows(params, inputs, table, table.train).nll_bits;
    const double dev_bits = detail::evaluate_rows(params, inputs, table, table.dev).nll_bits;
    if (!std::isfinite(train_bits) || !std::isfinite(dev_bits))
      throw TrainingError("training diverged in epoch " + std::to_string(epoch), result.history);
    result.history.push_back({train_bits, dev_bits, lr});
    const bool improved = dev_bits < best;
    const ScheduleResult next = schedule_step(lr, dev_bits, best, cfg.lr_decay);
    if (improved) {
      result.params = params;
      result.best_epoch = epoch;
    }
    lr = next.lr;
    best = next.best_dev_loss;
  }
  return result;
}

/// A V-entropy estimate in bits on the evaluation split, with everything
/// needed to check that two estimates may be compared.
struct VEntropyEstimate {
  double bits = 0.0;
  double train_bits = 0.0;
  double accuracy = 0.0;
  EvalSplit eval_split = EvalSplit::Dev;
  KnownSetSpec known;
  PredictiveFamilySpec family;
  TrainConfig config;
  std::vector<EpochRecord> train_history;
  std::vector<std::uint32_t> predictions;
};

inline VEntropyEstimate estimate_v_entropy(const ExampleTable& table, const PredictiveFamilySpec& family,
                                           const KnownSetSpec& known, const TrainConfig& cfg,
                                           EvalSplit eval_split = EvalSplit::Dev) {
  TrainResult trained = train_probe(table, family, known, cfg);
  const AssembledInputs inputs(table, family, known);
  const auto& eval_rows = table.part(part_of(eval_split));
  EvaluationResult eval = detail::evaluate_rows(trained.params, inputs, table, eval_rows);
  VEntropyEstimate est;
  est.bits = eval.nll_bits;
  est.train_bits = detail::evaluate_rows(trained.params, inputs, table, table.train).nll_bits;
  est.accuracy = eval.accuracy;
  est.eval_split = eval_split;
  est.known = known;
  est.family = family;
  est.config = cfg;
  est.train_history = std::move(trained.history);
  est.predictions = std::move(eval.predictions);
  return est;
}

}  // namespace vinfo

#endif  // VINFO_TRAINER_HPP
