#ifndef VINFO_PROBES_HPP
#define VINFO_PROBES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vinfo/error.hpp"
#include "vinfo/random.hpp"

namespace vinfo {

enum class Architecture { AffineSoftmax, OneHiddenLayer };
enum class Activation { ReLU };

inline const char* to_string(Architecture a) {
  return a == Architecture::AffineSoftmax ? "affine_softmax" : "one_hidden_layer";
}

/// A probe family: the input slots it reads, its architecture, and the label
/// space. An optional dimension mask restricts the family to members with
/// zero weight on inactive input dimensions (a nested sub-family).
struct PredictiveFamilySpec {
  Architecture architecture = Architecture::AffineSoftmax;
  std::vector<std::size_t> slot_dims;
  std::size_t hidden_dim = 0;
  Activation activation = Activation::ReLU;
  std::size_t num_classes = 2;
  // Empty means every input dimension is active.
  std::vector<bool> active;

  std::size_t num_slots() const { return slot_dims.size(); }
  std::size_t total_dim() const { return std::accumulate(slot_dims.begin(), slot_dims.end(), std::size_t{0}); }
  std::size_t slot_offset(std::size_t slot) const {
    return std::accumulate(slot_dims.begin(), slot_dims.begin() + static_cast<std::ptrdiff_t>(slot), std::size_t{0});
  }
  bool is_active(std::size_t dim) const { return active.empty() || active[dim]; }
  bool is_masked() const { return !active.empty(); }

  void validate() const {
    if (slot_dims.empty() || total_dim() == 0) throw ArgumentError("predictive family needs a positive total input dim");
    if (num_classes < 2) throw ArgumentError("predictive family needs at least 2 classes");
    if (architecture == Architecture::OneHiddenLayer && hidden_dim < 1)
      throw ArgumentError("one-hidden-layer family needs hidden_dim >= 1");
    if (!active.empty() && active.size() != total_dim())
      throw ShapeError("active mask has " + std::to_string(active.size()) + " entries, expected " +
                       std::to_string(total_dim()));
  }

  bool operator==(const PredictiveFamilySpec&) const = default;
};

inline PredictiveFamilySpec affine_family(std::vector<std::size_t> slot_dims, std::size_t num_classes) {
  PredictiveFamilySpec f;
  f.slot_dims = std::move(slot_dims);
  f.num_classes = num_classes;
  f.validate();
  return f;
}

inline PredictiveFamilySpec mlp_family(std::vector<std::size_t> slot_dims, std::size_t hidden_dim,
                                       std::size_t num_classes) {
  PredictiveFamilySpec f;
  f.architecture = Architecture::OneHiddenLayer;
  f.slot_dims = std::move(slot_dims);
  f.hidden_dim = hidden_dim;
  f.num_classes = num_classes;
  f.validate();
  return f;
}

/// Restricts `spec` to members whose weights on every dimension outside
/// `active_dims` are zero. An empty active set leaves only the biases, so the
/// family predicts one constant distribution.
inline PredictiveFamilySpec zero_masked_family(const PredictiveFamilySpec& spec,
                                               std::span<const std::size_t> active_dims) {
  spec.validate();
  const std::size_t total = spec.total_dim();
  std::vector<bool> mask(total, false);
  for (std::size_t d : active_dims) {
    if (d >= total) throw ArgumentError("active dim " + std::to_string(d) + " outside input dim " + std::to_string(total));
    mask[d] = spec.is_active(d);
  }
  PredictiveFamilySpec out = spec;
  if (std::all_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    out.active.clear();
  else
    out.active = std::move(mask);
  return out;
}

/// Which slots the probe observes. Unknown slots are fed a constant
/// placeholder (zeros unless configured).
struct KnownSetSpec {
  std::vector<bool> known;
  std::vector<std::vector<double>> placeholders;

  static KnownSetSpec of(const PredictiveFamilySpec& family, std::span<const std::size_t> known_slots,
                         double placeholder_fill = 0.0) {
    KnownSetSpec k;
    k.known.assign(family.num_slots(), false);
    for (std::size_t s : known_slots) {
      if (s >= family.num_slots()) throw ArgumentError("known slot " + std::to_string(s) + " out of range");
      k.known[s] = true;
    }
    for (std::size_t d : family.slot_dims) k.placeholders.emplace_back(d, placeholder_fill);
    return k;
  }
  static KnownSetSpec of(const PredictiveFamilySpec& family, std::initializer_list<std::size_t> known_slots,
                         double placeholder_fill = 0.0) {
    return of(family, std::span<const std::size_t>(known_slots.begin(), known_slots.size()), placeholder_fill);
  }

  bool is_known(std::size_t slot) const { return known[slot]; }

  std::vector<std::size_t> known_slots() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < known.size(); ++i)
      if (known[i]) out.push_back(i);
    return out;
  }

  /// True when every slot known here is also known in `other`.
  bool subset_of(const KnownSetSpec& other) const {
    if (known.size() != other.known.size()) return false;
    for (std::size_t i = 0; i < known.size(); ++i)
      if (known[i] && !other.known[i]) return false;
    return true;
  }

  void validate(const PredictiveFamilySpec& family) const {
    if (known.size() != family.num_slots() || placeholders.size() != family.num_slots())
      throw ShapeError("known set covers " + std::to_string(known.size()) + " slots, family has " +
                       std::to_string(family.num_slots()));
    for (std::size_t s = 0; s < placeholders.size(); ++s)
      if (placeholders[s].size() != family.slot_dims[s])
        throw ShapeError("placeholder for slot " + std::to_string(s) + " has dim " +
                         std::to_string(placeholders[s].size()) + ", expected " + std::to_string(family.slot_dims[s]));
  }

  bool operator==(const KnownSetSpec&) const = default;
};

/// Writes the probe input for one example into `out`: slots in order, known
/// slots copied from `slot_values`, unknown slots replaced by placeholders.
/// A slot value may be empty when the slot is unknown.
inline void assemble_input_into(std::span<double> out, const PredictiveFamilySpec& family,
                                std::span<const std::span<const double>> slot_values, const KnownSetSpec& known) {
  if (out.size() != family.total_dim()) throw ShapeError("output buffer does not match family input dim");
  std::size_t offset = 0;
  for (std::size_t s = 0; s < family.num_slots(); ++s) {
    const std::size_t d = family.slot_dims[s];
    if (known.is_known(s)) {
      if (s >= slot_values.size() || slot_values[s].empty())
        throw ArgumentError("known slot " + std::to_string(s) + " has no value");
      if (slot_values[s].size() != d)
        throw ShapeError("slot " + std::to_string(s) + " has dim " + std::to_string(slot_values[s].size()) +
                         ", expected " + std::to_string(d));
      std::copy(slot_values[s].begin(), slot_values[s].end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    } else {
      std::copy(known.placeholders[s].begin(), known.placeholders[s].end(),
                out.begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offset += d;
  }
}

inline std::vector<double> assemble_input(const PredictiveFamilySpec& family,
                                          std::span<const std::span<const double>> slot_values,
                                          const KnownSetSpec& known) {
  known.validate(family);
  std::vector<double> out(family.total_dim());
  assemble_input_into(out, family, slot_values, known);
  return out;
}

/// Flat parameter vector with typed views. For AffineSoftmax the layout is
/// W (classes x in, row-major) then b; for OneHiddenLayer it is W1 (hidden x in),
/// b1, W2 (classes x hidden), b2. Gradients use the same type.
class ProbeParams {
 public:
  ProbeParams() = default;
  explicit ProbeParams(PredictiveFamilySpec family) : family_(std::move(family)) {
    family_.validate();
    theta_.assign(size_for(family_), 0.0);
  }

  const PredictiveFamilySpec& family() const { return family_; }
  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }
  std::size_t size() const { return theta_.size(); }

  std::size_t in_dim() const { return family_.total_dim(); }
  std::size_t classes() const { return family_.num_classes; }
  std::size_t hidden() const { return family_.hidden_dim; }
  bool is_mlp() const { return family_.architecture == Architecture::OneHiddenLayer; }

  // AffineSoftmax views.
  std::span<double> W() { return slice(0, classes() * in_dim()); }
  std::span<const double> W() const { return slice(0, classes() * in_dim()); }
  std::span<double> b() { return slice(classes() * in_dim(), classes()); }
  std::span<const double> b() const { return slice(classes() * in_dim(), classes()); }

  // OneHiddenLayer views.
  std::span<double> W1() { return slice(0, hidden() * in_dim()); }
  std::span<const double> W1() const { return slice(0, hidden() * in_dim()); }
  std::span<double> b1() { return slice(hidden() * in_dim(), hidden()); }
  std::span<const double> b1() const { return slice(hidden() * in_dim(), hidden()); }
  std::span<double> W2() { return slice(hidden() * (in_dim() + 1), classes() * hidden()); }
  std::span<const double> W2() const { return slice(hidden() * (in_dim() + 1), classes() * hidden()); }
  std::span<double> b2() { return slice(hidden() * (in_dim() + 1) + classes() * hidden(), classes()); }
  std::span<const double> b2() const { return slice(hidden() * (in_dim() + 1) + classes() * hidden(), classes()); }

  bool all_finite() const {
    return std::all_of(theta_.begin(), theta_.end(), [](double v) { return std::isfinite(v); });
  }

  /// Zeroes the input-weight columns of dims outside the family mask.
  void apply_mask() {
    if (!family_.is_masked()) return;
    const std::size_t rows = is_mlp() ? hidden() : classes();
    std::span<double> w = is_mlp() ? W1() : W();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t d = 0; d < in_dim(); ++d)
        if (!family_.is_active(d)) w[r * in_dim() + d] = 0.0;
  }

  bool operator==(const ProbeParams&) const = default;

 private:
  static std::size_t size_for(const PredictiveFamilySpec& f) {
    const std::size_t in = f.total_dim();
    if (f.architecture == Architecture::AffineSoftmax) return f.num_classes * (in + 1);
    return f.hidden_dim * (in + 1) + f.num_classes * (f.hidden_dim + 1);
  }
  std::span<double> slice(std::size_t off, std::size_t n) { return std::span<double>(theta_).subspan(off, n); }
  std::span<const double> slice(std::size_t off, std::size_t n) const {
    return std::span<const double>(theta_).subspan(off, n);
  }

  PredictiveFamilySpec family_;
  std::vector<double> theta_;
};

/// Zeros for AffineSoftmax; uniform in +-1/sqrt(fan_in) per layer for
/// OneHiddenLayer. Masked input columns start (and stay) at zero.
inline ProbeParams init_params(const PredictiveFamilySpec& family, std::uint64_t seed) {
  ProbeParams p(family);
  if (p.is_mlp()) {
    Rng rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(p.in_dim()));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(p.hidden()));
    for (double& v : p.W1()) v = rng.uniform(-bound1, bound1);
    for (double& v : p.b1()) v = rng.uniform(-bound1, bound1);
    for (double& v : p.W2()) v = rng.uniform(-bound2, bound2);
    for (double& v : p.b2()) v = rng.uniform(-bound2, bound2);
    p.apply_mask();
  }
  return p;
}

struct DistributionOverLabels {
  std::vector<double> probs;

  std::size_t argmax() const {
    // std::max_element keeps the first maximum, so ties go to the lowest index.
    return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  }
};

namespace detail {

struct Activations {
  std::vector<double> pre;     // hidden pre-activation (MLP only)
  std::vector<double> hidden;  // hidden output (MLP only)
  std::vector<double> logits;
};

inline void affine(std::span<const double> w, std::span<const double> bias, std::span<const double> x,
                   std::span<double> out) {
  const std::size_t n_in = x.size();
  std::copy(bias.begin(), bias.end(), out.begin());
  for (std::size_t d = 0; d < n_in; ++d) {
    const double xd = x[d];
    if (xd == 0.0) continue;
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += w[r * n_in + d] * xd;
  }
}

inline void compute_logits(const ProbeParams& p, std::span<const double> x, Activations& act) {
  act.logits.assign(p.classes(), 0.0);
  if (!p.is_mlp()) {
    affine(p.W(), p.b(), x, act.logits);
    return;
  }
  act.pre.assign(p.hidden(), 0.0);
  affine(p.W1(), p.b1(), x, act.pre);
  act.hidden.resize(p.hidden());
  for (std::size_t h = 0; h < p.hidden(); ++h) act.hidden[h] = act.pre[h] > 0.0 ? act.pre[h] : 0.0;
  affine(p.W2(), p.b2(), act.hidden, act.logits);
}

/// Softmax in place with max subtraction; returns log-sum-exp of the input.
inline double softmax_inplace(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
  return m + std::log(s);
}

inline void check_input(const ProbeParams& p, std::span<const double> x) {
  if (x.size() != p.in_dim())
    throw ShapeError("input has dim " + std::to_string(x.size()) + ", family expects " + std::to_string(p.in_dim()));
  for (double v : x)
    if (!std::isfinite(v)) throw NumericError("non-finite probe input");
}

}  // namespace detail

inline DistributionOverLabels forward(const ProbeParams& params, std::span<const double> input) {
  detail::check_input(params, input);
  detail::Activations act;
  detail::compute_logits(params, input, act);
  detail::softmax_inplace(act.logits);
  return DistributionOverLabels{std::move(act.logits)};
}

/// Negative log-likelihood of `label` in nats.
inline double nll(const ProbeParams& params, std::span<const double> input, std::size_t label) {
  detail::Activations act;
  detail::compute_logits(params, input, act);
  const double z_y = act.logits[label];
  const double lse = detail::softmax_inplace(act.logits);
  return lse - z_y;
}

struct LabeledInput {
  std::span<const double> input;
  std::size_t label;
};

struct LossAndGradient {
  double mean_nll_nats = 0.0;
  ProbeParams grads;
};

/// Mean cross-entropy (nats) over the batch and its exact gradient. Gradients
/// on masked input dimensions are zero so updates stay inside the family.
inline LossAndGradient loss_and_gradient(const ProbeParams& params, std::span<const LabeledInput> batch) {
  if (batch.empty()) throw ArgumentError("loss_and_gradient on an empty batch");
  LossAndGradient out{0.0, ProbeParams(params.family())};
  ProbeParams& g = out.grads;
  const std::size_t n_in = params.in_dim();
  const std::size_t n_cls = params.classes();
  const double scale = 1.0 / static_cast<double>(batch.size());
  detail::Activations act;
  std::vector<double> g_hidden;

  for (const LabeledInput& ex : batch) {
    if (ex.label >= n_cls) throw ArgumentError("label " + std::to_string(ex.label) + " out of range");
    if (ex.input.size() != n_in) throw ShapeError("batch input dim mismatch");
    detail::compute_logits(params, ex.input, act);
    const double z_y = act.logits[ex.label];
    out.mean_nll_nats += (detail::softmax_inplace(act.logits) - z_y) * scale;
    std::vector<double>& g_logits = act.logits;  // now probabilities
    g_logits[ex.label] -= 1.0;
    for (double& v : g_logits) v *= scale;

    if (!params.is_mlp()) {
      std::span<double> gW = g.W();
      for (std::size_t d = 0; d < n_in; ++d) {
        const double xd = ex.input[d];
        if (xd == 0.0) continue;
        for (std::size_t c = 0; c < n_cls; ++c) gW[c * n_in + d] += g_logits[c] * xd;
      }
      for (std::size_t c = 0; c < n_cls; ++c) g.b()[c] += g_logits[c];
      continue;
    }

    const std::size_t n_h = params.hidden();
    std::span<const double> W2 = params.W2();
    std::span<double> gW2 = g.W2();
    for (std::size_t c = 0; c < n_cls; ++c) {
      g.b2()[c] += g_logits[c];
      for (std::size_t h = 0; h < n_h; ++h) gW2[c * n_h + h] += g_logits[c] * act.hidden[h];
    }
    g_hidden.assign(n_h, 0.0);
    for (std::size_t c = 0; c < n_cls; ++c)
      for (std::size_t h = 0; h < n_h; ++h) g_hidden[h] += W2[c * n_h + h] * g_logits[c];
    std::span<double> gW1 = g.W1();
    for (std::size_t h = 0; h < n_h; ++h) {
      if (act.pre[h] <= 0.0) continue;
      g.b1()[h] += g_hidden[h];
      for (std::size_t d = 0; d < n_in; ++d) {
        const double xd = ex.input[d];
        if (xd != 0.0) gW1[h * n_in + d] += g_hidden[h] * xd;
      }
    }
  }
  g.apply_mask();
  return out;
}

}  // namespace vinfo

#endif  // VINFO_PROBES_HPP
