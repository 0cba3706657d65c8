#pragma once

#include <json.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/lexicon.hpp"
#include "revsent/nn/adam.hpp"
#include "revsent/nn/checkpoint.hpp"
#include "revsent/nn/grad_check.hpp"
#include "revsent/nn/init.hpp"
#include "revsent/nn/layers.hpp"
#include "revsent/textenc.hpp"

namespace revsent::models {

using nn::Activation;
using nn::IdBatch;
using nn::Mode;
using nn::Param;
using nn::Tensor;

enum class Kind { Cnn, BiLstm };

inline std::string kind_name(Kind k) { return k == Kind::Cnn ? "cnn" : "bilstm"; }

inline Kind parse_kind(const std::string& s) {
  if (s == "cnn") return Kind::Cnn;
  if (s == "bilstm") return Kind::BiLstm;
  throw Error("unknown model kind '" + s + "' (expected cnn or bilstm)");
}

struct ModelSpec {
  Kind kind = Kind::Cnn;
  std::size_t max_words = textenc::kDefaultMaxWords;
  std::size_t embedding_dim = 64;
  std::size_t max_length = textenc::kDefaultMaxLength;
  std::size_t filters = 128;
  std::size_t kernel_size = 5;
  std::size_t units = 64;
  std::size_t dense_units = 64;
  double dropout = 0.5;
  std::size_t classes = kNumClasses;

  void validate() const {
    const std::pair<std::size_t, const char*> counts[] = {
        {max_words, "max_words"}, {embedding_dim, "embedding_dim"}, {max_length, "max_length"},
        {filters, "filters"},     {kernel_size, "kernel_size"},     {units, "units"},
        {dense_units, "dense_units"}};
    for (auto [v, name] : counts) {
      if (v == 0) throw Error(std::string("model spec: ") + name + " must be positive");
    }
    if (classes != kNumClasses) throw Error("model spec: classes must be 3");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("model spec: dropout must be in [0, 1)");
    if (kind == Kind::Cnn && max_length < kernel_size) {
      throw Error("model spec: max_length shorter than the convolution kernel");
    }
  }
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double validation_fraction = 0.1;
  std::size_t patience = 5;  // 0 disables early stopping
  bool restore_best = true;
  std::uint64_t seed = 0;
  nn::AdamConfig adam;

  void validate() const {
    if (epochs == 0) throw Error("train config: epochs must be positive");
    if (batch_size == 0) throw Error("train config: batch_size must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
      throw Error("train config: validation_fraction must be in (0, 1)");
    }
    if (patience > epochs) throw Error("train config: patience exceeds epochs");
  }
};

struct TrainHistory {
  std::vector<double> train_loss, train_accuracy, val_loss, val_accuracy;
  std::size_t stopped_epoch = 0;  // 1-based; last epoch run
  std::size_t best_epoch = 0;     // 1-based; lowest validation loss
};

// Padded id sequences with integer labels.
struct EncodedSet {
  std::size_t length = 0;
  std::vector<int> ids;  // size() * length
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }

  void add(const std::vector<int>& seq, int label) {
    if (length == 0) length = seq.size();
    if (seq.size() != length) throw ShapeError("encoded sequence length mismatch");
    ids.insert(ids.end(), seq.begin(), seq.end());
    labels.push_back(label);
  }

  IdBatch gather(std::span<const std::size_t> rows) const {
    IdBatch b{rows.size(), length, {}};
    b.ids.reserve(rows.size() * length);
    for (auto r : rows) b.ids.insert(b.ids.end(), ids.begin() + r * length, ids.begin() + (r + 1) * length);
    return b;
  }

  std::vector<int> gather_labels(std::span<const std::size_t> rows) const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(labels[r]);
    return out;
  }
};

// ------------------------------------------------------------------ models

struct Trace {
  virtual ~Trace() = default;
  Tensor logits;
};

class Classifier {
 public:
  explicit Classifier(ModelSpec spec) : spec_(spec) {}
  virtual ~Classifier() = default;
  Classifier(const Classifier&) = delete;
  Classifier& operator=(const Classifier&) = delete;

  const ModelSpec& spec() const { return spec_; }
  std::string architecture() const { return kind_name(spec_.kind) + "-v1"; }

  virtual std::vector<Param*> params() = 0;

  // Logits [B x 3]; dropout masks are drawn from `rng` in train mode.
  virtual std::unique_ptr<Trace> forward(const IdBatch& ids, Mode mode, Rng* rng) const = 0;
  virtual void backward(const Trace& trace, const Tensor& grad_logits) = 0;

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (const Param* p : params()) n += p->value.size();
    return n;
  }

  void zero_grads() {
    for (Param* p : params()) p->grad.zero();
  }

 protected:
  ModelSpec spec_;
};

// Embedding -> Conv1D(relu) -> GlobalMaxPool -> Dense(relu) -> Dropout -> Dense(softmax)
class CnnClassifier final : public Classifier {
 public:
  CnnClassifier(ModelSpec spec, Rng& rng) : Classifier(spec) {
    const auto& s = spec_;
    embedding_ = Param("embedding/table", {s.max_words, s.embedding_dim});
    conv_.kernel = Param("conv1d/kernel", {s.kernel_size, s.embedding_dim, s.filters});
    conv_.bias = Param("conv1d/bias", {s.filters});
    hidden_.weight = Param("dense_1/weight", {s.filters, s.dense_units});
    hidden_.bias = Param("dense_1/bias", {s.dense_units});
    output_.weight = Param("dense_2/weight", {s.dense_units, s.classes});
    output_.bias = Param("dense_2/bias", {s.classes});

    nn::init::uniform(embedding_.value, 0.05, rng);
    nn::init::glorot_uniform(conv_.kernel.value, s.kernel_size * s.embedding_dim,
                             s.kernel_size * s.filters, rng);
    nn::init::glorot_uniform(hidden_.weight.value, s.filters, s.dense_units, rng);
    nn::init::glorot_uniform(output_.weight.value, s.dense_units, s.classes, rng);
  }

  std::vector<Param*> params() override {
    return {&embedding_, &conv_.kernel, &conv_.bias, &hidden_.weight,
            &hidden_.bias, &output_.weight, &output_.bias};
  }

  struct CnnTrace : Trace {
    IdBatch ids;
    Tensor embedded, conv;
    nn::PoolResult pool;
    Tensor hidden;
    nn::DropoutResult drop;
  };

  std::unique_ptr<Trace> forward(const IdBatch& ids, Mode mode, Rng* rng) const override {
    auto tr = std::make_unique<CnnTrace>();
    tr->ids = ids;
    tr->embedded = nn::embedding_forward(ids, embedding_.value);
    tr->conv = nn::conv1d_forward(tr->embedded, conv_.kernel.value, conv_.bias.value);
    tr->pool = nn::global_max_pool(tr->conv);
    tr->hidden = nn::dense_forward(tr->pool.out, hidden_.weight.value, hidden_.bias.value, Activation::Relu);
    tr->drop = nn::dropout(tr->hidden, spec_.dropout, mode, rng);
    tr->logits = nn::dense_forward(tr->drop.out, output_.weight.value, output_.bias.value, Activation::None);
    return tr;
  }

  void backward(const Trace& base, const Tensor& grad_logits) override {
    const auto& tr = dynamic_cast<const CnnTrace&>(base);
    Tensor g = nn::dense_backward(tr.drop.out, output_.weight.value, Activation::None, tr.logits,
                                  grad_logits, output_.weight.grad, output_.bias.grad);
    g = nn::dropout_backward(tr.drop, g);
    g = nn::dense_backward(tr.pool.out, hidden_.weight.value, Activation::Relu, tr.hidden, g,
                           hidden_.weight.grad, hidden_.bias.grad);
    g = nn::global_max_pool_backward(tr.pool, tr.conv.shape, g);
    Tensor g_emb;
    nn::conv1d_backward(tr.embedded, conv_.kernel.value, tr.conv, g, conv_.kernel.grad,
                        conv_.bias.grad, &g_emb);
    nn::embedding_backward(tr.ids, g_emb, embedding_.grad);
  }

 private:
  Param embedding_;
  nn::Conv1DParams conv_;
  nn::DenseParams hidden_, output_;
};

// Embedding -> BiLSTM -> Dropout -> Dense(relu) -> Dropout -> Dense(softmax)
class BiLstmClassifier final : public Classifier {
 public:
  BiLstmClassifier(ModelSpec spec, Rng& rng) : Classifier(spec) {
    const auto& s = spec_;
    embedding_ = Param("embedding/table", {s.max_words, s.embedding_dim});
    const std::pair<nn::LstmParams*, const char*> directions[] = {{&fwd_, "forward"}, {&bwd_, "reverse"}};
    for (auto [p, dir] : directions) {
      const std::string prefix = std::string("bilstm/") + dir + "/";
      p->input = Param(prefix + "input", {s.embedding_dim, 4 * s.units});
      p->recurrent = Param(prefix + "recurrent", {s.units, 4 * s.units});
      p->bias = Param(prefix + "bias", {4 * s.units});
    }
    hidden_.weight = Param("dense_1/weight", {2 * s.units, s.dense_units});
    hidden_.bias = Param("dense_1/bias", {s.dense_units});
    output_.weight = Param("dense_2/weight", {s.dense_units, s.classes});
    output_.bias = Param("dense_2/bias", {s.classes});

    nn::init::uniform(embedding_.value, 0.05, rng);
    for (auto* p : {&fwd_, &bwd_}) {
      nn::init::glorot_uniform(p->input.value, s.embedding_dim, 4 * s.units, rng);
      nn::init::orthogonal(p->recurrent.value, rng);
      // forget gate slice starts at `units`
      for (std::size_t u = 0; u < s.units; ++u) p->bias.value[s.units + u] = 1.0;
    }
    nn::init::glorot_uniform(hidden_.weight.value, 2 * s.units, s.dense_units, rng);
    nn::init::glorot_uniform(output_.weight.value, s.dense_units, s.classes, rng);
  }

  std::vector<Param*> params() override {
    return {&embedding_,     &fwd_.input,    &fwd_.recurrent, &fwd_.bias,
            &bwd_.input,     &bwd_.recurrent, &bwd_.bias,     &hidden_.weight,
            &hidden_.bias,   &output_.weight, &output_.bias};
  }

  struct BiLstmTrace : Trace {
    IdBatch ids;
    Tensor embedded;
    nn::BiLstmTrace lstm;
    nn::DropoutResult drop1;
    Tensor hidden;
    nn::DropoutResult drop2;
  };

  std::unique_ptr<Trace> forward(const IdBatch& ids, Mode mode, Rng* rng) const override {
    auto tr = std::make_unique<BiLstmTrace>();
    tr->ids = ids;
    tr->embedded = nn::embedding_forward(ids, embedding_.value);
    tr->lstm = nn::bilstm_forward(tr->embedded, fwd_, bwd_);
    tr->drop1 = nn::dropout(tr->lstm.out, spec_.dropout, mode, rng);
    tr->hidden = nn::dense_forward(tr->drop1.out, hidden_.weight.value, hidden_.bias.value, Activation::Relu);
    tr->drop2 = nn::dropout(tr->hidden, spec_.dropout, mode, rng);
    tr->logits = nn::dense_forward(tr->drop2.out, output_.weight.value, output_.bias.value, Activation::None);
    return tr;
  }

  void backward(const Trace& base, const Tensor& grad_logits) override {
    const auto& tr = dynamic_cast<const BiLstmTrace&>(base);
    Tensor g = nn::dense_backward(tr.drop2.out, output_.weight.value, Activation::None, tr.logits,
                                  grad_logits, output_.weight.grad, output_.bias.grad);
    g = nn::dropout_backward(tr.drop2, g);
    g = nn::dense_backward(tr.drop1.out, hidden_.weight.value, Activation::Relu, tr.hidden, g,
                           hidden_.weight.grad, hidden_.bias.grad);
    g = nn::dropout_backward(tr.drop1, g);
    const Tensor g_emb = nn::bilstm_backward(tr.lstm, fwd_, bwd_, g);
    nn::embedding_backward(tr.ids, g_emb, embedding_.grad);
  }

 private:
  Param embedding_;
  nn::LstmParams fwd_, bwd_;
  nn::DenseParams hidden_, output_;
};

inline std::unique_ptr<Classifier> build(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  if (spec.kind == Kind::Cnn) return std::make_unique<CnnClassifier>(spec, rng);
  return std::make_unique<BiLstmClassifier>(spec, rng);
}

// ------------------------------------------------------------- prediction

// Lowest index wins exact ties.
inline int argmax_row(const double* p, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (p[j] > p[best]) best = j;
  }
  return static_cast<int>(best);
}

struct Prediction {
  std::vector<int> classes;
  Tensor probabilities;  // [N x 3]
};

inline constexpr std::size_t kEvalBatch = 64;

inline Prediction predict(const Classifier& model, const EncodedSet& data,
                          std::size_t batch_size = kEvalBatch) {
  const std::size_t n = data.size(), k = model.spec().classes;
  Prediction out{std::vector<int>(n), Tensor({n, k})};
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += batch_size) {
    rows.resize(std::min(batch_size, n - start));
    std::iota(rows.begin(), rows.end(), start);
    Tensor probs = model.forward(data.gather(rows), Mode::Infer, nullptr)->logits;
    nn::softmax_rows(probs);
    std::copy(probs.data.begin(), probs.data.end(), out.probabilities.ptr() + start * k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.classes[start + r] = argmax_row(probs.ptr() + r * k, k);
    }
  }
  return out;
}

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<double> row_losses;
  std::vector<int> predicted;
};

inline Evaluation evaluate(const Classifier& model, const EncodedSet& data,
                           std::size_t batch_size = kEvalBatch) {
  Evaluation ev;
  const std::size_t n = data.size(), k = model.spec().classes;
  if (n == 0) throw Error("cannot evaluate an empty set");
  std::vector<std::size_t> rows;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += batch_size) {
    rows.resize(std::min(batch_size, n - start));
    std::iota(rows.begin(), rows.end(), start);
    const auto labels = data.gather_labels(rows);
    const auto tr = model.forward(data.gather(rows), Mode::Infer, nullptr);
    const auto loss = nn::softmax_crossentropy(tr->logits, labels);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int pred = argmax_row(tr->logits.ptr() + r * k, k);
      ev.predicted.push_back(pred);
      ev.row_losses.push_back(loss.row_losses[r]);
      if (pred == labels[r]) ++correct;
    }
  }
  ev.loss = std::accumulate(ev.row_losses.begin(), ev.row_losses.end(), 0.0) / static_cast<double>(n);
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return ev;
}

// ---------------------------------------------------------------- training

namespace detail {

inline std::vector<Tensor> snapshot(Classifier& m) {
  std::vector<Tensor> out;
  for (const Param* p : m.params()) out.push_back(p->value);
  return out;
}

inline void restore(Classifier& m, const std::vector<Tensor>& values) {
  auto ps = m.params();
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = values[i];
}

}  // namespace detail

// Keras-style hold-out: the last `fraction` of rows, in input order.
inline std::pair<EncodedSet, EncodedSet> carve_validation(const EncodedSet& data, double fraction) {
  const std::size_t n = data.size();
  const std::size_t n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5));
  if (n_val == 0 || n_val >= n) throw Error("validation split leaves an empty set");
  EncodedSet train, val;
  train.length = val.length = data.length;
  for (std::size_t r = 0; r < n; ++r) {
    auto& dst = r < n - n_val ? train : val;
    dst.ids.insert(dst.ids.end(), data.ids.begin() + r * data.length,
                   data.ids.begin() + (r + 1) * data.length);
    dst.labels.push_back(data.labels[r]);
  }
  return {std::move(train), std::move(val)};
}

// Mini-batch Adam with seeded per-epoch shuffling and early stopping on
// validation loss. When `validation` is absent the last validation_fraction
// of `train_data` is held out.
inline TrainHistory train(Classifier& model, const EncodedSet& train_data, const TrainConfig& config,
                          const EncodedSet* validation = nullptr) {
  config.validate();
  EncodedSet carved_train, carved_val;
  const EncodedSet* fit = &train_data;
  if (!validation) {
    std::tie(carved_train, carved_val) = carve_validation(train_data, config.validation_fraction);
    fit = &carved_train;
    validation = &carved_val;
  }
  if (fit->size() == 0) throw Error("empty training set");
  if (validation->size() == 0) throw Error("empty validation set");

  Rng root(config.seed);
  Rng shuffle_rng = root.fork(1);
  Rng dropout_rng = root.fork(2);
  auto params = model.params();
  auto adam = nn::make_adam(params, config.adam);

  TrainHistory h;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_values;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(fit->size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = model.spec().classes;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      std::span<const std::size_t> rows(order.data() + start, len);
      const auto labels = fit->gather_labels(rows);
      model.zero_grads();
      const auto tr = model.forward(fit->gather(rows), Mode::Train, &dropout_rng);
      const auto loss = nn::softmax_crossentropy(tr->logits, labels);
      if (!std::isfinite(loss.loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(start));
      }
      model.backward(*tr, loss.grad);
      nn::adam_step(params, adam);
      loss_sum += loss.loss * static_cast<double>(len);
      for (std::size_t r = 0; r < len; ++r) {
        if (argmax_row(tr->logits.ptr() + r * k, k) == labels[r]) ++correct;
      }
    }
    const auto val = evaluate(model, *validation);
    if (!std::isfinite(val.loss)) {
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    h.train_loss.push_back(loss_sum / static_cast<double>(fit->size()));
    h.train_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(fit->size()));
    h.val_loss.push_back(val.loss);
    h.val_accuracy.push_back(val.accuracy);
    h.stopped_epoch = epoch;
    if (val.loss < best_loss) {
      best_loss = val.loss;
      h.best_epoch = epoch;
      since_best = 0;
      if (config.restore_best) best_values = detail::snapshot(model);
    } else {
      ++since_best;
    }
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  if (config.restore_best && !best_values.empty() && h.best_epoch != h.stopped_epoch) {
    detail::restore(model, best_values);
  }
  return h;
}

// ---------------------------------------------------------- grad checking

// Finite-difference check over every parameter block. Dropout runs in train
// mode with the same mask on every evaluation.
inline nn::GradCheckReport grad_check(Classifier& model, const IdBatch& ids,
                                      const std::vector<int>& targets,
                                      const nn::GradCheckOptions& opt = {},
                                      std::uint64_t dropout_seed = 7) {
  auto loss_at = [&] {
    Rng rng(dropout_seed);
    const auto tr = model.forward(ids, Mode::Train, &rng);
    return nn::softmax_crossentropy(tr->logits, targets).loss;
  };
  auto grads = [&] {
    Rng rng(dropout_seed);
    const auto tr = model.forward(ids, Mode::Train, &rng);
    model.backward(*tr, nn::softmax_crossentropy(tr->logits, targets).grad);
  };
  return nn::grad_check(model.params(), loss_at, grads, opt);
}

// ------------------------------------------------------------- persistence

inline nlohmann::json to_json(const ModelSpec& s) {
  return {{"kind", kind_name(s.kind)},     {"max_words", s.max_words},
          {"embedding_dim", s.embedding_dim}, {"max_length", s.max_length},
          {"filters", s.filters},           {"kernel_size", s.kernel_size},
          {"units", s.units},               {"dense_units", s.dense_units},
          {"dropout", s.dropout},           {"classes", s.classes}};
}

inline ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.kind = parse_kind(j.at("kind").get<std::string>());
  s.max_words = j.at("max_words");
  s.embedding_dim = j.at("embedding_dim");
  s.max_length = j.at("max_length");
  s.filters = j.at("filters");
  s.kernel_size = j.at("kernel_size");
  s.units = j.at("units");
  s.dense_units = j.at("dense_units");
  s.dropout = j.at("dropout");
  s.classes = j.at("classes");
  s.validate();
  return s;
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"validation_fraction", c.validation_fraction},
          {"patience", c.patience},
          {"restore_best", c.restore_best},
          {"seed", c.seed},
          {"adam",
           {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}}}};
}

inline nlohmann::json to_json(const TrainHistory& h) {
  return {{"train_loss", h.train_loss},   {"train_accuracy", h.train_accuracy},
          {"val_loss", h.val_loss},       {"val_accuracy", h.val_accuracy},
          {"stopped_epoch", h.stopped_epoch}, {"best_epoch", h.best_epoch}};
}

inline nn::checkpoint::Checkpoint to_checkpoint(Classifier& model) {
  nn::checkpoint::Checkpoint ck;
  ck.architecture = model.architecture();
  for (const Param* p : model.params()) ck.blocks.push_back({p->name, p->value});
  return ck;
}

inline void load_weights(Classifier& model, const nn::checkpoint::Checkpoint& ck) {
  if (ck.architecture != model.architecture()) {
    throw Error("checkpoint architecture '" + ck.architecture + "' does not match '" +
                model.architecture() + "'");
  }
  auto ps = model.params();
  if (ck.blocks.size() != ps.size()) throw Error("checkpoint block count mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& b = ck.blocks[i];
    if (b.name != ps[i]->name) throw Error("checkpoint block '" + b.name + "' where '" + ps[i]->name + "' expected");
    if (b.value.shape != ps[i]->value.shape) {
      throw ShapeError("checkpoint block '" + b.name + "' has shape " + nn::shape_str(b.value.shape));
    }
    ps[i]->value = b.value;
  }
}

// Writes <stem>.ckpt and the <stem>.json sidecar.
inline void save(Classifier& model, const std::string& stem, const TrainConfig& config,
                 const TrainHistory& history) {
  nn::checkpoint::save(stem + ".ckpt", to_checkpoint(model));
  nlohmann::json side = {{"architecture", model.architecture()},
                         {"model_spec", to_json(model.spec())},
                         {"train_config", to_json(config)},
                         {"seed", config.seed},
                         {"history", to_json(history)},
                         {"checkpoint_format", nn::checkpoint::kFormatVersion}};
  write_file(stem + ".json", side.dump(2) + "\n");
}

inline std::unique_ptr<Classifier> load(const std::string& stem) {
  const auto side = nlohmann::json::parse(read_file(stem + ".json"));
  auto model = build(spec_from_json(side.at("model_spec")), 0);
  load_weights(*model, nn::checkpoint::load(stem + ".ckpt"));
  return model;
}

}  // namespace revsent::models
