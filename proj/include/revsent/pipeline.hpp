#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/corpus.hpp"
#include "revsent/csv.hpp"
#include "revsent/dataprep.hpp"
#include "revsent/eda.hpp"
#include "revsent/eval.hpp"
#include "revsent/lexicon.hpp"
#include "revsent/models.hpp"
#include "revsent/textenc.hpp"

// Stage-per-subcommand orchestration. Every stage reads named artifacts from
// the output directory, writes its own, and appends one manifest line.
namespace revsent::pipeline {

namespace fs = std::filesystem;

class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct InputSpec {
  std::string path;
  std::string app_id;
};

struct RunConfig {
  std::vector<InputSpec> inputs;
  std::string lexicon_path;
  std::string out_dir = "revsent_out";
  std::uint64_t seed = 42;
  bool split_first = false;
  std::vector<models::Kind> models = {models::Kind::Cnn, models::Kind::BiLstm};
  std::size_t max_words = textenc::kDefaultMaxWords;
  std::size_t max_length = textenc::kDefaultMaxLength;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  std::size_t top_k = 20;
  std::string stopwords_path;
  corpus::ColumnMap columns;
  char delimiter = ',';
  lexicon::LabelRule rule;
};

// Artifact names inside out_dir.
namespace artifact {
inline constexpr const char* kReviews = "reviews.csv";
inline constexpr const char* kLabeled = "labeled.csv";
inline constexpr const char* kBalanced = "balanced.csv";
inline constexpr const char* kTrainRaw = "train_raw.csv";
inline constexpr const char* kTrain = "train.csv";
inline constexpr const char* kVal = "val.csv";
inline constexpr const char* kTest = "test.csv";
inline constexpr const char* kSplitManifest = "split_manifest.tsv";
inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kEncodedTrain = "encoded_train.tsv";
inline constexpr const char* kEncodedVal = "encoded_val.tsv";
inline constexpr const char* kEncodedTest = "encoded_test.tsv";
inline constexpr const char* kReport = "report.txt";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kManifest = "manifest.tsv";
inline constexpr const char* kProportions = "eda_sentiment_proportions.tsv";
inline constexpr const char* kRatings = "eda_rating_distribution.tsv";
inline constexpr const char* kTopWords = "eda_top_words.tsv";
inline constexpr const char* kWordFreq = "eda_word_frequencies.tsv";

inline std::string model_stem(models::Kind k) { return "model_" + models::kind_name(k); }
}  // namespace artifact

inline std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  return fnv1a(stage, seed ^ 0x5deece66dULL);
}

inline std::string_view mode_name(const RunConfig& cfg) {
  return cfg.split_first ? "split-first" : "paper-order";
}

class Stage {
 public:
  Stage(const RunConfig& cfg, std::string name) : cfg_(cfg), name_(std::move(name)) {
    fs::create_directories(cfg_.out_dir);
  }

  std::string path(const std::string& artifact) const { return (fs::path(cfg_.out_dir) / artifact).string(); }

  // Path of an upstream artifact; missing ones name the stage that makes them.
  std::string require(const std::string& artifact, const std::string& producer) {
    const auto p = path(artifact);
    if (!fs::exists(p)) {
      throw StageError(name_, "missing " + artifact + " in " + cfg_.out_dir + "; run `" + producer + "` first");
    }
    inputs_.push_back({artifact, hex64(fnv1a(read_file(p)))});
    return p;
  }

  void external_input(const std::string& p) {
    if (!fs::exists(p)) throw StageError(name_, "input file not found: " + p);
    inputs_.push_back({p, hex64(fnv1a(read_file(p)))});
  }

  void write(const std::string& artifact, std::string_view content) {
    write_file(path(artifact), content);
    outputs_.push_back({artifact, hex64(fnv1a(content))});
  }

  // Records an artifact written by other means.
  void track(const std::string& artifact) {
    outputs_.push_back({artifact, hex64(fnv1a(read_file(path(artifact))))});
  }

  nlohmann::json& summary() { return summary_; }

  // Manifest line: stage, inputs, outputs, seed, version, mode, config; tab-separated.
  void commit() {
    auto join = [](const std::vector<std::pair<std::string, std::string>>& v) {
      std::string s;
      for (const auto& [n, h] : v) s += (s.empty() ? "" : ",") + n + ":" + h;
      return s.empty() ? std::string("-") : s;
    };
    summary_["mode"] = mode_name(cfg_);
    summary_["seed"] = cfg_.seed;
    write("summary_" + name_ + ".json", summary_.dump(2) + "\n");
    std::ofstream m(path(artifact::kManifest), std::ios::app);
    if (!m) throw IoError("cannot append to manifest in " + cfg_.out_dir);
    m << name_ << "\tinputs=" << join(inputs_) << "\toutputs=" << join(outputs_)
      << "\tseed=" << cfg_.seed << "\tversion=" << kVersion << "\tmode=" << mode_name(cfg_)
      << "\tconfig=" << summary_.value("config", nlohmann::json::object()).dump() << "\n";
  }

  const std::string& name() const { return name_; }

 private:
  const RunConfig& cfg_;
  std::string name_;
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
  nlohmann::json summary_ = nlohmann::json::object();
};

// ------------------------------------------------------------------ stages

inline void run_ingest(const RunConfig& cfg) {
  Stage st(cfg, "ingest");
  if (cfg.inputs.empty()) throw StageError("ingest", "no --input given");
  std::vector<corpus::Review> all;
  nlohmann::json per_app = nlohmann::json::object();
  for (const auto& in : cfg.inputs) {
    st.external_input(in.path);
    auto res = corpus::ingest(in.path, in.app_id, cfg.columns, cfg.delimiter);
    auto dedup = corpus::deduplicate(res.reviews);
    per_app[in.app_id] = {{"rows", dedup.reviews.size()},
                          {"dropped_empty", res.dropped_empty},
                          {"duplicates_removed", dedup.removed}};
    all.insert(all.end(), dedup.reviews.begin(), dedup.reviews.end());
  }
  st.write(artifact::kReviews, csv::format(corpus::to_table(all, cfg.columns)));
  st.summary()["apps"] = per_app;
  st.summary()["rows"] = all.size();
  st.commit();
}

inline void run_label(const RunConfig& cfg) {
  Stage st(cfg, "label");
  const auto reviews = corpus::from_table(csv::read(st.require(artifact::kReviews, "ingest")), cfg.columns);
  if (cfg.lexicon_path.empty()) throw StageError("label", "no --lexicon given");
  st.external_input(cfg.lexicon_path);
  const auto lex = lexicon::load_lexicon(cfg.lexicon_path);
  csv::Table t;
  t.header = {"app_id", "clean_text", "polarity", "label", "label_code", "score"};
  std::size_t dropped = 0;
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : reviews) {
    auto clean = corpus::clean_text(r.text);
    if (clean.empty()) {
      ++dropped;
      continue;
    }
    const double polarity = lexicon::score_text(clean, lex);
    const auto label = lexicon::assign_label(polarity, cfg.rule);
    ++counts[code(label)];
    t.rows.push_back({r.app_id, std::move(clean), format_double(polarity), std::string(label_name(label)),
                      std::to_string(code(label)), r.rating ? std::to_string(*r.rating) : ""});
  }
  st.write(artifact::kLabeled, csv::format(t));
  st.summary()["dropped_empty_after_cleaning"] = dropped;
  st.summary()["class_counts"] = counts;
  st.summary()["lexicon_entries"] = lex.entries.size();
  st.summary()["lexicon_duplicate_warnings"] = lex.duplicate_warnings;
  st.summary()["config"] = {{"pos_threshold", cfg.rule.pos_threshold},
                            {"neg_threshold", cfg.rule.neg_threshold},
                            {"negation_factor", lex.negation_factor}};
  st.commit();
}

inline void run_balance(const RunConfig& cfg) {
  Stage st(cfg, "balance");
  const std::string in_name = cfg.split_first ? artifact::kTrainRaw : artifact::kLabeled;
  const std::string producer = cfg.split_first ? "split" : "label";
  const auto data = dataprep::from_table(csv::read(st.require(in_name, producer)));
  const auto seed = stage_seed(cfg.seed, "balance");
  dataprep::LabeledDataset out;
  try {
    out = dataprep::oversample(data, seed);
  } catch (const Error& e) {
    throw StageError("balance", e.what());
  }
  st.write(cfg.split_first ? artifact::kTrain : artifact::kBalanced, csv::format(dataprep::to_table(out)));
  st.summary()["input"] = in_name;
  st.summary()["class_counts_before"] = data.class_counts();
  st.summary()["class_counts_after"] = out.class_counts();
  st.summary()["config"] = {{"balance_seed", seed}};
  st.commit();
}

inline void run_split(const RunConfig& cfg) {
  Stage st(cfg, "split");
  const std::string in_name = cfg.split_first ? artifact::kLabeled : artifact::kBalanced;
  const std::string producer = cfg.split_first ? "label" : "balance";
  const auto data = dataprep::from_table(csv::read(st.require(in_name, producer)));
  const auto spec = dataprep::SplitSpec::for_total(data.size(), stage_seed(cfg.seed, "split"));
  dataprep::Splits s;
  try {
    s = dataprep::stratified_split(data, spec);
  } catch (const Error& e) {
    throw StageError("split", e.what());
  }
  st.write(cfg.split_first ? artifact::kTrainRaw : artifact::kTrain, csv::format(dataprep::to_table(s.train)));
  st.write(artifact::kVal, csv::format(dataprep::to_table(s.val)));
  st.write(artifact::kTest, csv::format(dataprep::to_table(s.test)));
  st.write(artifact::kSplitManifest, dataprep::split_manifest(s));
  st.summary()["input"] = in_name;
  st.summary()["sizes"] = {{"total", spec.n_total}, {"train_full", spec.n_train_full},
                           {"train", spec.n_train}, {"val", spec.n_val}, {"test", spec.n_test}};
  st.summary()["class_counts"] = {{"train", s.train.class_counts()},
                                  {"val", s.val.class_counts()},
                                  {"test", s.test.class_counts()}};
  st.summary()["config"] = {{"split_seed", spec.seed}};
  st.commit();
}

inline std::string encode_split(const dataprep::LabeledDataset& d, const textenc::Vocabulary& v) {
  std::string out;
  for (const auto& r : d.rows) {
    const auto seq = textenc::pad(textenc::encode(r.clean_text, v), v.max_length);
    out += std::to_string(code(r.label)) + "\t";
    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(seq.ids[i]);
    }
    out += '\n';
  }
  return out;
}

inline models::EncodedSet read_encoded(const std::string& path) {
  models::EncodedSet set;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected label<TAB>ids in " + path, line_no);
    std::vector<int> ids;
    for (const auto& tok : split_ws(std::string_view(line).substr(tab + 1))) ids.push_back(std::stoi(tok));
    set.add(ids, std::stoi(line.substr(0, tab)));
  }
  return set;
}

inline void run_encode(const RunConfig& cfg) {
  Stage st(cfg, "encode");
  const auto producer = cfg.split_first ? "balance" : "split";
  const auto train = dataprep::from_table(csv::read(st.require(artifact::kTrain, producer)));
  const auto val = dataprep::from_table(csv::read(st.require(artifact::kVal, "split")));
  const auto test = dataprep::from_table(csv::read(st.require(artifact::kTest, "split")));
  std::vector<std::string> corpus;
  for (const auto& r : train.rows) corpus.push_back(r.clean_text);
  auto vocab = textenc::build_vocab(corpus, cfg.max_words);
  vocab.max_length = cfg.max_length;
  st.write(artifact::kVocab, textenc::serialize(vocab));
  st.write(artifact::kEncodedTrain, encode_split(train, vocab));
  st.write(artifact::kEncodedVal, encode_split(val, vocab));
  st.write(artifact::kEncodedTest, encode_split(test, vocab));
  st.summary()["vocabulary_size"] = vocab.size();
  st.summary()["config"] = {{"max_words", cfg.max_words}, {"max_length", cfg.max_length}};
  st.commit();
}

inline models::TrainConfig train_config(const RunConfig& cfg, models::Kind kind) {
  models::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.patience = cfg.patience;
  tc.seed = stage_seed(cfg.seed, "train-" + models::kind_name(kind));
  return tc;
}

inline void run_train(const RunConfig& cfg, models::Kind kind) {
  Stage st(cfg, "train-" + models::kind_name(kind));
  const auto train = read_encoded(st.require(artifact::kEncodedTrain, "encode"));
  const auto val = read_encoded(st.require(artifact::kEncodedVal, "encode"));
  const auto vocab = textenc::deserialize(read_file(st.require(artifact::kVocab, "encode")));
  models::ModelSpec spec;
  spec.kind = kind;
  spec.max_words = vocab.max_words;
  spec.max_length = vocab.max_length;
  const auto tc = train_config(cfg, kind);
  auto model = models::build(spec, tc.seed);
  models::TrainHistory h;
  try {
    h = models::train(*model, train, tc, &val);
  } catch (const Error& e) {
    throw StageError(st.name(), e.what());
  }
  const auto stem = artifact::model_stem(kind);
  models::save(*model, st.path(stem), tc, h);
  st.track(stem + ".ckpt");
  st.track(stem + ".json");
  st.summary()["epochs_run"] = h.stopped_epoch;
  st.summary()["best_epoch"] = h.best_epoch;
  st.summary()["parameters"] = model->parameter_count();
  st.summary()["config"] = {{"model", models::to_json(spec)}, {"train", models::to_json(tc)}};
  st.commit();
}

inline eval::NamedReports run_evaluate(const RunConfig& cfg) {
  Stage st(cfg, "evaluate");
  const auto test = read_encoded(st.require(artifact::kEncodedTest, "encode"));
  eval::NamedReports reports;
  for (auto kind : cfg.models) {
    const auto stem = artifact::model_stem(kind);
    st.require(stem + ".ckpt", "train");
    st.require(stem + ".json", "train");
    const auto model = models::load(st.path(stem));
    const auto ev = models::evaluate(*model, test);
    const auto cm = eval::confusion(test.labels, ev.predicted);
    reports.emplace_back(models::kind_name(kind), eval::class_report(cm, ev.row_losses));
  }
  st.write(artifact::kReport, eval::render_report(reports));
  st.write(artifact::kReportJson, eval::render_report_json(reports));
  st.summary()["test_rows"] = test.size();
  st.commit();
  return reports;
}

inline std::set<std::string> load_stopwords(const std::string& path) {
  std::set<std::string> out;
  if (path.empty()) return out;
  for (const auto& w : split_ws([&] {
         auto s = read_file(path);
         for (char& c : s) {
           if (c == '\n' || c == '\r' || c == '\t') c = ' ';
         }
         return s;
       }())) {
    out.insert(w);
  }
  return out;
}

inline void run_eda(const RunConfig& cfg) {
  Stage st(cfg, "eda");
  const auto reviews = corpus::from_table(csv::read(st.require(artifact::kReviews, "ingest")), cfg.columns);
  const auto labeled = dataprep::from_table(csv::read(st.require(artifact::kLabeled, "label")));
  if (!cfg.stopwords_path.empty()) st.external_input(cfg.stopwords_path);
  const auto stop = load_stopwords(cfg.stopwords_path);
  std::vector<std::string> apps;
  for (const auto& in : cfg.inputs) apps.push_back(in.app_id);
  const auto props = eda::sentiment_proportions(labeled, apps);
  const auto texts = eda::texts_by_app(labeled);
  st.write(artifact::kProportions, eda::to_tsv(props));
  st.write(artifact::kRatings, eda::to_tsv(eda::rating_distribution(reviews)));
  st.write(artifact::kTopWords, eda::to_tsv(eda::top_k_words(texts, cfg.top_k, stop)));
  st.write(artifact::kWordFreq, eda::to_tsv(eda::word_frequencies(texts, stop)));
  st.summary()["warnings"] = props.warnings;
  st.summary()["config"] = {{"top_k", cfg.top_k}, {"stopwords", cfg.stopwords_path}};
  st.commit();
}

// paper-order:  ingest, label, balance, split, encode, train, evaluate, eda
// split-first:  ingest, label, split, balance (train only), encode, ...
inline eval::NamedReports run_all(const RunConfig& cfg) {
  run_ingest(cfg);
  run_label(cfg);
  if (cfg.split_first) {
    run_split(cfg);
    run_balance(cfg);
  } else {
    run_balance(cfg);
    run_split(cfg);
  }
  run_encode(cfg);
  for (auto kind : cfg.models) run_train(cfg, kind);
  auto reports = run_evaluate(cfg);
  run_eda(cfg);
  return reports;
}

}  // namespace revsent::pipeline
