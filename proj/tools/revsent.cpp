// revsent: review sentiment pipeline, one subcommand per stage.
//
//   revsent run-all --input a.csv --app-id chatgpt --input b.csv --app-id deepseek
//                   --lexicon lexicon.tsv --out results --seed 42

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "revsent/pipeline.hpp"

namespace {

using revsent::pipeline::RunConfig;

std::vector<revsent::pipeline::InputSpec> pair_inputs(const std::vector<std::string>& paths,
                                                      const std::vector<std::string>& apps) {
  if (!apps.empty() && apps.size() != paths.size()) {
    throw revsent::Error("give one --app-id per --input (" + std::to_string(paths.size()) +
                         " inputs, " + std::to_string(apps.size()) + " app ids)");
  }
  std::vector<revsent::pipeline::InputSpec> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out.push_back({paths[i], apps.empty() ? std::filesystem::path(paths[i]).stem().string() : apps[i]});
  }
  return out;
}

void print_report(const RunConfig& cfg) {
  std::cout << revsent::read_file(
      (std::filesystem::path(cfg.out_dir) / revsent::pipeline::artifact::kReport).string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexicon labeling, balancing, CNN / Bi-LSTM training and reporting for app reviews"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::vector<std::string> inputs, app_ids, model_names;
  std::string delimiter = ",";

  app.add_option("--input", inputs, "Review export (delimited, header row); repeatable");
  app.add_option("--app-id", app_ids, "App id for the matching --input; repeatable");
  app.add_option("--lexicon", cfg.lexicon_path, "Polarity lexicon (word<TAB>polarity)");
  app.add_option("--out", cfg.out_dir, "Output directory")->envname("REVSENT_OUT");
  app.add_option("--seed", cfg.seed, "Seed for every random choice");
  app.add_option("--model", model_names, "cnn and/or bilstm (default both)")
      ->check(CLI::IsMember({"cnn", "bilstm"}));
  app.add_option("--max-length", cfg.max_length, "Padded sequence length")->check(CLI::PositiveNumber);
  app.add_option("--max-words", cfg.max_words, "Vocabulary capacity incl. pad and oov")->check(CLI::Range(2, 1 << 24));
  app.add_option("--epochs", cfg.epochs, "Maximum training epochs")->check(CLI::PositiveNumber);
  app.add_option("--batch-size", cfg.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  app.add_option("--patience", cfg.patience, "Early-stopping patience in epochs (0 disables)");
  app.add_flag("--split-first", cfg.split_first, "Split before oversampling; balance the training split only");
  app.add_option("--top-k", cfg.top_k, "Words per app in the frequency comparison")->check(CLI::PositiveNumber);
  app.add_option("--stopwords", cfg.stopwords_path, "Optional stop-word list for EDA tables");
  app.add_option("--text-column", cfg.columns.text, "Review text column");
  app.add_option("--rating-column", cfg.columns.rating, "Star rating column");
  app.add_option("--timestamp-column", cfg.columns.timestamp, "Timestamp column");
  app.add_option("--id-column", cfg.columns.review_id, "Review id column");
  app.add_option("--delimiter", delimiter, "Input field delimiter (single character, or 'tab')");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "Read, validate and deduplicate review files"},
      {"label", "Clean text and assign lexicon sentiment labels"},
      {"balance", "Random oversampling to the majority class count"},
      {"split", "Stratified 72/8/20 train/val/test split"},
      {"encode", "Build vocabulary on train, encode and pad all splits"},
      {"train", "Train the selected models"},
      {"evaluate", "Score checkpoints on the test split and write reports"},
      {"eda", "Sentiment proportions, rating histograms, word frequencies"},
      {"run-all", "Every stage in order"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    cfg.inputs = pair_inputs(inputs, app_ids);
    if (delimiter == "tab" || delimiter == "\\t") delimiter = "\t";
    if (delimiter.size() != 1) throw revsent::Error("--delimiter must be one character");
    cfg.delimiter = delimiter[0];
    if (!model_names.empty()) {
      cfg.models.clear();
      for (const auto& m : model_names) cfg.models.push_back(revsent::models::parse_kind(m));
    }
    if (cfg.patience > cfg.epochs) cfg.patience = cfg.epochs;

    namespace pl = revsent::pipeline;
    if (command == "ingest") pl::run_ingest(cfg);
    else if (command == "label") pl::run_label(cfg);
    else if (command == "balance") pl::run_balance(cfg);
    else if (command == "split") pl::run_split(cfg);
    else if (command == "encode") pl::run_encode(cfg);
    else if (command == "train") {
      for (auto k : cfg.models) pl::run_train(cfg, k);
    } else if (command == "evaluate") {
      pl::run_evaluate(cfg);
      print_report(cfg);
    } else if (command == "eda") pl::run_eda(cfg);
    else if (command == "run-all") {
      pl::run_all(cfg);
      print_report(cfg);
    }
  } catch (const revsent::pipeline::StageError& e) {
    std::cerr << "revsent: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "revsent: [" << command << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
