// hasqa: train and run the hierarchical answer-span reader.
//
//   hasqa stats          --data D
//   hasqa make-synthetic --config C --out D
//   hasqa train          --config C --data D --out CK [--checkpoint CK0]
//   hasqa predict        --checkpoint CK --data D --out P
//   hasqa evaluate       --predictions P --data D [--out M]

#include <iostream>

#include "CLI11.hpp"
#include "hasqa/commands.hpp"

namespace {

void addCommon(CLI::App* cmd, hasqa::commands::Options& o) {
  cmd->add_option("--mode", o.mode, "Aggregation: head|rand|max|sum");
  cmd->add_option("--k1", o.k1, "Beam width over start positions");
  cmd->add_option("--k2", o.k2, "Ends kept per start");
  cmd->add_option("--seed", o.seed, "Seed for every random choice");
  cmd->add_option("--threads", o.threads, "Worker thread cap");
  cmd->add_option("--max-paragraphs", o.maxParagraphs, "Paragraphs kept per question");
  cmd->add_option("--max-tokens", o.maxTokens, "Tokens kept per paragraph");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical answer-span reader for open-domain QA"};
  app.require_subcommand(1);
  hasqa::commands::Options o;

  auto* stats = app.add_subcommand("stats", "Print corpus statistics as JSON");
  stats->add_option("--data", o.data, "Dataset JSONL")->required();
  addCommon(stats, o);

  auto* synth = app.add_subcommand("make-synthetic", "Generate a synthetic dataset");
  synth->add_option("--config", o.config, "Synthetic generator config JSON")->required();
  synth->add_option("--out", o.out, "Output JSONL")->required();
  synth->add_option("--seed", o.seed, "Override the generator seed");

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", o.config, "Run config JSON");
  train->add_option("--data", o.data, "Training JSONL")->required();
  train->add_option("--out", o.out, "Checkpoint to write")->required();
  train->add_option("--checkpoint", o.checkpoint, "Checkpoint to resume from");
  train->add_option("--log", o.log, "Per-epoch loss log (default: <out>.log)");
  addCommon(train, o);

  auto* predict = app.add_subcommand("predict", "Predict answers");
  predict->add_option("--checkpoint", o.checkpoint, "Trained checkpoint")->required();
  predict->add_option("--data", o.data, "Dataset JSONL")->required();
  predict->add_option("--out", o.out, "Predictions JSONL to write")->required();
  addCommon(predict, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions");
  evaluate->add_option("--predictions", o.predictions, "Predictions JSONL")->required();
  evaluate->add_option("--data", o.data, "Dataset JSONL")->required();
  evaluate->add_option("--out", o.out, "Metrics JSON to write");
  addCommon(evaluate, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) {
      std::cout << hasqa::commands::stats(o) << '\n';
    } else if (*synth) {
      hasqa::commands::makeSynthetic(o);
    } else if (*train) {
      hasqa::commands::train(o);
    } else if (*predict) {
      hasqa::commands::predict(o);
    } else if (*evaluate) {
      std::cout << hasqa::commands::evaluate(o) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
