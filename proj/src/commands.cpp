#include "hasqa/commands.hpp"

#include <omp.h>

#include <fstream>
#include <iostream>

#include "hasqa/checkpoint.hpp"
#include "hasqa/error.hpp"
#include "hasqa/pipeline.hpp"
#include "hasqa/synthetic.hpp"

namespace hasqa::commands {
namespace {

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(std::string("missing required flag ") + flag);
}

void applyThreads(const RunConfig& config) {
  if (config.threads > 0) omp_set_num_threads(config.threads);
}

}  // namespace

void applyOverrides(const Options& opts, RunConfig& config) {
  if (opts.mode) config.train.mode = parseAggregationMode(*opts.mode);
  if (opts.k1) config.train.k1 = *opts.k1;
  if (opts.k2) config.train.k2 = *opts.k2;
  if (opts.seed) config.train.seed = *opts.seed;
  if (opts.threads) config.threads = *opts.threads;
  if (opts.maxParagraphs) config.limits.maxParagraphs = *opts.maxParagraphs;
  if (opts.maxTokens) config.limits.maxParagraphTokens = *opts.maxTokens;
  config.train.validate();
}

std::string stats(const Options& opts) {
  require(opts.data, "--data");
  LoadLimits limits;
  if (opts.maxParagraphs) limits.maxParagraphs = *opts.maxParagraphs;
  if (opts.maxTokens) limits.maxParagraphTokens = *opts.maxTokens;
  const CorpusStats s = corpusStats(loadDataset(opts.data, limits));
  nlohmann::ordered_json obj;
  obj["examples"] = s.examples;
  obj["paragraphs"] = s.paragraphs;
  obj["negative_paragraphs"] = s.negativeParagraphs;
  obj["neg_paragraph_ratio"] = s.negParagraphRatio;
  obj["avg_answer_span_count"] = s.avgAnswerSpanCount;
  obj["avg_answer_span_count_all"] = s.avgAnswerSpanCountAll;
  return obj.dump();
}

void makeSynthetic(const Options& opts) {
  require(opts.config, "--config");
  require(opts.out, "--out");
  SyntheticConfig config = loadSyntheticConfig(opts.config);
  if (opts.seed) config.seed = *opts.seed;
  writeDataset(opts.out, generateSynthetic(config));
}

std::vector<std::string> train(const Options& opts) {
  require(opts.data, "--data");
  require(opts.out, "--out");
  Checkpoint ck;
  if (!opts.checkpoint.empty()) {
    ck = loadCheckpoint(opts.checkpoint);
    if (!opts.config.empty()) {
      const RunConfig fresh = loadRunConfig(opts.config);
      ck.config.train = fresh.train;
      ck.config.limits = fresh.limits;
      ck.config.threads = fresh.threads;
    }
  } else {
    require(opts.config, "--config");
    ck.config = loadRunConfig(opts.config);
  }
  applyOverrides(opts, ck.config);
  applyThreads(ck.config);
  const Dataset data = loadDataset(opts.data, ck.config.limits);
  if (data.empty()) throw Error("training dataset " + opts.data + " is empty");

  if (opts.checkpoint.empty()) {
    ck.model = buildModel(ck.config.encoder, Vocabulary::fromDataset(data), ck.config.train.seed);
    if (!ck.config.wordVectors.empty()) {
      loadWordVectors(ck.model, ck.config.wordVectors, ck.config.freezeWordVectors);
    }
    ck.rng = Rng(ck.config.train.seed);
    ck.epoch = 0;
  }

  const std::string logPath = opts.log.empty() ? opts.out + ".log" : opts.log;
  std::ofstream log(logPath, std::ios::binary);
  if (!log) throw Error("cannot write loss log " + logPath);
  std::vector<std::string> lines;
  for (std::size_t e = 0; e < ck.config.train.epochs; ++e) {
    const std::size_t epoch = ck.epoch;
    const EpochResult r = trainEpoch(data, ck.model, ck.config.train, epoch);
    ++ck.epoch;
    nlohmann::ordered_json line;
    line["epoch"] = epoch;
    if (r.meanLoss) {
      line["mean_loss"] = *r.meanLoss;
    } else {
      line["mean_loss"] = nullptr;
    }
    line["skipped"] = r.skippedExamples;
    line["borrowed_negatives"] = r.borrowedNegatives;
    line["steps"] = r.steps;
    lines.push_back(line.dump());
    log << lines.back() << '\n';
    if (!opts.quiet) std::cerr << lines.back() << '\n';
  }
  saveCheckpoint(opts.out, ck);
  return lines;
}

void predict(const Options& opts) {
  require(opts.checkpoint, "--checkpoint");
  require(opts.data, "--data");
  require(opts.out, "--out");
  Checkpoint ck = loadCheckpoint(opts.checkpoint);
  applyOverrides(opts, ck.config);
  applyThreads(ck.config);
  const Dataset data = loadDataset(opts.data, ck.config.limits);
  writePredictions(opts.out, predictDataset(data, ck.model, inferenceConfig(ck.config.train)));
}

std::string evaluate(const Options& opts) {
  require(opts.predictions, "--predictions");
  require(opts.data, "--data");
  LoadLimits limits;
  if (opts.maxParagraphs) limits.maxParagraphs = *opts.maxParagraphs;
  if (opts.maxTokens) limits.maxParagraphTokens = *opts.maxTokens;
  const std::string report =
      reportToJson(evaluatePredictions(readPredictions(opts.predictions), loadDataset(opts.data, limits)));
  if (!opts.out.empty()) {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw Error("cannot write metrics " + opts.out);
    out << report << '\n';
  }
  return report;
}

}  // namespace hasqa::commands
