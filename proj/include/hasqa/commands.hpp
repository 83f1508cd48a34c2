#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hasqa/config.hpp"

/// Batch commands behind the hasqa executable. Each returns what the tool
/// prints on standard output; progress goes to standard error.
namespace hasqa::commands {

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::string checkpoint;
  std::string predictions;
  std::string log;
  std::optional<std::string> mode;
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::size_t> maxParagraphs;
  std::optional<std::size_t> maxTokens;
  bool quiet = false;
};

/// Corpus statistics of --data as a JSON object.
std::string stats(const Options& opts);

/// Writes the synthetic dataset described by --config to --out.
void makeSynthetic(const Options& opts);

/// Trains on --data and writes --out. With --checkpoint the run resumes from
/// it and the epoch counter continues. Returns the per-epoch loss log, one
/// JSON line per epoch, which is also written to --log (default: --out + ".log").
std::vector<std::string> train(const Options& opts);

/// Writes predictions JSONL for --data using --checkpoint to --out.
void predict(const Options& opts);

/// Metrics JSON for --predictions against --data; also written to --out if given.
std::string evaluate(const Options& opts);

/// Applies command-line overrides on top of a loaded config.
void applyOverrides(const Options& opts, RunConfig& config);

}  // namespace hasqa::commands
