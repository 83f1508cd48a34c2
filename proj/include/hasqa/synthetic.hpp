#pragma once

#include <cstddef>
#include <cstdint>

#include "hasqa/corpus.hpp"

namespace hasqa {

/// Planted-answer task. The vocabulary is split into cue words ("c.."),
/// entity words ("e..") and filler words ("f.."). A question names a pair of
/// cue words; its answer is a 1-2 entity run that directly follows that cue
/// pair in positive paragraphs. Positive paragraphs also repeat the answer
/// without the cue and carry decoy entity runs behind other cue pairs;
/// distractor paragraphs contain decoys only.
struct SyntheticConfig {
  std::size_t numExamples = 100;
  std::size_t vocabSize = 100;
  std::size_t paragraphsPerQuestion = 3;
  std::size_t paragraphLen = 20;
  double distractorRatio = 0.34;
  /// Probability that a positive paragraph holds several occurrences.
  double multiSpanProb = 0.5;
  std::size_t minOccurrences = 2;
  std::size_t maxOccurrences = 3;
  std::uint64_t seed = 1;
};

/// Deterministic per seed. Rejects configurations in which the answer and
/// its decoys cannot be planted.
Dataset generateSynthetic(const SyntheticConfig& config);

}  // namespace hasqa
