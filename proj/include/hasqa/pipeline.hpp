#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hasqa/aggregation.hpp"
#include "hasqa/corpus.hpp"
#include "hasqa/encoder.hpp"
#include "hasqa/model.hpp"
#include "hasqa/params.hpp"
#include "hasqa/quality.hpp"
#include "hasqa/span_decoder.hpp"

namespace hasqa {

struct TrainConfig {
  std::size_t batchSize = 30;
  std::size_t epochs = 10;
  AggregationMode mode = AggregationMode::Max;
  std::size_t k1 = 3;
  std::size_t k2 = 1;
  std::uint64_t seed = 1;
  AdadeltaConfig optimizer;
  /// Longest paragraph allSpanProbabilities will enumerate.
  std::size_t oracleCap = 64;
  /// Whether the quality loss backpropagates into the start distribution.
  bool qualityGradThroughStart = true;
  /// Floor applied to probabilities before taking logs.
  double probFloor = 1e-12;

  void validate() const;
};

struct InferenceConfig {
  std::size_t k1 = 3;
  std::size_t k2 = 1;
  AggregationMode mode = AggregationMode::Max;
  std::uint64_t seed = 1;
};

InferenceConfig inferenceConfig(const TrainConfig& config);

/// Scalar loss -(log q⁺ + log p⁺) of one positive paragraph and its negative.
/// p⁺ aggregates the span probabilities at the positive's labels; q⁺ is the
/// positive's share of the pair-normalized quality. Without a negative the
/// quality term vanishes (q⁺ = 1, the single-paragraph case).
struct LossTerms {
  Var loss;
  double answerProb = 0.0;
  double paragraphProb = 0.0;
};

LossTerms exampleLoss(Graph& g, const Model& model, const QAExample& example,
                      const Paragraph& positive, const Paragraph* negative,
                      const TrainConfig& config, Rng& rng, const Pass& pass);

struct EpochResult {
  std::optional<double> meanLoss;
  std::size_t skippedExamples = 0;
  std::size_t borrowedNegatives = 0;
  std::size_t steps = 0;
};

/// One pass over the dataset in a seeded order: mini-batches whose mean
/// example loss drives one Adadelta step each. Examples of a batch are
/// differentiated in parallel; gradients are reduced in batch order so the
/// result does not depend on the thread count.
EpochResult trainEpoch(const Dataset& dataset, Model& model, const TrainConfig& config,
                       std::size_t epoch);

/// Top-K1 starts, then the top-K2 ends of each start's end distribution
/// among positions >= start. Ties go to the lower index.
std::vector<SpanCandidate> beamSearch(const Tensor& startProbs,
                                      const std::function<Tensor(std::size_t)>& endDistribution,
                                      std::size_t k1, std::size_t k2);

/// Beam search over one encoded paragraph; fills answerText from the raw text.
std::vector<SpanCandidate> beamCandidates(Graph& g, const Model& model,
                                          const ContextEmbedding& context,
                                          const StartDistribution& startDist,
                                          const Paragraph& paragraph, std::size_t k1,
                                          std::size_t k2);

struct ParagraphDiagnostics {
  double qualityLogit = 0.0;
  double qualityProb = 0.0;
  std::vector<AnswerGroup> groups;
};

struct Prediction {
  std::string exampleId;
  std::string bestAnswer;
  std::map<std::string, double> answerScores;
  std::vector<double> paragraphProbs;
  std::vector<ParagraphDiagnostics> paragraphs;
};

/// S(A) = Σ_i q_i·p_i^A, where p_i^A is group A's aggregated probability in
/// paragraph i and 0 when paragraph i has no candidate for A.
std::map<std::string, double> mixAnswerScores(
    std::span<const double> paragraphProbs, const std::vector<std::vector<AnswerGroup>>& groups);

/// Highest-scoring answer; ties go to the lexicographically smallest string.
/// Empty when there are no scores.
std::string argmaxAnswer(const std::map<std::string, double>& scores);

/// Encodes every paragraph, runs beam search and grouping per paragraph,
/// normalizes quality over all of them and mixes with mixAnswerScores.
Prediction predict(const QAExample& example, const Model& model, const InferenceConfig& config);

/// Examples are independent and run in parallel.
std::vector<Prediction> predictDataset(const Dataset& dataset, const Model& model,
                                       const InferenceConfig& config);
/// Serial reference for predictDataset.
std::vector<Prediction> predictDatasetSerial(const Dataset& dataset, const Model& model,
                                             const InferenceConfig& config);

struct EvaluationReport {
  double em = 0.0;
  double f1 = 0.0;
  double map = 0.0;
  double avgAnswerLength = 0.0;
  std::size_t n = 0;
  /// Examples that carried at least one positive paragraph (the MAP denominator).
  std::size_t mapExamples = 0;
};

/// Scores predictions against the dataset, matching by id. A dataset example
/// without a prediction is rejected by name.
EvaluationReport evaluatePredictions(const std::vector<Prediction>& predictions,
                                     const Dataset& dataset);
EvaluationReport evaluateDataset(const Dataset& dataset, const Model& model,
                                 const InferenceConfig& config);
double paragraphMAP(const Dataset& dataset, const Model& model, const InferenceConfig& config);

std::string predictionToJson(const Prediction& prediction);
Prediction predictionFromJson(const std::string& line);
void writePredictions(const std::string& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> readPredictions(const std::string& path);
std::string reportToJson(const EvaluationReport& report);

/// FNV-1a; seeds per-example RAND draws so they do not depend on dataset order.
std::uint64_t stableHash(const std::string& text);

}  // namespace hasqa
