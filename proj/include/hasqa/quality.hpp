#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hasqa/corpus.hpp"
#include "hasqa/encoder.hpp"
#include "hasqa/graph.hpp"
#include "hasqa/model.hpp"
#include "hasqa/rng.hpp"
#include "hasqa/span_decoder.hpp"

namespace hasqa {

/// Quality logits q̂ and their softmax q, in paragraph order.
struct ParagraphScores {
  std::vector<double> logits;
  std::vector<double> probs;
};

/// q̂ = (M^cᵀ·p^s)·w_c with M^c = BiGRU(C): the start distribution is the
/// attention key over the quality states. With gradThroughStart false, p^s
/// enters as a constant and the quality head does not train the start head.
/// Returns a 1×1 scalar.
Var qualityLogit(Graph& g, const Model& model, const ContextEmbedding& context,
                 const StartDistribution& startDist, bool gradThroughStart = true);

/// Softmax over the paragraph list with max subtraction; rejects an empty list.
ParagraphScores normalizeQualities(std::span<const double> logits);

/// Positive/negative pair for one training step. `negative` is empty when the
/// example has no answer-free paragraph; the trainer then borrows one.
struct ParagraphPair {
  std::size_t positive = 0;
  std::optional<std::size_t> negative;
};

/// Uniform positive among labeled paragraphs and uniform negative among the
/// rest. Returns nothing when the example has no labeled paragraph.
std::optional<ParagraphPair> samplePair(const QAExample& example, Rng& rng);

}  // namespace hasqa
