#pragma once

#include <cstddef>
#include <string>

#include "hasqa/encoder.hpp"
#include "hasqa/graph.hpp"
#include "hasqa/model.hpp"

namespace hasqa {

/// p^s (1×n) together with the start-block states M^s (n×2d) that the end
/// and quality heads reuse.
struct StartDistribution {
  Var probs;
  Var states;
  std::size_t length = 0;
};

/// One decoded span. spanProb is exactly startProb·endProb.
struct SpanCandidate {
  std::size_t start = 0;
  std::size_t end = 0;
  double startProb = 0.0;
  double endProb = 0.0;
  double spanProb = 0.0;
  std::string answerText;
};

/// M^s = BiGRU(C), p^s = softmax(M^s·w_s).
StartDistribution startDistribution(Graph& g, const Model& model, const ContextEmbedding& context);

/// End distribution conditioned on the start position itself:
/// M^e = BiGRU([C, M^s, 1{t = start}]), p^e = softmax(M^e·w_e) over t >= start.
/// Positions before the start get probability exactly 0. Returns 1×n.
Var endDistribution(Graph& g, const Model& model, const ContextEmbedding& context,
                    const StartDistribution& startDist, std::size_t start);

/// p^s[start]·p^e_start[end]; rejects end < start or indices past the paragraph.
double spanProbability(const Tensor& startProbs, const Tensor& endProbs, std::size_t start,
                       std::size_t end);

/// Dense table of every span probability: entry (s, e) for s <= e, zero below the diagonal.
/// Costs one end distribution per start, so n above `cap` is rejected.
Tensor allSpanProbabilities(Graph& g, const Model& model, const ContextEmbedding& context,
                            std::size_t cap);

}  // namespace hasqa
