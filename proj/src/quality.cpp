#include "hasqa/quality.hpp"

#include <algorithm>
#include <cmath>

#include "hasqa/error.hpp"
#include "hasqa/layers.hpp"

namespace hasqa {

Var qualityLogit(Graph& g, const Model& model, const ContextEmbedding& context,
                 const StartDistribution& startDist, bool gradThroughStart) {
  const Var states = biGru(g, model.params, "quality", context.values);
  const Var key = gradThroughStart ? startDist.probs : g.constant(g.value(startDist.probs));
  const Var pooled = g.matmul(key, states);
  return g.matmul(pooled, g.parameter(model.params, "quality.w"));
}

ParagraphScores normalizeQualities(std::span<const double> logits) {
  if (logits.empty()) throw Error("normalizeQualities: empty paragraph list");
  ParagraphScores s;
  s.logits.assign(logits.begin(), logits.end());
  const double best = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) {
    if (!std::isfinite(l)) throw Error("normalizeQualities: non-finite logit");
    s.probs.push_back(std::exp(l - best));
    total += s.probs.back();
  }
  for (double& p : s.probs) p /= total;
  return s;
}

std::optional<ParagraphPair> samplePair(const QAExample& example, Rng& rng) {
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < example.paragraphs.size(); ++i) {
    (example.paragraphs[i].positive() ? positives : negatives).push_back(i);
  }
  if (positives.empty()) return std::nullopt;
  ParagraphPair pair;
  pair.positive = positives[rng.below(positives.size())];
  if (!negatives.empty()) pair.negative = negatives[rng.below(negatives.size())];
  return pair;
}

}  // namespace hasqa
