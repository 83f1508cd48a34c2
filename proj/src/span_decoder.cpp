#include "hasqa/span_decoder.hpp"

#include <array>

#include "hasqa/error.hpp"
#include "hasqa/layers.hpp"

namespace hasqa {

StartDistribution startDistribution(Graph& g, const Model& model, const ContextEmbedding& context) {
  const Var states = biGru(g, model.params, "span.start", context.values);
  const Var logits = g.transpose(g.matmul(states, g.parameter(model.params, "span.start.w")));
  return {g.rowSoftmax(logits), states, context.length};
}

Var endDistribution(Graph& g, const Model& model, const ContextEmbedding& context,
                    const StartDistribution& startDist, std::size_t start) {
  const std::size_t n = context.length;
  if (start >= n) {
    throw Error("endDistribution: start " + std::to_string(start) + " outside paragraph of length " +
                std::to_string(n));
  }
  Tensor indicator(n, 1);
  indicator[start] = 1.0;
  const std::array<Var, 3> parts{context.values, startDist.states, g.constant(std::move(indicator))};
  const Var states = biGru(g, model.params, "span.end", g.concatCols(parts));
  const Var logits = g.transpose(g.matmul(states, g.parameter(model.params, "span.end.w")));
  std::vector<unsigned char> mask(n, 0);
  for (std::size_t t = start; t < n; ++t) mask[t] = 1;
  return g.rowSoftmax(logits, &mask);
}

double spanProbability(const Tensor& startProbs, const Tensor& endProbs, std::size_t start,
                       std::size_t end) {
  if (end < start) {
    throw Error("spanProbability: end " + std::to_string(end) + " precedes start " +
                std::to_string(start));
  }
  if (end >= startProbs.size() || endProbs.size() != startProbs.size()) {
    throw Error("spanProbability: span outside distributions of length " +
                std::to_string(startProbs.size()));
  }
  return startProbs[start] * endProbs[end];
}

Tensor allSpanProbabilities(Graph& g, const Model& model, const ContextEmbedding& context,
                            std::size_t cap) {
  const std::size_t n = context.length;
  if (n > cap) {
    throw Error("allSpanProbabilities: paragraph length " + std::to_string(n) + " exceeds cap " +
                std::to_string(cap));
  }
  const StartDistribution sd = startDistribution(g, model, context);
  const Tensor startProbs = g.value(sd.probs);
  Tensor table(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const Tensor& ends = g.value(endDistribution(g, model, context, sd, s));
    for (std::size_t e = s; e < n; ++e) table(s, e) = spanProbability(startProbs, ends, s, e);
  }
  return table;
}

}  // namespace hasqa
