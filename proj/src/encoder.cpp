#include "hasqa/encoder.hpp"

#include <array>
#include <cmath>

#include "hasqa/error.hpp"
#include "hasqa/layers.hpp"

namespace hasqa {

Var embedTokens(Graph& g, const Model& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error("embedTokens: empty token sequence");
  const auto& store = model.params;
  const auto ids = model.vocab.wordIds(tokens);
  const Var words = g.gatherRows(g.parameter(store, "emb.word"), ids);
  const Var chars = g.charConvMaxPool(g.parameter(store, "emb.char"),
                                      g.parameter(store, "emb.char_conv.w"),
                                      g.parameter(store, "emb.char_conv.b"),
                                      model.vocab.charIds(tokens), model.encoder.charConvWidth);
  const std::array<Var, 2> parts{words, chars};
  return g.concatCols(parts);
}

Var contextualize(Graph& g, const Model& model, Var embedded, const std::string& prefix,
                  const Pass& pass) {
  Var x = embedded;
  if (pass.training) x = g.dropout(x, model.encoder.keepProb, *pass.rng);
  return biGru(g, model.params, prefix, x);
}

Var bidafAttention(Graph& g, const Model& model, Var paragraph, Var question) {
  const auto& store = model.params;
  const std::size_t width = g.value(paragraph).cols();
  if (g.value(question).cols() != width) {
    throw Error("bidafAttention: paragraph " + g.value(paragraph).shapeString() +
                " and question " + g.value(question).shapeString() + " widths differ");
  }
  const Var wp = g.parameter(store, "bidaf.w_p");
  const Var wq = g.parameter(store, "bidaf.w_q");
  const Var wpq = g.parameter(store, "bidaf.w_pq");

  const Var questionT = g.transpose(question);
  const Var cross = g.matmul(g.mulRow(paragraph, wpq), questionT);
  const Var similarity = g.addRow(g.addCol(cross, g.matmul(paragraph, wp)),
                                  g.transpose(g.matmul(question, wq)));

  const Var attended = g.matmul(g.rowSoftmax(similarity), question);
  const Var summaryWeights = g.rowSoftmax(g.transpose(g.rowMax(similarity)));
  const Var summary = g.matmul(summaryWeights, paragraph);

  const std::array<Var, 4> parts{paragraph, attended, g.mul(paragraph, attended),
                                 g.mulRow(paragraph, summary)};
  return g.concatCols(parts);
}

ContextEmbedding selfAttend(Graph& g, const Model& model, Var x, const Pass& pass) {
  const std::size_t n = g.value(x).rows();
  if (n == 0) throw Error("selfAttend: empty input");
  Var mixed = x;
  if (n > 1) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.value(x).cols()));
    const Var scores = g.scale(g.matmul(x, g.transpose(x)), scale);
    std::vector<unsigned char> mask(n * n, 1);
    for (std::size_t i = 0; i < n; ++i) mask[i * n + i] = 0;
    mixed = g.add(x, g.matmul(g.rowSoftmax(scores, &mask), x));
  }
  if (pass.training) mixed = g.dropout(mixed, model.encoder.keepProb, *pass.rng);
  return {biGru(g, model.params, "self_attn", mixed), n};
}

Var encodeQuestion(Graph& g, const Model& model, const std::vector<std::string>& question,
                   const Pass& pass) {
  return contextualize(g, model, embedTokens(g, model, question), "ctx.question", pass);
}

ContextEmbedding encodeParagraph(Graph& g, const Model& model, Var question,
                                 const std::vector<std::string>& tokens, const Pass& pass) {
  const Var para = contextualize(g, model, embedTokens(g, model, tokens), "ctx.paragraph", pass);
  return selfAttend(g, model, bidafAttention(g, model, para, question), pass);
}

}  // namespace hasqa
