#include "hasqa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hasqa/error.hpp"
#include "hasqa/rng.hpp"

namespace hasqa {
namespace {

using Segment = std::vector<std::string>;

std::string word(char kind, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%02zu", kind, i);
  return buf;
}

struct Lexicon {
  std::vector<std::string> cues, entities, fillers;
};

Lexicon makeLexicon(std::size_t vocabSize) {
  Lexicon lex;
  const std::size_t cues = vocabSize / 5;
  const std::size_t entities = (vocabSize * 2) / 5;
  const std::size_t fillers = vocabSize - cues - entities;
  for (std::size_t i = 0; i < cues; ++i) lex.cues.push_back(word('c', i));
  for (std::size_t i = 0; i < entities; ++i) lex.entities.push_back(word('e', i));
  for (std::size_t i = 0; i < fillers; ++i) lex.fillers.push_back(word('f', i));
  return lex;
}

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.below(items.size())];
}

std::pair<std::string, std::string> cuePair(const Lexicon& lex, Rng& rng) {
  const std::size_t a = rng.below(lex.cues.size());
  std::size_t b = rng.below(lex.cues.size() - 1);
  if (b >= a) ++b;
  return {lex.cues[a], lex.cues[b]};
}

Segment decoy(const Lexicon& lex, const std::pair<std::string, std::string>& avoidCue,
              const Segment& answer, Rng& rng) {
  auto cue = cuePair(lex, rng);
  while (cue == avoidCue) cue = cuePair(lex, rng);
  Segment seg{cue.first, cue.second};
  const std::size_t len = 1 + rng.below(2);
  while (seg.size() < 2 + len) {
    const auto& e = pick(lex.entities, rng);
    if (std::find(answer.begin(), answer.end(), e) == answer.end()) seg.push_back(e);
  }
  return seg;
}

// Lays segments out in random order with at least one filler between
// neighbours, so entity runs stay maximal.
std::vector<std::string> layout(std::vector<Segment> segments, std::size_t length,
                                const Lexicon& lex, Rng& rng) {
  rng.shuffle(segments);
  std::size_t used = 0;
  for (const auto& s : segments) used += s.size();
  const std::size_t mandatory = segments.empty() ? 0 : segments.size() - 1;
  if (used + mandatory > length) {
    throw Error("synthetic: paragraphLen " + std::to_string(length) +
                " cannot hold the planted segments (" + std::to_string(used + mandatory) +
                " tokens needed)");
  }
  std::vector<std::size_t> gaps(segments.size() + 1, 0);
  for (std::size_t g = 1; g + 1 < gaps.size(); ++g) gaps[g] = 1;
  for (std::size_t spare = length - used - mandatory; spare > 0; --spare) {
    ++gaps[rng.below(gaps.size())];
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i <= segments.size(); ++i) {
    for (std::size_t f = 0; f < gaps[i]; ++f) out.push_back(pick(lex.fillers, rng));
    if (i < segments.size()) out.insert(out.end(), segments[i].begin(), segments[i].end());
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

Dataset generateSynthetic(const SyntheticConfig& c) {
  if (c.numExamples == 0) throw Error("synthetic: numExamples must be positive");
  if (c.paragraphsPerQuestion == 0) throw Error("synthetic: paragraphsPerQuestion must be positive");
  if (c.vocabSize < 15) throw Error("synthetic: vocabSize must be at least 15");
  if (c.distractorRatio < 0.0 || c.distractorRatio > 1.0) {
    throw Error("synthetic: distractorRatio must be in [0, 1]");
  }
  if (c.multiSpanProb < 0.0 || c.multiSpanProb > 1.0) {
    throw Error("synthetic: multiSpanProb must be in [0, 1]");
  }
  if (c.minOccurrences < 1 || c.maxOccurrences < c.minOccurrences) {
    throw Error("synthetic: need 1 <= minOccurrences <= maxOccurrences");
  }
  const Lexicon lex = makeLexicon(c.vocabSize);
  const std::size_t k = c.paragraphsPerQuestion;
  const auto distractors = std::min<std::size_t>(
      k - 1, static_cast<std::size_t>(std::llround(c.distractorRatio * static_cast<double>(k))));

  Rng root(c.seed);
  Dataset out;
  out.reserve(c.numExamples);
  for (std::size_t n = 0; n < c.numExamples; ++n) {
    Rng rng = root.fork(n);
    QAExample ex;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", n);
    ex.id = id;

    const auto cue = cuePair(lex, rng);
    Segment answer{pick(lex.entities, rng)};
    if (rng.bernoulli(0.5)) {
      std::string second = pick(lex.entities, rng);
      while (second == answer[0]) second = pick(lex.entities, rng);
      answer.push_back(second);
    }
    ex.answers = {join(answer)};
    ex.questionText =
        join({pick(lex.fillers, rng), pick(lex.fillers, rng), cue.first, cue.second}) + " ?";
    ex.question = tokenize(ex.questionText).tokens;

    std::vector<bool> isDistractor(k, false);
    std::fill(isDistractor.begin(), isDistractor.begin() + static_cast<std::ptrdiff_t>(distractors), true);
    rng.shuffle(isDistractor);

    for (std::size_t p = 0; p < k; ++p) {
      std::vector<Segment> segments;
      if (isDistractor[p]) {
        segments.push_back(decoy(lex, cue, answer, rng));
        segments.push_back(decoy(lex, cue, answer, rng));
      } else {
        Segment cued{cue.first, cue.second};
        cued.insert(cued.end(), answer.begin(), answer.end());
        segments.push_back(std::move(cued));
        std::size_t occurrences = 1;
        if (rng.bernoulli(c.multiSpanProb)) {
          occurrences = c.minOccurrences + rng.below(c.maxOccurrences - c.minOccurrences + 1);
        }
        for (std::size_t o = 1; o < occurrences; ++o) segments.push_back(answer);
        segments.push_back(decoy(lex, cue, answer, rng));
      }
      const auto tokens = layout(std::move(segments), c.paragraphLen, lex, rng);
      ex.paragraphs.push_back(makeParagraph("p" + std::to_string(p), join(tokens), ex.answers));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace hasqa
