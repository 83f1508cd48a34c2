#include <cmath>
#include <map>

#include "doctest.h"
#include "hasqa/error.hpp"
#include "hasqa/layers.hpp"
#include "hasqa/quality.hpp"
#include "support/conditionality.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

using namespace hasqa;
using hasqa::testing::randomContext;
using hasqa::testing::tinyModel;

TEST_SUITE("qualityLogit") {
  TEST_CASE("zero weight vector gives zero") {
    Model m = tinyModel(1);
    hasqa::testing::setAll(m, "quality.w", 0.0);
    Rng rng(1);
    Graph g(false);
    const ContextEmbedding c = randomContext(g, m, 5, rng);
    CHECK(g.value(qualityLogit(g, m, c, startDistribution(g, m, c)))[0] == 0.0);
  }

  TEST_CASE("uniform start distribution averages the quality states") {
    Model m = tinyModel(2);
    hasqa::testing::setAll(m, "span.start.w", 0.0);
    Rng rng(2);
    Graph g(false);
    const ContextEmbedding c = randomContext(g, m, 4, rng);
    const double q = g.value(qualityLogit(g, m, c, startDistribution(g, m, c)))[0];
    const Tensor states = g.value(biGru(g, m.params, "quality", c.values));
    const Tensor& w = m.params.value("quality.w");
    double expected = 0;
    for (std::size_t j = 0; j < states.cols(); ++j) {
      double mean = 0;
      for (std::size_t i = 0; i < 4; ++i) mean += states(i, j) / 4.0;
      expected += mean * w[j];
    }
    CHECK(q == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("gradient check through the encoder") {
    Model m = tinyModel(3);
    const auto r = hasqa::testing::checkGradients(m.params, [&](Graph& g) {
      const Var q = encodeQuestion(g, m, {"what", "do"}, {});
      const ContextEmbedding c = encodeParagraph(g, m, q, {"camels", "store", "fat"}, {});
      return qualityLogit(g, m, c, startDistribution(g, m, c));
    });
    CHECK_MESSAGE(r.maxRelError < 1e-4, r.worst);
  }

  TEST_CASE("blocked start path equals a frozen start distribution") {
    Model m = tinyModel(3);
    auto gradients = [&](bool through, const Tensor* frozen) {
      Graph g;
      const Var q = encodeQuestion(g, m, {"what", "do"}, {});
      const ContextEmbedding c = encodeParagraph(g, m, q, {"camels", "store", "fat"}, {});
      StartDistribution sd = startDistribution(g, m, c);
      if (frozen) sd.probs = g.constant(*frozen);
      g.backward(qualityLogit(g, m, c, sd, through));
      return g.parameterGradients();
    };
    Graph probe(false);
    const Var q = encodeQuestion(probe, m, {"what", "do"}, {});
    const ContextEmbedding c = encodeParagraph(probe, m, q, {"camels", "store", "fat"}, {});
    const Tensor frozen = probe.value(startDistribution(probe, m, c).probs);
    const GradientMap blocked = gradients(false, nullptr);
    const GradientMap reference = gradients(true, &frozen);
    for (const auto& [name, t] : reference) {
      const Tensor& b = blocked.at(name);
      for (std::size_t i = 0; i < t.size(); ++i) CHECK(b[i] == doctest::Approx(t[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("blocking the start path removes start-head gradients") {
    Model m = tinyModel(4);
    for (bool through : {true, false}) {
      Graph g;
      Rng rng(4);
      const ContextEmbedding c = randomContext(g, m, 4, rng);
      g.backward(qualityLogit(g, m, c, startDistribution(g, m, c), through));
      const auto grads = g.parameterGradients();
      double norm = 0;
      for (const auto& [name, t] : grads)
        if (name.rfind("span.start", 0) == 0)
          for (double v : t.values()) norm += std::abs(v);
      if (through) {
        CHECK(norm > 0.0);
      } else {
        CHECK(norm == 0.0);
      }
    }
  }
}

TEST_SUITE("normalizeQualities") {
  TEST_CASE("examples") {
    const auto a = normalizeQualities(std::vector<double>{0, 0});
    CHECK(a.probs == std::vector<double>{0.5, 0.5});
    CHECK(normalizeQualities(std::vector<double>{-3.2}).probs == std::vector<double>{1.0});
    const auto b = normalizeQualities(std::vector<double>{std::log(3.0), 0});
    CHECK(b.probs[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(b.probs[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(b.logits == std::vector<double>{std::log(3.0), 0});
  }

  TEST_CASE("rejects empty and non-finite input") {
    CHECK_THROWS_AS(normalizeQualities(std::vector<double>{}), Error);
    CHECK_THROWS_AS(normalizeQualities(std::vector<double>{1.0, std::nan("")}), Error);
  }

  TEST_CASE("distribution, order and shift invariance") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> logits(1 + rng.below(20));
      for (double& l : logits) l = rng.uniform(-50, 50);
      const auto q = normalizeQualities(logits);
      REQUIRE(q.probs.size() == logits.size());
      double total = 0;
      for (double p : q.probs) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
      auto shifted = logits;
      const double c = rng.uniform(-300, 300);
      for (double& l : shifted) l += c;
      const auto qs = normalizeQualities(shifted);
      for (std::size_t i = 0; i < logits.size(); ++i) {
        CHECK(std::abs(q.probs[i] - qs.probs[i]) < 1e-9);
        for (std::size_t j = 0; j < logits.size(); ++j)
          if (logits[i] > logits[j]) CHECK(q.probs[i] >= q.probs[j]);
      }
    }
  }
}

TEST_SUITE("samplePair") {
  const std::vector<std::string> q{"what"};

  TEST_CASE("forced pair") {
    const QAExample ex = hasqa::testing::makeExample("e", q, {"fat"}, {{"lean", "body"}, {"store", "fat"}});
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
      const auto pair = samplePair(ex, rng);
      REQUIRE(pair);
      CHECK(pair->positive == 1);
      CHECK(pair->negative == std::optional<std::size_t>{0});
    }
  }

  TEST_CASE("no negative and no positive") {
    Rng rng(2);
    const QAExample allPos = hasqa::testing::makeExample("e", q, {"fat"}, {{"fat"}, {"a", "fat"}});
    const auto pair = samplePair(allPos, rng);
    REQUIRE(pair);
    CHECK(!pair->negative);
    const QAExample allNeg = hasqa::testing::makeExample("e", q, {"fat"}, {{"lean"}, {"a"}});
    CHECK(!samplePair(allNeg, rng));
  }

  TEST_CASE("uniform over each pool and reproducible") {
    const QAExample ex = hasqa::testing::makeExample(
        "e", q, {"fat"}, {{"fat"}, {"lean"}, {"fat", "a"}, {"b"}, {"c", "fat"}, {"d"}});
    Rng a(3), b(3);
    std::map<std::size_t, int> pos, neg;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) {
      const auto pa = samplePair(ex, a);
      const auto pb = samplePair(ex, b);
      REQUIRE(pa);
      CHECK(pa->positive == pb->positive);
      CHECK(pa->negative == pb->negative);
      ++pos[pa->positive];
      ++neg[*pa->negative];
    }
    CHECK(pos.size() == 3);
    CHECK(neg.size() == 3);
    // Binomial(30000, 1/3): sd ≈ 82, so ±600 is a >7σ window.
    for (auto [idx, c] : pos) {
      CHECK(ex.paragraphs[idx].positive());
      CHECK(std::abs(c - draws / 3) < 600);
    }
    for (auto [idx, c] : neg) {
      CHECK(!ex.paragraphs[idx].positive());
      CHECK(std::abs(c - draws / 3) < 600);
    }
  }
}
