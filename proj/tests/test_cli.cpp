#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hasqa/checkpoint.hpp"
#include "hasqa/commands.hpp"
#include "hasqa/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace hasqa;
namespace fs = std::filesystem;

namespace {

fs::path workDir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "hasqa_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workDir() / name).string(); }

void writeText(const std::string& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string readText(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tinyRunConfig(std::size_t epochs = 1) {
  return R"({"word_dim":4,"char_dim":2,"char_conv_width":3,"char_out_dim":2,"hidden_dim":3,)"
         R"("keep_prob":0.9,"batch_size":4,"epochs":)" +
         std::to_string(epochs) + R"(,"seed":5})";
}

// Synthetic training set shared by the CLI tests.
const std::string& syntheticData() {
  static const std::string data = [] {
    writeText(path("syn.json"),
              R"({"num_examples":12,"vocab_size":60,"paragraphs_per_question":3,"paragraph_len":16,"seed":3})");
    commands::Options o;
    o.config = path("syn.json");
    o.out = path("syn.jsonl");
    commands::makeSynthetic(o);
    return o.out;
  }();
  return data;
}

commands::Options trainOptions(const std::string& out, std::size_t epochs = 1) {
  writeText(path("run" + std::to_string(epochs) + ".json"), tinyRunConfig(epochs));
  commands::Options o;
  o.config = path("run" + std::to_string(epochs) + ".json");
  o.data = syntheticData();
  o.out = path(out);
  o.quiet = true;
  return o;
}

int runCli(const std::string& args, std::string* stderrText = nullptr) {
  const std::string errPath = path("stderr.txt");
  const int status = std::system((std::string(HASQA_CLI_PATH) + " " + args + " >" + path("stdout.txt") +
                                  " 2>" + errPath).c_str());
  if (stderrText) *stderrText = readText(errPath);
  return status;
}

}  // namespace

TEST_SUITE("cli stats") {
  TEST_CASE("fixture with counts 2, 1, 0") {
    writeText(path("stats.jsonl"),
              R"({"id":"s","question":"q","answers":["fat"],"paragraphs":[)"
              R"({"id":"a","text":"fat or fat"},{"id":"b","text":"fat"},{"id":"c","text":"lean"}]})"
              "\n");
    commands::Options o;
    o.data = path("stats.jsonl");
    const auto obj = nlohmann::json::parse(commands::stats(o));
    CHECK(obj["neg_paragraph_ratio"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(obj["avg_answer_span_count"].get<double>() == 1.5);
    CHECK(obj["paragraphs"].get<int>() == 3);
    CHECK(commands::stats(o) == commands::stats(o));
  }

  TEST_CASE("empty file is an error with a nonzero exit") {
    writeText(path("empty.jsonl"), "");
    commands::Options o;
    o.data = path("empty.jsonl");
    CHECK_THROWS_AS(commands::stats(o), Error);
    std::string err;
    CHECK(runCli("stats --data " + o.data, &err) != 0);
    CHECK(err.rfind("error: ", 0) == 0);
    CHECK(std::count(err.begin(), err.end(), '\n') == 1);
  }
}

TEST_SUITE("cli make-synthetic") {
  TEST_CASE("identical bytes, loadable, and stats match the generator") {
    commands::Options o;
    o.config = path("syn.json");
    o.out = path("syn_again.jsonl");
    syntheticData();
    commands::makeSynthetic(o);
    CHECK(readText(o.out) == readText(syntheticData()));
    const Dataset d = loadDataset(o.out);
    CHECK(d.size() == 12);
    commands::Options s;
    s.data = o.out;
    const auto obj = nlohmann::json::parse(commands::stats(s));
    // One distractor of three paragraphs per question.
    CHECK(obj["neg_paragraph_ratio"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(obj["avg_answer_span_count"].get<double>() >= 1.0);
    CHECK(obj["avg_answer_span_count"].get<double>() <= 3.0);
  }
}

TEST_SUITE("cli train") {
  TEST_CASE("writes a loadable checkpoint and a log") {
    const auto lines = commands::train(trainOptions("one.ck"));
    REQUIRE(lines.size() == 1);
    const auto first = nlohmann::json::parse(lines[0]);
    CHECK(first["epoch"].get<int>() == 0);
    CHECK(std::isfinite(first["mean_loss"].get<double>()));
    const Checkpoint ck = loadCheckpoint(path("one.ck"));
    CHECK(ck.epoch == 1);
    CHECK(ck.model.encoder.hiddenDim == 3);
    CHECK(readText(path("one.ck.log")) == lines[0] + "\n");
  }

  TEST_CASE("seeded reruns reproduce the loss log") {
    auto a = trainOptions("rerun_a.ck", 2);
    auto b = trainOptions("rerun_b.ck", 2);
    commands::train(a);
    commands::train(b);
    CHECK(readText(a.out + ".log") == readText(b.out + ".log"));
    CHECK(readText(a.out) == readText(b.out));
  }

  TEST_CASE("resuming continues the epoch counter and matches an uninterrupted run") {
    commands::train(trainOptions("resume_full.ck", 2));
    commands::train(trainOptions("resume_1.ck", 1));
    auto o = trainOptions("resume_2.ck", 1);
    o.checkpoint = path("resume_1.ck");
    const auto lines = commands::train(o);
    REQUIRE(lines.size() == 1);
    CHECK(nlohmann::json::parse(lines[0])["epoch"].get<int>() == 1);
    CHECK(loadCheckpoint(o.out).epoch == 2);
    const auto full = readText(path("resume_full.ck.log"));
    CHECK(full.substr(full.find('\n') + 1) == lines[0] + "\n");
    const Checkpoint a = loadCheckpoint(path("resume_full.ck"));
    const Checkpoint b = loadCheckpoint(o.out);
    for (const auto& [name, e] : a.model.params.entries()) CHECK(e.value == b.model.params.value(name));
  }

  TEST_CASE("missing config and bad overrides are errors") {
    commands::Options o = trainOptions("bad.ck");
    o.config.clear();
    CHECK_THROWS_AS(commands::train(o), Error);
    o = trainOptions("bad.ck");
    o.mode = "mean";
    CHECK_THROWS_AS(commands::train(o), Error);
    CHECK(runCli("train --data " + syntheticData() + " --out " + path("x.ck") + " --config " +
                 path("missing.json")) != 0);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("load then save is byte-identical and predictions match") {
    commands::train(trainOptions("rt.ck"));
    const Checkpoint ck = loadCheckpoint(path("rt.ck"));
    saveCheckpoint(path("rt_again.ck"), ck);
    CHECK(readText(path("rt.ck")) == readText(path("rt_again.ck")));
    commands::Options p;
    p.data = syntheticData();
    p.checkpoint = path("rt.ck");
    p.out = path("rt_a.pred");
    commands::predict(p);
    p.checkpoint = path("rt_again.ck");
    p.out = path("rt_b.pred");
    commands::predict(p);
    CHECK(readText(path("rt_a.pred")) == readText(path("rt_b.pred")));
  }

  TEST_CASE("optimizer state and frozen flags survive") {
    commands::train(trainOptions("state.ck"));
    Checkpoint ck = loadCheckpoint(path("state.ck"));
    ck.model.params.at("emb.word").frozen = true;
    ck.rng = Rng(77, 5);
    saveCheckpoint(path("state2.ck"), ck);
    const Checkpoint back = loadCheckpoint(path("state2.ck"));
    CHECK(back.model.params.at("emb.word").frozen);
    CHECK(back.rng == ck.rng);
    for (const auto& [name, e] : ck.model.params.entries()) {
      CHECK(back.model.params.at(name).meanSquaredGrad == e.meanSquaredGrad);
      CHECK(back.model.params.at(name).meanSquaredDelta == e.meanSquaredDelta);
    }
    CHECK(back.model.vocab.wordCount() == ck.model.vocab.wordCount());
  }

  TEST_CASE("corrupt files are rejected") {
    commands::train(trainOptions("corrupt.ck"));
    const std::string bytes = readText(path("corrupt.ck"));
    writeText(path("short.ck"), bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(loadCheckpoint(path("short.ck")), Error);
    writeText(path("long.ck"), bytes + "12345678");
    CHECK_THROWS_AS(loadCheckpoint(path("long.ck")), Error);
    writeText(path("magic.ck"), "NOTACKPT" + bytes.substr(8));
    CHECK_THROWS_AS(loadCheckpoint(path("magic.ck")), Error);
    CHECK_THROWS_AS(loadCheckpoint(path("absent.ck")), Error);
  }
}

TEST_SUITE("cli predict") {
  TEST_CASE("single-paragraph data scores with the paragraph alone") {
    commands::train(trainOptions("k1.ck"));
    commands::Options p;
    p.data = syntheticData();
    p.checkpoint = path("k1.ck");
    p.out = path("k1.pred");
    p.maxParagraphs = 1;
    commands::predict(p);
    const auto preds = readPredictions(p.out);
    const Checkpoint ck = loadCheckpoint(p.checkpoint);
    const Dataset data = loadDataset(syntheticData(), {1, 400});
    REQUIRE(preds.size() == data.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      CHECK(preds[i].paragraphProbs == std::vector<double>{1.0});
      const Prediction direct = hasqa::predict(data[i], ck.model, inferenceConfig(ck.config.train));
      for (const auto& g : direct.paragraphs[0].groups)
        CHECK(preds[i].answerScores.at(g.answerText) == g.aggregatedProb);
    }
    p.out = path("k1_again.pred");
    commands::predict(p);
    CHECK(readText(path("k1.pred")) == readText(p.out));
  }

  TEST_CASE("exhaustive beams agree with the brute-force mixture") {
    commands::train(trainOptions("bf.ck"));
    Rng rng(9);
    Dataset tiny;
    for (int i = 0; i < 5; ++i) tiny.push_back(hasqa::testing::randomInstance("t" + std::to_string(i), rng));
    writeDataset(path("tiny.jsonl"), tiny);
    commands::Options p;
    p.data = path("tiny.jsonl");
    p.checkpoint = path("bf.ck");
    p.out = path("bf.pred");
    p.k1 = 8;
    p.k2 = 8;
    p.mode = "sum";
    commands::predict(p);
    const auto preds = readPredictions(p.out);
    const Checkpoint ck = loadCheckpoint(p.checkpoint);
    const Dataset reloaded = loadDataset(p.data);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto oracle = hasqa::testing::bruteForceMixture(reloaded[i], ck.model, AggregationMode::Sum);
      CHECK(preds[i].bestAnswer == oracle.best);
      REQUIRE(preds[i].answerScores.size() == oracle.scores.size());
      for (const auto& [a, s] : oracle.scores) CHECK(std::abs(preds[i].answerScores.at(a) - s) < 1e-9);
    }
  }
}

TEST_SUITE("cli evaluate") {
  const std::string data =
      R"({"id":"q1","question":"q","answers":["fat"],"paragraphs":[{"id":"a","text":"store fat"},{"id":"b","text":"lean"}]})"
      "\n"
      R"({"id":"q2","question":"q","answers":["fat"],"paragraphs":[{"id":"a","text":"lean"},{"id":"b","text":"body fat"},{"id":"c","text":"a"}]})"
      "\n"
      R"({"id":"q3","question":"q","answers":["lean"],"paragraphs":[{"id":"a","text":"fat"}]})"
      "\n";

  TEST_CASE("hand fixture") {
    writeText(path("eval.jsonl"), data);
    writeText(path("eval.pred"),
              R"({"id":"q1","answer":"The Fat.","scores":{},"paragraph_probs":[0.8,0.2]})"
              "\n"
              R"({"id":"q2","answer":"body fat","scores":{},"paragraph_probs":[0.5,0.3,0.2]})"
              "\n"
              R"({"id":"q3","answer":"camel","scores":{},"paragraph_probs":[1.0]})"
              "\n");
    commands::Options o;
    o.data = path("eval.jsonl");
    o.predictions = path("eval.pred");
    o.out = path("eval.metrics");
    const auto obj = nlohmann::json::parse(commands::evaluate(o));
    CHECK(obj["em"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(obj["f1"].get<double>() == doctest::Approx(5.0 / 9).epsilon(1e-12));
    CHECK(obj["map"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(obj["n"].get<int>() == 3);
    CHECK(nlohmann::json::parse(readText(o.out)) == obj);
  }

  TEST_CASE("perfect predictions") {
    writeText(path("eval.jsonl"), data);
    writeText(path("perfect.pred"),
              R"({"id":"q1","answer":"fat","scores":{},"paragraph_probs":[0.8,0.2]})"
              "\n"
              R"({"id":"q2","answer":"fat","scores":{},"paragraph_probs":[0.1,0.7,0.2]})"
              "\n"
              R"({"id":"q3","answer":"lean","scores":{},"paragraph_probs":[1.0]})"
              "\n");
    commands::Options o;
    o.data = path("eval.jsonl");
    o.predictions = path("perfect.pred");
    const auto obj = nlohmann::json::parse(commands::evaluate(o));
    CHECK(obj["em"].get<double>() == 1.0);
    CHECK(obj["f1"].get<double>() == 1.0);
  }

  TEST_CASE("missing id is named on standard error") {
    writeText(path("eval.jsonl"), data);
    writeText(path("partial.pred"),
              R"({"id":"q1","answer":"fat","scores":{},"paragraph_probs":[0.8,0.2]})"
              "\n"
              R"({"id":"q3","answer":"lean","scores":{},"paragraph_probs":[1.0]})"
              "\n");
    std::string err;
    CHECK(runCli("evaluate --predictions " + path("partial.pred") + " --data " + path("eval.jsonl"), &err) != 0);
    CHECK(err.find("q2") != std::string::npos);
    CHECK(runCli("evaluate --predictions " + path("perfect.pred") + " --data " + path("eval.jsonl")) == 0);
  }
}

TEST_SUITE("config") {
  TEST_CASE("round-trip and rejection of unknown keys") {
    const RunConfig c = runConfigFromJson(nlohmann::json::parse(tinyRunConfig(3)));
    CHECK(c.encoder.hiddenDim == 3);
    CHECK(c.train.epochs == 3);
    const RunConfig back = runConfigFromJson(runConfigToJson(c));
    CHECK(runConfigToJson(back) == runConfigToJson(c));
    CHECK_THROWS_AS(runConfigFromJson(nlohmann::json::parse(R"({"hiden_dim":3})")), Error);
    CHECK_THROWS_AS(runConfigFromJson(nlohmann::json::parse(R"({"hidden_dim":0})")), Error);
    CHECK_THROWS_AS(runConfigFromJson(nlohmann::json::parse(R"({"mode":"avg"})")), Error);
    const SyntheticConfig s = syntheticConfigFromJson(nlohmann::json::parse(R"({"num_examples":7})"));
    CHECK(s.numExamples == 7);
    CHECK(syntheticConfigToJson(syntheticConfigFromJson(syntheticConfigToJson(s))) == syntheticConfigToJson(s));
    CHECK_THROWS_AS(syntheticConfigFromJson(nlohmann::json::parse(R"({"examples":7})")), Error);
  }

  TEST_CASE("command-line overrides") {
    RunConfig c;
    commands::Options o;
    o.mode = "sum";
    o.k1 = 5;
    o.k2 = 2;
    o.seed = 99;
    o.maxParagraphs = 4;
    o.maxTokens = 50;
    commands::applyOverrides(o, c);
    CHECK(c.train.mode == AggregationMode::Sum);
    CHECK(c.train.k1 == 5);
    CHECK(c.train.k2 == 2);
    CHECK(c.train.seed == 99);
    CHECK(c.limits.maxParagraphs == 4);
    CHECK(c.limits.maxParagraphTokens == 50);
    o = {};
    o.k1 = 0;
    CHECK_THROWS_AS(commands::applyOverrides(o, c), Error);
  }

  TEST_CASE("bundled configs load") {
    for (const char* name : {"desk.json", "full.json"}) {
      const RunConfig c = loadRunConfig(std::string(HASQA_CONFIG_DIR) + "/" + name);
      CHECK_NOTHROW(c.encoder.validate());
    }
    const RunConfig fullSize = loadRunConfig(std::string(HASQA_CONFIG_DIR) + "/full.json");
    CHECK(fullSize.encoder.hiddenDim == 200);
    CHECK(fullSize.encoder.wordDim == 300);
    CHECK(fullSize.encoder.charDim == 20);
    CHECK(fullSize.train.batchSize == 30);
    CHECK(fullSize.train.k1 == 3);
    CHECK(fullSize.train.k2 == 1);
    CHECK(fullSize.encoder.keepProb == 0.8);
    for (const char* name : {"synthetic_train.json", "synthetic_test.json"}) {
      CHECK_NOTHROW(loadSyntheticConfig(std::string(HASQA_CONFIG_DIR) + "/" + name));
    }
  }
}
