#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "commlang/config.hpp"

using namespace commlang;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "paths": {"comments": ["c.jsonl"], "posts": ["p.jsonl"], "tagger_corpus": "t.txt"},
    "communities": {"names": ["sci", "games"], "distractor_members": ["x", "y"]}
  })");
}

std::string field_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  auto c = parse_config(minimal(), "/base");
  EXPECT_EQ(c.distractor, "merged_others");
  EXPECT_EQ(c.min_thread_comments, 100u);
  EXPECT_EQ(c.test_fraction, 0.2);
  EXPECT_EQ(c.high_k, 100u);
  EXPECT_EQ(c.low_k, 5u);
  EXPECT_EQ(c.secondary_k, (std::vector<std::size_t>{50, 20}));
  EXPECT_EQ(c.hyb15k, 15000u);
  EXPECT_EQ(c.n_general, 500u);
  EXPECT_EQ(c.n_per_community, 30u);
  EXPECT_EQ(c.topic_k, (std::vector<std::size_t>{100, 200}));
  EXPECT_EQ(c.clusters, 50u);
  EXPECT_EQ(c.labels(), (std::vector<std::string>{"sci", "games", "merged_others"}));
  EXPECT_EQ(c.sources(), (std::vector<std::string>{"sci", "games", "x", "y"}));
  EXPECT_EQ(c.resolve("c.jsonl"), std::filesystem::path("/base/c.jsonl"));
  EXPECT_EQ(c.resolve("/abs/f"), std::filesystem::path("/abs/f"));
}

TEST(Config, UnknownKeysNamedByPath) {
  auto j = minimal();
  j["thresholds"]["min_thread_coments"] = 5;
  EXPECT_EQ(field_of(j), "thresholds.min_thread_coments");
  j = minimal();
  j["extra"] = 1;
  EXPECT_EQ(field_of(j), "extra");
}

TEST(Config, InvalidValuesNamedByPath) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"thresholds": {"test_fraction": 1.0}})", "thresholds.test_fraction"},
      {R"({"thresholds": {"low_k": 100}})", "thresholds.low_k"},
      {R"({"thresholds": {"min_thread_comments": -3}})", "thresholds.min_thread_comments"},
      {R"({"thresholds": {"high_k": "many"}})", "thresholds.high_k"},
      {R"({"topic": {"K": [50, 1]}})", "topic.K[1]"},
      {R"({"topic": {"K": [50, 50]}})", "topic.K[1]"},
      {R"({"topic": {"K": []}})", "topic.K"},
      {R"({"topic": {"eta": 0}})", "topic.eta"},
      {R"({"vocab": {"hyb15k": 0}})", "vocab.hyb15k"},
      {R"({"communities": {"names": ["sci", "sci"]}})", "communities.names[1]"},
      {R"({"communities": {"distractor": "x"}})", "communities.distractor"},
      {R"({"communities": {"names": []}})", "communities.names"},
      {R"({"paths": {"comments": []}})", "paths.comments"},
      {R"({"seeds": 4})", "seeds"},
  };
  for (const auto& [patch, field] : cases) {
    auto j = minimal();
    j.merge_patch(json::parse(patch));
    EXPECT_EQ(field_of(j), field) << patch;
  }
}

TEST(Config, HashIgnoresKeyOrderAndWorkspace) {
  auto a = minimal();
  auto b = json::parse(R"({
    "communities": {"distractor_members": ["x", "y"], "names": ["sci", "games"]},
    "paths": {"tagger_corpus": "t.txt", "posts": ["p.jsonl"], "comments": ["c.jsonl"], "workspace": "elsewhere"}
  })");
  EXPECT_EQ(parse_config(a).hash(), parse_config(b).hash());
  EXPECT_EQ(parse_config(a, "/x").hash(), parse_config(a, "/y").hash());
}

TEST(Config, HashSensitiveToOutputFields) {
  const auto base = parse_config(minimal()).hash();
  for (const char* patch : {R"({"seeds": {"lda": 3}})", R"({"topic": {"K": [100]}})",
                            R"({"vocab": {"n_general": 499}})", R"({"communities": {"names": ["games", "sci"]}})"}) {
    auto j = minimal();
    j.merge_patch(json::parse(patch));
    EXPECT_NE(parse_config(j).hash(), base) << patch;
  }
  auto c = parse_config(minimal());
  c.set_all_seeds(7);
  EXPECT_NE(c.hash(), base);
  EXPECT_EQ(c.seed_split, 7u);
  EXPECT_EQ(c.seed_tagger, 7u);
}

TEST(Config, LoadFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "commlang_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "ok.json") << minimal().dump();
  std::ofstream(dir / "bad.json") << "{ not json";
  auto c = load_config(dir / "ok.json");
  EXPECT_EQ(c.base_dir, dir);
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "absent.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Config, ShippedFixtureParses) {
  auto c = load_config(COMMLANG_SOURCE_DIR "/data/fixture/config.json");
  EXPECT_EQ(c.communities.size(), 4u);
  EXPECT_EQ(c.topic_k, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(c.seed_kmeans, 13u);
}
