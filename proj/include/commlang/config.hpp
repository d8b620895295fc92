#pragma once

// Pipeline configuration: JSON with full defaulting, strict key checking,
// and a canonical hash recorded in every artifact.

#include <concepts>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "commlang/common.hpp"

namespace commlang {

// Invalid configuration; carries the dotted path of the offending field.
struct ConfigError : Error {
  ConfigError(std::string path, const std::string& msg) : Error(path + ": " + msg), field(std::move(path)) {}
  std::string field;
};

struct PipelineConfig {
  // paths (relative paths resolve against base_dir)
  std::filesystem::path base_dir = ".";
  std::vector<std::string> comment_files;
  std::vector<std::string> post_files;
  std::string tagger_corpus;
  std::string tagset_file;    // empty: built-in inventory
  std::string stopwords_file; // empty: built-in list
  std::string workspace = "workspace";

  // communities
  std::vector<std::string> communities;
  std::string distractor = "merged_others";
  std::vector<std::string> distractor_members;

  // thresholds
  std::size_t min_thread_comments = 100;
  double test_fraction = 0.2;
  std::size_t min_user_comments = 1;
  bool test_drop_nonpositive = false;
  std::size_t kindex_min_comments = 100;
  std::size_t high_k = 100;
  std::size_t low_k = 5;
  std::vector<std::size_t> secondary_k = {50, 20};
  std::size_t histogram_bin_width = 1;

  // vocab
  std::size_t word_min_count = 2;
  std::size_t top_k_word = 156000;
  std::size_t hyb15k = 15000;
  std::size_t n_general = 500;
  std::size_t n_per_community = 30;

  // topic
  std::vector<std::size_t> topic_k = {100, 200};
  double alpha = 0.0;  // <= 0: 1/K
  double eta = 0.01;
  int lda_iterations = 200;
  std::size_t clusters = 50;
  std::size_t max_docs_per_community = 0;  // 0: no cap
  std::size_t top_words = 10;

  // tagger
  int tagger_iterations = 5;
  double tagger_dev_fraction = 0.1;

  // seeds
  std::uint64_t seed_split = 1;
  std::uint64_t seed_lda = 2;
  std::uint64_t seed_kmeans = 3;
  std::uint64_t seed_tagger = 4;

  // flags
  bool permutation_p = false;
  std::size_t permutations = 1000;
  bool per_token_scores = true;

  std::vector<std::string> labels() const {
    auto out = communities;
    out.push_back(distractor);
    return out;
  }

  // Named communities followed by distractor members.
  std::vector<std::string> sources() const {
    auto out = communities;
    out.insert(out.end(), distractor_members.begin(), distractor_members.end());
    return out;
  }

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }

  void set_all_seeds(std::uint64_t s) {
    seed_split = seed_lda = seed_kmeans = seed_tagger = s;
  }

  // Every field that influences outputs; paths are kept verbatim.
  nlohmann::json canonical() const {
    nlohmann::json j;
    j["paths"] = {{"comments", comment_files},   {"posts", post_files},         {"tagger_corpus", tagger_corpus},
                  {"tagset", tagset_file},       {"stopwords", stopwords_file}};
    j["communities"] = {{"names", communities}, {"distractor", distractor}, {"distractor_members", distractor_members}};
    j["thresholds"] = {{"min_thread_comments", min_thread_comments},
                       {"test_fraction", test_fraction},
                       {"min_user_comments", min_user_comments},
                       {"test_drop_nonpositive", test_drop_nonpositive},
                       {"kindex_min_comments", kindex_min_comments},
                       {"high_k", high_k},
                       {"low_k", low_k},
                       {"secondary_k", secondary_k},
                       {"histogram_bin_width", histogram_bin_width}};
    j["vocab"] = {{"word_min_count", word_min_count},
                  {"top_k_word", top_k_word},
                  {"hyb15k", hyb15k},
                  {"n_general", n_general},
                  {"n_per_community", n_per_community}};
    j["topic"] = {{"K", topic_k},
                  {"alpha", alpha},
                  {"eta", eta},
                  {"iterations", lda_iterations},
                  {"clusters", clusters},
                  {"max_docs_per_community", max_docs_per_community},
                  {"top_words", top_words}};
    j["tagger"] = {{"iterations", tagger_iterations}, {"dev_fraction", tagger_dev_fraction}};
    j["seeds"] = {{"split", seed_split}, {"lda", seed_lda}, {"kmeans", seed_kmeans}, {"tagger", seed_tagger}};
    j["flags"] = {{"permutation_p", permutation_p},
                  {"permutations", permutations},
                  {"per_token_scores", per_token_scores}};
    return j;
  }

  std::string hash() const { return hex64(fnv1a64(canonical().dump())); }
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  ConfigReader child(const std::string& key) {
    seen_.insert(key);
    static const nlohmann::json empty = nlohmann::json::object();
    return ConfigReader(j_.contains(key) ? j_.at(key) : empty, at(key));
  }

  void get(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
    out = j_.at(key).get<std::string>();
  }

  void get(const std::string& key, bool& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_boolean()) throw ConfigError(at(key), "expected a boolean");
    out = j_.at(key).get<bool>();
  }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_number()) throw ConfigError(at(key), "expected a number");
    out = j_.at(key).get<double>();
  }

  template <std::unsigned_integral T>
  void get(const std::string& key, T& out) {
    out = static_cast<T>(get_uint(key, out));
  }

  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_number_integer()) throw ConfigError(at(key), "expected an integer");
    const auto v = j_.at(key).get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw ConfigError(at(key), "out of range");
    out = static_cast<int>(v);
  }

  void get(const std::string& key, std::vector<std::string>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of strings");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
  }

  void get(const std::string& key, std::vector<std::size_t>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of integers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned())
        throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a nonnegative integer");
      out.push_back(v[i].get<std::size_t>());
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown field");
  }

 private:
  std::uint64_t get_uint(const std::string& key, std::uint64_t dflt) {
    if (!has(key)) return dflt;
    if (!j_.at(key).is_number_unsigned()) throw ConfigError(at(key), "expected a nonnegative integer");
    return j_.at(key).get<std::uint64_t>();
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check_name(const std::string& path, const std::string& name) {
  if (name.empty()) throw ConfigError(path, "empty community name");
  if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos || name.front() == '.')
    throw ConfigError(path, "community name '" + name + "' is not usable as a file name");
}

}  // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& root, std::filesystem::path base_dir = ".") {
  PipelineConfig c;
  c.base_dir = std::move(base_dir);
  detail::ConfigReader r(root, "");

  auto paths = r.child("paths");
  paths.get("comments", c.comment_files);
  paths.get("posts", c.post_files);
  paths.get("tagger_corpus", c.tagger_corpus);
  paths.get("tagset", c.tagset_file);
  paths.get("stopwords", c.stopwords_file);
  paths.get("workspace", c.workspace);
  paths.finish();

  auto comm = r.child("communities");
  comm.get("names", c.communities);
  comm.get("distractor", c.distractor);
  comm.get("distractor_members", c.distractor_members);
  comm.finish();

  auto th = r.child("thresholds");
  th.get("min_thread_comments", c.min_thread_comments);
  th.get("test_fraction", c.test_fraction);
  th.get("min_user_comments", c.min_user_comments);
  th.get("test_drop_nonpositive", c.test_drop_nonpositive);
  th.get("kindex_min_comments", c.kindex_min_comments);
  th.get("high_k", c.high_k);
  th.get("low_k", c.low_k);
  th.get("secondary_k", c.secondary_k);
  th.get("histogram_bin_width", c.histogram_bin_width);
  th.finish();

  auto vo = r.child("vocab");
  vo.get("word_min_count", c.word_min_count);
  vo.get("top_k_word", c.top_k_word);
  vo.get("hyb15k", c.hyb15k);
  vo.get("n_general", c.n_general);
  vo.get("n_per_community", c.n_per_community);
  vo.finish();

  auto tp = r.child("topic");
  tp.get("K", c.topic_k);
  tp.get("alpha", c.alpha);
  tp.get("eta", c.eta);
  tp.get("iterations", c.lda_iterations);
  tp.get("clusters", c.clusters);
  tp.get("max_docs_per_community", c.max_docs_per_community);
  tp.get("top_words", c.top_words);
  tp.finish();

  auto tg = r.child("tagger");
  tg.get("iterations", c.tagger_iterations);
  tg.get("dev_fraction", c.tagger_dev_fraction);
  tg.finish();

  auto sd = r.child("seeds");
  sd.get("split", c.seed_split);
  sd.get("lda", c.seed_lda);
  sd.get("kmeans", c.seed_kmeans);
  sd.get("tagger", c.seed_tagger);
  sd.finish();

  auto fl = r.child("flags");
  fl.get("permutation_p", c.permutation_p);
  fl.get("permutations", c.permutations);
  fl.get("per_token_scores", c.per_token_scores);
  fl.finish();

  r.finish();

  // Semantic checks.
  if (c.comment_files.empty()) throw ConfigError("paths.comments", "at least one comment dump is required");
  if (c.post_files.empty()) throw ConfigError("paths.posts", "at least one post dump is required");
  if (c.tagger_corpus.empty()) throw ConfigError("paths.tagger_corpus", "a pre-tagged training corpus is required");
  if (c.workspace.empty()) throw ConfigError("paths.workspace", "must not be empty");
  if (c.communities.empty()) throw ConfigError("communities.names", "at least one community is required");
  if (c.distractor_members.empty())
    throw ConfigError("communities.distractor_members", "at least one distractor member is required");
  std::set<std::string> names;
  auto add_name = [&](const std::string& path, const std::string& n) {
    detail::check_name(path, n);
    if (!names.insert(n).second) throw ConfigError(path, "duplicate community name '" + n + "'");
  };
  for (std::size_t i = 0; i < c.communities.size(); ++i)
    add_name("communities.names[" + std::to_string(i) + "]", c.communities[i]);
  for (std::size_t i = 0; i < c.distractor_members.size(); ++i)
    add_name("communities.distractor_members[" + std::to_string(i) + "]", c.distractor_members[i]);
  add_name("communities.distractor", c.distractor);

  auto positive = [](const char* path, std::size_t v) {
    if (v == 0) throw ConfigError(path, "must be positive");
  };
  positive("thresholds.min_thread_comments", c.min_thread_comments);
  positive("thresholds.min_user_comments", c.min_user_comments);
  positive("thresholds.kindex_min_comments", c.kindex_min_comments);
  positive("thresholds.high_k", c.high_k);
  positive("thresholds.histogram_bin_width", c.histogram_bin_width);
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
    throw ConfigError("thresholds.test_fraction", "must lie strictly between 0 and 1");
  if (c.low_k >= c.high_k) throw ConfigError("thresholds.low_k", "must be below thresholds.high_k");
  positive("vocab.word_min_count", c.word_min_count);
  positive("vocab.top_k_word", c.top_k_word);
  positive("vocab.hyb15k", c.hyb15k);
  if (c.topic_k.empty()) throw ConfigError("topic.K", "at least one topic count is required");
  std::set<std::size_t> ks;
  for (std::size_t i = 0; i < c.topic_k.size(); ++i) {
    const auto path = "topic.K[" + std::to_string(i) + "]";
    if (c.topic_k[i] < 2) throw ConfigError(path, "must be at least 2");
    if (!ks.insert(c.topic_k[i]).second) throw ConfigError(path, "duplicate topic count");
  }
  if (!(c.eta > 0.0)) throw ConfigError("topic.eta", "must be positive");
  if (c.lda_iterations < 1) throw ConfigError("topic.iterations", "must be positive");
  positive("topic.clusters", c.clusters);
  positive("topic.top_words", c.top_words);
  if (c.tagger_iterations < 1) throw ConfigError("tagger.iterations", "must be positive");
  if (!(c.tagger_dev_fraction >= 0.0 && c.tagger_dev_fraction < 1.0))
    throw ConfigError("tagger.dev_fraction", "must lie in [0, 1)");
  positive("flags.permutations", c.permutations);
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& file) {
  std::string text;
  try {
    text = read_file(file.string());
  } catch (const IoError& e) {
    throw ConfigError("<file>", e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
  }
  auto dir = file.parent_path();
  return parse_config(j, dir.empty() ? std::filesystem::path(".") : dir);
}

}  // namespace commlang
