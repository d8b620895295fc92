#pragma once
// End-to-end classification runs over synthetic communities, built from
// the library's public API the same way the pipeline stages use it.

#include <string>
#include <vector>

#include "commlang/classify.hpp"
#include "commlang/stylelm.hpp"
#include "commlang/topiclm.hpp"
#include "commlang/vocab.hpp"
#include "synthetic.hpp"

namespace synth {

struct SplitCommunity {
  std::string name;
  std::vector<std::vector<TokenSeq>> train, test;
};

// Last ceil(n * test_fraction) threads of each community are held out.
inline std::vector<SplitCommunity> hold_out(const std::vector<Community>& comms, double test_fraction) {
  std::vector<SplitCommunity> out;
  for (const auto& c : comms) {
    const auto n = c.threads.size();
    const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction));
    SplitCommunity s{c.name, {c.threads.begin(), c.threads.end() - static_cast<std::ptrdiff_t>(n_test)},
                     {c.threads.end() - static_cast<std::ptrdiff_t>(n_test), c.threads.end()}};
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<std::vector<std::string>> surfaces(const std::vector<TokenSeq>& seqs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : seqs) {
    std::vector<std::string> w;
    for (const auto& t : s) w.push_back(t.surface);
    out.push_back(std::move(w));
  }
  return out;
}

inline std::vector<commlang::Document> test_documents(const std::vector<SplitCommunity>& comms) {
  std::vector<commlang::Document> docs;
  for (const auto& c : comms)
    for (std::size_t i = 0; i < c.test.size(); ++i)
      docs.push_back({c.name + ":" + std::to_string(i), commlang::DocLevel::thread, c.name, c.test[i]});
  return docs;
}

inline std::vector<std::string> labels_of(const std::vector<SplitCommunity>& comms) {
  std::vector<std::string> l;
  for (const auto& c : comms) l.push_back(c.name);
  return l;
}

struct RunResult {
  commlang::ScoreTable table;
  commlang::EvalReport report;
};

// Hybrid vocabulary + Witten-Bell trigram model per community.
inline RunResult hybrid_style_run(const std::vector<SplitCommunity>& comms, std::size_t n_general,
                                  std::size_t n_per_community) {
  using namespace commlang;
  const TagSet tags;
  std::vector<CommunityTokens> ct;
  std::vector<FrequencyTable> tables;
  for (const auto& c : comms) {
    CommunityTokens t{c.name, {}};
    for (const auto& th : c.train)
      for (auto& s : surfaces(th)) t.sequences.push_back(std::move(s));
    tables.push_back(count_frequencies(t.sequences, c.name));
    ct.push_back(std::move(t));
  }
  const auto balanced = count_frequencies(std::vector<std::vector<std::string>>{balanced_subset(ct)});
  StyleModelSet set;
  set.model_id = "hyb";
  set.vocab = build_hybrid_vocab(balanced, tables, n_general, n_per_community, tags);
  for (const auto& c : comms) {
    NgramCounts counts(set.vocab.size());
    for (const auto& th : c.train)
      for (const auto& s : th) counts.add_sequence(apply_vocab(set.vocab, s));
    set.communities.push_back(c.name);
    set.models.push_back(estimate_wb(counts));
  }
  RunResult r;
  r.table = score_all_style(test_documents(comms), set).total;
  r.report = evaluate(r.table, classify(r.table), labels_of(comms));
  return r;
}

// tf-idf + LDA over training comments, k-means profiles over training
// threads, mean-top-3 cosine scoring.
inline RunResult topic_run(const std::vector<SplitCommunity>& comms, const commlang::StopwordList& stopwords,
                           std::size_t topics, std::size_t clusters, int iterations, std::uint64_t seed) {
  using namespace commlang;
  std::vector<std::vector<std::string>> corpus;
  for (const auto& c : comms)
    for (const auto& th : c.train)
      for (auto& s : surfaces(th)) corpus.push_back(std::move(s));
  auto tfidf = build_tfidf(corpus, stopwords);
  LdaOptions opt;
  opt.num_topics = topics;
  opt.iterations = iterations;
  opt.seed = seed;
  const auto lda = train_lda(tfidf.docs, tfidf.model, opt);
  std::vector<CommunityTopicProfile> profiles;
  for (const auto& c : comms) {
    std::vector<TopicVector> vecs;
    for (const auto& th : c.train) {
      std::vector<std::string> all;
      for (auto& s : surfaces(th)) all.insert(all.end(), s.begin(), s.end());
      vecs.push_back(lda.model.infer_tokens(all));
    }
    profiles.push_back(build_profile(c.name, vecs, clusters, seed + 1));
  }
  RunResult r;
  r.table = score_all_topic(test_documents(comms), "topic", lda.model, profiles);
  r.report = evaluate(r.table, classify(r.table), labels_of(comms));
  return r;
}

}  // namespace synth
