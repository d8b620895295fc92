#pragma once

// Topic side: stopword-filtered tf-idf documents, batch variational-Bayes
// LDA over fractional counts, per-document topic inference, k-means
// community profiles and the top-3 mean cosine topic score.

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "commlang/common.hpp"

namespace commlang {

using WordId = std::uint32_t;

struct WeightedDoc {
  std::size_t doc_id = 0;
  std::vector<std::pair<WordId, double>> weights;  // ascending word id, weights > 0

  bool empty() const { return weights.empty(); }
  double mass() const {
    double m = 0.0;
    for (const auto& [w, x] : weights) m += x;
    return m;
  }
};

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::vector<std::string> words) : words_(words.begin(), words.end()) {}

  // One word per line, '#' comments allowed.
  static StopwordList parse(std::string_view text) {
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      auto e = line.find_last_not_of(" \t\r");
      words.push_back(line.substr(b, e - b + 1));
    }
    return StopwordList(std::move(words));
  }

  bool contains(const std::string& w) const { return words_.count(w) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Vocabulary and inverse document frequencies learned from training
// comments.
class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(std::vector<std::string> words, std::vector<double> idf, std::size_t num_docs)
      : words_(std::move(words)), idf_(std::move(idf)), num_docs_(num_docs) {
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<WordId>(i));
  }

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t num_docs() const { return num_docs_; }

  std::optional<WordId> find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // tf * idf over known words, L2-normalized. Zero-weight entries are
  // omitted, so a document with no informative words comes back empty.
  WeightedDoc weigh(const std::vector<std::string>& tokens, std::size_t doc_id = 0) const {
    std::map<WordId, double> tf;
    for (const auto& t : tokens)
      if (auto id = find(t)) tf[*id] += 1.0;
    WeightedDoc d;
    d.doc_id = doc_id;
    double norm2 = 0.0;
    for (const auto& [w, c] : tf) {
      const double x = c * idf_[w];
      if (x > 0.0) {
        d.weights.emplace_back(w, x);
        norm2 += x * x;
      }
    }
    const double norm = std::sqrt(norm2);
    for (auto& [w, x] : d.weights) x /= norm;
    return d;
  }

 private:
  std::vector<std::string> words_;
  std::vector<double> idf_;
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, WordId> index_;
};

struct TfidfResult {
  TfidfModel model;
  std::vector<WeightedDoc> docs;  // doc_id = index into the input corpus
  std::size_t dropped = 0;        // empty after stopword removal, or all-zero weights
};

// idf(w) = ln(N / df(w)) over the N documents that survive stopword removal.
inline TfidfResult build_tfidf(const std::vector<std::vector<std::string>>& corpus, const StopwordList& stopwords) {
  if (corpus.empty()) throw InvalidArgument("tf-idf corpus is empty");
  std::vector<std::vector<std::string>> filtered(corpus.size());
  std::map<std::string, std::size_t> df;
  std::size_t n_docs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto& t : corpus[i])
      if (!stopwords.contains(t)) filtered[i].push_back(t);
    if (filtered[i].empty()) continue;
    ++n_docs;
    std::set<std::string> uniq(filtered[i].begin(), filtered[i].end());
    for (const auto& w : uniq) ++df[w];
  }
  if (n_docs == 0) throw InvalidArgument("every tf-idf document is empty after stopword removal");
  std::vector<std::string> words;
  std::vector<double> idf;
  for (const auto& [w, c] : df) {
    words.push_back(w);
    idf.push_back(std::log(static_cast<double>(n_docs) / static_cast<double>(c)));
  }
  TfidfResult out{TfidfModel(std::move(words), std::move(idf), n_docs), {}, 0};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (filtered[i].empty()) {
      ++out.dropped;
      continue;
    }
    auto d = out.model.weigh(filtered[i], i);
    if (d.empty()) {
      ++out.dropped;
      continue;
    }
    out.docs.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// LDA

struct TopicVector {
  std::vector<double> theta;
  bool fallback = false;  // document had no known words; theta is uniform
};

struct LdaOptions {
  std::size_t num_topics = 100;
  double alpha = 0.0;  // <= 0 means 1/K
  double eta = 0.01;
  int iterations = 200;
  std::uint64_t seed = 1;
  int max_inner = 100;
  double inner_tolerance = 1e-5;
};

namespace detail {

inline double digamma(double x) { return boost::math::digamma(x); }

// E[log theta] for a Dirichlet with parameter g, exponentiated.
inline void exp_dirichlet_expectation(const std::vector<double>& g, std::vector<double>& out) {
  const double s = digamma(std::accumulate(g.begin(), g.end(), 0.0));
  out.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = std::exp(digamma(g[k]) - s);
}

}  // namespace detail

class TopicModel {
 public:
  TopicModel() = default;

  // lambda: K x V variational Dirichlet parameters.
  TopicModel(TfidfModel vocab, std::vector<std::vector<double>> lambda, double alpha, double eta, std::uint64_t seed,
             int iterations)
      : vocab_(std::move(vocab)), alpha_(alpha), eta_(eta), seed_(seed), iterations_(iterations) {
    set_lambda(std::move(lambda));
  }

  std::size_t num_topics() const { return topic_word_.size(); }
  std::size_t vocab_size() const { return vocab_.size(); }
  const TfidfModel& vocab() const { return vocab_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }
  std::uint64_t seed() const { return seed_; }
  int iterations() const { return iterations_; }

  // Row-normalized topic-word matrix.
  const std::vector<std::vector<double>>& topic_word() const { return topic_word_; }

  // Variational inference for one document with the topics held fixed.
  TopicVector infer(const WeightedDoc& doc, int max_iter = 200, double tol = 1e-6) const {
    const std::size_t K = num_topics();
    TopicVector v;
    if (doc.empty()) {
      v.theta.assign(K, 1.0 / static_cast<double>(K));
      v.fallback = true;
      return v;
    }
    std::vector<double> gamma(K, alpha_ + doc.mass() / static_cast<double>(K));
    e_step(doc, exp_elog_beta_, alpha_, gamma, max_iter, tol);
    const double s = std::accumulate(gamma.begin(), gamma.end(), 0.0);
    v.theta.resize(K);
    for (std::size_t k = 0; k < K; ++k) v.theta[k] = gamma[k] / s;
    return v;
  }

  TopicVector infer_tokens(const std::vector<std::string>& tokens) const { return infer(vocab_.weigh(tokens)); }

  // Indices of the n most probable words of a topic (ties by word id).
  std::vector<WordId> top_words(std::size_t topic, std::size_t n) const {
    const auto& row = topic_word_.at(topic);
    std::vector<WordId> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    n = std::min(n, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                      [&](WordId a, WordId b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
    idx.resize(n);
    return idx;
  }

  std::string to_json() const {
    nlohmann::json j;
    j["format"] = "commlang-lda";
    j["version"] = 1;
    j["num_topics"] = num_topics();
    j["vocab_size"] = vocab_size();
    j["alpha"] = alpha_;
    j["eta"] = eta_;
    j["seed"] = seed_;
    j["iterations"] = iterations_;
    j["num_docs"] = vocab_.num_docs();
    j["vocab"] = vocab_.words();
    j["idf"] = vocab_.idf();
    j["lambda_totals"] = lambda_totals_;
    j["topic_word"] = topic_word_;
    return j.dump();
  }

  static TopicModel from_json(std::string_view text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "commlang-lda") throw FormatError("not a topic model file");
    TfidfModel vocab(j.at("vocab").get<std::vector<std::string>>(), j.at("idf").get<std::vector<double>>(),
                     j.at("num_docs").get<std::size_t>());
    auto tw = j.at("topic_word").get<std::vector<std::vector<double>>>();
    auto totals = j.at("lambda_totals").get<std::vector<double>>();
    if (tw.size() != totals.size()) throw FormatError("topic model matrix/totals mismatch");
    for (std::size_t k = 0; k < tw.size(); ++k) {
      if (tw[k].size() != vocab.size()) throw FormatError("topic model row width mismatch");
      for (auto& x : tw[k]) x *= totals[k];
    }
    return TopicModel(std::move(vocab), std::move(tw), j.at("alpha").get<double>(), j.at("eta").get<double>(),
                      j.at("seed").get<std::uint64_t>(), j.at("iterations").get<int>());
  }

  // Coordinate ascent on (phi, gamma) for one document; gamma is updated in
  // place (warm start).
  static void e_step(const WeightedDoc& doc, const std::vector<std::vector<double>>& exp_elog_beta, double alpha,
                     std::vector<double>& gamma, int max_iter, double tol) {
    const std::size_t K = gamma.size();
    std::vector<double> etheta, next(K), phinorm(doc.weights.size());
    for (int it = 0; it < max_iter; ++it) {
      detail::exp_dirichlet_expectation(gamma, etheta);
      for (std::size_t i = 0; i < doc.weights.size(); ++i) {
        const WordId w = doc.weights[i].first;
        double s = 1e-100;
        for (std::size_t k = 0; k < K; ++k) s += etheta[k] * exp_elog_beta[k][w];
        phinorm[i] = s;
      }
      double change = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < doc.weights.size(); ++i)
          acc += doc.weights[i].second * exp_elog_beta[k][doc.weights[i].first] / phinorm[i];
        next[k] = alpha + etheta[k] * acc;
        change += std::fabs(next[k] - gamma[k]);
      }
      gamma.swap(next);
      if (change / static_cast<double>(K) < tol) break;
    }
  }

 private:
  friend struct LdaTrainer;

  void set_lambda(std::vector<std::vector<double>> lambda) {
    const std::size_t K = lambda.size();
    topic_word_.assign(K, {});
    lambda_totals_.assign(K, 0.0);
    exp_elog_beta_.assign(K, {});
    for (std::size_t k = 0; k < K; ++k) {
      const double total = std::accumulate(lambda[k].begin(), lambda[k].end(), 0.0);
      lambda_totals_[k] = total;
      const double dsum = detail::digamma(total);
      topic_word_[k].resize(lambda[k].size());
      exp_elog_beta_[k].resize(lambda[k].size());
      for (std::size_t w = 0; w < lambda[k].size(); ++w) {
        topic_word_[k][w] = lambda[k][w] / total;
        exp_elog_beta_[k][w] = std::exp(detail::digamma(lambda[k][w]) - dsum);
      }
    }
  }

  TfidfModel vocab_;
  double alpha_ = 0.0;
  double eta_ = 0.01;
  std::uint64_t seed_ = 0;
  int iterations_ = 0;
  std::vector<std::vector<double>> topic_word_;
  std::vector<double> lambda_totals_;
  std::vector<std::vector<double>> exp_elog_beta_;
};

struct LdaTrainResult {
  TopicModel model;
  std::vector<double> elbo;  // bound after each iteration
  std::vector<std::vector<double>> doc_gamma;
};

struct LdaTrainer {
  static LdaTrainResult train(const std::vector<WeightedDoc>& docs, const TfidfModel& vocab, const LdaOptions& opt) {
    const std::size_t K = opt.num_topics;
    const std::size_t V = vocab.size();
    if (K < 2) throw InvalidArgument("LDA needs at least 2 topics");
    if (docs.empty()) throw InvalidArgument("LDA needs at least one document");
    if (opt.iterations < 1) throw InvalidArgument("LDA iterations must be >= 1");
    std::set<WordId> distinct;
    for (const auto& d : docs)
      for (const auto& [w, x] : d.weights) {
        if (w >= V) throw InvalidArgument("document word id outside vocabulary");
        if (x < 0.0 || !std::isfinite(x)) throw InvalidArgument("document weights must be finite and nonnegative");
        if (x > 0.0) distinct.insert(w);
      }
    if (K > distinct.size())
      throw InvalidArgument("LDA with " + std::to_string(K) + " topics over only " + std::to_string(distinct.size()) +
                            " distinct words");
    const double alpha = opt.alpha > 0.0 ? opt.alpha : 1.0 / static_cast<double>(K);
    const double eta = opt.eta;
    if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");

    Rng rng(opt.seed);
    std::vector<std::vector<double>> lambda(K, std::vector<double>(V));
    for (auto& row : lambda)
      for (auto& x : row) x = 0.9 + 0.2 * rng.uniform();

    LdaTrainResult out;
    std::vector<std::vector<double>> gamma(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d)
      gamma[d].assign(K, alpha + docs[d].mass() / static_cast<double>(K));

    TopicModel current(vocab, lambda, alpha, eta, opt.seed, opt.iterations);
    for (int iter = 0; iter < opt.iterations; ++iter) {
      const auto& eeb = current.exp_elog_beta_;
      parallel_for(docs.size(), [&](std::size_t d) {
        TopicModel::e_step(docs[d], eeb, alpha, gamma[d], opt.max_inner, opt.inner_tolerance);
      });
      // Sufficient statistics from phi at the final gamma, accumulated in
      // document order.
      std::vector<std::vector<double>> sstats(K, std::vector<double>(V, 0.0));
      std::vector<double> etheta;
      for (std::size_t d = 0; d < docs.size(); ++d) {
        detail::exp_dirichlet_expectation(gamma[d], etheta);
        for (const auto& [w, x] : docs[d].weights) {
          double norm = 1e-100;
          for (std::size_t k = 0; k < K; ++k) norm += etheta[k] * eeb[k][w];
          for (std::size_t k = 0; k < K; ++k) sstats[k][w] += x * etheta[k] * eeb[k][w] / norm;
        }
      }
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t w = 0; w < V; ++w) lambda[k][w] = eta + sstats[k][w];
      current.set_lambda(lambda);
      out.elbo.push_back(bound(docs, gamma, lambda, alpha, eta));
    }
    out.model = std::move(current);
    out.doc_gamma = std::move(gamma);
    return out;
  }

  // Evidence lower bound with phi at its optimum for (gamma, lambda).
  static double bound(const std::vector<WeightedDoc>& docs, const std::vector<std::vector<double>>& gamma,
                      const std::vector<std::vector<double>>& lambda, double alpha, double eta) {
    const std::size_t K = lambda.size();
    const std::size_t V = K == 0 ? 0 : lambda[0].size();
    std::vector<std::vector<double>> elog_beta(K, std::vector<double>(V));
    double topic_part = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double total = std::accumulate(lambda[k].begin(), lambda[k].end(), 0.0);
      const double dsum = detail::digamma(total);
      for (std::size_t w = 0; w < V; ++w) {
        elog_beta[k][w] = detail::digamma(lambda[k][w]) - dsum;
        topic_part += (eta - lambda[k][w]) * elog_beta[k][w] + std::lgamma(lambda[k][w]) - std::lgamma(eta);
      }
      topic_part += std::lgamma(static_cast<double>(V) * eta) - std::lgamma(total);
    }
    std::vector<double> per_doc(docs.size(), 0.0);
    parallel_for(docs.size(), [&](std::size_t d) {
      const auto& g = gamma[d];
      const double gsum = std::accumulate(g.begin(), g.end(), 0.0);
      const double dg = detail::digamma(gsum);
      std::vector<double> elog_theta(K);
      for (std::size_t k = 0; k < K; ++k) elog_theta[k] = detail::digamma(g[k]) - dg;
      double s = 0.0;
      for (const auto& [w, x] : docs[d].weights) {
        double mx = -INFINITY;
        for (std::size_t k = 0; k < K; ++k) mx = std::max(mx, elog_theta[k] + elog_beta[k][w]);
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) acc += std::exp(elog_theta[k] + elog_beta[k][w] - mx);
        s += x * (mx + std::log(acc));
      }
      for (std::size_t k = 0; k < K; ++k)
        s += (alpha - g[k]) * elog_theta[k] + std::lgamma(g[k]) - std::lgamma(alpha);
      s += std::lgamma(static_cast<double>(K) * alpha) - std::lgamma(gsum);
      per_doc[d] = s;
    });
    double total = topic_part;
    for (double s : per_doc) total += s;
    return total;
  }
};

inline LdaTrainResult train_lda(const std::vector<WeightedDoc>& docs, const TfidfModel& vocab,
                                const LdaOptions& opt) {
  return LdaTrainer::train(docs, vocab, opt);
}

inline TopicVector infer_topics(const TopicModel& model, const WeightedDoc& doc) { return model.infer(doc); }

// ---------------------------------------------------------------------------
// k-means

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> assignment;
  std::vector<double> inertia_history;  // after each assignment step
  double inertia = 0.0;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding; k is capped at the number of
// points. Empty clusters are re-seeded with the point farthest from its
// centroid.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                           int max_iter = 100, double tol = 1e-6) {
  if (points.empty()) throw InvalidArgument("k-means needs at least one point");
  if (k == 0) throw InvalidArgument("k-means needs k >= 1");
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw InvalidArgument("k-means points differ in dimension");
  k = std::min(k, n);

  Rng rng(seed);
  KMeansResult r;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  r.centroids.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = detail::sq_dist(points[i], r.centroids[0]);
  while (r.centroids.size() < k) {
    std::size_t next = n;
    if (std::any_of(d2.begin(), d2.end(), [](double x) { return x > 0.0; })) {
      next = rng.categorical(d2);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          next = i;
          break;
        }
    }
    chosen[next] = true;
    r.centroids.push_back(points[next]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], detail::sq_dist(points[i], r.centroids.back()));
  }

  r.assignment.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  double prev = INFINITY;
  for (int iter = 0; iter < max_iter; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = detail::sq_dist(points[i], r.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = detail::sq_dist(points[i], r.centroids[c]);
        if (dd < bd) {
          bd = dd;
          best = c;
        }
      }
      r.assignment[i] = best;
      dist[i] = bd;
      inertia += bd;
    }
    r.inertia_history.push_back(inertia);
    r.inertia = inertia;
    const bool converged = std::isfinite(prev) && (prev == 0.0 || (prev - inertia) / prev < tol);
    prev = inertia;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    r.sizes.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++r.sizes[r.assignment[i]];
      for (std::size_t j = 0; j < dim; ++j) sums[r.assignment[i]][j] += points[i][j];
    }
    if (converged) break;
    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (r.sizes[c] > 0) {
        for (std::size_t j = 0; j < dim; ++j) r.centroids[c][j] = sums[c][j] / static_cast<double>(r.sizes[c]);
        continue;
      }
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!used[i] && (far == n || dist[i] > dist[far])) far = i;
      if (far < n) {
        used[far] = true;
        r.centroids[c] = points[far];
      }
    }
  }
  return r;
}

struct CommunityTopicProfile {
  std::string community;
  std::vector<std::vector<double>> centroids;  // unit length
  std::vector<std::size_t> sizes;
};

inline void l2_normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

inline CommunityTopicProfile build_profile(const std::string& community, const std::vector<TopicVector>& vectors,
                                           std::size_t k, std::uint64_t seed) {
  if (vectors.empty()) throw InvalidArgument("profile for " + community + " needs at least one topic vector");
  std::vector<std::vector<double>> pts;
  pts.reserve(vectors.size());
  for (const auto& v : vectors) pts.push_back(v.theta);
  auto km = kmeans(pts, k, seed);
  CommunityTopicProfile p;
  p.community = community;
  for (std::size_t c = 0; c < km.centroids.size(); ++c) {
    auto cen = km.centroids[c];
    l2_normalize(cen);
    p.centroids.push_back(std::move(cen));
    p.sizes.push_back(km.sizes.empty() ? 0 : km.sizes[c]);
  }
  return p;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

// Mean of the three largest cosine similarities to the profile centroids
// (of all of them when there are fewer than three).
inline double topic_score(const CommunityTopicProfile& profile, const std::vector<double>& v) {
  if (profile.centroids.empty()) throw InvalidArgument("empty topic profile for " + profile.community);
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    throw InvalidArgument("zero topic vector");
  std::vector<double> sims;
  sims.reserve(profile.centroids.size());
  for (const auto& c : profile.centroids) sims.push_back(cosine(c, v));
  const std::size_t top = std::min<std::size_t>(3, sims.size());
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(top), sims.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < top; ++i) s += sims[i];
  return s / static_cast<double>(top);
}

inline nlohmann::json to_json(const CommunityTopicProfile& p) {
  return {{"community", p.community}, {"centroids", p.centroids}, {"sizes", p.sizes}};
}

inline CommunityTopicProfile profile_from_json(const nlohmann::json& j) {
  CommunityTopicProfile p;
  p.community = j.at("community").get<std::string>();
  p.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
  p.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  return p;
}

}  // namespace commlang
