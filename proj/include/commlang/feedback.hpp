#pragma once

// Community feedback statistics: k-index, distractor-normalized scores,
// Spearman rank correlation with significance, and multi-community
// specialization summaries.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "commlang/classify.hpp"
#include "commlang/common.hpp"
#include "commlang/ingest.hpp"

namespace commlang {

// Largest k such that at least k of the values are strictly greater than k.
inline std::size_t k_index(std::vector<long long> karma) {
  std::sort(karma.begin(), karma.end(), std::greater<>());
  std::size_t k = 0;
  while (k < karma.size() && karma[k] > static_cast<long long>(k + 1)) ++k;
  return k;
}

struct NormalizedScore {
  std::string doc_id;
  std::string true_community;
  std::string community;
  double s_tilde = 0.0;
};

// s~_ij = s_ij - s_i,distractor for every non-distractor column.
inline std::vector<NormalizedScore> normalize_scores(const ScoreTable& table,
                                                     const std::string& distractor = "merged_others") {
  auto it = std::find(table.communities.begin(), table.communities.end(), distractor);
  if (it == table.communities.end()) throw InvalidArgument("score table lacks distractor column " + distractor);
  const auto m = static_cast<std::size_t>(it - table.communities.begin());
  std::vector<NormalizedScore> out;
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.communities.size(); ++j) {
      if (j == m) continue;
      const double v = table.scores[i][j] - table.scores[i][m];
      if (!std::isfinite(v)) throw InvalidArgument("non-finite normalized score for " + table.doc_ids[i]);
      out.push_back({table.doc_ids[i], table.truths[i], table.communities[j], v});
    }
  return out;
}

// 1-based ranks, ties share the average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i + 1;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) r[idx[t]] = avg;
    i = j;
  }
  return r;
}

struct SpearmanResult {
  double rho = std::nan("");
  double p_value = std::nan("");
  bool defined = false;  // false when either input is constant
};

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Two-sided p-value of a correlation via the t approximation, n-2 dof.
inline double correlation_p_value(double rho, std::size_t n) {
  if (std::fabs(rho) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(dof / ((1.0 - rho) * (1.0 + rho)));
  boost::math::students_t_distribution<double> dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman inputs differ in length");
  if (x.size() < 3) throw InvalidArgument("spearman needs n >= 3");
  SpearmanResult r;
  r.rho = pearson(average_ranks(x), average_ranks(y));
  if (std::isnan(r.rho)) return r;
  r.defined = true;
  r.p_value = correlation_p_value(r.rho, x.size());
  return r;
}

// Permutation p-value: (1 + #{|rho_perm| >= |rho_obs|}) / (1 + permutations).
inline double spearman_permutation_p(const std::vector<double>& x, const std::vector<double>& y,
                                     std::size_t permutations, std::uint64_t seed) {
  const auto obs = spearman(x, y);
  if (!obs.defined) return std::nan("");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.shuffle(ry);
    if (std::fabs(pearson(rx, ry)) >= std::fabs(obs.rho) - 1e-12) ++hits;
  }
  return static_cast<double>(1 + hits) / static_cast<double>(1 + permutations);
}

struct CorrelationResult {
  std::string community;
  std::string model_id;
  double rho = std::nan("");
  double p_value = std::nan("");
  std::size_t n = 0;
  bool defined = false;

  bool significant(double alpha = 0.05) const { return defined && p_value < alpha; }
};

struct CorrelationOptions {
  bool permutation_p = false;
  std::size_t permutations = 1000;
  std::uint64_t seed = 7;
};

// For every community, correlates the own-community normalized score of
// that community's documents with their feedback value.
inline std::vector<CorrelationResult> correlate(const std::vector<NormalizedScore>& scores,
                                                const std::map<std::string, double>& feedback,
                                                const std::string& model_id, const CorrelationOptions& opt = {}) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> xy;
  for (const auto& s : scores) {
    if (s.community != s.true_community) continue;
    auto f = feedback.find(s.doc_id);
    if (f == feedback.end()) throw InvalidArgument("no feedback value for " + s.doc_id);
    auto& [x, y] = xy[s.community];
    x.push_back(s.s_tilde);
    y.push_back(f->second);
  }
  std::vector<CorrelationResult> out;
  for (const auto& [community, pair] : xy) {
    CorrelationResult r;
    r.community = community;
    r.model_id = model_id;
    r.n = pair.first.size();
    if (r.n >= 3) {
      auto s = spearman(pair.first, pair.second);
      r.rho = s.rho;
      r.defined = s.defined;
      r.p_value = s.p_value;
      if (s.defined && opt.permutation_p)
        r.p_value = spearman_permutation_p(pair.first, pair.second, opt.permutations, opt.seed);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Thread level: feedback is the post karma.
inline std::vector<CorrelationResult> correlate_threads(const std::vector<NormalizedScore>& scores,
                                                        const std::map<std::string, double>& thread_karma,
                                                        const std::string& model_id,
                                                        const CorrelationOptions& opt = {}) {
  return correlate(scores, thread_karma, model_id, opt);
}

// User level: feedback is the (author, community) k-index.
inline std::vector<CorrelationResult> correlate_users(const std::vector<NormalizedScore>& scores,
                                                      const std::map<std::string, double>& user_kindex,
                                                      const std::string& model_id,
                                                      const CorrelationOptions& opt = {}) {
  return correlate(scores, user_kindex, model_id, opt);
}

// Rows = community, columns = model, cells "rho" with a trailing '*' when
// p < 0.05 and "NA" when undefined.
inline std::string correlation_table_csv(const std::vector<CorrelationResult>& results,
                                         const std::vector<std::string>& model_order,
                                         const std::string& header_comment = {}) {
  std::set<std::string> communities;
  std::map<std::pair<std::string, std::string>, const CorrelationResult*> cell;
  for (const auto& r : results) {
    communities.insert(r.community);
    cell[{r.community, r.model_id}] = &r;
  }
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += "community";
  for (const auto& m : model_order) out += "," + csv_field(m);
  out += "\n";
  for (const auto& c : communities) {
    out += csv_field(c);
    for (const auto& m : model_order) {
      auto it = cell.find({c, m});
      out += ",";
      if (it == cell.end() || !it->second->defined) {
        out += "NA";
        continue;
      }
      out += format_fixed(it->second->rho, 3);
      if (it->second->significant()) out += "*";
    }
    out += "\n";
  }
  return out;
}

inline std::string correlation_detail_csv(const std::vector<CorrelationResult>& results,
                                          const std::string& header_comment = {}) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += "community,model,n,rho,p_value,significant\n";
  for (const auto& r : results) {
    out += csv_field(r.community) + "," + csv_field(r.model_id) + "," + std::to_string(r.n) + ",";
    out += r.defined ? format_fixed(r.rho, 6) + "," + format_fixed(r.p_value, 6) : std::string("NA,NA");
    out += r.significant() ? ",1\n" : ",0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// User activity

struct UserActivity {
  std::string author;
  std::string community;
  std::size_t comments = 0;
  std::size_t k_index = 0;
};

// Per-author comment counts and k-indices within one community.
inline std::vector<UserActivity> collect_user_activity(const std::string& community,
                                                       const std::vector<const std::vector<ThreadRecord>*>& splits) {
  std::map<std::string, std::vector<long long>> karma;
  for (const auto* threads : splits)
    for (const auto& t : *threads)
      for (const auto& c : t.comments)
        if (!c.author.empty() && c.author != "[deleted]") karma[c.author].push_back(c.karma);
  std::vector<UserActivity> out;
  for (auto& [author, ks] : karma) out.push_back({author, community, ks.size(), k_index(ks)});
  return out;
}

struct MulticommunitySummary {
  std::size_t active_users = 0;
  std::size_t high_users = 0;
  std::size_t low_users = 0;
  std::optional<double> high_median_communities;  // nullopt when the group is empty
  std::optional<double> low_median_communities;
  // For each secondary threshold t: high-group users whose k-index reaches t
  // in some community other than their best one.
  std::vector<std::pair<std::size_t, std::size_t>> second_community_counts;
};

inline std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline MulticommunitySummary multicommunity_stats(const std::vector<UserActivity>& activity,
                                                  std::size_t min_comments = 100, std::size_t high_k = 100,
                                                  std::size_t low_k = 5,
                                                  const std::vector<std::size_t>& secondary = {50, 20}) {
  struct User {
    std::size_t comments = 0;
    std::vector<std::size_t> ks;  // per community with >= 1 comment
  };
  std::map<std::string, User> users;
  for (const auto& a : activity) {
    if (a.comments == 0) continue;
    auto& u = users[a.author];
    u.comments += a.comments;
    u.ks.push_back(a.k_index);
  }
  MulticommunitySummary s;
  std::vector<double> high, low;
  s.second_community_counts.reserve(secondary.size());
  for (auto t : secondary) s.second_community_counts.emplace_back(t, 0);
  for (auto& [name, u] : users) {
    if (u.comments < min_comments) continue;
    ++s.active_users;
    std::sort(u.ks.begin(), u.ks.end(), std::greater<>());
    const std::size_t max_k = u.ks.front();
    const double n_comm = static_cast<double>(u.ks.size());
    if (max_k >= high_k) {
      high.push_back(n_comm);
      const std::size_t second = u.ks.size() > 1 ? u.ks[1] : 0;
      for (auto& [t, count] : s.second_community_counts)
        if (u.ks.size() > 1 && second >= t) ++count;
    }
    if (max_k <= low_k) low.push_back(n_comm);
  }
  s.high_users = high.size();
  s.low_users = low.size();
  s.high_median_communities = median(high);
  s.low_median_communities = median(low);
  return s;
}

struct HistogramBin {
  long long bin = 0;  // lower edge
  std::size_t count = 0;
  double log10_count = 0.0;
};

// Integer bins of the given width; empty bins are omitted.
inline std::vector<HistogramBin> kindex_histogram(const std::vector<std::size_t>& values, std::size_t width = 1) {
  if (values.empty()) throw InvalidArgument("histogram needs at least one value");
  if (width == 0) throw InvalidArgument("histogram bin width must be >= 1");
  std::map<long long, std::size_t> counts;
  for (auto v : values) ++counts[static_cast<long long>((v / width) * width)];
  std::vector<HistogramBin> out;
  for (const auto& [b, c] : counts) out.push_back({b, c, std::log10(static_cast<double>(c))});
  return out;
}

inline std::string histogram_csv(const std::vector<HistogramBin>& bins, const std::string& header_comment = {}) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += "bin,count,log10_count\n";
  for (const auto& b : bins)
    out += std::to_string(b.bin) + "," + std::to_string(b.count) + "," + format_fixed(b.log10_count, 6) + "\n";
  return out;
}

}  // namespace commlang
