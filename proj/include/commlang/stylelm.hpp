#pragma once

// Trigram language models over a vocabulary's symbol space.
//
// Two interpolated smoothers are provided: modified Kneser-Ney (Chen &
// Goodman discounts D1, D2, D3+ per order, continuation counts for the
// lower orders) and Witten-Bell. Both bottom out in a uniform distribution
// over the predictable symbols, so every symbol gets p > 0. Estimated models
// are stored in back-off form (per n-gram log-probability, per context
// back-off weight), which is exact for interpolated models and lets the
// model round-trip through the ARPA text format.
//
// Symbol layout for a vocabulary of size V: ids 0..V-1 are vocabulary
// symbols, V is </s> and V+1 is <s>. Logs are natural.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "commlang/common.hpp"
#include "commlang/text.hpp"
#include "commlang/vocab.hpp"

namespace commlang {

enum class Smoothing { modified_kn, witten_bell };

inline const char* to_string(Smoothing s) { return s == Smoothing::modified_kn ? "modified_kn" : "witten_bell"; }

inline Smoothing smoothing_from_string(std::string_view s) {
  if (s == "modified_kn") return Smoothing::modified_kn;
  if (s == "witten_bell") return Smoothing::witten_bell;
  throw FormatError("unknown smoothing " + std::string(s));
}

namespace ngram {

inline constexpr unsigned kBits = 21;
inline constexpr std::uint64_t kMask = (1ULL << kBits) - 1;

inline std::uint64_t key2(std::uint64_t u, std::uint64_t v) { return (u << kBits) | v; }
inline std::uint64_t key3(std::uint64_t u, std::uint64_t v, std::uint64_t w) {
  return (u << (2 * kBits)) | (v << kBits) | w;
}
inline Symbol first_of2(std::uint64_t k) { return static_cast<Symbol>(k >> kBits); }
inline Symbol second_of2(std::uint64_t k) { return static_cast<Symbol>(k & kMask); }
inline std::array<Symbol, 3> split3(std::uint64_t k) {
  return {static_cast<Symbol>(k >> (2 * kBits)), static_cast<Symbol>((k >> kBits) & kMask),
          static_cast<Symbol>(k & kMask)};
}

template <typename Map>
std::vector<typename Map::key_type> sorted_keys(const Map& m) {
  std::vector<typename Map::key_type> keys;
  keys.reserve(m.size());
  for (const auto& kv : m) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace ngram

// Counts of every 1/2/3-gram that ends at a predicted position of a padded
// sequence <s> <s> w1 .. wn </s>.
class NgramCounts {
 public:
  explicit NgramCounts(std::size_t vocab_size = 0) : vocab_size_(vocab_size), unigrams_(vocab_size + 1, 0) {
    if (vocab_size + 2 > ngram::kMask) throw InvalidArgument("vocabulary too large for trigram keys");
  }

  std::size_t vocab_size() const { return vocab_size_; }
  Symbol eos() const { return static_cast<Symbol>(vocab_size_); }
  Symbol bos() const { return static_cast<Symbol>(vocab_size_ + 1); }

  void add_sequence(const SymbolSeq& seq) {
    Symbol u = bos(), v = bos();
    auto push = [&](Symbol w) {
      ++trigrams_[ngram::key3(u, v, w)];
      ++bigrams_[ngram::key2(v, w)];
      ++unigrams_[w];
      ++events_;
      u = v;
      v = w;
    };
    for (Symbol w : seq) {
      if (w >= vocab_size_) throw InvalidArgument("symbol " + std::to_string(w) + " outside vocabulary");
      push(w);
    }
    push(eos());
    ++sequences_;
  }

  void merge(const NgramCounts& o) {
    if (o.vocab_size_ != vocab_size_) throw InvalidArgument("merging counts over different vocabularies");
    for (const auto& [k, c] : o.trigrams_) trigrams_[k] += c;
    for (const auto& [k, c] : o.bigrams_) bigrams_[k] += c;
    for (std::size_t i = 0; i < unigrams_.size(); ++i) unigrams_[i] += o.unigrams_[i];
    events_ += o.events_;
    sequences_ += o.sequences_;
  }

  bool empty() const { return events_ == 0; }
  std::uint64_t events() const { return events_; }
  std::uint64_t sequences() const { return sequences_; }

  std::uint64_t trigram(Symbol u, Symbol v, Symbol w) const { return get(trigrams_, ngram::key3(u, v, w)); }
  std::uint64_t bigram(Symbol v, Symbol w) const { return get(bigrams_, ngram::key2(v, w)); }
  std::uint64_t unigram(Symbol w) const { return w < unigrams_.size() ? unigrams_[w] : 0; }

  const std::unordered_map<std::uint64_t, std::uint64_t>& trigrams() const { return trigrams_; }
  const std::unordered_map<std::uint64_t, std::uint64_t>& bigrams() const { return bigrams_; }
  const std::vector<std::uint64_t>& unigrams() const { return unigrams_; }

  // Every bigram count equals the sum of the trigrams extending it to the
  // left, and every unigram the sum of its bigrams.
  bool prefix_consistent() const {
    std::unordered_map<std::uint64_t, std::uint64_t> bi;
    for (const auto& [k, c] : trigrams_) {
      auto [u, v, w] = ngram::split3(k);
      bi[ngram::key2(v, w)] += c;
    }
    if (bi != bigrams_) return false;
    std::vector<std::uint64_t> uni(unigrams_.size(), 0);
    for (const auto& [k, c] : bigrams_) uni[ngram::second_of2(k)] += c;
    return uni == unigrams_;
  }

 private:
  static std::uint64_t get(const std::unordered_map<std::uint64_t, std::uint64_t>& m, std::uint64_t k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  }

  std::size_t vocab_size_;
  std::unordered_map<std::uint64_t, std::uint64_t> trigrams_;
  std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;
  std::vector<std::uint64_t> unigrams_;
  std::uint64_t events_ = 0;
  std::uint64_t sequences_ = 0;
};

inline NgramCounts count_ngrams(const std::vector<SymbolSeq>& sequences, std::size_t vocab_size) {
  NgramCounts c(vocab_size);
  for (const auto& s : sequences) c.add_sequence(s);
  return c;
}

// Modified Kneser-Ney discounts for one order.
struct KnDiscounts {
  double d1 = 0.5, d2 = 0.5, d3 = 0.5;

  double operator()(std::uint64_t count) const {
    if (count == 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3;
  }

  // Y = n1/(n1+2 n2); D1 = 1-2Y n2/n1; D2 = 2-3Y n3/n2; D3+ = 3-4Y n4/n3.
  // A discount whose count-of-counts are degenerate (zero denominator, or a
  // result outside (0, c]) falls back to 0.5.
  static KnDiscounts from_count_of_counts(std::uint64_t n1, std::uint64_t n2, std::uint64_t n3, std::uint64_t n4) {
    KnDiscounts d;
    const double N1 = static_cast<double>(n1), N2 = static_cast<double>(n2), N3 = static_cast<double>(n3),
                 N4 = static_cast<double>(n4);
    if (n1 + 2 * n2 == 0) return d;
    const double y = N1 / (N1 + 2.0 * N2);
    auto pick = [](double v, double cap) { return (std::isfinite(v) && v > 0.0 && v <= cap) ? v : 0.5; };
    if (n1 > 0) d.d1 = pick(1.0 - 2.0 * y * N2 / N1, 1.0);
    if (n2 > 0) d.d2 = pick(2.0 - 3.0 * y * N3 / N2, 2.0);
    if (n3 > 0) d.d3 = pick(3.0 - 4.0 * y * N4 / N3, 3.0);
    return d;
  }

  template <typename Range>
  static KnDiscounts from_counts(const Range& counts) {
    std::uint64_t n[5] = {0, 0, 0, 0, 0};
    for (auto c : counts)
      if (c >= 1 && c <= 4) ++n[c];
    return from_count_of_counts(n[1], n[2], n[3], n[4]);
  }
};

struct StyleScore {
  double total_logprob = 0.0;
  std::uint64_t token_count = 0;

  double per_token() const { return token_count == 0 ? 0.0 : total_logprob / static_cast<double>(token_count); }

  StyleScore& operator+=(const StyleScore& o) {
    total_logprob += o.total_logprob;
    token_count += o.token_count;
    return *this;
  }
};

class TrigramModel {
 public:
  TrigramModel() = default;

  std::size_t vocab_size() const { return vocab_size_; }
  Symbol eos() const { return static_cast<Symbol>(vocab_size_); }
  Symbol bos() const { return static_cast<Symbol>(vocab_size_ + 1); }
  Smoothing smoothing() const { return smoothing_; }
  const std::array<KnDiscounts, 3>& discounts() const { return discounts_; }

  std::size_t bigram_entries() const { return bi_logp_.size(); }
  std::size_t trigram_entries() const { return tri_logp_.size(); }

  // ln p(w | u v). u, v may be <s>; w ranges over 0..V (incl. </s>).
  double logprob(Symbol u, Symbol v, Symbol w) const {
    if (w > eos()) throw InvalidArgument("symbol " + std::to_string(w) + " outside model space");
    if (auto it = tri_logp_.find(ngram::key3(u, v, w)); it != tri_logp_.end()) return it->second;
    double lp = 0.0;
    if (auto it = tri_bow_.find(ngram::key2(u, v)); it != tri_bow_.end()) lp = it->second;
    if (auto it = bi_logp_.find(ngram::key2(v, w)); it != bi_logp_.end()) return lp + it->second;
    return lp + uni_bow_[v] + uni_logp_[w];
  }

  double prob(Symbol u, Symbol v, Symbol w) const { return std::exp(logprob(u, v, w)); }
  double unigram_prob(Symbol w) const { return std::exp(uni_logp_.at(w)); }
  double bigram_prob(Symbol v, Symbol w) const {
    if (auto it = bi_logp_.find(ngram::key2(v, w)); it != bi_logp_.end()) return std::exp(it->second);
    return std::exp(uni_bow_.at(v) + uni_logp_.at(w));
  }

  StyleScore score(const SymbolSeq& seq) const {
    StyleScore s;
    Symbol u = bos(), v = bos();
    for (Symbol w : seq) {
      if (w >= vocab_size_) throw InvalidArgument("symbol " + std::to_string(w) + " outside model space");
      s.total_logprob += logprob(u, v, w);
      u = v;
      v = w;
    }
    s.total_logprob += logprob(u, v, eos());
    s.token_count = seq.size() + 1;
    return s;
  }

  // ARPA back-off text (log10), symbol names from the vocabulary.
  std::string to_arpa(const Vocabulary& vocab, const std::string& comment = {}) const {
    if (vocab.size() != vocab_size_) throw InvalidArgument("vocabulary does not match model");
    auto name = [&](Symbol s) -> std::string {
      if (s == eos()) return "</s>";
      if (s == bos()) return "<s>";
      return vocab.name(s);
    };
    const double to10 = 1.0 / std::log(10.0);
    std::string out;
    out += "# commlang trigram model\n";
    out += std::string("# smoothing ") + to_string(smoothing_) + "\n";
    out += "# logbase 10\n";
    out += "# vocab_hash " + hex64(vocab.hash()) + "\n";
    if (smoothing_ == Smoothing::modified_kn)
      for (int o = 0; o < 3; ++o)
        out += "# discounts " + std::to_string(o + 1) + " " + format_double(discounts_[o].d1) + " " +
               format_double(discounts_[o].d2) + " " + format_double(discounts_[o].d3) + "\n";
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "\n\\data\\\n";
    out += "ngram 1=" + std::to_string(vocab_size_ + 2) + "\n";
    // Contexts ending in <s> carry a back-off weight but no probability.
    std::unordered_map<std::uint64_t, double> bigram_lines = bi_logp_;
    for (const auto& [k, bow] : tri_bow_)
      if (!bi_logp_.count(k)) bigram_lines[k] = -99.0 / to10;
    out += "ngram 2=" + std::to_string(bigram_lines.size()) + "\n";
    out += "ngram 3=" + std::to_string(tri_logp_.size()) + "\n";

    out += "\n\\1-grams:\n";
    for (Symbol w = 0; w <= bos(); ++w) {
      out += w == bos() ? std::string("-99") : format_double(uni_logp_[w] * to10);
      out += "\t" + name(w);
      if (uni_bow_[w] != 0.0 || uni_has_context_[w]) out += "\t" + format_double(uni_bow_[w] * to10);
      out += "\n";
    }
    out += "\n\\2-grams:\n";
    for (auto k : ngram::sorted_keys(bigram_lines)) {
      out += format_double(bigram_lines.at(k) * to10) + "\t" + name(ngram::first_of2(k)) + " " + name(ngram::second_of2(k));
      if (auto it = tri_bow_.find(k); it != tri_bow_.end()) out += "\t" + format_double(it->second * to10);
      out += "\n";
    }
    out += "\n\\3-grams:\n";
    for (auto k : ngram::sorted_keys(tri_logp_)) {
      auto [u, v, w] = ngram::split3(k);
      out += format_double(tri_logp_.at(k) * to10) + "\t" + name(u) + " " + name(v) + " " + name(w) + "\n";
    }
    out += "\n\\end\\\n";
    return out;
  }

  static TrigramModel from_arpa(const std::string& text, const Vocabulary& vocab) {
    TrigramModel m;
    m.vocab_size_ = vocab.size();
    m.uni_logp_.assign(m.vocab_size_ + 2, 0.0);
    m.uni_bow_.assign(m.vocab_size_ + 2, 0.0);
    m.uni_has_context_.assign(m.vocab_size_ + 2, false);
    const double from10 = std::log(10.0);
    auto lookup = [&](const std::string& n) -> Symbol {
      if (n == "</s>") return m.eos();
      if (n == "<s>") return m.bos();
      auto s = vocab.find_name(n);
      if (!s) throw FormatError("ARPA symbol '" + n + "' not in vocabulary");
      return *s;
    };
    std::istringstream in(text);
    std::string line;
    int section = -1;  // -1 preamble, 0 data, 1..3 n-grams
    std::size_t lineno = 0;
    std::vector<bool> seen_unigram(m.vocab_size_ + 2, false);
    while (std::getline(in, line)) {
      ++lineno;
      if (section == -1 && line.starts_with("#")) {
        std::istringstream ls(line.substr(1));
        std::string key;
        ls >> key;
        if (key == "smoothing") {
          std::string s;
          ls >> s;
          m.smoothing_ = smoothing_from_string(s);
        } else if (key == "vocab_hash") {
          std::string h;
          ls >> h;
          if (h != hex64(vocab.hash())) throw FormatError("ARPA model was built for a different vocabulary");
        } else if (key == "discounts") {
          int o = 0;
          ls >> o;
          if (o >= 1 && o <= 3) ls >> m.discounts_[o - 1].d1 >> m.discounts_[o - 1].d2 >> m.discounts_[o - 1].d3;
        }
        continue;
      }
      if (line.empty()) continue;
      if (line == "\\data\\") {
        section = 0;
        continue;
      }
      if (line == "\\end\\") break;
      if (line.size() > 2 && line[0] == '\\' && line.ends_with("-grams:")) {
        section = line[1] - '0';
        if (section < 1 || section > 3) throw FormatError("unsupported n-gram order in ARPA");
        continue;
      }
      if (section <= 0) continue;
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (fields.size() < 2) throw FormatError("ARPA line " + std::to_string(lineno) + " malformed");
      const double lp = std::stod(fields[0]) * from10;
      std::vector<Symbol> syms;
      std::istringstream ws(fields[1]);
      std::string tok;
      while (ws >> tok) syms.push_back(lookup(tok));
      if (syms.size() != static_cast<std::size_t>(section))
        throw FormatError("ARPA line " + std::to_string(lineno) + " has wrong order");
      const bool has_bow = fields.size() >= 3;
      const double bow = has_bow ? std::stod(fields[2]) * from10 : 0.0;
      if (section == 1) {
        seen_unigram[syms[0]] = true;
        if (syms[0] != m.bos()) m.uni_logp_[syms[0]] = lp;
        m.uni_bow_[syms[0]] = bow;
        m.uni_has_context_[syms[0]] = has_bow;
      } else if (section == 2) {
        if (syms[1] != m.bos()) m.bi_logp_[ngram::key2(syms[0], syms[1])] = lp;
        if (has_bow) m.tri_bow_[ngram::key2(syms[0], syms[1])] = bow;
      } else {
        m.tri_logp_[ngram::key3(syms[0], syms[1], syms[2])] = lp;
      }
    }
    for (Symbol w = 0; w <= m.eos(); ++w)
      if (!seen_unigram[w]) throw FormatError("ARPA model lacks unigram for '" + vocab.name(w) + "'");
    return m;
  }

 private:
  friend TrigramModel estimate_kn(const NgramCounts&);
  friend TrigramModel estimate_wb(const NgramCounts&);

  void init(std::size_t vocab_size, Smoothing s) {
    vocab_size_ = vocab_size;
    smoothing_ = s;
    uni_logp_.assign(vocab_size + 2, 0.0);
    uni_bow_.assign(vocab_size + 2, 0.0);
    uni_has_context_.assign(vocab_size + 2, false);
  }

  std::size_t vocab_size_ = 0;
  Smoothing smoothing_ = Smoothing::witten_bell;
  std::array<KnDiscounts, 3> discounts_{};
  std::vector<double> uni_logp_;  // indexed by symbol, <s> entry unused
  std::vector<double> uni_bow_;   // ln gamma(v) for bigram contexts v
  std::vector<bool> uni_has_context_;
  std::unordered_map<std::uint64_t, double> bi_logp_;
  std::unordered_map<std::uint64_t, double> tri_bow_;  // keyed by (u, v)
  std::unordered_map<std::uint64_t, double> tri_logp_;
};

namespace detail {

struct ContextStats {
  double total = 0.0;          // sum of (possibly continuation) counts
  std::uint64_t n[4] = {0, 0, 0, 0};  // types with count 1, 2, >=3 in n[1..3]; n[0] = all types

  void add(std::uint64_t c) {
    total += static_cast<double>(c);
    ++n[0];
    ++n[std::min<std::uint64_t>(c, 3)];
  }

  double kn_gamma(const KnDiscounts& d) const {
    return (d.d1 * static_cast<double>(n[1]) + d.d2 * static_cast<double>(n[2]) + d.d3 * static_cast<double>(n[3])) /
           total;
  }
};

}  // namespace detail

// Interpolated modified Kneser-Ney.
inline TrigramModel estimate_kn(const NgramCounts& counts) {
  if (counts.empty()) throw InvalidArgument("cannot estimate a model from empty counts");
  const std::size_t V = counts.vocab_size();
  const double uniform = 1.0 / static_cast<double>(V + 1);
  TrigramModel m;
  m.init(V, Smoothing::modified_kn);

  // Continuation counts: c2(v,w) = #{u : c(u,v,w) > 0}; c1(w) = #{v : c2(v,w) > 0}.
  std::unordered_map<std::uint64_t, std::uint64_t> c2;
  for (const auto& [k, c] : counts.trigrams()) {
    auto [u, v, w] = ngram::split3(k);
    ++c2[ngram::key2(v, w)];
  }
  std::vector<std::uint64_t> c1(V + 1, 0);
  for (const auto& [k, c] : c2) ++c1[ngram::second_of2(k)];

  std::vector<std::uint64_t> tri_vals, bi_vals;
  tri_vals.reserve(counts.trigrams().size());
  for (const auto& [k, c] : counts.trigrams()) tri_vals.push_back(c);
  for (const auto& [k, c] : c2) bi_vals.push_back(c);
  m.discounts_[2] = KnDiscounts::from_counts(tri_vals);
  m.discounts_[1] = KnDiscounts::from_counts(bi_vals);
  m.discounts_[0] = KnDiscounts::from_counts(c1);
  const auto& D1 = m.discounts_[0];
  const auto& D2 = m.discounts_[1];
  const auto& D3 = m.discounts_[2];

  // Unigrams.
  detail::ContextStats uni;
  for (auto c : c1)
    if (c > 0) uni.add(c);
  const double gamma1 = uni.kn_gamma(D1);
  std::vector<double> p1(V + 1);
  for (Symbol w = 0; w <= V; ++w) {
    p1[w] = std::max(static_cast<double>(c1[w]) - D1(c1[w]), 0.0) / uni.total + gamma1 * uniform;
    m.uni_logp_[w] = std::log(p1[w]);
  }

  // Bigrams over continuation counts.
  std::unordered_map<Symbol, detail::ContextStats> bi_ctx;
  for (const auto& [k, c] : c2) bi_ctx[ngram::first_of2(k)].add(c);
  std::unordered_map<Symbol, double> gamma2;
  for (const auto& [v, st] : bi_ctx) {
    gamma2[v] = st.kn_gamma(D2);
    m.uni_bow_[v] = std::log(gamma2[v]);
    m.uni_has_context_[v] = true;
  }
  for (const auto& [k, c] : c2) {
    const Symbol v = ngram::first_of2(k), w = ngram::second_of2(k);
    const double p = std::max(static_cast<double>(c) - D2(c), 0.0) / bi_ctx[v].total + gamma2[v] * p1[w];
    m.bi_logp_[k] = std::log(p);
  }

  // Trigrams over raw counts.
  std::unordered_map<std::uint64_t, detail::ContextStats> tri_ctx;
  for (const auto& [k, c] : counts.trigrams()) {
    auto [u, v, w] = ngram::split3(k);
    tri_ctx[ngram::key2(u, v)].add(c);
  }
  std::unordered_map<std::uint64_t, double> gamma3;
  for (const auto& [ctx, st] : tri_ctx) {
    gamma3[ctx] = st.kn_gamma(D3);
    m.tri_bow_[ctx] = std::log(gamma3[ctx]);
  }
  for (const auto& [k, c] : counts.trigrams()) {
    auto [u, v, w] = ngram::split3(k);
    const auto ctx = ngram::key2(u, v);
    const double lower = std::exp(m.bi_logp_.count(ngram::key2(v, w)) ? m.bi_logp_[ngram::key2(v, w)]
                                                                       : m.uni_bow_[v] + m.uni_logp_[w]);
    const double p = std::max(static_cast<double>(c) - D3(c), 0.0) / tri_ctx[ctx].total + gamma3[ctx] * lower;
    m.tri_logp_[k] = std::log(p);
  }
  return m;
}

// Interpolated Witten-Bell: p(w|h) = (c(h,w) + T(h) p(w|h')) / (c(h) + T(h)).
inline TrigramModel estimate_wb(const NgramCounts& counts) {
  if (counts.empty()) throw InvalidArgument("cannot estimate a model from empty counts");
  const std::size_t V = counts.vocab_size();
  const double uniform = 1.0 / static_cast<double>(V + 1);
  TrigramModel m;
  m.init(V, Smoothing::witten_bell);

  detail::ContextStats uni;
  for (auto c : counts.unigrams())
    if (c > 0) uni.add(c);
  const double t1 = static_cast<double>(uni.n[0]);
  std::vector<double> p1(V + 1);
  for (Symbol w = 0; w <= V; ++w) {
    p1[w] = (static_cast<double>(counts.unigrams()[w]) + t1 * uniform) / (uni.total + t1);
    m.uni_logp_[w] = std::log(p1[w]);
  }

  std::unordered_map<Symbol, detail::ContextStats> bi_ctx;
  for (const auto& [k, c] : counts.bigrams()) bi_ctx[ngram::first_of2(k)].add(c);
  for (const auto& [v, st] : bi_ctx) {
    m.uni_bow_[v] = std::log(static_cast<double>(st.n[0]) / (st.total + static_cast<double>(st.n[0])));
    m.uni_has_context_[v] = true;
  }
  for (const auto& [k, c] : counts.bigrams()) {
    const Symbol v = ngram::first_of2(k), w = ngram::second_of2(k);
    const auto& st = bi_ctx[v];
    const double T = static_cast<double>(st.n[0]);
    m.bi_logp_[k] = std::log((static_cast<double>(c) + T * p1[w]) / (st.total + T));
  }

  std::unordered_map<std::uint64_t, detail::ContextStats> tri_ctx;
  for (const auto& [k, c] : counts.trigrams()) {
    auto [u, v, w] = ngram::split3(k);
    tri_ctx[ngram::key2(u, v)].add(c);
  }
  for (const auto& [ctx, st] : tri_ctx)
    m.tri_bow_[ctx] = std::log(static_cast<double>(st.n[0]) / (st.total + static_cast<double>(st.n[0])));
  for (const auto& [k, c] : counts.trigrams()) {
    auto [u, v, w] = ngram::split3(k);
    const auto& st = tri_ctx[ngram::key2(u, v)];
    const double T = static_cast<double>(st.n[0]);
    const double lower = std::exp(m.bi_logp_.at(ngram::key2(v, w)));
    m.tri_logp_[k] = std::log((static_cast<double>(c) + T * lower) / (st.total + T));
  }
  return m;
}

inline TrigramModel estimate(const NgramCounts& counts, Smoothing s) {
  return s == Smoothing::modified_kn ? estimate_kn(counts) : estimate_wb(counts);
}

inline StyleScore score(const TrigramModel& model, const SymbolSeq& seq) { return model.score(seq); }

// Each comment is its own padded sequence; totals and counts add up.
inline StyleScore score_document(const TrigramModel& model, const Vocabulary& vocab,
                                 const std::vector<TokenSeq>& document) {
  if (document.empty()) throw InvalidArgument("cannot score an empty document");
  StyleScore s;
  for (const auto& seq : document) s += model.score(apply_vocab(vocab, seq));
  return s;
}

}  // namespace commlang
