#pragma once

// Tokenization and part-of-speech tagging.
//
// Tokens are lowercased, punctuation is split off into its own tokens,
// English clitics are separated PTB-style and URLs collapse to <url>.
// Tags come from a fixed 38-symbol inventory (36 Penn Treebank word tags,
// "." for sentence-final punctuation and PUNCT for every other
// punctuation/symbol token). Punctuation is tagged by rule; everything else
// goes through a greedy averaged-perceptron tagger.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "commlang/common.hpp"

namespace commlang {

using TagId = std::uint8_t;
inline constexpr TagId kUntagged = 0xFF;

class TagSet {
 public:
  static constexpr std::size_t kSize = 38;
  static constexpr std::string_view kSentenceFinal = ".";
  static constexpr std::string_view kOtherPunct = "PUNCT";

  TagSet() : TagSet(default_names()) {}

  explicit TagSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() != kSize)
      throw FormatError("tag inventory must have " + std::to_string(kSize) + " tags, got " +
                        std::to_string(names_.size()));
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw FormatError("empty tag name");
      if (!index_.emplace(names_[i], static_cast<TagId>(i)).second)
        throw FormatError("duplicate tag " + names_[i]);
    }
    final_punct_ = require(kSentenceFinal);
    other_punct_ = require(kOtherPunct);
  }

  // One tag per line; blank lines and '#' comments ignored.
  static TagSet parse(std::string_view text) {
    std::vector<std::string> names;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      auto e = line.find_last_not_of(" \t\r");
      names.push_back(line.substr(b, e - b + 1));
    }
    return TagSet(std::move(names));
  }

  static std::vector<std::string> default_names() {
    return {"CC",  "CD",  "DT",  "EX",   "FW",  "IN",  "JJ",  "JJR", "JJS", "LS",  "MD",  "NN",  "NNS",
            "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP",  "SYM", "TO",  "UH",
            "VB",  "VBD", "VBG", "VBN",  "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB", ".",   "PUNCT"};
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(TagId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<TagId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  TagId sentence_final() const { return final_punct_; }
  TagId other_punct() const { return other_punct_; }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("tagset");
    for (const auto& n : names_) h = fnv1a64(n + "\n", h);
    return h;
  }

  bool operator==(const TagSet& o) const { return names_ == o.names_; }

 private:
  TagId require(std::string_view n) const {
    auto id = find(n);
    if (!id) throw FormatError("tag inventory lacks required tag " + std::string(n));
    return *id;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, TagId> index_;
  TagId final_punct_ = 0;
  TagId other_punct_ = 0;
};

struct Token {
  std::string surface;
  TagId tag = kUntagged;

  bool operator==(const Token&) const = default;
};

using TokenSeq = std::vector<Token>;

// ---------------------------------------------------------------------------
// Tokenizer

namespace detail {

inline bool is_punct_char(unsigned char c) { return c < 0x80 && std::ispunct(c); }
inline bool is_word_char(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

inline bool is_clitic(std::string_view s) {
  return s == "n't" || s == "'s" || s == "'re" || s == "'ve" || s == "'ll" || s == "'d" || s == "'m";
}

inline bool starts_with_url(std::string_view s) {
  return s.starts_with("http://") || s.starts_with("https://") || s.starts_with("www.");
}

inline void lowercase_ascii(std::string& s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
}

// Splits trailing clitics off a word whose stem ends in a word character.
inline void push_word(std::string_view w, std::vector<std::string>& out) {
  static constexpr std::string_view kSuffixes[] = {"n't", "'s", "'re", "'ve", "'ll", "'d", "'m"};
  for (auto suf : kSuffixes) {
    if (w.size() > suf.size() && w.ends_with(suf)) {
      auto stem = w.substr(0, w.size() - suf.size());
      if (is_word_char(static_cast<unsigned char>(stem.back()))) {
        push_word(stem, out);
        out.emplace_back(suf);
        return;
      }
    }
  }
  out.emplace_back(w);
}

// Punctuation runs: consecutive identical characters form one token.
inline void push_punct_run(std::string_view p, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i + 1;
    while (j < p.size() && p[j] == p[i]) ++j;
    out.emplace_back(p.substr(i, j - i));
    i = j;
  }
}

inline void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  if (chunk == "<url>" || is_clitic(chunk)) {
    out.emplace_back(chunk);
    return;
  }
  std::size_t b = 0;
  while (b < chunk.size() && is_punct_char(static_cast<unsigned char>(chunk[b]))) ++b;
  if (b == chunk.size()) {
    push_punct_run(chunk, out);
    return;
  }
  auto rest = chunk.substr(b);
  if (starts_with_url(rest)) {
    push_punct_run(chunk.substr(0, b), out);
    std::size_t e = rest.size();
    while (e > 0 && std::string_view(".,!?;:)]}\"'").find(rest[e - 1]) != std::string_view::npos) --e;
    out.emplace_back("<url>");
    push_punct_run(rest.substr(e), out);
    return;
  }
  std::size_t e = chunk.size();
  while (e > b && is_punct_char(static_cast<unsigned char>(chunk[e - 1]))) --e;
  push_punct_run(chunk.substr(0, b), out);
  push_word(chunk.substr(b, e - b), out);
  push_punct_run(chunk.substr(e), out);
}

}  // namespace detail

inline bool is_punctuation_token(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return detail::is_punct_char(static_cast<unsigned char>(c)); });
}

// Whitespace split, punctuation split off, clitics separated, URLs
// collapsed, lowercased.
inline std::vector<std::string> tokenize(std::string_view raw) {
  std::string text(raw);
  // Typographic apostrophe (U+2019) folds to ASCII.
  for (std::size_t p; (p = text.find("\xE2\x80\x99")) != std::string::npos;) text.replace(p, 3, "'");
  detail::lowercase_ascii(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) detail::tokenize_chunk(std::string_view(text).substr(i, j - i), out);
    i = j;
  }
  return out;
}

// Rule tag for punctuation tokens; nullopt for everything else.
inline std::optional<TagId> punctuation_tag(const TagSet& tags, std::string_view surface) {
  if (!is_punctuation_token(surface)) return std::nullopt;
  const bool final = std::all_of(surface.begin(), surface.end(), [](char c) { return c == '.' || c == '!' || c == '?'; });
  return final ? tags.sentence_final() : tags.other_punct();
}

// ---------------------------------------------------------------------------
// Averaged perceptron tagger

struct TaggedSentence {
  std::vector<std::string> words;
  std::vector<std::string> tags;
};

class TaggerModel {
 public:
  static constexpr int kFormatVersion = 1;

  TaggerModel() = default;

  const TagSet& tagset() const { return tagset_; }
  int iterations() const { return iterations_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t feature_count() const { return weights_.size(); }

  // Greedy left-to-right decoding.
  TokenSeq tag(const std::vector<std::string>& words) const {
    TokenSeq out;
    out.reserve(words.size());
    const auto context = normalized_context(words);
    TagId prev = kStart, prev2 = kStart;
    std::vector<double> scores(tagset_.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      TagId t = predict_one(words, context, i, prev, prev2, scores);
      out.push_back(Token{words[i], t});
      prev2 = prev;
      prev = t;
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::json j;
    j["format"] = "commlang-tagger";
    j["version"] = kFormatVersion;
    j["tagset"] = tagset_.names();
    j["iterations"] = iterations_;
    j["seed"] = seed_;
    nlohmann::json dict = nlohmann::json::object();
    for (const auto& [w, t] : std::map<std::string, TagId>(tagdict_.begin(), tagdict_.end()))
      dict[w] = tagset_.name(t);
    j["tagdict"] = std::move(dict);
    nlohmann::json weights = nlohmann::json::object();
    for (const auto& [f, row] : std::map<std::string, std::vector<double>>(weights_.begin(), weights_.end())) {
      nlohmann::json r = nlohmann::json::object();
      for (std::size_t t = 0; t < row.size(); ++t)
        if (row[t] != 0.0) r[tagset_.name(static_cast<TagId>(t))] = row[t];
      if (!r.empty()) weights[f] = std::move(r);
    }
    j["weights"] = std::move(weights);
    return j.dump();
  }

  static TaggerModel from_json(std::string_view text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "commlang-tagger") throw FormatError("not a tagger model file");
    if (j.value("version", 0) != kFormatVersion) throw FormatError("unsupported tagger model version");
    TaggerModel m;
    m.tagset_ = TagSet(j.at("tagset").get<std::vector<std::string>>());
    m.iterations_ = j.at("iterations").get<int>();
    m.seed_ = j.at("seed").get<std::uint64_t>();
    for (const auto& [w, t] : j.at("tagdict").items()) m.tagdict_[w] = m.lookup(t.get<std::string>());
    for (const auto& [f, r] : j.at("weights").items()) {
      std::vector<double> row(m.tagset_.size(), 0.0);
      for (const auto& [t, v] : r.items()) row[m.lookup(t)] = v.get<double>();
      m.weights_.emplace(f, std::move(row));
    }
    return m;
  }

 private:
  friend struct TaggerTrainer;
  static constexpr TagId kStart = 0xFE;

  TagId lookup(const std::string& t) const {
    auto id = tagset_.find(t);
    if (!id) throw FormatError("tagger model uses unknown tag " + t);
    return *id;
  }

  static std::string normalize(const std::string& w) {
    if (w == "<url>") return "!URL";
    bool has_digit = std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); });
    if (has_digit && w.size() == 4 && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); }))
      return "!YEAR";
    if (has_digit && std::isdigit(static_cast<unsigned char>(w[0]))) return "!DIGITS";
    return w;
  }

  static std::vector<std::string> normalized_context(const std::vector<std::string>& words) {
    std::vector<std::string> ctx;
    ctx.reserve(words.size() + 4);
    ctx.emplace_back("-START-");
    ctx.emplace_back("-START2-");
    for (const auto& w : words) ctx.push_back(normalize(w));
    ctx.emplace_back("-END-");
    ctx.emplace_back("-END2-");
    return ctx;
  }

  std::string tag_name_or_start(TagId t) const { return t == kStart ? std::string("-START-") : tagset_.name(t); }

  static std::string suffix(const std::string& w, std::size_t n) {
    return w.size() <= n ? w : w.substr(w.size() - n);
  }

  std::vector<std::string> features(const std::vector<std::string>& ctx, std::size_t i, TagId prev,
                                    TagId prev2) const {
    // ctx is offset by two start markers.
    const std::size_t c = i + 2;
    const std::string& w = ctx[c];
    const std::string p1 = tag_name_or_start(prev), p2 = tag_name_or_start(prev2);
    std::vector<std::string> f;
    f.reserve(16);
    f.emplace_back("bias");
    f.push_back("i suffix " + suffix(w, 3));
    f.push_back("i pref1 " + w.substr(0, 1));
    f.push_back("i-1 tag " + p1);
    f.push_back("i-2 tag " + p2);
    f.push_back("i tag+i-2 tag " + p1 + " " + p2);
    f.push_back("i word " + w);
    f.push_back("i-1 tag+i word " + p1 + " " + w);
    f.push_back("i-1 word " + ctx[c - 1]);
    f.push_back("i-1 suffix " + suffix(ctx[c - 1], 3));
    f.push_back("i-2 word " + ctx[c - 2]);
    f.push_back("i+1 word " + ctx[c + 1]);
    f.push_back("i+1 suffix " + suffix(ctx[c + 1], 3));
    f.push_back("i+2 word " + ctx[c + 2]);
    if (w.find('-') != std::string::npos) f.emplace_back("i hyphen");
    return f;
  }

  void accumulate(const std::vector<std::string>& feats, std::vector<double>& scores) const {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const auto& f : feats) {
      auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      for (std::size_t t = 0; t < scores.size(); ++t) scores[t] += it->second[t];
    }
  }

  TagId best(const std::vector<double>& scores) const {
    // Highest score; ties go to the lower tag index.
    std::size_t b = 0;
    for (std::size_t t = 1; t < scores.size(); ++t)
      if (scores[t] > scores[b]) b = t;
    return static_cast<TagId>(b);
  }

  TagId predict_one(const std::vector<std::string>& words, const std::vector<std::string>& ctx, std::size_t i,
                    TagId prev, TagId prev2, std::vector<double>& scores) const {
    if (auto p = punctuation_tag(tagset_, words[i])) return *p;
    if (auto it = tagdict_.find(words[i]); it != tagdict_.end()) return it->second;
    accumulate(features(ctx, i, prev, prev2), scores);
    return best(scores);
  }

  TagSet tagset_;
  int iterations_ = 0;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, std::vector<double>> weights_;
  std::unordered_map<std::string, TagId> tagdict_;
};

struct TaggerTrainingResult {
  TaggerModel model;
  std::optional<double> dev_accuracy;
};

// Token accuracy of a model against gold sentences.
inline double tagging_accuracy(const TaggerModel& model, const std::vector<TaggedSentence>& gold) {
  std::size_t total = 0, correct = 0;
  for (const auto& s : gold) {
    auto out = model.tag(s.words);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ++total;
      if (model.tagset().name(out[i].tag) == s.tags[i]) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct TaggerTrainer {
  // Words seen at least this often with one dominant tag bypass the model.
  static constexpr std::size_t kDictMinCount = 20;
  static constexpr double kDictMinRatio = 0.97;

  static TaggerTrainingResult train(const std::vector<TaggedSentence>& corpus, int iterations, std::uint64_t seed,
                                    const TagSet& tagset = TagSet(),
                                    const std::vector<TaggedSentence>* dev = nullptr) {
    if (corpus.empty()) throw InvalidArgument("tagger training corpus is empty");
    if (iterations < 1) throw InvalidArgument("tagger iterations must be >= 1");

    // Validate and convert gold tags.
    std::vector<std::vector<TagId>> gold(corpus.size());
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      if (corpus[s].words.size() != corpus[s].tags.size())
        throw FormatError("sentence " + std::to_string(s) + ": word/tag count mismatch");
      for (const auto& t : corpus[s].tags) {
        auto id = tagset.find(t);
        if (!id) throw FormatError("unknown gold tag '" + t + "' in sentence " + std::to_string(s));
        gold[s].push_back(*id);
      }
    }

    TaggerModel m;
    m.tagset_ = tagset;
    m.iterations_ = iterations;
    m.seed_ = seed;
    build_tagdict(corpus, gold, m);

    const std::size_t n_tags = tagset.size();
    struct Accum {
      std::vector<double> weight, total;
      std::vector<std::uint64_t> stamp;
    };
    std::unordered_map<std::string, Accum> acc;
    std::uint64_t instances = 0;

    auto update = [&](const std::string& f, TagId t, double delta) {
      auto& a = acc[f];
      if (a.weight.empty()) {
        a.weight.assign(n_tags, 0.0);
        a.total.assign(n_tags, 0.0);
        a.stamp.assign(n_tags, 0);
      }
      a.total[t] += static_cast<double>(instances - a.stamp[t]) * a.weight[t];
      a.stamp[t] = instances;
      a.weight[t] += delta;
    };

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    std::vector<double> scores(n_tags);

    for (int it = 0; it < iterations; ++it) {
      for (std::size_t s : order) {
        const auto& words = corpus[s].words;
        const auto ctx = TaggerModel::normalized_context(words);
        TagId prev = TaggerModel::kStart, prev2 = TaggerModel::kStart;
        for (std::size_t i = 0; i < words.size(); ++i) {
          TagId guess;
          if (auto p = punctuation_tag(tagset, words[i])) {
            guess = *p;
          } else if (auto d = m.tagdict_.find(words[i]); d != m.tagdict_.end()) {
            guess = d->second;
          } else {
            auto feats = m.features(ctx, i, prev, prev2);
            // Score with the live weights.
            std::fill(scores.begin(), scores.end(), 0.0);
            for (const auto& f : feats) {
              auto a = acc.find(f);
              if (a == acc.end()) continue;
              for (std::size_t t = 0; t < n_tags; ++t) scores[t] += a->second.weight[t];
            }
            guess = m.best(scores);
            ++instances;
            if (guess != gold[s][i]) {
              for (const auto& f : feats) {
                update(f, gold[s][i], 1.0);
                update(f, guess, -1.0);
              }
            }
          }
          prev2 = prev;
          prev = guess;
        }
      }
      rng.shuffle(order);
    }

    for (auto& [f, a] : acc) {
      std::vector<double> avg(n_tags, 0.0);
      bool any = false;
      for (std::size_t t = 0; t < n_tags; ++t) {
        const double total = a.total[t] + static_cast<double>(instances - a.stamp[t]) * a.weight[t];
        avg[t] = instances == 0 ? 0.0 : total / static_cast<double>(instances);
        any |= avg[t] != 0.0;
      }
      if (any) m.weights_.emplace(f, std::move(avg));
    }

    TaggerTrainingResult result{std::move(m), std::nullopt};
    if (dev) result.dev_accuracy = tagging_accuracy(result.model, *dev);
    return result;
  }

 private:
  static void build_tagdict(const std::vector<TaggedSentence>& corpus, const std::vector<std::vector<TagId>>& gold,
                            TaggerModel& m) {
    std::map<std::string, std::map<TagId, std::size_t>> counts;
    for (std::size_t s = 0; s < corpus.size(); ++s)
      for (std::size_t i = 0; i < corpus[s].words.size(); ++i) ++counts[corpus[s].words[i]][gold[s][i]];
    for (const auto& [w, by_tag] : counts) {
      std::size_t n = 0, top = 0;
      TagId top_tag = 0;
      for (const auto& [t, c] : by_tag) {
        n += c;
        if (c > top) {
          top = c;
          top_tag = t;
        }
      }
      if (n >= kDictMinCount && static_cast<double>(top) / static_cast<double>(n) >= kDictMinRatio)
        m.tagdict_.emplace(w, top_tag);
    }
  }
};

inline TaggerTrainingResult train_tagger(const std::vector<TaggedSentence>& corpus, int iterations,
                                         std::uint64_t seed, const TagSet& tagset = TagSet(),
                                         const std::vector<TaggedSentence>* dev = nullptr) {
  return TaggerTrainer::train(corpus, iterations, seed, tagset, dev);
}

inline TokenSeq tag(const TaggerModel& model, const std::vector<std::string>& tokens) { return model.tag(tokens); }

// ---------------------------------------------------------------------------
// Pre-tagged input: "surface_TAG" tokens separated by whitespace; blank
// lines mark sequence boundaries.

inline std::vector<TaggedSentence> read_pretagged(std::istream& in, const TagSet& tagset = TagSet()) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!cur.words.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string item;
    bool any = false;
    while (ls >> item) {
      any = true;
      const auto us = item.rfind('_');
      if (us == std::string::npos || us == 0 || us + 1 == item.size())
        throw FormatError("line " + std::to_string(lineno) + ": token '" + item + "' is not surface_TAG");
      std::string tag = item.substr(us + 1);
      if (!tagset.find(tag))
        throw FormatError("line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
      cur.words.push_back(item.substr(0, us));
      cur.tags.push_back(std::move(tag));
    }
    if (!any) flush();
  }
  flush();
  return out;
}

inline std::vector<TokenSeq> ingest_pretagged(std::istream& in, const TagSet& tagset = TagSet()) {
  std::vector<TokenSeq> out;
  for (auto& s : read_pretagged(in, tagset)) {
    TokenSeq seq;
    for (std::size_t i = 0; i < s.words.size(); ++i) seq.push_back(Token{s.words[i], *tagset.find(s.tags[i])});
    out.push_back(std::move(seq));
  }
  return out;
}

// Tokenize + tag in one step.
inline TokenSeq annotate(const TaggerModel& model, std::string_view text) { return model.tag(tokenize(text)); }

}  // namespace commlang
