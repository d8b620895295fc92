#pragma once

// Style vocabularies and the mapping from tagged tokens into each
// vocabulary's symbol space.
//
//   word_only  every retained word plus <unk>
//   hyb        retained words, all other tokens replaced by their POS tag
//   tag_only   POS tags only

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "commlang/common.hpp"
#include "commlang/text.hpp"

namespace commlang {

struct FrequencyTable {
  std::string community;  // "ALL" for pooled tables
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total_tokens = 0;

  void add(const std::string& surface, std::uint64_t n = 1) {
    counts[surface] += n;
    total_tokens += n;
  }

  void merge(const FrequencyTable& other) {
    for (const auto& [w, c] : other.counts) counts[w] += c;
    total_tokens += other.total_tokens;
  }

  // Surfaces by descending count, ties lexicographic.
  std::vector<std::string> ranked() const {
    std::vector<std::pair<std::string, std::uint64_t>> items(counts.begin(), counts.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    out.reserve(items.size());
    for (auto& [w, c] : items) out.push_back(std::move(w));
    return out;
  }
};

inline FrequencyTable count_frequencies(const std::vector<std::vector<std::string>>& sequences,
                                        std::string community = "ALL") {
  FrequencyTable t;
  t.community = std::move(community);
  for (const auto& s : sequences)
    for (const auto& w : s) t.add(w);
  return t;
}

inline FrequencyTable count_frequencies(const std::vector<TokenSeq>& sequences, std::string community = "ALL") {
  FrequencyTable t;
  t.community = std::move(community);
  for (const auto& s : sequences)
    for (const auto& tok : s) t.add(tok.surface);
  return t;
}

inline FrequencyTable merge_tables(const FrequencyTable& a, const FrequencyTable& b) {
  FrequencyTable out = a;
  out.merge(b);
  if (a.community != b.community) out.community = "ALL";
  return out;
}

enum class VocabKind { word_only, hyb, tag_only };

inline const char* to_string(VocabKind k) {
  switch (k) {
    case VocabKind::word_only: return "word_only";
    case VocabKind::hyb: return "hyb";
    case VocabKind::tag_only: return "tag_only";
  }
  return "?";
}

inline VocabKind vocab_kind_from_string(std::string_view s) {
  if (s == "word_only") return VocabKind::word_only;
  if (s == "hyb") return VocabKind::hyb;
  if (s == "tag_only") return VocabKind::tag_only;
  throw FormatError("unknown vocabulary kind " + std::string(s));
}

using Symbol = std::uint32_t;
inline constexpr std::string_view kUnk = "<unk>";

// Symbol ids: words in sorted order first, then either <unk> (word_only) or
// the tag inventory (hyb, tag_only).
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary word_only(std::vector<std::string> words) {
    Vocabulary v(VocabKind::word_only, std::move(words), std::nullopt);
    return v;
  }
  static Vocabulary hybrid(std::vector<std::string> words, TagSet tags) {
    if (words.empty()) throw InvalidArgument("hybrid vocabulary needs at least one word");
    return Vocabulary(VocabKind::hyb, std::move(words), std::move(tags));
  }
  static Vocabulary tag_only(TagSet tags) { return Vocabulary(VocabKind::tag_only, {}, std::move(tags)); }

  VocabKind kind() const { return kind_; }
  const std::vector<std::string>& words() const { return words_; }
  bool has_tags() const { return tags_.has_value(); }
  const TagSet& tags() const { return tags_.value(); }
  bool has_unk() const { return kind_ == VocabKind::word_only; }

  // Number of symbols this vocabulary can emit.
  std::size_t size() const { return words_.size() + (has_unk() ? 1 : 0) + (tags_ ? tags_->size() : 0); }

  Symbol unk() const {
    if (!has_unk()) throw InvalidArgument("vocabulary has no <unk>");
    return static_cast<Symbol>(words_.size());
  }
  Symbol tag_symbol(TagId t) const { return static_cast<Symbol>(words_.size() + t); }

  std::optional<Symbol> word_symbol(const std::string& w) const {
    auto it = word_index_.find(w);
    if (it == word_index_.end()) return std::nullopt;
    return it->second;
  }

  bool is_tag_symbol(Symbol s) const { return tags_ && s >= words_.size() && s < size(); }

  // Printable name. A tag whose name coincides with a retained word (".")
  // is written as <tag:.> so every symbol has a distinct name.
  std::string name(Symbol s) const {
    if (s < words_.size()) return words_[s];
    if (has_unk()) {
      if (s == unk()) return std::string(kUnk);
    } else if (tags_ && s < size()) {
      const auto& t = tags_->name(static_cast<TagId>(s - words_.size()));
      if (word_index_.count(t) || t == "<s>" || t == "</s>") return "<tag:" + t + ">";
      return t;
    }
    throw InvalidArgument("symbol " + std::to_string(s) + " outside vocabulary");
  }

  std::optional<Symbol> find_name(const std::string& n) const {
    auto it = name_index_.find(n);
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  // Maps one token to its symbol.
  Symbol map(const Token& tok) const {
    switch (kind_) {
      case VocabKind::word_only: {
        auto s = word_symbol(tok.surface);
        return s ? *s : unk();
      }
      case VocabKind::hyb: {
        if (auto s = word_symbol(tok.surface)) return *s;
        if (tok.tag == kUntagged) throw InvalidArgument("untagged token '" + tok.surface + "' in hybrid vocabulary");
        return tag_symbol(tok.tag);
      }
      case VocabKind::tag_only:
        if (tok.tag == kUntagged) throw InvalidArgument("untagged token '" + tok.surface + "' in tag vocabulary");
        return tag_symbol(tok.tag);
    }
    return 0;
  }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64(to_string(kind_));
    for (const auto& w : words_) h = fnv1a64(w + "\n", h);
    if (tags_) h = fnv1a64(hex64(tags_->hash()), h);
    return h;
  }

  // Text form: '#' header lines closed by "#end", then one word per line.
  std::string serialize(const std::string& extra_header = {}) const {
    std::string out;
    out += "#commlang-vocab 1\n";
    out += std::string("#kind ") + to_string(kind_) + "\n";
    out += "#words " + std::to_string(words_.size()) + "\n";
    out += "#tags " + std::to_string(tags_ ? tags_->size() : 0) + "\n";
    if (tags_) {
      out += "#tagset_hash " + hex64(tags_->hash()) + "\n";
      out += "#tagset";
      for (const auto& t : tags_->names()) out += " " + t;
      out += "\n";
    }
    if (!extra_header.empty()) out += "#" + extra_header + "\n";
    out += "#end\n";
    for (const auto& w : words_) out += w + "\n";
    return out;
  }

  static Vocabulary deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "#commlang-vocab 1") throw FormatError("not a vocabulary file");
    VocabKind kind = VocabKind::word_only;
    std::optional<TagSet> tags;
    std::string tag_hash;
    std::size_t expected_words = 0;
    std::vector<std::string> words;
    bool in_header = true;
    while (std::getline(in, line)) {
      if (in_header && line == "#end") {
        in_header = false;
        continue;
      }
      if (in_header) {
        if (!line.starts_with("#")) throw FormatError("vocabulary header line without '#'");
        std::istringstream ls(line.substr(1));
        std::string key;
        ls >> key;
        if (key == "kind") {
          std::string k;
          ls >> k;
          kind = vocab_kind_from_string(k);
        } else if (key == "words") {
          ls >> expected_words;
        } else if (key == "tagset_hash") {
          ls >> tag_hash;
        } else if (key == "tagset") {
          std::vector<std::string> names;
          std::string n;
          while (ls >> n) names.push_back(n);
          tags = TagSet(std::move(names));
        }
        continue;
      }
      words.push_back(line);
    }
    if (words.size() != expected_words) throw FormatError("vocabulary word count mismatch");
    if (tags && hex64(tags->hash()) != tag_hash) throw FormatError("vocabulary tag inventory hash mismatch");
    switch (kind) {
      case VocabKind::word_only: return word_only(std::move(words));
      case VocabKind::hyb:
        if (!tags) throw FormatError("hybrid vocabulary without tag inventory");
        return hybrid(std::move(words), *tags);
      case VocabKind::tag_only:
        if (!tags) throw FormatError("tag vocabulary without tag inventory");
        return tag_only(*tags);
    }
    throw FormatError("bad vocabulary");
  }

 private:
  Vocabulary(VocabKind kind, std::vector<std::string> words, std::optional<TagSet> tags)
      : kind_(kind), words_(std::move(words)), tags_(std::move(tags)) {
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
    for (std::size_t i = 0; i < words_.size(); ++i) word_index_.emplace(words_[i], static_cast<Symbol>(i));
    for (Symbol s = 0; s < size(); ++s) name_index_.emplace(name(s), s);
  }

  VocabKind kind_ = VocabKind::word_only;
  std::vector<std::string> words_;
  std::optional<TagSet> tags_;
  std::unordered_map<std::string, Symbol> word_index_;
  std::unordered_map<std::string, Symbol> name_index_;
};

inline std::vector<std::string> top_words(const FrequencyTable& table, std::size_t k) {
  auto ranked = table.ranked();
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

inline Vocabulary build_word_only_vocab(const FrequencyTable& table, std::size_t top_k) {
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  return Vocabulary::word_only(top_words(table, top_k));
}

// Default word_only sizing: every word seen at least min_count times,
// capped at max_words.
inline Vocabulary build_word_only_vocab_by_count(const FrequencyTable& table, std::uint64_t min_count,
                                                 std::size_t max_words) {
  std::vector<std::string> words;
  for (const auto& w : table.ranked()) {
    if (table.counts.at(w) < min_count || words.size() >= max_words) break;
    words.push_back(w);
  }
  return Vocabulary::word_only(std::move(words));
}

struct CommunityTokens {
  std::string community;
  std::vector<std::vector<std::string>> sequences;  // deterministic thread/comment order
};

// First N tokens of every community, N = smallest community size.
inline std::vector<std::string> balanced_subset(const std::vector<CommunityTokens>& corpora) {
  if (corpora.size() < 2) throw InvalidArgument("balanced subset needs at least two communities");
  std::size_t n = SIZE_MAX;
  for (const auto& c : corpora) {
    std::size_t total = 0;
    for (const auto& s : c.sequences) total += s.size();
    if (total == 0) throw InvalidArgument("community " + c.community + " has no tokens");
    n = std::min(n, total);
  }
  std::vector<std::string> out;
  out.reserve(n * corpora.size());
  for (const auto& c : corpora) {
    std::size_t taken = 0;
    for (const auto& s : c.sequences) {
      for (const auto& w : s) {
        if (taken == n) break;
        out.push_back(w);
        ++taken;
      }
      if (taken == n) break;
    }
  }
  return out;
}

// General top words from the balanced table plus, per community, the next
// most frequent words outside the general set.
inline Vocabulary build_hybrid_vocab(const FrequencyTable& balanced, const std::vector<FrequencyTable>& per_community,
                                     std::size_t n_general, std::size_t n_per_community, const TagSet& tags) {
  std::set<std::string> words;
  const auto general = top_words(balanced, n_general);
  const std::set<std::string> general_set(general.begin(), general.end());
  words.insert(general.begin(), general.end());
  for (const auto& table : per_community) {
    std::size_t taken = 0;
    for (const auto& w : table.ranked()) {
      if (taken == n_per_community) break;
      if (general_set.count(w)) continue;
      words.insert(w);
      ++taken;
    }
  }
  return Vocabulary::hybrid({words.begin(), words.end()}, tags);
}

inline Vocabulary build_hyb15k_vocab(const FrequencyTable& global, const TagSet& tags, std::size_t top_k = 15000) {
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  return Vocabulary::hybrid(top_words(global, top_k), tags);
}

inline Vocabulary build_tag_only_vocab(const TagSet& tags) { return Vocabulary::tag_only(tags); }

using SymbolSeq = std::vector<Symbol>;

inline SymbolSeq apply_vocab(const Vocabulary& vocab, const TokenSeq& tokens) {
  SymbolSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vocab.map(t));
  return out;
}

inline std::vector<std::string> symbol_names(const Vocabulary& vocab, const SymbolSeq& seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (auto s : seq) out.push_back(vocab.name(s));
  return out;
}

}  // namespace commlang
