#pragma once

// Forum dump ingestion: JSON-lines parsing, thread reconstruction, the
// comment-count and karma filters, seeded train/test splits and the pooled
// distractor community.

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "commlang/common.hpp"

namespace commlang {

struct CommentRecord {
  std::string id;
  std::string parent_id;
  std::string link_id;  // id of the post that roots the thread (no "t3_" prefix)
  std::string community;
  std::string author;
  std::string body;
  long long karma = 0;
  long long created_utc = 0;

  bool operator==(const CommentRecord&) const = default;
};

struct PostRecord {
  std::string id;
  std::string community;
  std::string author;
  std::string title;
  std::string body;
  long long karma = 0;
  long long created_utc = 0;

  bool operator==(const PostRecord&) const = default;
};

struct ThreadRecord {
  PostRecord post;
  std::vector<CommentRecord> comments;  // (created_utc, id) ascending

  const std::string& id() const { return post.id; }
  bool operator==(const ThreadRecord&) const = default;
};

struct CommunityCorpus {
  std::string community;
  std::vector<ThreadRecord> train_threads;
  std::vector<ThreadRecord> test_threads;
};

enum class RecordKind { comment, post };

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::size_t lines = 0;      // non-blank lines seen
  std::size_t malformed = 0;  // lines that failed to parse or lacked fields
  std::size_t deleted = 0;    // "[deleted]" / "[removed]" bodies dropped
};

namespace detail {

inline std::string json_string(const nlohmann::json& obj, const char* key, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw FormatError(std::string("missing field ") + key);
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw FormatError(std::string("field ") + key + " is not a string");
}

// Archives store integers either as numbers or as numeric strings.
inline long long json_integer(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw FormatError(std::string("missing field ") + key);
  if (it->is_number_integer()) return it->get<long long>();
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw FormatError(std::string("non-finite ") + key);
    return static_cast<long long>(std::floor(v));
  }
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw FormatError(std::string("bad integer in ") + key);
    }
    if (used != s.size() && s.find_first_not_of("0123456789.", used) != std::string::npos)
      throw FormatError(std::string("bad integer in ") + key);
    return v;
  }
  throw FormatError(std::string("field ") + key + " is not an integer");
}

inline std::string strip_type_prefix(std::string id) {
  if (id.size() > 3 && id[0] == 't' && id[2] == '_' && id[1] >= '1' && id[1] <= '6') id.erase(0, 3);
  return id;
}

inline bool is_deleted_body(const std::string& body) {
  return body == "[deleted]" || body == "[removed]";
}

inline bool comment_before(const CommentRecord& a, const CommentRecord& b) {
  if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
  return a.id < b.id;
}

template <typename Record>
Record decode_record(const nlohmann::json& obj);

template <>
inline CommentRecord decode_record<CommentRecord>(const nlohmann::json& obj) {
  CommentRecord c;
  c.id = json_string(obj, "id", true);
  if (c.id.empty()) throw FormatError("empty id");
  c.parent_id = strip_type_prefix(json_string(obj, "parent_id", true));
  c.link_id = strip_type_prefix(json_string(obj, "link_id", true));
  c.community = json_string(obj, "subreddit", true);
  c.author = json_string(obj, "author", false);
  c.body = json_string(obj, "body", true);
  c.karma = json_integer(obj, "score");
  c.created_utc = json_integer(obj, "created_utc");
  return c;
}

template <>
inline PostRecord decode_record<PostRecord>(const nlohmann::json& obj) {
  PostRecord p;
  p.id = strip_type_prefix(json_string(obj, "id", true));
  if (p.id.empty()) throw FormatError("empty id");
  p.community = json_string(obj, "subreddit", true);
  p.author = json_string(obj, "author", false);
  p.title = json_string(obj, "title", true);
  if (p.title.empty()) throw FormatError("empty title");
  p.body = json_string(obj, "selftext", false);
  if (p.body.empty()) p.body = json_string(obj, "body", false);
  p.karma = json_integer(obj, "score");
  p.created_utc = json_integer(obj, "created_utc");
  return p;
}

}  // namespace detail

// Parses newline-delimited JSON records. Malformed lines are skipped and
// counted; more than half malformed means the file is not of this kind.
template <typename Record>
ParseResult<Record> parse_dump(std::istream& in) {
  if (!in) throw IoError("unreadable dump stream");
  ParseResult<Record> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++out.lines;
    try {
      auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw FormatError("not an object");
      Record rec = detail::decode_record<Record>(obj);
      bool deleted = false;
      if constexpr (std::is_same_v<Record, CommentRecord>) deleted = detail::is_deleted_body(rec.body);
      else deleted = detail::is_deleted_body(rec.title) || detail::is_deleted_body(rec.body);
      if (deleted) {
        ++out.deleted;
        continue;
      }
      out.records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception&) {
      ++out.malformed;
    } catch (const FormatError&) {
      ++out.malformed;
    }
  }
  if (in.bad()) throw IoError("read error in dump stream");
  if (out.lines > 0 && 2 * out.malformed > out.lines)
    throw FormatError("more than half of " + std::to_string(out.lines) +
                      " lines are malformed; wrong record kind?");
  return out;
}

inline ParseResult<CommentRecord> parse_comments(std::istream& in) { return parse_dump<CommentRecord>(in); }
inline ParseResult<PostRecord> parse_posts(std::istream& in) { return parse_dump<PostRecord>(in); }

// Reads a file, transparently inflating gzip input (".gz").
inline std::string read_dump_file(const std::string& path) {
  if (path.size() < 3 || path.compare(path.size() - 3, 3, ".gz") != 0) return read_file(path);
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw IoError("gzip read failed: " + path);
  return out;
}

struct AssembleResult {
  std::vector<ThreadRecord> threads;  // ordered by post id
  std::size_t orphans = 0;
};

// Groups comments under their post by link_id. Comments without a post are
// counted as orphans and dropped.
inline AssembleResult assemble_threads(std::vector<PostRecord> posts, std::vector<CommentRecord> comments) {
  AssembleResult out;
  std::sort(posts.begin(), posts.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::unordered_map<std::string, std::size_t> index;
  out.threads.reserve(posts.size());
  for (auto& p : posts) {
    if (index.count(p.id)) throw ConsistencyError("duplicate post id " + p.id);
    index.emplace(p.id, out.threads.size());
    out.threads.push_back(ThreadRecord{std::move(p), {}});
  }
  for (auto& c : comments) {
    auto it = index.find(c.link_id);
    if (it == index.end()) {
      ++out.orphans;
      continue;
    }
    out.threads[it->second].comments.push_back(std::move(c));
  }
  for (auto& t : out.threads) std::sort(t.comments.begin(), t.comments.end(), detail::comment_before);
  return out;
}

// Drops threads below the comment threshold, then (training only) drops
// comments with non-positive karma from the survivors.
inline std::vector<ThreadRecord> filter_corpus(std::vector<ThreadRecord> threads, std::size_t min_thread_comments,
                                               bool drop_nonpositive_karma) {
  std::vector<ThreadRecord> kept;
  kept.reserve(threads.size());
  for (auto& t : threads) {
    if (t.comments.size() < min_thread_comments) continue;
    if (drop_nonpositive_karma)
      std::erase_if(t.comments, [](const CommentRecord& c) { return c.karma <= 0; });
    kept.push_back(std::move(t));
  }
  return kept;
}

struct Split {
  std::vector<ThreadRecord> train;
  std::vector<ThreadRecord> test;
};

// Threads are put in id order, permuted with the seed, and the last
// ceil(n * test_fraction) go to test.
inline Split split_train_test(std::vector<ThreadRecord> threads, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("test_fraction must be in (0, 1)");
  Split out;
  if (threads.empty()) return out;
  std::sort(threads.begin(), threads.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
  Rng rng(seed);
  rng.shuffle(threads);
  const std::size_t n = threads.size();
  // Guard against n * f landing a hair above an integer in floating point.
  const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction - 1e-9));
  const std::size_t n_train = n - std::min(n, n_test);
  out.train.assign(std::make_move_iterator(threads.begin()),
                   std::make_move_iterator(threads.begin() + static_cast<std::ptrdiff_t>(n_train)));
  out.test.assign(std::make_move_iterator(threads.begin() + static_cast<std::ptrdiff_t>(n_train)),
                  std::make_move_iterator(threads.end()));
  return out;
}

// Pools every input corpus under one label. Each thread keeps its source
// community in post.community.
inline CommunityCorpus build_merged_distractor(const std::vector<CommunityCorpus>& corpora,
                                               const std::string& name = "merged_others") {
  if (corpora.empty()) throw InvalidArgument("distractor needs at least one source corpus");
  CommunityCorpus out;
  out.community = name;
  std::set<std::string> seen;
  auto take = [&](const std::vector<ThreadRecord>& src, std::vector<ThreadRecord>& dst) {
    for (const auto& t : src) {
      if (!seen.insert(t.id()).second) throw ConsistencyError("duplicate thread id across sources: " + t.id());
      dst.push_back(t);
    }
  };
  for (const auto& c : corpora) {
    take(c.train_threads, out.train_threads);
    take(c.test_threads, out.test_threads);
  }
  return out;
}

// ---------------------------------------------------------------------------
// On-disk thread files: one JSON object per thread per line.

inline nlohmann::json to_json(const PostRecord& p) {
  return {{"id", p.id},       {"subreddit", p.community}, {"author", p.author},          {"title", p.title},
          {"body", p.body},   {"score", p.karma},         {"created_utc", p.created_utc}};
}

inline nlohmann::json to_json(const CommentRecord& c) {
  return {{"id", c.id},         {"parent_id", c.parent_id}, {"link_id", c.link_id},
          {"subreddit", c.community}, {"author", c.author}, {"body", c.body},
          {"score", c.karma},   {"created_utc", c.created_utc}};
}

inline nlohmann::json to_json(const ThreadRecord& t) {
  nlohmann::json comments = nlohmann::json::array();
  for (const auto& c : t.comments) comments.push_back(to_json(c));
  return {{"post", to_json(t.post)}, {"comments", std::move(comments)}};
}

inline ThreadRecord thread_from_json(const nlohmann::json& j) {
  ThreadRecord t;
  t.post = detail::decode_record<PostRecord>(j.at("post"));
  for (const auto& c : j.at("comments")) t.comments.push_back(detail::decode_record<CommentRecord>(c));
  return t;
}

inline std::string serialize_threads(const std::vector<ThreadRecord>& threads) {
  std::string out;
  for (const auto& t : threads) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<ThreadRecord> deserialize_threads(const std::string& text) {
  std::vector<ThreadRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(thread_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw FormatError("thread file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace commlang
