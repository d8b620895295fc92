#pragma once

// Community classification: thread- and user-level documents, score tables
// against every community model, argmax decisions and accuracy/confusion
// evaluation.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "commlang/common.hpp"
#include "commlang/ingest.hpp"
#include "commlang/stylelm.hpp"
#include "commlang/text.hpp"
#include "commlang/topiclm.hpp"
#include "commlang/vocab.hpp"

namespace commlang {

enum class DocLevel { thread, user };

inline const char* to_string(DocLevel l) { return l == DocLevel::thread ? "thread" : "user"; }

struct Document {
  std::string doc_id;
  DocLevel level = DocLevel::thread;
  std::string true_community;
  std::vector<TokenSeq> content;  // thread documents start with the post
};

// Turns raw text into tagged tokens.
using Annotator = std::function<TokenSeq(std::string_view)>;

inline std::string post_text(const PostRecord& p) { return p.body.empty() ? p.title : p.title + "\n" + p.body; }

// Post (title + body) first, then every comment in thread order.
inline Document assemble_thread_doc(const ThreadRecord& thread, const std::string& label, const Annotator& annotate) {
  if (thread.post.title.empty() && thread.post.body.empty() && thread.comments.empty())
    throw InvalidArgument("thread " + thread.id() + " is empty");
  Document d;
  d.doc_id = thread.id();
  d.level = DocLevel::thread;
  d.true_community = label;
  d.content.reserve(thread.comments.size() + 1);
  d.content.push_back(annotate(post_text(thread.post)));
  for (const auto& c : thread.comments) d.content.push_back(annotate(c.body));
  return d;
}

inline std::string user_doc_id(const std::string& community, const std::string& author) {
  return "u:" + community + ":" + author;
}

// One document per author with at least min_user_comments comments in the
// given threads; "[deleted]" and empty authors are skipped. Documents are
// ordered by author, comments chronologically.
inline std::vector<Document> assemble_user_docs(const std::string& community, const std::vector<ThreadRecord>& threads,
                                                const Annotator& annotate, std::size_t min_user_comments = 1) {
  std::map<std::string, std::vector<const CommentRecord*>> by_author;
  for (const auto& t : threads)
    for (const auto& c : t.comments)
      if (!c.author.empty() && c.author != "[deleted]") by_author[c.author].push_back(&c);
  std::vector<Document> out;
  for (auto& [author, comments] : by_author) {
    if (comments.size() < std::max<std::size_t>(1, min_user_comments)) continue;
    std::sort(comments.begin(), comments.end(),
              [](const CommentRecord* a, const CommentRecord* b) { return detail::comment_before(*a, *b); });
    Document d;
    d.doc_id = user_doc_id(community, author);
    d.level = DocLevel::user;
    d.true_community = community;
    for (const auto* c : comments) d.content.push_back(annotate(c->body));
    out.push_back(std::move(d));
  }
  return out;
}

struct ScoreTable {
  std::string model_id;
  std::vector<std::string> communities;  // columns
  std::vector<std::string> doc_ids;
  std::vector<std::string> truths;
  std::vector<std::vector<double>> scores;  // rows x columns
  std::vector<std::pair<std::string, std::string>> errors;  // doc id, reason

  std::size_t rows() const { return doc_ids.size(); }

  std::size_t column(const std::string& community) const {
    auto it = std::find(communities.begin(), communities.end(), community);
    if (it == communities.end()) throw InvalidArgument("score table has no column " + community);
    return static_cast<std::size_t>(it - communities.begin());
  }

  void add_row(std::string id, std::string truth, std::vector<double> row) {
    if (row.size() != communities.size()) throw InvalidArgument("score row width mismatch");
    doc_ids.push_back(std::move(id));
    truths.push_back(std::move(truth));
    scores.push_back(std::move(row));
  }

  std::string to_csv(const std::string& header_comment = {}) const {
    std::string out;
    if (!header_comment.empty()) out += "# " + header_comment + "\n";
    out += "doc_id,true_community";
    for (const auto& c : communities) out += "," + csv_field(c);
    out += "\n";
    for (std::size_t i = 0; i < rows(); ++i) {
      out += csv_field(doc_ids[i]) + "," + csv_field(truths[i]);
      for (double v : scores[i]) out += "," + format_double(v);
      out += "\n";
    }
    return out;
  }

  static ScoreTable from_csv(const std::string& text, std::string model_id = {}) {
    ScoreTable t;
    t.model_id = std::move(model_id);
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.empty() || line.starts_with("#")) continue;
      auto f = csv_split(line);
      if (header) {
        if (f.size() < 3 || f[0] != "doc_id" || f[1] != "true_community") throw FormatError("bad score table header");
        t.communities.assign(f.begin() + 2, f.end());
        header = false;
        continue;
      }
      if (f.size() != t.communities.size() + 2) throw FormatError("score table row width mismatch");
      std::vector<double> row;
      for (std::size_t j = 2; j < f.size(); ++j) row.push_back(std::stod(f[j]));
      t.add_row(f[0], f[1], std::move(row));
    }
    if (header) throw FormatError("empty score table");
    return t;
  }
};

struct StyleModelSet {
  std::string model_id;
  Vocabulary vocab;
  std::vector<std::string> communities;
  std::vector<TrigramModel> models;  // parallel to communities
};

struct StyleScoreTables {
  ScoreTable total;      // total log-probability (classification)
  ScoreTable per_token;  // log-probability per token (correlation)
};

inline StyleScoreTables score_all_style(const std::vector<Document>& docs, const StyleModelSet& set) {
  if (set.models.size() != set.communities.size() || set.models.empty())
    throw InvalidArgument("style model set needs one model per community");
  StyleScoreTables out;
  for (auto* t : {&out.total, &out.per_token}) {
    t->model_id = set.model_id;
    t->communities = set.communities;
  }
  const std::size_t C = set.communities.size();
  std::vector<std::vector<StyleScore>> cells(docs.size());
  std::vector<std::string> failure(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) {
    try {
      std::vector<SymbolSeq> symbols;
      symbols.reserve(docs[i].content.size());
      if (docs[i].content.empty()) throw InvalidArgument("empty document");
      for (const auto& seq : docs[i].content) symbols.push_back(apply_vocab(set.vocab, seq));
      cells[i].resize(C);
      for (std::size_t j = 0; j < C; ++j)
        for (const auto& s : symbols) cells[i][j] += set.models[j].score(s);
    } catch (const Error& e) {
      failure[i] = e.what();
      if (failure[i].empty()) failure[i] = "error";
    }
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!failure[i].empty()) {
      out.total.errors.emplace_back(docs[i].doc_id, failure[i]);
      out.per_token.errors.emplace_back(docs[i].doc_id, failure[i]);
      continue;
    }
    std::vector<double> tot(C), per(C);
    for (std::size_t j = 0; j < C; ++j) {
      tot[j] = cells[i][j].total_logprob;
      per[j] = cells[i][j].per_token();
    }
    out.total.add_row(docs[i].doc_id, docs[i].true_community, std::move(tot));
    out.per_token.add_row(docs[i].doc_id, docs[i].true_community, std::move(per));
  }
  return out;
}

// Surfaces of every sequence in the document, in order.
inline std::vector<std::string> document_surfaces(const Document& d) {
  std::vector<std::string> out;
  for (const auto& seq : d.content)
    for (const auto& t : seq) out.push_back(t.surface);
  return out;
}

// Infers one topic vector per document, then scores it against every
// community profile.
inline ScoreTable score_all_topic(const std::vector<Document>& docs, const std::string& model_id,
                                  const TopicModel& model, const std::vector<CommunityTopicProfile>& profiles) {
  if (profiles.empty()) throw InvalidArgument("no topic profiles");
  ScoreTable t;
  t.model_id = model_id;
  for (const auto& p : profiles) t.communities.push_back(p.community);
  std::vector<std::vector<double>> rows(docs.size());
  std::vector<std::string> failure(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) {
    try {
      auto v = model.infer_tokens(document_surfaces(docs[i]));
      rows[i].reserve(profiles.size());
      for (const auto& p : profiles) rows[i].push_back(topic_score(p, v.theta));
    } catch (const Error& e) {
      failure[i] = e.what();
      if (failure[i].empty()) failure[i] = "error";
    }
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!failure[i].empty()) {
      t.errors.emplace_back(docs[i].doc_id, failure[i]);
      continue;
    }
    t.add_row(docs[i].doc_id, docs[i].true_community, std::move(rows[i]));
  }
  return t;
}

struct Classification {
  std::vector<std::string> doc_ids;
  std::vector<std::string> predicted;
  std::size_t ties = 0;  // rows where more than one column reached the max

  std::map<std::string, std::string> as_map() const {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < doc_ids.size(); ++i) m.emplace(doc_ids[i], predicted[i]);
    return m;
  }
};

// Row-wise argmax; exact ties go to the alphabetically first community.
inline Classification classify(const ScoreTable& table) {
  Classification out;
  out.doc_ids = table.doc_ids;
  out.predicted.reserve(table.rows());
  for (const auto& row : table.scores) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j)
      if (row[j] > row[best] || (row[j] == row[best] && table.communities[j] < table.communities[best])) best = j;
    if (std::count(row.begin(), row.end(), row[best]) > 1) ++out.ties;
    out.predicted.push_back(table.communities[best]);
  }
  return out;
}

struct EvalReport {
  std::vector<std::string> labels;
  std::vector<std::size_t> totals;       // samples per true label
  std::vector<std::size_t> correct;
  std::vector<double> accuracy;          // NaN when a label has no samples
  double average_accuracy = 0.0;         // unweighted mean over labels with samples
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]

  std::size_t samples() const {
    std::size_t n = 0;
    for (auto t : totals) n += t;
    return n;
  }

  std::string accuracy_csv(const std::string& header_comment = {}) const {
    std::string out;
    if (!header_comment.empty()) out += "# " + header_comment + "\n";
    out += "community,n,correct,accuracy\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
      out += csv_field(labels[i]) + "," + std::to_string(totals[i]) + "," + std::to_string(correct[i]) + "," +
             format_fixed(accuracy[i], 6) + "\n";
    out += "average," + std::to_string(samples()) + ",," + format_fixed(average_accuracy, 6) + "\n";
    return out;
  }

  std::string confusion_csv(const std::string& header_comment = {}) const {
    std::string out;
    if (!header_comment.empty()) out += "# " + header_comment + "\n";
    out += "true\\predicted";
    for (const auto& l : labels) out += "," + csv_field(l);
    out += "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out += csv_field(labels[i]);
      for (auto c : confusion[i]) out += "," + std::to_string(c);
      out += "\n";
    }
    return out;
  }
};

// labels fixes the class set and the matrix order; predictions must cover
// every id in truths.
inline EvalReport evaluate(const std::map<std::string, std::string>& predictions,
                           const std::map<std::string, std::string>& truths, std::vector<std::string> labels) {
  EvalReport r;
  r.labels = std::move(labels);
  const std::size_t L = r.labels.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < L; ++i) index.emplace(r.labels[i], i);
  r.totals.assign(L, 0);
  r.correct.assign(L, 0);
  r.confusion.assign(L, std::vector<std::size_t>(L, 0));
  for (const auto& [id, truth] : truths) {
    auto p = predictions.find(id);
    if (p == predictions.end()) throw InvalidArgument("missing prediction for " + id);
    auto ti = index.find(truth);
    auto pi = index.find(p->second);
    if (ti == index.end()) throw InvalidArgument("unknown true label " + truth);
    if (pi == index.end()) throw InvalidArgument("unknown predicted label " + p->second);
    ++r.totals[ti->second];
    ++r.confusion[ti->second][pi->second];
    if (ti->second == pi->second) ++r.correct[ti->second];
  }
  double sum = 0.0;
  std::size_t used = 0;
  r.accuracy.assign(L, std::nan(""));
  for (std::size_t i = 0; i < L; ++i) {
    if (r.totals[i] == 0) continue;
    r.accuracy[i] = static_cast<double>(r.correct[i]) / static_cast<double>(r.totals[i]);
    sum += r.accuracy[i];
    ++used;
  }
  r.average_accuracy = used == 0 ? 0.0 : sum / static_cast<double>(used);
  return r;
}

inline EvalReport evaluate(const ScoreTable& table, const Classification& c, std::vector<std::string> labels) {
  std::map<std::string, std::string> truths;
  for (std::size_t i = 0; i < table.rows(); ++i) truths.emplace(table.doc_ids[i], table.truths[i]);
  return evaluate(c.as_map(), truths, std::move(labels));
}

}  // namespace commlang
