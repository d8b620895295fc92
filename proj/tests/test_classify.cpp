#include <gtest/gtest.h>

#include "commlang/classify.hpp"
#include "support/experiments.hpp"

using namespace commlang;

namespace {

using Words = std::vector<std::string>;

Annotator plain_annotator() {
  return [](std::string_view text) {
    TokenSeq out;
    for (auto& w : tokenize(text)) out.push_back({w, 11});
    return out;
  };
}

CommentRecord comment(const std::string& id, const std::string& author, long long utc, const std::string& body) {
  CommentRecord c;
  c.id = id;
  c.author = author;
  c.created_utc = utc;
  c.body = body;
  return c;
}

ScoreTable table(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  ScoreTable t;
  t.model_id = "m";
  t.communities = cols;
  for (std::size_t i = 0; i < rows.size(); ++i) t.add_row("d" + std::to_string(i), cols[i % cols.size()], rows[i]);
  return t;
}

}  // namespace

TEST(ThreadDoc, PostFirstThenComments) {
  ThreadRecord t;
  t.post.id = "p";
  t.post.title = "Title here";
  t.post.body = "and a body";
  t.comments = {comment("a", "x", 1, "first"), comment("b", "y", 2, "second one")};
  auto d = assemble_thread_doc(t, "sci", plain_annotator());
  ASSERT_EQ(d.content.size(), 3u);
  EXPECT_EQ(d.content[0].size(), 5u);
  EXPECT_EQ(d.content[1][0].surface, "first");
  EXPECT_EQ(d.content[2][1].surface, "one");
  EXPECT_EQ(d.true_community, "sci");
  EXPECT_EQ(d.level, DocLevel::thread);
}

TEST(ThreadDoc, HundredCommentsGiveHundredAndOneSequences) {
  ThreadRecord t;
  t.post.id = "p";
  t.post.title = "T";
  for (int i = 0; i < 100; ++i) t.comments.push_back(comment("c" + std::to_string(i), "u", i, "hi"));
  EXPECT_EQ(assemble_thread_doc(t, "x", plain_annotator()).content.size(), 101u);
  EXPECT_THROW(assemble_thread_doc(ThreadRecord{}, "x", plain_annotator()), InvalidArgument);
}

TEST(UserDocs, PerCommunityThresholdAndDeletedAuthors) {
  ThreadRecord t;
  t.post.id = "p";
  t.post.title = "T";
  t.comments = {comment("1", "ann", 5, "later"), comment("2", "ann", 1, "early"), comment("3", "[deleted]", 2, "x"),
                comment("4", "bob", 3, "b1"),    comment("5", "bob", 4, "b2"),    comment("6", "bob", 6, "b3")};
  auto docs = assemble_user_docs("sci", {t}, plain_annotator());
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, user_doc_id("sci", "ann"));
  EXPECT_EQ(docs[0].content[0][0].surface, "early");
  EXPECT_EQ(assemble_user_docs("sci", {t}, plain_annotator(), 3).size(), 1u);
  EXPECT_TRUE(assemble_user_docs("sci", {t}, plain_annotator(), 5).empty());
  auto other = assemble_user_docs("games", {t}, plain_annotator());
  EXPECT_NE(other[0].doc_id, docs[0].doc_id);
}

TEST(Classify, ArgmaxAndAlphabeticalTies) {
  auto c = classify(table({"a", "b", "c"}, {{-10, -5, -20}, {-1, -1, -3}, {-4, -2, -2}}));
  EXPECT_EQ(c.predicted, (Words{"b", "a", "b"}));
  EXPECT_EQ(c.ties, 2u);
  ScoreTable rev = table({"c", "b", "a"}, {{-1, -2, -1}});
  EXPECT_EQ(classify(rev).predicted[0], "a");
}

TEST(Classify, RowShiftInvariance) {
  Rng rng(4);
  const Words cols = {"a", "b", "c", "d"};
  std::vector<std::vector<double>> rows, shifted;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> r;
    for (int j = 0; j < 4; ++j) r.push_back(std::round(rng.normal() * 4) / 2);
    rows.push_back(r);
    const double c = std::ldexp(std::round(rng.normal() * 64), -2);
    for (double& x : r) x += c;
    shifted.push_back(r);
  }
  EXPECT_EQ(classify(table(cols, rows)).predicted, classify(table(cols, shifted)).predicted);
}

TEST(Evaluate, AllCorrectIsDiagonal) {
  auto t = table({"a", "b"}, {{0, -1}, {-1, 0}, {0, -1}});
  auto r = evaluate(t, classify(t), {"a", "b"});
  EXPECT_EQ(r.average_accuracy, 1.0);
  EXPECT_EQ(r.confusion, (std::vector<std::vector<std::size_t>>{{2, 0}, {0, 1}}));
}

TEST(Evaluate, ConfusionRowsSumToTotals) {
  Rng rng(6);
  const Words cols = {"a", "b", "c"};
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 90; ++i) rows.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  auto t = table(cols, rows);
  auto r = evaluate(t, classify(t), cols);
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t s = 0;
    for (auto x : r.confusion[i]) s += x;
    EXPECT_EQ(s, r.totals[i]);
    EXPECT_GE(r.accuracy[i], 0.0);
    EXPECT_LE(r.accuracy[i], 1.0);
  }
  EXPECT_EQ(r.samples(), 90u);
}

TEST(Evaluate, MissingPredictionIsFatal) {
  EXPECT_THROW(evaluate(std::map<std::string, std::string>{}, std::map<std::string, std::string>{{"d", "a"}}, {"a"}), InvalidArgument);
}

TEST(Evaluate, UniformRandomPredictorNearOneNinth) {
  const auto labels = synth::community_names(9);
  Rng rng(10);
  std::map<std::string, std::string> truth, pred;
  for (int i = 0; i < 9000; ++i) {
    const auto id = std::to_string(i);
    truth[id] = labels[static_cast<std::size_t>(i) % 9];
    pred[id] = labels[rng.below(9)];
  }
  EXPECT_NEAR(evaluate(pred, truth, labels).average_accuracy, 1.0 / 9.0, 0.01);
}

TEST(ScoreTableCsv, RoundTrip) {
  auto t = table({"a", "b"}, {{-1.25, -3.0 / 7.0}, {-1e-300, -12345.678901234}});
  auto back = ScoreTable::from_csv(t.to_csv("hdr"), "m");
  EXPECT_EQ(back.scores, t.scores);
  EXPECT_EQ(back.doc_ids, t.doc_ids);
  EXPECT_EQ(back.communities, t.communities);
}

TEST(StyleScoring, CompleteTableAndSourcePreference) {
  auto split = synth::hold_out(synth::trigram_communities(2, 20, 15, 31), 0.25);
  auto r = synth::hybrid_style_run(split, 10, 5);
  EXPECT_EQ(r.table.rows(), 10u);
  EXPECT_EQ(r.table.communities.size(), 2u);
  for (const auto& row : r.table.scores) {
    ASSERT_EQ(row.size(), 2u);
    for (double x : row) EXPECT_TRUE(std::isfinite(x));
  }
  EXPECT_EQ(r.report.average_accuracy, 1.0);
}

TEST(StyleScoring, TotalAndPerTokenAgreeWithinRows) {
  auto split = synth::hold_out(synth::trigram_communities(3, 12, 8, 5), 0.5);
  const TagSet tags;
  StyleModelSet set;
  set.model_id = "tag_only";
  set.vocab = build_tag_only_vocab(tags);
  for (const auto& c : split) {
    NgramCounts counts(set.vocab.size());
    for (const auto& th : c.train)
      for (const auto& s : th) counts.add_sequence(apply_vocab(set.vocab, s));
    set.communities.push_back(c.name);
    set.models.push_back(estimate_wb(counts));
  }
  auto tables = score_all_style(synth::test_documents(split), set);
  EXPECT_EQ(classify(tables.total).predicted, classify(tables.per_token).predicted);
  EXPECT_EQ(tables.total.rows(), tables.per_token.rows());
}

TEST(StyleScoring, UnprocessableDocumentsBecomeErrorRows) {
  const TagSet tags;
  StyleModelSet set{"hyb", Vocabulary::hybrid({"a"}, tags), {"x"}, {}};
  NgramCounts counts(set.vocab.size());
  counts.add_sequence({0});
  set.models.push_back(estimate_wb(counts));
  std::vector<Document> docs = {{"ok", DocLevel::thread, "x", {{{"a", 11}}}},
                                {"bad", DocLevel::thread, "x", {{{"zz", kUntagged}}}}};
  auto t = score_all_style(docs, set).total;
  EXPECT_EQ(t.rows(), 1u);
  ASSERT_EQ(t.errors.size(), 1u);
  EXPECT_EQ(t.errors[0].first, "bad");
}

TEST(TopicScoring, ColumnsPermuteWithProfiles) {
  auto split = synth::hold_out(synth::style_topic_communities(12, 6, 3), 0.25);
  StopwordList stop;
  auto r = synth::topic_run(split, stop, 4, 3, 10, 8);
  ASSERT_EQ(r.table.communities.size(), 2u);
  // Re-score with the profile order reversed.
  std::vector<std::vector<std::string>> corpus;
  for (const auto& c : split)
    for (const auto& th : c.train)
      for (auto& s : synth::surfaces(th)) corpus.push_back(s);
  auto tfidf = build_tfidf(corpus, stop);
  LdaOptions opt;
  opt.num_topics = 4;
  opt.iterations = 10;
  opt.seed = 8;
  auto lda = train_lda(tfidf.docs, tfidf.model, opt);
  std::vector<CommunityTopicProfile> profiles;
  for (const auto& c : split) {
    std::vector<TopicVector> vecs;
    for (const auto& th : c.train) {
      std::vector<std::string> all;
      for (auto& s : synth::surfaces(th)) all.insert(all.end(), s.begin(), s.end());
      vecs.push_back(lda.model.infer_tokens(all));
    }
    profiles.push_back(build_profile(c.name, vecs, 3, 9));
  }
  auto docs = synth::test_documents(split);
  auto fwd = score_all_topic(docs, "t", lda.model, profiles);
  std::reverse(profiles.begin(), profiles.end());
  auto rev = score_all_topic(docs, "t", lda.model, profiles);
  EXPECT_EQ(fwd.scores, r.table.scores);
  for (std::size_t i = 0; i < fwd.rows(); ++i) {
    EXPECT_EQ(fwd.scores[i][0], rev.scores[i][1]);
    EXPECT_EQ(fwd.scores[i][1], rev.scores[i][0]);
  }
}
