#pragma once

// End-to-end pipeline over an on-disk workspace. Each stage reads only the
// artifacts of the stages it depends on, writes its own files, and finally
// writes a stamp carrying the config hash.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "commlang/classify.hpp"
#include "commlang/common.hpp"
#include "commlang/config.hpp"
#include "commlang/feedback.hpp"
#include "commlang/ingest.hpp"
#include "commlang/stylelm.hpp"
#include "commlang/text.hpp"
#include "commlang/topiclm.hpp"
#include "commlang/vocab.hpp"

namespace commlang {

// Upstream artifact missing or produced under a different config.
struct StageError : Error {
  StageError(std::string stage_name, const std::string& msg) : Error(msg), stage(std::move(stage_name)) {}
  std::string stage;
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"ingest",      "split",   "train-tagger", "build-vocab",
                                                 "train-style", "train-topic", "profile",  "classify",
                                                 "correlate",   "report"};
  return names;
}

// Stages whose artifacts a stage reads.
inline const std::vector<std::string>& stage_inputs(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> deps = {
      {"ingest", {}},
      {"split", {"ingest"}},
      {"train-tagger", {}},
      {"build-vocab", {"split", "train-tagger"}},
      {"train-style", {"split", "train-tagger", "build-vocab"}},
      {"train-topic", {"split"}},
      {"profile", {"split", "train-topic"}},
      {"classify", {"split", "train-tagger", "build-vocab", "train-style", "train-topic", "profile"}},
      {"correlate", {"ingest", "split", "classify"}},
      {"report", {"train-tagger", "train-topic", "classify", "correlate"}},
  };
  auto it = deps.find(stage);
  if (it == deps.end()) throw InvalidArgument("unknown stage " + stage);
  return it->second;
}

struct StyleModelSpec {
  std::string id;
  Smoothing smoothing;
};

inline const std::vector<StyleModelSpec>& style_models() {
  static const std::vector<StyleModelSpec> m = {{"word_only", Smoothing::modified_kn},
                                                {"hyb-15k", Smoothing::witten_bell},
                                                {"hyb-500.30", Smoothing::witten_bell},
                                                {"tag_only", Smoothing::witten_bell}};
  return m;
}

inline std::string topic_model_id(std::size_t k) { return "topic-" + std::to_string(k); }

class Workspace {
 public:
  Workspace(std::filesystem::path root, std::string config_hash)
      : root_(std::move(root)), hash_(std::move(config_hash)) {}

  const std::filesystem::path& root() const { return root_; }
  const std::string& hash() const { return hash_; }

  std::filesystem::path path(const std::string& rel) const { return root_ / rel; }

  std::string read(const std::string& rel) const { return read_file(path(rel).string()); }

  void write(const std::string& rel, std::string_view content) const {
    auto p = path(rel);
    std::filesystem::create_directories(p.parent_path());
    write_file(p.string(), content);
  }

  std::string csv_header(const std::string& stage) const { return "commlang " + stage + " config_hash=" + hash_; }

  void require(const std::string& stage) const {
    const auto p = stamp_path(stage);
    if (!std::filesystem::exists(p))
      throw StageError(stage, "missing upstream stage '" + stage + "': run it first");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(p.string()));
    } catch (const nlohmann::json::exception&) {
      throw StageError(stage, "stamp of stage '" + stage + "' is unreadable: rerun it");
    }
    if (j.value("config_hash", "") != hash_)
      throw StageError(stage, "stage '" + stage + "' was produced with config " + j.value("config_hash", "?") +
                                  ", current config is " + hash_ + ": rerun it");
  }

  void begin(const std::string& stage) const {
    for (const auto& dep : stage_inputs(stage)) require(dep);
    std::filesystem::remove(stamp_path(stage));
  }

  void finish(const std::string& stage, nlohmann::json manifest) const {
    manifest["stage"] = stage;
    manifest["config_hash"] = hash_;
    write("manifests/" + stage + ".json", manifest.dump(2) + "\n");
    write("stamps/" + stage + ".json", nlohmann::json{{"stage", stage}, {"config_hash", hash_}}.dump() + "\n");
  }

 private:
  std::filesystem::path stamp_path(const std::string& stage) const { return root_ / "stamps" / (stage + ".json"); }

  std::filesystem::path root_;
  std::string hash_;
};

class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::filesystem::path workspace, std::ostream& log = std::clog)
      : cfg_(std::move(config)), ws_(std::move(workspace), cfg_.hash()), log_(log) {}

  const PipelineConfig& config() const { return cfg_; }
  const Workspace& workspace() const { return ws_; }

  void run(const std::string& command) {
    if (command == "all") {
      for (const auto& s : stage_names()) run(s);
      return;
    }
    log_ << "[commlang] " << command << "\n";
    if (command == "ingest") ingest();
    else if (command == "split") split();
    else if (command == "train-tagger") train_tagger_stage();
    else if (command == "build-vocab") build_vocab();
    else if (command == "train-style") train_style();
    else if (command == "train-topic") train_topic();
    else if (command == "profile") profile();
    else if (command == "classify") classify_stage();
    else if (command == "correlate") correlate_stage();
    else if (command == "report") report();
    else throw InvalidArgument("unknown subcommand " + command);
  }

  // -------------------------------------------------------------------------
  void ingest() {
    ws_.begin("ingest");
    const auto sources = cfg_.sources();
    const std::set<std::string> wanted(sources.begin(), sources.end());

    std::vector<ParseResult<CommentRecord>> comment_parts(cfg_.comment_files.size());
    std::vector<ParseResult<PostRecord>> post_parts(cfg_.post_files.size());
    parallel_for(comment_parts.size() + post_parts.size(), [&](std::size_t i) {
      if (i < comment_parts.size()) {
        std::istringstream in(read_dump_file(cfg_.resolve(cfg_.comment_files[i]).string()));
        comment_parts[i] = parse_comments(in);
      } else {
        const auto j = i - comment_parts.size();
        std::istringstream in(read_dump_file(cfg_.resolve(cfg_.post_files[j]).string()));
        post_parts[j] = parse_posts(in);
      }
    });

    nlohmann::json manifest;
    std::map<std::string, std::vector<CommentRecord>> comments;
    std::map<std::string, std::vector<PostRecord>> posts;
    std::size_t ignored = 0;
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t i = 0; i < comment_parts.size(); ++i) {
      auto& p = comment_parts[i];
      files.push_back({{"file", cfg_.comment_files[i]},
                       {"kind", "comment"},
                       {"lines", p.lines},
                       {"records", p.records.size()},
                       {"malformed", p.malformed},
                       {"deleted", p.deleted}});
      for (auto& c : p.records) {
        if (!wanted.count(c.community)) {
          ++ignored;
          continue;
        }
        comments[c.community].push_back(std::move(c));
      }
    }
    for (std::size_t i = 0; i < post_parts.size(); ++i) {
      auto& p = post_parts[i];
      files.push_back({{"file", cfg_.post_files[i]},
                       {"kind", "post"},
                       {"lines", p.lines},
                       {"records", p.records.size()},
                       {"malformed", p.malformed},
                       {"deleted", p.deleted}});
      for (auto& r : p.records) {
        if (!wanted.count(r.community)) {
          ++ignored;
          continue;
        }
        posts[r.community].push_back(std::move(r));
      }
    }
    manifest["files"] = files;
    manifest["ignored_records"] = ignored;
    manifest["min_thread_comments"] = cfg_.min_thread_comments;

    nlohmann::json per = nlohmann::json::object();
    for (const auto& c : sources) {
      const std::size_t n_comments = comments[c].size();
      auto assembled = assemble_threads(std::move(posts[c]), std::move(comments[c]));
      const std::size_t n_threads = assembled.threads.size();
      auto kept = filter_corpus(std::move(assembled.threads), cfg_.min_thread_comments, false);
      if (kept.empty())
        throw ConsistencyError("community " + c + " has no thread with at least " +
                               std::to_string(cfg_.min_thread_comments) + " comments");
      std::size_t kept_comments = 0;
      for (const auto& t : kept) kept_comments += t.comments.size();
      per[c] = {{"comments", n_comments},
                {"orphans", assembled.orphans},
                {"threads", n_threads},
                {"threads_kept", kept.size()},
                {"comments_kept", kept_comments}};
      ws_.write("corpus/" + c + ".jsonl", serialize_threads(kept));
    }
    manifest["communities"] = per;
    ws_.finish("ingest", manifest);
  }

  // -------------------------------------------------------------------------
  void split() {
    ws_.begin("split");
    nlohmann::json per = nlohmann::json::object();
    std::vector<CommunityCorpus> members;
    auto emit = [&](const CommunityCorpus& c) {
      ws_.write("split/" + c.community + ".train.jsonl", serialize_threads(c.train_threads));
      ws_.write("split/" + c.community + ".test.jsonl", serialize_threads(c.test_threads));
      std::size_t train_comments = 0;
      for (const auto& t : c.train_threads) train_comments += t.comments.size();
      per[c.community] = {{"train_threads", c.train_threads.size()},
                          {"test_threads", c.test_threads.size()},
                          {"train_comments", train_comments}};
    };
    const std::set<std::string> member_set(cfg_.distractor_members.begin(), cfg_.distractor_members.end());
    for (const auto& c : cfg_.sources()) {
      auto threads = deserialize_threads(ws_.read("corpus/" + c + ".jsonl"));
      auto s = split_train_test(std::move(threads), cfg_.test_fraction, cfg_.seed_split);
      CommunityCorpus corpus;
      corpus.community = c;
      corpus.train_threads = filter_corpus(std::move(s.train), 0, true);
      corpus.test_threads = cfg_.test_drop_nonpositive ? filter_corpus(std::move(s.test), 0, true) : std::move(s.test);
      emit(corpus);
      if (member_set.count(c)) members.push_back(std::move(corpus));
    }
    emit(build_merged_distractor(members, cfg_.distractor));
    ws_.write("split/labels.txt", join_lines(cfg_.labels()));
    ws_.finish("split", {{"seed", cfg_.seed_split}, {"test_fraction", cfg_.test_fraction}, {"communities", per}});
  }

  // -------------------------------------------------------------------------
  void train_tagger_stage() {
    ws_.begin("train-tagger");
    const auto tags = load_tagset();
    std::istringstream in(read_file(cfg_.resolve(cfg_.tagger_corpus).string()));
    auto sentences = read_pretagged(in, tags);
    const auto n_dev = static_cast<std::size_t>(static_cast<double>(sentences.size()) * cfg_.tagger_dev_fraction);
    std::vector<TaggedSentence> dev(sentences.end() - static_cast<std::ptrdiff_t>(n_dev), sentences.end());
    sentences.resize(sentences.size() - n_dev);
    auto result = train_tagger(sentences, cfg_.tagger_iterations, cfg_.seed_tagger, tags, dev.empty() ? nullptr : &dev);
    auto j = nlohmann::json::parse(result.model.to_json());
    j["config_hash"] = ws_.hash();
    ws_.write("models/tagger.json", j.dump() + "\n");
    nlohmann::json manifest = {{"sentences", sentences.size()},
                               {"dev_sentences", dev.size()},
                               {"features", result.model.feature_count()}};
    if (result.dev_accuracy) manifest["dev_accuracy"] = *result.dev_accuracy;
    ws_.finish("train-tagger", manifest);
  }

  // -------------------------------------------------------------------------
  void build_vocab() {
    ws_.begin("build-vocab");
    const auto tagger = load_tagger();
    const auto& tags = tagger.tagset();
    std::vector<CommunityTokens> corpora;
    std::vector<FrequencyTable> tables;
    FrequencyTable global;
    global.community = "ALL";
    for (const auto& c : cfg_.sources()) {
      auto threads = load_split(c, "train");
      CommunityTokens ct;
      ct.community = c;
      for (const auto& t : threads) {
        ct.sequences.push_back(tokenize(post_text(t.post)));
        for (const auto& cm : t.comments) ct.sequences.push_back(tokenize(cm.body));
      }
      auto table = count_frequencies(ct.sequences, c);
      global.merge(table);
      tables.push_back(std::move(table));
      corpora.push_back(std::move(ct));
    }
    const auto balanced = count_frequencies(std::vector<std::vector<std::string>>{balanced_subset(corpora)}, "BALANCED");
    std::map<std::string, Vocabulary> vocabs;
    vocabs.emplace("word_only", build_word_only_vocab_by_count(global, cfg_.word_min_count, cfg_.top_k_word));
    vocabs.emplace("hyb-15k", build_hyb15k_vocab(global, tags, cfg_.hyb15k));
    vocabs.emplace("hyb-500.30", build_hybrid_vocab(balanced, tables, cfg_.n_general, cfg_.n_per_community, tags));
    vocabs.emplace("tag_only", build_tag_only_vocab(tags));
    nlohmann::json sizes = nlohmann::json::object();
    for (const auto& [id, v] : vocabs) {
      ws_.write("vocab/" + id + ".vocab", v.serialize("config_hash " + ws_.hash()));
      sizes[id] = {{"symbols", v.size()}, {"words", v.words().size()}};
    }
    ws_.finish("build-vocab", {{"vocabularies", sizes},
                               {"global_tokens", global.total_tokens},
                               {"balanced_tokens", balanced.total_tokens}});
  }

  // -------------------------------------------------------------------------
  void train_style() {
    ws_.begin("train-style");
    const auto tagger = load_tagger();
    std::map<std::string, Vocabulary> vocabs;
    for (const auto& m : style_models()) vocabs.emplace(m.id, load_vocab(m.id));
    const auto labels = cfg_.labels();
    std::vector<nlohmann::json> stats(labels.size());
    parallel_for(labels.size(), [&](std::size_t li) {
      const auto& label = labels[li];
      std::vector<TokenSeq> seqs;
      for (const auto& t : load_split(label, "train")) {
        seqs.push_back(annotate(tagger, post_text(t.post)));
        for (const auto& c : t.comments) seqs.push_back(annotate(tagger, c.body));
      }
      nlohmann::json s = nlohmann::json::object();
      for (const auto& m : style_models()) {
        const auto& vocab = vocabs.at(m.id);
        NgramCounts counts(vocab.size());
        for (const auto& seq : seqs) counts.add_sequence(apply_vocab(vocab, seq));
        auto model = estimate(counts, m.smoothing);
        ws_.write("models/style/" + m.id + "/" + label + ".arpa",
                  model.to_arpa(vocab, "config_hash " + ws_.hash()));
        s[m.id] = {{"bigrams", model.bigram_entries()}, {"trigrams", model.trigram_entries()}};
      }
      stats[li] = std::move(s);
    });
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) per[labels[i]] = stats[i];
    ws_.finish("train-style", {{"models", per}});
  }

  // -------------------------------------------------------------------------
  void train_topic() {
    ws_.begin("train-topic");
    const auto stopwords = load_stopwords();
    std::vector<std::vector<std::string>> docs;
    Rng rng(cfg_.seed_lda);
    for (const auto& c : cfg_.sources()) {
      std::vector<std::vector<std::string>> mine;
      for (const auto& t : load_split(c, "train"))
        for (const auto& cm : t.comments) mine.push_back(tokenize(cm.body));
      if (cfg_.max_docs_per_community > 0 && mine.size() > cfg_.max_docs_per_community) {
        rng.shuffle(mine);
        mine.resize(cfg_.max_docs_per_community);
      }
      for (auto& d : mine) docs.push_back(std::move(d));
    }
    auto tfidf = build_tfidf(docs, stopwords);
    nlohmann::json per = nlohmann::json::object();
    for (auto k : cfg_.topic_k) {
      LdaOptions opt;
      opt.num_topics = k;
      opt.alpha = cfg_.alpha;
      opt.eta = cfg_.eta;
      opt.iterations = cfg_.lda_iterations;
      opt.seed = cfg_.seed_lda;
      auto result = train_lda(tfidf.docs, tfidf.model, opt);
      const auto id = topic_model_id(k);
      auto j = nlohmann::json::parse(result.model.to_json());
      j["config_hash"] = ws_.hash();
      ws_.write("models/" + id + ".json", j.dump() + "\n");
      std::string elbo = "# " + ws_.csv_header("train-topic") + "\niteration,elbo\n";
      for (std::size_t i = 0; i < result.elbo.size(); ++i)
        elbo += std::to_string(i + 1) + "," + format_double(result.elbo[i]) + "\n";
      ws_.write("reports/" + id + ".elbo.csv", elbo);
      per[id] = {{"final_elbo", result.elbo.empty() ? 0.0 : result.elbo.back()}};
    }
    ws_.finish("train-topic", {{"documents", tfidf.docs.size()},
                               {"dropped_documents", tfidf.dropped},
                               {"vocabulary", tfidf.model.size()},
                               {"models", per}});
  }

  // -------------------------------------------------------------------------
  void profile() {
    ws_.begin("profile");
    nlohmann::json per = nlohmann::json::object();
    for (auto k : cfg_.topic_k) {
      const auto id = topic_model_id(k);
      const auto model = load_topic_model(id);
      nlohmann::json out;
      out["config_hash"] = ws_.hash();
      out["model"] = id;
      out["profiles"] = nlohmann::json::array();
      for (const auto& label : cfg_.labels()) {
        auto threads = load_split(label, "train");
        std::vector<TopicVector> vecs(threads.size());
        parallel_for(threads.size(), [&](std::size_t i) {
          std::vector<std::string> tokens = tokenize(post_text(threads[i].post));
          for (const auto& c : threads[i].comments) {
            auto t = tokenize(c.body);
            tokens.insert(tokens.end(), t.begin(), t.end());
          }
          vecs[i] = model.infer_tokens(tokens);
        });
        auto p = build_profile(label, vecs, cfg_.clusters, cfg_.seed_kmeans);
        per[id][label] = p.centroids.size();
        out["profiles"].push_back(to_json(p));
      }
      ws_.write("profiles/" + id + ".json", out.dump() + "\n");
    }
    ws_.finish("profile", {{"centroids", per}});
  }

  // -------------------------------------------------------------------------
  void classify_stage() {
    ws_.begin("classify");
    const auto tagger = load_tagger();
    const auto labels = cfg_.labels();
    Annotator annot = [&](std::string_view text) { return annotate(tagger, text); };

    std::map<std::string, std::vector<Document>> docs;  // by level
    for (const auto& label : labels) {
      auto threads = load_split(label, "test");
      std::vector<Document> td(threads.size());
      parallel_for(threads.size(), [&](std::size_t i) { td[i] = assemble_thread_doc(threads[i], label, annot); });
      for (auto& d : td) docs["thread"].push_back(std::move(d));
      for (auto& d : assemble_user_docs(label, threads, annot, cfg_.min_user_comments))
        docs["user"].push_back(std::move(d));
    }

    std::string accuracy = "# " + ws_.csv_header("classify") + "\nmodel,level,documents";
    for (const auto& l : labels) accuracy += "," + csv_field(l);
    accuracy += ",average,ties\n";
    std::string errors = "# " + ws_.csv_header("classify") + "\nmodel,level,doc_id,reason\n";
    nlohmann::json manifest = nlohmann::json::object();

    auto evaluate_table = [&](const ScoreTable& decide, const std::string& model, const std::string& level) {
      auto cls = classify(decide);
      auto rep = evaluate(decide, cls, labels);
      accuracy += csv_field(model) + "," + level + "," + std::to_string(rep.samples());
      for (double a : rep.accuracy) accuracy += "," + (std::isnan(a) ? std::string("NA") : format_fixed(a, 6));
      accuracy += "," + format_fixed(rep.average_accuracy, 6) + "," + std::to_string(cls.ties) + "\n";
      ws_.write("reports/confusion/" + model + "." + level + ".csv",
                rep.confusion_csv(ws_.csv_header("classify") + " model=" + model + " level=" + level));
      std::string pred = "# " + ws_.csv_header("classify") + "\ndoc_id,true_community,predicted\n";
      for (std::size_t i = 0; i < cls.doc_ids.size(); ++i)
        pred += csv_field(cls.doc_ids[i]) + "," + csv_field(decide.truths[i]) + "," + csv_field(cls.predicted[i]) + "\n";
      ws_.write("scores/" + model + "." + level + ".predictions.csv", pred);
      for (const auto& [id, why] : decide.errors)
        errors += csv_field(model) + "," + level + "," + csv_field(id) + "," + csv_field(why) + "\n";
      manifest[model][level] = {{"documents", rep.samples()},
                                {"average_accuracy", rep.average_accuracy},
                                {"ties", cls.ties},
                                {"errors", decide.errors.size()}};
    };

    for (const auto& m : style_models()) {
      StyleModelSet set;
      set.model_id = m.id;
      set.vocab = load_vocab(m.id);
      set.communities = labels;
      for (const auto& label : labels)
        set.models.push_back(TrigramModel::from_arpa(ws_.read("models/style/" + m.id + "/" + label + ".arpa"), set.vocab));
      for (const std::string level : {"thread", "user"}) {
        auto tables = score_all_style(docs[level], set);
        const std::string hdr = ws_.csv_header("classify") + " model=" + m.id + " level=" + level;
        ws_.write("scores/" + m.id + "." + level + ".total.csv", tables.total.to_csv(hdr + " score=total"));
        ws_.write("scores/" + m.id + "." + level + ".per_token.csv", tables.per_token.to_csv(hdr + " score=per_token"));
        evaluate_table(tables.total, m.id, level);
      }
    }
    for (auto k : cfg_.topic_k) {
      const auto id = topic_model_id(k);
      const auto model = load_topic_model(id);
      const auto profiles = load_profiles(id);
      for (const std::string level : {"thread", "user"}) {
        auto table = score_all_topic(docs[level], id, model, profiles);
        ws_.write("scores/" + id + "." + level + ".csv",
                  table.to_csv(ws_.csv_header("classify") + " model=" + id + " level=" + level + " score=cosine"));
        evaluate_table(table, id, level);
      }
    }
    ws_.write("reports/accuracy.csv", accuracy);
    ws_.write("reports/score_errors.csv", errors);
    ws_.finish("classify", {{"models", manifest},
                            {"thread_documents", docs["thread"].size()},
                            {"user_documents", docs["user"].size()}});
  }

  // Score table fed to correlation for a model and level.
  std::string correlation_score_file(const std::string& model, const std::string& level) const {
    for (const auto& m : style_models())
      if (m.id == model)
        return "scores/" + model + "." + level + (cfg_.per_token_scores ? ".per_token.csv" : ".total.csv");
    return "scores/" + model + "." + level + ".csv";
  }

  std::vector<std::string> model_ids() const {
    std::vector<std::string> out;
    for (const auto& m : style_models()) out.push_back(m.id);
    for (auto k : cfg_.topic_k) out.push_back(topic_model_id(k));
    return out;
  }

  // -------------------------------------------------------------------------
  void correlate_stage() {
    ws_.begin("correlate");
    const std::string hdr = ws_.csv_header("correlate");
    CorrelationOptions opt;
    opt.permutation_p = cfg_.permutation_p;
    opt.permutations = cfg_.permutations;
    opt.seed = cfg_.seed_split;

    // Thread feedback: post karma of the test threads.
    std::map<std::string, double> thread_karma;
    for (const auto& c : cfg_.communities)
      for (const auto& t : load_split(c, "test")) thread_karma[t.id()] = static_cast<double>(t.post.karma);

    // User feedback: k-index over all of the author's comments in the community.
    std::map<std::string, double> user_kindex;
    std::vector<UserActivity> activity;
    nlohmann::json hist_manifest = nlohmann::json::object();
    for (const auto& c : cfg_.sources()) {
      auto all = deserialize_threads(ws_.read("corpus/" + c + ".jsonl"));
      auto acts = collect_user_activity(c, {&all});
      std::vector<std::size_t> ks;
      for (const auto& a : acts) {
        user_kindex[user_doc_id(c, a.author)] = static_cast<double>(a.k_index);
        ks.push_back(a.k_index);
      }
      if (std::find(cfg_.communities.begin(), cfg_.communities.end(), c) != cfg_.communities.end() && !ks.empty()) {
        auto bins = kindex_histogram(ks, cfg_.histogram_bin_width);
        ws_.write("reports/kindex_histogram/" + c + ".csv", histogram_csv(bins, hdr + " community=" + c));
        hist_manifest[c] = ks.size();
      }
      activity.insert(activity.end(), acts.begin(), acts.end());
    }

    std::vector<CorrelationResult> thread_results, user_results;
    for (const auto& model : model_ids()) {
      for (const std::string level : {"thread", "user"}) {
        auto table = ScoreTable::from_csv(ws_.read(correlation_score_file(model, level)), model);
        auto norm = normalize_scores(table, cfg_.distractor);
        if (level == "thread") {
          auto r = correlate_threads(norm, thread_karma, model, opt);
          thread_results.insert(thread_results.end(), r.begin(), r.end());
        } else {
          auto r = correlate_users(norm, user_kindex, model, opt);
          user_results.insert(user_results.end(), r.begin(), r.end());
        }
      }
    }
    const auto models = model_ids();
    ws_.write("reports/correlation_thread.csv", correlation_table_csv(thread_results, models, hdr + " level=thread"));
    ws_.write("reports/correlation_user.csv", correlation_table_csv(user_results, models, hdr + " level=user"));
    ws_.write("reports/correlation_thread_detail.csv", correlation_detail_csv(thread_results, hdr + " level=thread"));
    ws_.write("reports/correlation_user_detail.csv", correlation_detail_csv(user_results, hdr + " level=user"));

    auto summary = multicommunity_stats(activity, cfg_.kindex_min_comments, cfg_.high_k, cfg_.low_k, cfg_.secondary_k);
    std::string mc = "# " + hdr + "\nstatistic,value\n";
    auto opt_str = [](const std::optional<double>& v) { return v ? format_fixed(*v, 6) : std::string("NA"); };
    mc += "active_users," + std::to_string(summary.active_users) + "\n";
    mc += "high_k_users," + std::to_string(summary.high_users) + "\n";
    mc += "low_k_users," + std::to_string(summary.low_users) + "\n";
    mc += "high_k_median_communities," + opt_str(summary.high_median_communities) + "\n";
    mc += "low_k_median_communities," + opt_str(summary.low_median_communities) + "\n";
    for (const auto& [t, n] : summary.second_community_counts)
      mc += "high_k_users_with_second_community_k_ge_" + std::to_string(t) + "," + std::to_string(n) + "\n";
    ws_.write("reports/multicommunity.csv", mc);

    ws_.finish("correlate", {{"thread_results", thread_results.size()},
                             {"user_results", user_results.size()},
                             {"histograms", hist_manifest},
                             {"active_users", summary.active_users}});
  }

  // -------------------------------------------------------------------------
  void report() {
    ws_.begin("report");
    const std::string hdr = ws_.csv_header("report");
    // Top words per topic.
    for (auto k : cfg_.topic_k) {
      const auto id = topic_model_id(k);
      const auto model = load_topic_model(id);
      std::string out = "# " + hdr + " model=" + id + "\ntopic,rank,word,probability\n";
      const auto& tw = model.topic_word();
      for (std::size_t t = 0; t < model.num_topics(); ++t) {
        const auto top = model.top_words(t, cfg_.top_words);
        for (std::size_t r = 0; r < top.size(); ++r)
          out += std::to_string(t) + "," + std::to_string(r + 1) + "," + csv_field(model.vocab().words()[top[r]]) +
                 "," + format_fixed(tw[t][top[r]], 8) + "\n";
      }
      ws_.write("reports/" + id + ".top_words.csv", out);
    }

    // Index of every CSV report with its content hash.
    std::vector<std::string> files;
    for (const auto& dir : {"reports", "scores"}) {
      const auto root = ws_.path(dir);
      if (!std::filesystem::exists(root)) continue;
      for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv")
          files.push_back(std::filesystem::relative(e.path(), ws_.root()).generic_string());
    }
    std::sort(files.begin(), files.end());
    std::string index = "# " + hdr + "\nfile,bytes,fnv1a64\n";
    for (const auto& f : files) {
      if (f == "reports/index.csv") continue;
      const auto content = ws_.read(f);
      index += csv_field(f) + "," + std::to_string(content.size()) + "," + hex64(fnv1a64(content)) + "\n";
    }
    ws_.write("reports/index.csv", index);
    ws_.finish("report", {{"indexed_files", files.size()}});
  }

  // -------------------------------------------------------------------------
  // Loaders

  TagSet load_tagset() const {
    if (cfg_.tagset_file.empty()) return TagSet();
    return TagSet::parse(read_file(cfg_.resolve(cfg_.tagset_file).string()));
  }

  StopwordList load_stopwords() const {
    if (cfg_.stopwords_file.empty()) return StopwordList::parse(default_stopwords_text());
    return StopwordList::parse(read_file(cfg_.resolve(cfg_.stopwords_file).string()));
  }

  TaggerModel load_tagger() const { return TaggerModel::from_json(ws_.read("models/tagger.json")); }

  Vocabulary load_vocab(const std::string& id) const { return Vocabulary::deserialize(ws_.read("vocab/" + id + ".vocab")); }

  TopicModel load_topic_model(const std::string& id) const { return TopicModel::from_json(ws_.read("models/" + id + ".json")); }

  std::vector<CommunityTopicProfile> load_profiles(const std::string& id) const {
    auto j = nlohmann::json::parse(ws_.read("profiles/" + id + ".json"));
    std::vector<CommunityTopicProfile> out;
    for (const auto& p : j.at("profiles")) out.push_back(profile_from_json(p));
    return out;
  }

  std::vector<ThreadRecord> load_split(const std::string& community, const std::string& part) const {
    return deserialize_threads(ws_.read("split/" + community + "." + part + ".jsonl"));
  }

  // Built-in stopword list; settable so the CLI can embed a shipped file.
  static std::string& default_stopwords_text() {
    static std::string text;
    return text;
  }

 private:
  static std::string join_lines(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += s + "\n";
    return out;
  }

  PipelineConfig cfg_;
  Workspace ws_;
  std::ostream& log_;
};

}  // namespace commlang
