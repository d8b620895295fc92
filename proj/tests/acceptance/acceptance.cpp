// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures.
//
// usage: acceptance <commlang-binary> <fixture-config>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "commlang/feedback.hpp"
#include "support/experiments.hpp"
#include "support/oracles.hpp"

using namespace commlang;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kProbTol = 1e-9;
constexpr double kRhoTol = 1e-12;
constexpr double kElboRelTol = 1e-4;
constexpr double kStyleAccuracy = 0.95;
constexpr double kRandomCenter = 1.0 / 9.0;
constexpr double kRandomBand = 0.03;
constexpr double kStyleMargin = 0.10;
constexpr double kRhoMin = 0.8;
constexpr double kAlpha = 0.05;
constexpr int kPermutedPassMin = 90;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << o.detail << ")"
            << std::endl;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1 -----------------------------------------------------------------------

Outcome smoothing() {
  const auto t0 = Clock::now();
  // 27 tokens over a 5-symbol alphabet.
  const std::vector<SymbolSeq> corpus = {{0, 1, 2, 0, 1}, {1, 2, 0}, {2, 0, 1, 3}, {0, 1},      {4, 4, 0, 1, 2},
                                         {3, 2, 1},       {0, 1, 2}, {1},          {2, 2, 4}};
  const std::size_t V = 6;  // symbol 5 never occurs
  std::size_t tokens = 0;
  for (const auto& s : corpus) tokens += s.size();
  oracle::Counts oc({corpus.begin(), corpus.end()}, V);
  oracle::KneserNey kn(oc);
  oracle::WittenBell wb(oc);
  double worst_sum = 0, worst_diff = 0;
  std::vector<Symbol> ctx;
  for (Symbol i = 0; i < V; ++i) ctx.push_back(i);
  ctx.push_back(static_cast<Symbol>(V + 1));
  for (auto sm : {Smoothing::modified_kn, Smoothing::witten_bell}) {
    auto m = estimate(count_ngrams(corpus, V), sm);
    for (Symbol u : ctx)
      for (Symbol v : ctx) {
        double sum = 0;
        for (Symbol w = 0; w <= V; ++w) {
          const double p = m.prob(u, v, w);
          const double ref = sm == Smoothing::modified_kn ? kn.p3(u, v, w) : wb.p3(u, v, w);
          worst_diff = std::max(worst_diff, std::fabs(p - ref));
          sum += p;
        }
        worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
      }
  }
  const double secs = seconds_since(t0);
  return {tokens <= 30 && worst_sum <= kProbTol && worst_diff <= kProbTol && secs < 1.0,
          std::to_string(tokens) + " tokens, max |sum-1| " + fmt("%.2e", worst_sum) + ", max oracle diff " +
              fmt("%.2e", worst_diff) + ", " + fmt("%.3f", secs) + " s"};
}

// 2 -----------------------------------------------------------------------

Outcome kindex() {
  Rng rng(2002);
  std::vector<std::vector<long long>> lists;
  for (int i = 0; i < 1000; ++i) {
    std::vector<long long> k(rng.below(201));
    for (auto& x : k) x = static_cast<long long>(rng.below(506)) - 5;
    lists.push_back(std::move(k));
  }
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (const auto& k : lists)
    if (k_index(k) != oracle::k_index(k)) ++mismatches;
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 1.0, std::to_string(mismatches) + " mismatches, " + fmt("%.3f", secs) + " s"};
}

// 3 -----------------------------------------------------------------------

Outcome spearman_check() {
  Rng rng(3003);
  double worst = 0;
  int with_ties = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng.below(60);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng.below(10));
    for (auto& v : y) v = static_cast<double>(rng.below(1000)) / 7.0;
    if (std::set<double>(x.begin(), x.end()).size() < n) ++with_ties;
    auto r = spearman(x, y);
    const double ref = oracle::spearman(x, y);
    if (!r.defined) {
      if (std::isfinite(ref)) worst = INFINITY;
      continue;
    }
    worst = std::max(worst, std::fabs(r.rho - ref));
  }
  const double ex = spearman({1, 2, 3}, {1, 3, 2}).rho;
  return {worst <= kRhoTol && ex == 0.5 && with_ties > 0,
          "max diff " + fmt("%.2e", worst) + ", " + std::to_string(with_ties) + " pairs with ties, example " +
              fmt("%.17g", ex)};
}

// 4 -----------------------------------------------------------------------

Outcome discrimination() {
  const auto t0 = Clock::now();
  auto split = synth::hold_out(synth::trigram_communities(4, 200, 100, 404), 0.2);
  auto run = synth::hybrid_style_run(split, 30, 5);
  const double acc = run.report.average_accuracy;

  const auto labels = synth::community_names(9);
  double mean = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    ScoreTable t;
    t.model_id = "random";
    t.communities = labels;
    for (std::size_t d = 0; d < 900; ++d) {
      std::vector<double> row(labels.size());
      for (auto& x : row) x = rng.uniform();
      t.add_row("d" + std::to_string(d), labels[d % labels.size()], row);
    }
    mean += evaluate(t, classify(t), labels).average_accuracy / 10.0;
  }
  const double secs = seconds_since(t0);
  return {acc >= kStyleAccuracy && std::fabs(mean - kRandomCenter) <= kRandomBand && secs < 300,
          "hybrid thread accuracy " + fmt("%.4f", acc) + " on " + std::to_string(run.table.rows()) +
              " threads, random baseline " + fmt("%.4f", mean) + ", " + fmt("%.1f", secs) + " s"};
}

// 5 -----------------------------------------------------------------------

Outcome style_beats_topic(const fs::path& stopword_file) {
  std::ifstream in(stopword_file);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto stop = StopwordList::parse(ss.str());
  auto split = synth::hold_out(synth::style_topic_communities(60, 20, 505), 0.25);
  const double style = synth::hybrid_style_run(split, 30, 5).report.average_accuracy;
  const double topic = synth::topic_run(split, stop, 6, 5, 30, 7).report.average_accuracy;
  return {stop.size() > 0 && style - topic >= kStyleMargin,
          "style " + fmt("%.4f", style) + ", topic " + fmt("%.4f", topic) + ", margin " + fmt("%.4f", style - topic)};
}

// 6 -----------------------------------------------------------------------

Outcome planted_topics() {
  auto data = synth::planted_topic_docs(300, 3, 10, 50, 606);
  auto tfidf = build_tfidf(data.docs, StopwordList());
  LdaOptions opt;
  opt.num_topics = 3;
  opt.iterations = 40;
  opt.seed = 5;
  auto lda = train_lda(tfidf.docs, tfidf.model, opt);

  std::vector<std::set<std::string>> planted;
  for (const auto& t : data.topics) planted.emplace_back(t.begin(), t.end());
  std::vector<std::vector<std::string>> learned;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<std::string> top;
    for (auto w : lda.model.top_words(k, 5)) top.push_back(tfidf.model.words()[w]);
    learned.push_back(top);
  }
  // Greedy matching on overlap size.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      std::size_t o = 0;
      for (const auto& w : learned[i]) o += planted[j].count(w);
      pairs.emplace_back(o, i, j);
    }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) > std::get<0>(b) : a < b;
  });
  std::set<std::size_t> used_i, used_j;
  int recovered = 0;
  for (const auto& [o, i, j] : pairs) {
    if (used_i.count(i) || used_j.count(j)) continue;
    used_i.insert(i);
    used_j.insert(j);
    if (o == 5) ++recovered;
  }
  int drops = 0;
  for (std::size_t i = 1; i < lda.elbo.size(); ++i)
    if (lda.elbo[i] < lda.elbo[i - 1] - kElboRelTol * std::fabs(lda.elbo[i - 1])) ++drops;
  return {recovered >= 2 && drops == 0,
          std::to_string(recovered) + "/3 topics recovered, " + std::to_string(drops) + " bound decreases over " +
              std::to_string(lda.elbo.size()) + " iterations"};
}

// 7 -----------------------------------------------------------------------

Outcome correlation_sign() {
  Rng rng(707);
  ScoreTable t;
  t.model_id = "m";
  t.communities = {"alpha", "merged_others"};
  std::vector<double> s;
  const std::size_t n = 100;
  for (std::size_t i = 0; i < n; ++i) {
    const double own = rng.normal(), other = rng.normal();
    t.add_row("t" + std::to_string(i), "alpha", {own, other});
    s.push_back(own - other);
  }
  const auto norm = normalize_scores(t);
  auto feedback_from = [&](const std::vector<double>& karma) {
    std::map<std::string, double> fb;
    for (std::size_t i = 0; i < n; ++i) fb["t" + std::to_string(i)] = karma[i];
    return fb;
  };
  const auto karma = synth::monotone_karma(s, 0.3, 77);
  const auto r = correlate_threads(norm, feedback_from(karma), "m").at(0);
  int insignificant = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto perm = karma;
    Rng prng(1000 + seed);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[prng.below(i + 1)]);
    const auto pr = correlate_threads(norm, feedback_from(perm), "m").at(0);
    if (pr.defined && pr.p_value > kAlpha) ++insignificant;
  }
  return {r.defined && r.rho > kRhoMin && r.p_value < kAlpha && insignificant >= kPermutedPassMin,
          "rho " + fmt("%.4f", r.rho) + ", p " + fmt("%.2e", r.p_value) + ", permuted p>0.05 in " +
              std::to_string(insignificant) + "/100"};
}

// 8 -----------------------------------------------------------------------

Outcome hybrid_law() {
  const TagSet tags;
  Rng rng(808);
  int violations = 0, mismatches = 0, trials = 0;
  for (; trials < 200; ++trials) {
    const std::size_t C = 2 + rng.below(6), np = rng.below(10), ng = rng.below(30) + (np == 0 ? 1 : 0);
    std::vector<FrequencyTable> tables;
    std::vector<std::map<std::string, std::uint64_t>> raw;
    FrequencyTable balanced;
    for (std::size_t c = 0; c < C; ++c) {
      auto toks = synth::zipf_tokens(300, 10 + rng.below(60), 1.1, rng, "s");
      auto own = synth::zipf_tokens(50 + rng.below(200), 5 + rng.below(30), 1.0, rng, "c" + std::to_string(c) + "_");
      toks.insert(toks.end(), own.begin(), own.end());
      auto t = count_frequencies(std::vector<std::vector<std::string>>{toks});
      balanced.merge(t);
      raw.push_back(t.counts);
      tables.push_back(std::move(t));
    }
    const auto words = build_hybrid_vocab(balanced, tables, ng, np, tags).words();
    const auto brute = oracle::hybrid_lists(balanced.counts, raw, ng, np);
    if (words.size() > ng + np * C) ++violations;
    if (std::vector<std::string>(brute.all.begin(), brute.all.end()) != words) ++mismatches;
  }
  // Disjoint case: general words dominate the balanced table, each community
  // has enough private words of its own.
  const std::size_t C = 4, ng = 25, np = 7;
  FrequencyTable balanced;
  std::vector<FrequencyTable> tables(C);
  for (std::size_t i = 0; i < ng; ++i) balanced.add("g" + std::to_string(i), 1000 - i);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < ng; ++i) tables[c].add("g" + std::to_string(i), 500);
    for (std::size_t i = 0; i < np + 3; ++i) tables[c].add("p" + std::to_string(c) + "_" + std::to_string(i), 100 - i);
  }
  const auto disjoint = build_hybrid_vocab(balanced, tables, ng, np, tags).words().size();
  return {violations == 0 && mismatches == 0 && disjoint == ng + np * C,
          std::to_string(trials) + " trials, " + std::to_string(violations) + " bound violations, " +
              std::to_string(mismatches) + " brute-force mismatches, disjoint case " + std::to_string(disjoint) +
              " = " + std::to_string(ng) + " + " + std::to_string(np) + "*" + std::to_string(C)};
}

// 9 -----------------------------------------------------------------------

std::map<std::string, std::string> csv_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out[fs::relative(e.path(), root).string()] = ss.str();
    }
  return out;
}

Outcome determinism(const std::string& cli, const std::string& config) {
  const auto base = fs::temp_directory_path() / ("commlang_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  double worst = 0;
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const auto t0 = Clock::now();
    const auto cmd = "\"" + cli + "\" --config \"" + config + "\" --workspace \"" + (base / name).string() +
                     "\" all >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    worst = std::max(worst, seconds_since(t0));
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      fs::remove_all(base);
      return {false, "pipeline exited with status " + std::to_string(status)};
    }
    runs.push_back(csv_files(base / name));
  }
  fs::remove_all(base);
  std::size_t differing = 0;
  for (const auto& [f, text] : runs[0])
    if (!runs[1].count(f) || runs[1].at(f) != text) ++differing;
  if (runs[0].size() != runs[1].size()) ++differing;
  return {!runs[0].empty() && differing == 0 && worst < 60.0,
          std::to_string(runs[0].size()) + " CSV files, " + std::to_string(differing) + " differing, slowest run " +
              fmt("%.2f", worst) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <commlang-binary> <fixture-config>\n";
    return 64;
  }
  const std::string cli = argv[1], config = argv[2];
  const fs::path stopwords = fs::path(config).parent_path().parent_path() / "stopwords_en.txt";
  report(1, "smoothing normalisation and oracle agreement", smoothing);
  report(2, "k-index matches brute force", kindex);
  report(3, "Spearman matches rank-then-Pearson", spearman_check);
  report(4, "synthetic community discrimination and random baseline", discrimination);
  report(5, "style beats topic on shared-topic communities", [&] { return style_beats_topic(stopwords); });
  report(6, "LDA planted-topic recovery and monotone bound", planted_topics);
  report(7, "correlation sign recovery and permutation null", correlation_sign);
  report(8, "hybrid vocabulary size law", hybrid_law);
  report(9, "end-to-end determinism on the fixture", [&] { return determinism(cli, config); });
  return failures;
}
