#pragma once
// Reference implementations used only by tests. Each one recomputes a
// quantity straight from its defining formula, over plain std::map counts,
// without sharing code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Sym = std::uint32_t;
using Seq = std::vector<Sym>;

// Raw n-gram counts over padded sequences <s> <s> w1 .. wn </s>, where
// symbol ids are 0..V-1, </s> = V and <s> = V+1.
struct Counts {
  std::size_t V = 0;
  std::map<std::tuple<Sym, Sym, Sym>, double> c3;
  std::map<std::pair<Sym, Sym>, double> c2;
  std::map<Sym, double> c1;

  Counts(const std::vector<Seq>& seqs, std::size_t vocab) : V(vocab) {
    const Sym eos = static_cast<Sym>(V), bos = static_cast<Sym>(V + 1);
    for (const auto& s : seqs) {
      std::vector<Sym> p{bos, bos};
      p.insert(p.end(), s.begin(), s.end());
      p.push_back(eos);
      for (std::size_t i = 2; i < p.size(); ++i) {
        c3[{p[i - 2], p[i - 1], p[i]}] += 1;
        c2[{p[i - 1], p[i]}] += 1;
        c1[p[i]] += 1;
      }
    }
  }

  Sym eos() const { return static_cast<Sym>(V); }
  Sym bos() const { return static_cast<Sym>(V + 1); }
};

// Chen-Goodman discounts from a list of counts of one order.
struct Discounts {
  double d[4] = {0.0, 0.5, 0.5, 0.5};

  explicit Discounts(const std::vector<double>& counts) {
    double n[5] = {0, 0, 0, 0, 0};
    for (double c : counts)
      if (c >= 1 && c <= 4) n[static_cast<int>(c)] += 1;
    if (n[1] + 2 * n[2] == 0) return;
    const double Y = n[1] / (n[1] + 2 * n[2]);
    auto ok = [](double x, double cap) { return std::isfinite(x) && x > 0 && x <= cap; };
    if (n[1] > 0) {
      double x = 1 - 2 * Y * n[2] / n[1];
      d[1] = ok(x, 1) ? x : 0.5;
    }
    if (n[2] > 0) {
      double x = 2 - 3 * Y * n[3] / n[2];
      d[2] = ok(x, 2) ? x : 0.5;
    }
    if (n[3] > 0) {
      double x = 3 - 4 * Y * n[4] / n[3];
      d[3] = ok(x, 3) ? x : 0.5;
    }
  }

  double of(double c) const { return c <= 0 ? 0.0 : d[std::min<int>(3, static_cast<int>(c))]; }
};

// Interpolated modified Kneser-Ney, evaluated recursively per query.
struct KneserNey {
  const Counts& C;
  std::map<std::pair<Sym, Sym>, double> n2;  // distinct left contexts of (v,w)
  std::map<Sym, double> n1;                  // distinct v with n2(v,w) > 0
  std::vector<double> raw3, vals2, vals1;

  explicit KneserNey(const Counts& c) : C(c) {
    for (const auto& [k, x] : C.c3) n2[{std::get<1>(k), std::get<2>(k)}] += 1;
    for (const auto& [k, x] : n2) n1[k.second] += 1;
    for (const auto& [k, x] : C.c3) raw3.push_back(x);
    for (const auto& [k, x] : n2) vals2.push_back(x);
    for (const auto& [k, x] : n1) vals1.push_back(x);
  }

  double p1(Sym w) const {
    Discounts D(vals1);
    double total = 0, mass = 0;
    for (const auto& [k, x] : n1) {
      total += x;
      mass += D.of(x);
    }
    auto it = n1.find(w);
    const double c = it == n1.end() ? 0.0 : it->second;
    return std::max(c - D.of(c), 0.0) / total + (mass / total) / static_cast<double>(C.V + 1);
  }

  double p2(Sym v, Sym w) const {
    Discounts D(vals2);
    double total = 0, mass = 0, c = 0;
    for (const auto& [k, x] : n2)
      if (k.first == v) {
        total += x;
        mass += D.of(x);
        if (k.second == w) c = x;
      }
    if (total == 0) return p1(w);
    return std::max(c - D.of(c), 0.0) / total + (mass / total) * p1(w);
  }

  double p3(Sym u, Sym v, Sym w) const {
    Discounts D(raw3);
    double total = 0, mass = 0, c = 0;
    for (const auto& [k, x] : C.c3)
      if (std::get<0>(k) == u && std::get<1>(k) == v) {
        total += x;
        mass += D.of(x);
        if (std::get<2>(k) == w) c = x;
      }
    if (total == 0) return p2(v, w);
    return std::max(c - D.of(c), 0.0) / total + (mass / total) * p2(v, w);
  }
};

// Witten-Bell recursion on raw counts, uniform floor over V+1 symbols.
struct WittenBell {
  const Counts& C;

  explicit WittenBell(const Counts& c) : C(c) {}

  double p1(Sym w) const {
    double N = 0, T = 0;
    for (const auto& [k, x] : C.c1) {
      N += x;
      T += 1;
    }
    auto it = C.c1.find(w);
    const double c = it == C.c1.end() ? 0.0 : it->second;
    return (c + T / static_cast<double>(C.V + 1)) / (N + T);
  }

  double p2(Sym v, Sym w) const {
    double N = 0, T = 0, c = 0;
    for (const auto& [k, x] : C.c2)
      if (k.first == v) {
        N += x;
        T += 1;
        if (k.second == w) c = x;
      }
    if (N == 0) return p1(w);
    return (c + T * p1(w)) / (N + T);
  }

  double p3(Sym u, Sym v, Sym w) const {
    double N = 0, T = 0, c = 0;
    for (const auto& [k, x] : C.c3)
      if (std::get<0>(k) == u && std::get<1>(k) == v) {
        N += x;
        T += 1;
        if (std::get<2>(k) == w) c = x;
      }
    if (N == 0) return p2(v, w);
    return (c + T * p2(v, w)) / (N + T);
  }
};

// Largest k such that at least k entries exceed k, by direct search.
inline std::size_t k_index(const std::vector<long long>& karma) {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= karma.size(); ++k) {
    std::size_t above = 0;
    for (long long x : karma)
      if (x > static_cast<long long>(k)) ++above;
    if (above >= k) best = k;
  }
  return best;
}

// Rank = #smaller + (#equal + 1) / 2, then textbook Pearson.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) less += 1;
      if (x == v[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto a = ranks(x), b = ranks(y);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

// Hybrid word lists by explicit sorting: general top-n of the balanced
// counts, then per community the top-n words outside the general list.
struct HybridLists {
  std::vector<std::string> general;
  std::vector<std::vector<std::string>> per_community;
  std::set<std::string> all;
};

inline std::vector<std::string> by_rank(const std::map<std::string, std::uint64_t>& counts) {
  std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (const auto& p : v) out.push_back(p.first);
  return out;
}

inline HybridLists hybrid_lists(const std::map<std::string, std::uint64_t>& balanced,
                                const std::vector<std::map<std::string, std::uint64_t>>& communities,
                                std::size_t n_general, std::size_t n_per) {
  HybridLists h;
  auto ranked = by_rank(balanced);
  h.general.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(n_general, ranked.size())));
  for (const auto& c : communities) {
    std::vector<std::string> mine;
    for (const auto& w : by_rank(c)) {
      if (mine.size() == n_per) break;
      if (std::find(h.general.begin(), h.general.end(), w) == h.general.end()) mine.push_back(w);
    }
    h.per_community.push_back(mine);
  }
  h.all.insert(h.general.begin(), h.general.end());
  for (const auto& l : h.per_community) h.all.insert(l.begin(), l.end());
  return h;
}

}  // namespace oracle
