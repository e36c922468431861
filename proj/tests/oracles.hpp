// Independent brute-force oracles for cross-checking the metric and
// retrieval implementations. Deliberately written against different data
// structures and algorithms than the library paths they verify.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

// n-grams as joined strings, overlap counted by a mark-used scan over an
// explicit list rather than a count map.
inline std::vector<std::string> ngram_list(const Tokens& tokens, int n) {
    std::vector<std::string> grams;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return grams;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g;
        for (int k = 0; k < n; ++k) {
            if (k) g += '\x1f';
            g += tokens[i + k];
        }
        grams.push_back(std::move(g));
    }
    return grams;
}

inline long clipped_matches(const Tokens& cand, const Tokens& ref, int n) {
    const auto cand_grams = ngram_list(cand, n);
    auto ref_grams = ngram_list(ref, n);
    std::vector<bool> used(ref_grams.size(), false);
    long matches = 0;
    for (const auto& g : cand_grams) {
        for (std::size_t j = 0; j < ref_grams.size(); ++j) {
            if (!used[j] && ref_grams[j] == g) {
                used[j] = true;
                ++matches;
                break;
            }
        }
    }
    return matches;
}

struct Prf {
    double precision = 0, recall = 0, f1 = 0;
};

inline Prf rouge_n(const Tokens& cand, const Tokens& ref, int n) {
    const double total_c = static_cast<double>(ngram_list(cand, n).size());
    const double total_r = static_cast<double>(ngram_list(ref, n).size());
    const double m = static_cast<double>(clipped_matches(cand, ref, n));
    Prf out;
    if (total_c == 0 || total_r == 0 || m == 0) return out;
    out.precision = m / total_c;
    out.recall = m / total_r;
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

// Top-down memoized LCS (the library uses a bottom-up rolling table).
inline std::size_t lcs(const Tokens& a, const Tokens& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        auto key = std::make_pair(i, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::size_t value;
        if (a[i] == b[j])
            value = 1 + self(self, i + 1, j + 1);
        else
            value = std::max(self(self, i + 1, j), self(self, i, j + 1));
        memo[key] = value;
        return value;
    };
    return rec(rec, 0, 0);
}

inline Prf rouge_l(const Tokens& cand, const Tokens& ref) {
    if (cand.empty() || ref.empty()) return {};
    const double m = static_cast<double>(lcs(cand, ref));
    Prf out;
    if (m == 0) return out;
    out.precision = m / static_cast<double>(cand.size());
    out.recall = m / static_cast<double>(ref.size());
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

inline double bleu(const Tokens& cand, const Tokens& ref, int max_n,
                   bool smoothing) {
    if (cand.empty() || ref.empty()) return 0.0;
    double product = 1.0;
    for (int n = 1; n <= max_n; ++n) {
        const double total = static_cast<double>(ngram_list(cand, n).size());
        if (total == 0) return 0.0;
        const double m = static_cast<double>(clipped_matches(cand, ref, n));
        double p;
        if (m == 0) {
            if (!smoothing) return 0.0;
            p = 1.0 / (total + 1.0);
        } else {
            p = m / total;
        }
        product *= p;
    }
    const double geo = std::pow(product, 1.0 / max_n);
    const double bp = std::min(
        1.0, std::exp(1.0 - static_cast<double>(ref.size()) /
                                static_cast<double>(cand.size())));
    return bp * geo;
}

// Exact-match METEOR with the greedy earliest-unused in-order alignment,
// rebuilt over explicit position vectors.
inline double meteor(const Tokens& cand, const Tokens& ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    std::vector<bool> ref_used(ref.size(), false);
    std::vector<long> mapped(cand.size(), -1);
    long matches = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (!ref_used[j] && ref[j] == cand[i]) {
                ref_used[j] = true;
                mapped[i] = static_cast<long>(j);
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    long chunks = 0;
    long prev = -5;
    for (long j : mapped) {
        if (j < 0) {
            prev = -5;
            continue;
        }
        if (j != prev + 1) ++chunks;
        prev = j;
    }

    const double m = static_cast<double>(matches);
    const double p = m / static_cast<double>(cand.size());
    const double r = m / static_cast<double>(ref.size());
    const double f_mean = 10.0 * p * r / (r + 9.0 * p);
    const double penalty =
        0.5 * std::pow(static_cast<double>(chunks) / m, 3.0);
    return f_mean * (1.0 - penalty);
}

// Plain-loop cosine and linear argmax scan for retrieval equivalence.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::size_t argmax_cosine(const std::vector<std::vector<double>>& store,
                                 const std::vector<double>& query) {
    std::size_t best = 0;
    double best_sim = cosine(store[0], query);
    for (std::size_t i = 1; i < store.size(); ++i) {
        const double sim = cosine(store[i], query);
        if (sim > best_sim) {
            best_sim = sim;
            best = i;
        }
    }
    return best;
}

}  // namespace oracle
