#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hide/encoder.hpp"
#include "hide/errors.hpp"
#include "hide/text.hpp"

namespace hide {

struct PrecisionRecallF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Clipped n-gram multiset overlap. f1 is 0 when either side has no
// n-grams of order n.
PrecisionRecallF1 rouge_n(const TokenSequence& cand, const TokenSequence& ref,
                          int n);

// LCS-based: P = LCS/|cand|, R = LCS/|ref|, harmonic F1.
PrecisionRecallF1 rouge_l(const TokenSequence& cand, const TokenSequence& ref);

// Geometric mean of clipped n-gram precisions up to max_n, times the
// brevity penalty min(1, exp(1 - r/c)). With add_one_smoothing, orders
// whose clipped count is zero use (m+1)/(total+1); a candidate too short
// to form order-n n-grams scores 0 regardless.
double bleu(const TokenSequence& cand, const TokenSequence& ref, int max_n,
            bool add_one_smoothing = false);

// Exact-match METEOR: unigram matches m, F_mean = 10PR/(R+9P), chunk
// penalty 0.5*(chunks/m)^3 with chunks taken from the greedy in-order
// alignment (each candidate token maps to the earliest unused equal
// reference token). 0 when m = 0.
double meteor_simple(const TokenSequence& cand, const TokenSequence& ref);

// Greedy token-embedding matching over the pluggable encoder: each
// candidate token scores its max cosine against reference tokens
// (precision side), symmetrically for recall, then harmonic F1. Negative
// sums clamp to zero so the score stays in [0,1].
PrecisionRecallF1 embedding_f1(const TokenSequence& cand,
                               const TokenSequence& ref,
                               const Encoder& encoder);

// Jensen-Shannon divergence between unigram distributions over the
// union vocabulary, logs base 2, 0*log0 = 0. Empty-vs-nonempty counts as
// disjoint support (1.0); empty-vs-empty is 0.0.
double js_divergence(const TokenSequence& cand, const TokenSequence& ref);

// 1 - cos(f(cand_text), f(ref_text)).
double cosine_distance(std::string_view cand_text, std::string_view ref_text,
                       const Encoder& encoder);

// Minkowski-p distance (p = 1 or 2) between raw token-count vectors over
// the union vocabulary.
double lp_distance(const TokenSequence& cand, const TokenSequence& ref, int p);

// Add-one-smoothed unigram language model. fit() reserves one extra
// vocabulary slot for out-of-vocabulary tokens, keeping the distribution
// proper: p(t) = (count(t)+1)/(total+V+1), p(oov) = 1/(total+V+1).
class UnigramLm {
public:
    static UnigramLm fit(std::span<const TokenSequence> corpus);
    static UnigramLm fit_texts(std::span<const std::string> texts);
    // p = 1/vocabulary_size for every token; test/fixture constructor.
    static UnigramLm uniform(std::size_t vocabulary_size);
    // Explicit probability table with a fixed OOV probability.
    static UnigramLm from_table(std::unordered_map<std::string, double> probs,
                                double oov_prob);

    double prob(const std::string& token) const;

private:
    UnigramLm() = default;
    std::unordered_map<std::string, double> probs_;
    double oov_prob_ = 0.0;
};

// exp(-(1/N) * sum ln p(token)); always >= 1 for a proper model.
double perplexity(std::string_view text, const UnigramLm& lm);
double perplexity(const TokenSequence& tokens, const UnigramLm& lm);

// 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words). Sentences
// are '.'/'!'/'?'-delimited segments containing at least one word (min
// 1); syllables come from the vowel-group heuristic in metrics.cpp.
double flesch_reading_ease(std::string_view text);

// Flesch-Kincaid grade level, available behind this separate call:
// 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59.
double flesch_kincaid_grade(std::string_view text);

// One row of the fifteen-column evaluation battery.
struct MetricReport {
    double r1 = 0, r2 = 0, rl = 0;          // ROUGE-1/2/L F1
    double b1 = 0, b2 = 0, b3 = 0, bl = 0;  // cumulative BLEU-1/2/3/4
    double bs = 0;                          // embedding F1
    double ms = 0;                          // METEOR
    double cd = 0;                          // cosine distance
    double jsd = 0;                         // Jensen-Shannon divergence
    double l2 = 0, l1 = 0;                  // count-vector distances
    double ps = 0;                          // perplexity
    double frs = 0;                         // Flesch reading ease

    bool operator==(const MetricReport&) const = default;
};

MetricReport mean_report(std::span<const MetricReport> reports);

// Populates all fifteen fields for one candidate/reference pair. BLEU is
// computed without smoothing so token-disjoint pairs score 0 across the
// overlap columns.
MetricReport evaluate_pair(std::string_view cand_text, std::string_view ref_text,
                           const Encoder& encoder, const UnigramLm& lm);

}  // namespace hide
