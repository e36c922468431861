#include "hide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hide {

namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(const TokenSequence& tokens, int n) {
    NgramCounts counts;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)] += 1;
    return counts;
}

// Sum over the n-gram multiset intersection: min(count_cand, count_ref).
long clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
    long overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

PrecisionRecallF1 prf_from_counts(double overlap, double cand_total,
                                  double ref_total) {
    PrecisionRecallF1 out;
    if (cand_total == 0 || ref_total == 0 || overlap == 0) return out;
    out.precision = overlap / cand_total;
    out.recall = overlap / ref_total;
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1, 0), curr(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                           : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

}  // namespace

PrecisionRecallF1 rouge_n(const TokenSequence& cand, const TokenSequence& ref,
                          int n) {
    if (n < 1) throw Error("rouge_n requires n >= 1");
    const NgramCounts cand_counts = count_ngrams(cand, n);
    const NgramCounts ref_counts = count_ngrams(ref, n);
    long cand_total = 0, ref_total = 0;
    for (const auto& [g, c] : cand_counts) cand_total += c;
    for (const auto& [g, c] : ref_counts) ref_total += c;
    return prf_from_counts(
        static_cast<double>(clipped_overlap(cand_counts, ref_counts)),
        static_cast<double>(cand_total), static_cast<double>(ref_total));
}

PrecisionRecallF1 rouge_l(const TokenSequence& cand, const TokenSequence& ref) {
    if (cand.empty() || ref.empty()) return {};
    const double lcs = static_cast<double>(lcs_length(cand, ref));
    return prf_from_counts(lcs, static_cast<double>(cand.size()),
                           static_cast<double>(ref.size()));
}

double bleu(const TokenSequence& cand, const TokenSequence& ref, int max_n,
            bool add_one_smoothing) {
    if (max_n < 1) throw Error("bleu requires max_n >= 1");
    if (cand.empty() || ref.empty()) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        const NgramCounts cand_counts = count_ngrams(cand, n);
        const NgramCounts ref_counts = count_ngrams(ref, n);
        long total = 0;
        for (const auto& [g, c] : cand_counts) total += c;
        if (total == 0) return 0.0;  // candidate too short for order n
        long overlap = clipped_overlap(cand_counts, ref_counts);
        double precision;
        if (overlap == 0) {
            if (!add_one_smoothing) return 0.0;
            precision = 1.0 / (static_cast<double>(total) + 1.0);
        } else {
            precision = static_cast<double>(overlap) / static_cast<double>(total);
        }
        log_sum += std::log(precision);
    }
    const double geo_mean = std::exp(log_sum / max_n);

    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double bp = std::min(1.0, std::exp(1.0 - r / c));
    return bp * geo_mean;
}

double meteor_simple(const TokenSequence& cand, const TokenSequence& ref) {
    if (cand.empty() || ref.empty()) return 0.0;

    // Greedy in-order alignment: candidate position i matches the
    // earliest unused reference position holding the same token.
    std::map<std::string, std::vector<std::size_t>> ref_positions;
    for (std::size_t j = 0; j < ref.size(); ++j) ref_positions[ref[j]].push_back(j);
    std::map<std::string, std::size_t> used;

    std::vector<std::ptrdiff_t> alignment;  // -1 for unmatched
    std::size_t matches = 0;
    for (const auto& token : cand) {
        auto it = ref_positions.find(token);
        std::size_t& next = used[token];
        if (it != ref_positions.end() && next < it->second.size()) {
            alignment.push_back(static_cast<std::ptrdiff_t>(it->second[next]));
            ++next;
            ++matches;
        } else {
            alignment.push_back(-1);
        }
    }
    if (matches == 0) return 0.0;

    // Chunks: maximal runs of matched candidate positions mapping to
    // consecutive reference positions.
    std::size_t chunks = 0;
    std::ptrdiff_t prev_ref = -2;
    for (std::ptrdiff_t pos : alignment) {
        if (pos < 0) {
            prev_ref = -2;
            continue;
        }
        if (pos != prev_ref + 1) ++chunks;
        prev_ref = pos;
    }

    const double m = static_cast<double>(matches);
    const double p = m / static_cast<double>(cand.size());
    const double r = m / static_cast<double>(ref.size());
    const double f_mean = 10.0 * p * r / (r + 9.0 * p);
    const double chunk_ratio = static_cast<double>(chunks) / m;
    const double penalty = 0.5 * chunk_ratio * chunk_ratio * chunk_ratio;
    return f_mean * (1.0 - penalty);
}

PrecisionRecallF1 embedding_f1(const TokenSequence& cand,
                               const TokenSequence& ref,
                               const Encoder& encoder) {
    if (cand.empty() || ref.empty()) return {};

    std::vector<Embedding> cand_vecs, ref_vecs;
    cand_vecs.reserve(cand.size());
    ref_vecs.reserve(ref.size());
    for (const auto& t : cand) cand_vecs.push_back(encoder.encode(t));
    for (const auto& t : ref) ref_vecs.push_back(encoder.encode(t));

    auto greedy_side = [](const std::vector<Embedding>& from,
                          const std::vector<Embedding>& to) {
        double sum = 0.0;
        for (const auto& v : from) {
            double best = -1.0;
            for (const auto& w : to) best = std::max(best, cosine_similarity(v, w));
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    PrecisionRecallF1 out;
    out.precision = std::max(0.0, greedy_side(cand_vecs, ref_vecs));
    out.recall = std::max(0.0, greedy_side(ref_vecs, cand_vecs));
    if (out.precision + out.recall > 0)
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double js_divergence(const TokenSequence& cand, const TokenSequence& ref) {
    if (cand.empty() && ref.empty()) return 0.0;
    if (cand.empty() || ref.empty()) return 1.0;

    std::map<std::string, std::pair<double, double>> vocab;
    for (const auto& t : cand) vocab[t].first += 1;
    for (const auto& t : ref) vocab[t].second += 1;

    const double nc = static_cast<double>(cand.size());
    const double nr = static_cast<double>(ref.size());
    double jsd = 0.0;
    for (const auto& [token, counts] : vocab) {
        const double p = counts.first / nc;
        const double q = counts.second / nr;
        const double m = 0.5 * (p + q);
        if (p > 0) jsd += 0.5 * p * std::log2(p / m);
        if (q > 0) jsd += 0.5 * q * std::log2(q / m);
    }
    return jsd;
}

double cosine_distance(std::string_view cand_text, std::string_view ref_text,
                       const Encoder& encoder) {
    return 1.0 -
           cosine_similarity(encoder.encode(cand_text), encoder.encode(ref_text));
}

double lp_distance(const TokenSequence& cand, const TokenSequence& ref, int p) {
    if (p != 1 && p != 2) throw Error("lp_distance supports p = 1 or 2");

    std::map<std::string, std::pair<double, double>> vocab;
    for (const auto& t : cand) vocab[t].first += 1;
    for (const auto& t : ref) vocab[t].second += 1;

    Eigen::VectorXd diff(static_cast<Eigen::Index>(vocab.size()));
    Eigen::Index i = 0;
    for (const auto& [token, counts] : vocab)
        diff[i++] = counts.first - counts.second;
    return p == 1 ? diff.lpNorm<1>() : diff.lpNorm<2>();
}

UnigramLm UnigramLm::fit(std::span<const TokenSequence> corpus) {
    std::unordered_map<std::string, double> counts;
    double total = 0;
    for (const auto& tokens : corpus) {
        for (const auto& t : tokens) {
            counts[t] += 1;
            total += 1;
        }
    }
    const double vocab = static_cast<double>(counts.size());
    const double denom = total + vocab + 1.0;

    UnigramLm lm;
    lm.oov_prob_ = 1.0 / denom;
    for (auto& [token, count] : counts) count = (count + 1.0) / denom;
    lm.probs_ = std::move(counts);
    return lm;
}

UnigramLm UnigramLm::fit_texts(std::span<const std::string> texts) {
    std::vector<TokenSequence> corpus;
    corpus.reserve(texts.size());
    for (const auto& t : texts) corpus.push_back(tokenize(t));
    return fit(corpus);
}

UnigramLm UnigramLm::uniform(std::size_t vocabulary_size) {
    if (vocabulary_size == 0) throw Error("uniform LM needs a nonzero vocabulary");
    UnigramLm lm;
    lm.oov_prob_ = 1.0 / static_cast<double>(vocabulary_size);
    return lm;
}

UnigramLm UnigramLm::from_table(std::unordered_map<std::string, double> probs,
                                double oov_prob) {
    UnigramLm lm;
    lm.probs_ = std::move(probs);
    lm.oov_prob_ = oov_prob;
    return lm;
}

double UnigramLm::prob(const std::string& token) const {
    auto it = probs_.find(token);
    return it != probs_.end() ? it->second : oov_prob_;
}

double perplexity(const TokenSequence& tokens, const UnigramLm& lm) {
    if (tokens.empty()) throw EmptyText("perplexity of empty text is undefined");
    double log_sum = 0.0;
    for (const auto& t : tokens) log_sum += std::log(lm.prob(t));
    return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

double perplexity(std::string_view text, const UnigramLm& lm) {
    return perplexity(tokenize(text), lm);
}

namespace {

// Vowel-group heuristic: count maximal runs of [aeiouy]; a trailing 'e'
// on words longer than two letters drops one group unless the word ends
// in "le"; minimum one syllable per word.
int syllable_count(const std::string& word) {
    auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' ||
               c == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if (word.size() > 2 && word.back() == 'e' &&
        word.compare(word.size() - 2, 2, "le") != 0)
        --groups;
    return std::max(groups, 1);
}

}  // namespace

namespace {

struct ReadabilityCounts {
    double words = 0, sentences = 0, syllables = 0;
};

ReadabilityCounts readability_counts(std::string_view text) {
    if (trim(text).empty()) throw EmptyText("readability of empty text");

    ReadabilityCounts counts;
    std::size_t segment_start = 0;
    auto close_segment = [&](std::size_t end) {
        const TokenSequence words =
            tokenize(text.substr(segment_start, end - segment_start));
        if (!words.empty()) {
            counts.sentences += 1;
            counts.words += static_cast<double>(words.size());
            for (const auto& w : words)
                counts.syllables += static_cast<double>(syllable_count(w));
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '.' || text[i] == '!' || text[i] == '?') {
            close_segment(i);
            segment_start = i + 1;
        }
    }
    close_segment(text.size());

    if (counts.words == 0) throw EmptyText("text has no words");
    counts.sentences = std::max(counts.sentences, 1.0);
    return counts;
}

}  // namespace

double flesch_reading_ease(std::string_view text) {
    const ReadabilityCounts c = readability_counts(text);
    return 206.835 - 1.015 * (c.words / c.sentences) -
           84.6 * (c.syllables / c.words);
}

double flesch_kincaid_grade(std::string_view text) {
    const ReadabilityCounts c = readability_counts(text);
    return 0.39 * (c.words / c.sentences) + 11.8 * (c.syllables / c.words) -
           15.59;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
    if (reports.empty()) throw EmptyInput("cannot average zero reports");
    MetricReport sum;
    for (const auto& r : reports) {
        sum.r1 += r.r1; sum.r2 += r.r2; sum.rl += r.rl;
        sum.b1 += r.b1; sum.b2 += r.b2; sum.b3 += r.b3; sum.bl += r.bl;
        sum.bs += r.bs; sum.ms += r.ms; sum.cd += r.cd; sum.jsd += r.jsd;
        sum.l2 += r.l2; sum.l1 += r.l1; sum.ps += r.ps; sum.frs += r.frs;
    }
    const double n = static_cast<double>(reports.size());
    sum.r1 /= n; sum.r2 /= n; sum.rl /= n;
    sum.b1 /= n; sum.b2 /= n; sum.b3 /= n; sum.bl /= n;
    sum.bs /= n; sum.ms /= n; sum.cd /= n; sum.jsd /= n;
    sum.l2 /= n; sum.l1 /= n; sum.ps /= n; sum.frs /= n;
    return sum;
}

MetricReport evaluate_pair(std::string_view cand_text, std::string_view ref_text,
                           const Encoder& encoder, const UnigramLm& lm) {
    const TokenSequence cand = tokenize(cand_text);
    const TokenSequence ref = tokenize(ref_text);

    MetricReport report;
    report.r1 = rouge_n(cand, ref, 1).f1;
    report.r2 = rouge_n(cand, ref, 2).f1;
    report.rl = rouge_l(cand, ref).f1;
    report.b1 = bleu(cand, ref, 1);
    report.b2 = bleu(cand, ref, 2);
    report.b3 = bleu(cand, ref, 3);
    report.bl = bleu(cand, ref, 4);  // "BLEU-L" read as cumulative BLEU-4
    report.bs = embedding_f1(cand, ref, encoder).f1;
    report.ms = meteor_simple(cand, ref);
    report.cd = cosine_distance(cand_text, ref_text, encoder);
    report.jsd = js_divergence(cand, ref);
    report.l2 = lp_distance(cand, ref, 2);
    report.l1 = lp_distance(cand, ref, 1);
    report.ps = perplexity(cand, lm);
    report.frs = flesch_reading_ease(cand_text);
    return report;
}

}  // namespace hide
