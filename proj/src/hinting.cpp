#include "hide/hinting.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "hide/text.hpp"

namespace hide {

std::string_view to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::literal_overreach: return "literal_overreach";
        case ErrorCategory::missing_gist: return "missing_gist";
        case ErrorCategory::partial: return "partial";
    }
    return "partial";
}

ErrorCategory error_category_from_string(std::string_view s) {
    if (s == "literal_overreach") return ErrorCategory::literal_overreach;
    if (s == "missing_gist") return ErrorCategory::missing_gist;
    if (s == "partial") return ErrorCategory::partial;
    throw Error("unknown error category: " + std::string(s));
}

std::string_view to_string(ScoreKind k) {
    return k == ScoreKind::token_f1 ? "token_f1" : "embedding_cosine";
}

ScoreKind score_kind_from_string(std::string_view s) {
    if (s == "token_f1") return ScoreKind::token_f1;
    if (s == "embedding_cosine") return ScoreKind::embedding_cosine;
    throw Error("unknown score kind: " + std::string(s));
}

double token_f1(std::string_view a, std::string_view b) {
    const TokenSequence ta = tokenize(a);
    const TokenSequence tb = tokenize(b);
    if (ta.empty() || tb.empty()) return ta.empty() && tb.empty() ? 1.0 : 0.0;

    std::map<std::string, int> counts;
    for (const auto& t : ta) counts[t] += 1;
    double overlap = 0;
    for (const auto& t : tb) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            overlap += 1;
        }
    }
    if (overlap == 0) return 0.0;
    const double p = overlap / static_cast<double>(ta.size());
    const double r = overlap / static_cast<double>(tb.size());
    return 2.0 * p * r / (p + r);
}

namespace {

void validate(const DiscriminatorConfig& cfg) {
    if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
        throw Error("discriminator threshold must lie in [0,1]");
}

}  // namespace

ErrorJudgement is_error(std::string_view pred_explanation,
                        std::string_view gold_explanation,
                        const DiscriminatorConfig& cfg, const Encoder* encoder) {
    validate(cfg);
    if (trim(pred_explanation).empty())
        throw EmptyText("predicted explanation is empty");
    if (trim(gold_explanation).empty())
        throw EmptyText("gold explanation is empty");

    double score = 0.0;
    if (cfg.score_kind == ScoreKind::token_f1) {
        score = token_f1(pred_explanation, gold_explanation);
    } else {
        if (!encoder)
            throw Error("embedding_cosine discriminator requires an encoder");
        score = cosine_similarity(encoder->encode(pred_explanation),
                                  encoder->encode(gold_explanation));
    }
    return {score < cfg.threshold, score};
}

namespace {

std::vector<std::string> distinct_in_order(const TokenSequence& tokens) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens)
        if (seen.insert(t).second) out.push_back(t);
    return out;
}

std::vector<std::string> first_n(std::vector<std::string> words, std::size_t n) {
    if (words.size() > n) words.resize(n);
    return words;
}

}  // namespace

Hint generate_hint(std::string_view pred_explanation,
                   std::string_view gold_explanation, std::string_view idiom,
                   std::string_view literal_translation,
                   const DiscriminatorConfig& cfg) {
    validate(cfg);
    if (trim(pred_explanation).empty() || trim(gold_explanation).empty() ||
        trim(idiom).empty() || trim(literal_translation).empty())
        throw EmptyText("generate_hint requires nonempty inputs");

    const auto pred_words = distinct_in_order(content_words(pred_explanation));
    const auto gold_words = distinct_in_order(content_words(gold_explanation));
    const auto literal_words = distinct_in_order(content_words(literal_translation));

    const std::unordered_set<std::string_view> pred_set(pred_words.begin(),
                                                        pred_words.end());
    std::vector<std::string> missing;
    for (const auto& w : gold_words)
        if (!pred_set.count(w)) missing.push_back(w);

    std::size_t literal_overlap = 0;
    for (const auto& w : literal_words)
        if (pred_set.count(w)) ++literal_overlap;

    const double score = token_f1(pred_explanation, gold_explanation);
    const bool flagged = score < cfg.threshold;

    Hint hint;
    hint.gold_keywords = first_n(missing, 8);

    if (flagged && literal_overlap >= 2 && !missing.empty())
        hint.error_category = ErrorCategory::literal_overreach;
    else if (!missing.empty() && literal_overlap == 0)
        hint.error_category = ErrorCategory::missing_gist;
    else
        hint.error_category = ErrorCategory::partial;

    // Zero-discrepancy pairs get the no-op hint so build_prompt stays total.
    if (!flagged && missing.empty()) {
        hint.rendered = std::string(kNoOpHint);
        return hint;
    }

    if (hint.error_category == ErrorCategory::literal_overreach) {
        hint.avoid_summary = std::string(trim(literal_translation));
    } else {
        auto summary_words = first_n(pred_words, 8);
        hint.avoid_summary = summary_words.empty()
                                 ? std::string(trim(pred_explanation))
                                 : join(summary_words, " ");
    }

    // Flagged pairs with no missing words fall back to the leading gold
    // content words so the cue still names the gist.
    const auto cue_words =
        hint.gold_keywords.empty() ? first_n(gold_words, 8) : hint.gold_keywords;
    if (cue_words.empty()) {
        hint.rendered = std::string(kNoOpHint);
        return hint;
    }
    hint.rendered.append(kHintTemplatePrefix);
    hint.rendered.append(hint.avoid_summary);
    hint.rendered.append(kHintTemplateMiddle);
    hint.rendered.append(join(cue_words, ", "));
    hint.rendered.append(kHintTemplateSuffix);
    return hint;
}

std::string build_prompt(std::string_view idiom, const std::optional<Hint>& hint) {
    std::string prompt;
    prompt.append(kPromptIdiomPrefix);
    prompt.append(idiom);
    prompt.push_back('\n');
    if (hint) {
        prompt.append(kPromptHintPrefix);
        prompt.append(hint->rendered);
        prompt.push_back('\n');
    }
    prompt.append(kPromptInstruction);
    return prompt;
}

}  // namespace hide
