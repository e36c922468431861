#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hide/encoder.hpp"
#include "hide/errors.hpp"

namespace hide {

enum class ErrorCategory { literal_overreach, missing_gist, partial };

std::string_view to_string(ErrorCategory c);
ErrorCategory error_category_from_string(std::string_view s);

// Corrective cue distilled from a (predicted, gold) explanation pair.
// gold_keywords holds content words of the gold explanation absent from
// the prediction, in gold order, capped at eight.
struct Hint {
    ErrorCategory error_category = ErrorCategory::partial;
    std::string avoid_summary;
    std::vector<std::string> gold_keywords;
    std::string rendered;

    bool operator==(const Hint&) const = default;
};

enum class ScoreKind { token_f1, embedding_cosine };

std::string_view to_string(ScoreKind k);
ScoreKind score_kind_from_string(std::string_view s);

struct DiscriminatorConfig {
    double threshold = 0.5;  // tau in [0,1]
    ScoreKind score_kind = ScoreKind::token_f1;
};

// Multiset token overlap F1 between the normalized texts; the substrate
// of the token_f1 discriminator.
double token_f1(std::string_view a, std::string_view b);

// Compares a predicted explanation with the gold one. flag is true when
// score < threshold (score == threshold passes). embedding_cosine needs
// an encoder; token_f1 ignores it.
struct ErrorJudgement {
    bool flag = false;
    double score = 0.0;
};
ErrorJudgement is_error(std::string_view pred_explanation,
                        std::string_view gold_explanation,
                        const DiscriminatorConfig& cfg,
                        const Encoder* encoder = nullptr);

// Hint template constants. Reports depend on byte-stable prompts, so
// these strings are frozen and covered by golden tests.
inline constexpr std::string_view kHintTemplatePrefix =
    "Avoid reading the idiom literally as: ";
inline constexpr std::string_view kHintTemplateMiddle =
    ". The intended figurative meaning involves: ";
inline constexpr std::string_view kHintTemplateSuffix = ".";
inline constexpr std::string_view kNoOpHint =
    "Previous interpretation was acceptable; preserve the figurative meaning.";

// Rule-based discriminator hint. Category decision, on the content-word
// level:
//   - literal_overreach: prediction shares >= 2 content words with the
//     literal translation, scores below tau against the gold, and at
//     least one gold content word is missing from the prediction;
//   - missing_gist: missing gold content words exist and the prediction
//     shares no content word with the literal translation;
//   - partial: everything else, including the no-discrepancy case.
// avoid_summary is the literal translation for literal_overreach and the
// first eight content words of the prediction otherwise. Deterministic
// for fixed inputs.
Hint generate_hint(std::string_view pred_explanation,
                   std::string_view gold_explanation, std::string_view idiom,
                   std::string_view literal_translation,
                   const DiscriminatorConfig& cfg = {});

// Prompt templates realizing x || h.
inline constexpr std::string_view kPromptIdiomPrefix = "Idiom: ";
inline constexpr std::string_view kPromptHintPrefix =
    "Hint from a similar past mistake: ";
inline constexpr std::string_view kPromptInstruction =
    "Provide the literal English translation, then the figurative explanation.";

std::string build_prompt(std::string_view idiom,
                         const std::optional<Hint>& hint = std::nullopt);

}  // namespace hide
