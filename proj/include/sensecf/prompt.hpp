#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sensecf/baselines.hpp"
#include "sensecf/cf.hpp"

namespace sensecf {

struct Exemplar {
  Instance factual;
  Instance counterfactual;
};

inline constexpr const char* kInstanceMarker = "Input instance (JSON):";
inline constexpr const char* kFlipRetryNote = "Note: the previous attempt did not flip the prediction.";
inline constexpr const char* kParseRetryNote =
    "Note: the previous response could not be parsed; reply with exactly one JSON object.";
inline constexpr const char* kImmutableRetryNote =
    "Note: the previous response altered an immutable feature; leave immutable features unchanged.";

inline std::string default_prompt_template() {
  return "You are assisting with counterfactual analysis of tabular records.\n"
         "\n"
         "{{instance_marker}}\n"
         "{{instance}}\n"
         "\n"
         "The model currently predicts class {{prediction}} for this instance.\n"
         "Produce a modified instance for which the prediction becomes class {{desired}}.\n"
         "\n"
         "Rules:\n"
         "- Minimally alter feature values: change as few features as possible, each by as little as possible.\n"
         "- Do not alter these immutable features: {{immutables}}.\n"
         "- Keep every value realistic and within plausible ranges for this kind of data.\n"
         "{{exemplars}}"
         "{{format}}\n";
}

inline std::string default_format_instruction() {
  return "Respond with a single JSON object containing every feature listed above and no other text.";
}

/// Prompt construction recipe: template with {{...}} placeholders, demo pair
/// count, fixed exemplars (optional; when empty and shots > 0 the generator
/// derives nearest-unlike-neighbor demonstrations from the exemplar pool).
struct PromptSpec {
  std::string template_text = default_prompt_template();
  int shots = 3;
  std::vector<Exemplar> exemplars;  // hand-authored override; size must equal shots when non-empty
  std::string format_instruction = default_format_instruction();
};

namespace detail {

inline void replace_all(std::string& text, const std::string& placeholder, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

inline void require_placeholder(const std::string& text, const std::string& placeholder) {
  if (text.find(placeholder) == std::string::npos)
    fail(ErrorCode::MissingPlaceholder, "prompt template lacks " + placeholder);
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Renders the full instruction prompt for one factual instance. Pure:
/// identical inputs produce identical text.
inline std::string build_prompt(const Instance& x, const Prediction& prediction, const FeatureSchema& schema,
                                const PromptSpec& spec, const std::vector<Exemplar>& exemplars) {
  check_arity(schema, x);
  if (!spec.exemplars.empty() && static_cast<int>(spec.exemplars.size()) != spec.shots)
    fail(ErrorCode::Config, "fixed exemplar count does not match shot count");

  std::string text = spec.template_text;
  for (const char* placeholder :
       {"{{instance_marker}}", "{{instance}}", "{{prediction}}", "{{desired}}", "{{immutables}}", "{{exemplars}}",
        "{{format}}"})
    detail::require_placeholder(text, placeholder);

  const auto immutables = schema.immutable_names();
  std::string exemplar_block;
  if (!exemplars.empty()) {
    exemplar_block += "\nExamples of valid modifications (original -> modified):\n";
    for (const auto& ex : exemplars) {
      exemplar_block += instance_to_json(ex.factual, schema).dump();
      exemplar_block += " -> ";
      exemplar_block += instance_to_json(ex.counterfactual, schema).dump();
      exemplar_block += "\n";
    }
    exemplar_block += "\n";
  }

  detail::replace_all(text, "{{instance_marker}}", kInstanceMarker);
  detail::replace_all(text, "{{instance}}", instance_to_json(x, schema).dump());
  detail::replace_all(text, "{{prediction}}", schema.label_token(prediction.label));
  detail::replace_all(text, "{{desired}}", schema.label_token(1 - prediction.label));
  detail::replace_all(text, "{{immutables}}",
                      immutables.empty() ? std::string("(none)") : detail::join(immutables, ", "));
  detail::replace_all(text, "{{exemplars}}", exemplar_block);
  detail::replace_all(text, "{{format}}", spec.format_instruction);
  return text;
}

inline std::string build_prompt(const Instance& x, const Prediction& prediction, const FeatureSchema& schema,
                                const PromptSpec& spec) {
  return build_prompt(x, prediction, schema, spec, spec.exemplars);
}

/// Default few-shot demonstrations for one factual: the k nearest training
/// instances sharing the factual's predicted class, each paired with its own
/// nearest unlike neighbor (a guaranteed label-flipping modification).
inline std::vector<Exemplar> choose_exemplars(const Instance& x, int factual_label, const TrainedModel& model,
                                              const Dataset& pool, const Bounds& bounds, int shots) {
  std::vector<Exemplar> out;
  if (shots <= 0) return out;
  std::vector<std::pair<double, std::size_t>> same_class;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (model.predict(pool.rows[r]).label != factual_label) continue;
    if (pool.rows[r] == x) continue;
    same_class.emplace_back(distance(x, pool.rows[r], pool.schema, bounds), r);
  }
  std::sort(same_class.begin(), same_class.end());
  for (const auto& [d, r] : same_class) {
    if (static_cast<int>(out.size()) == shots) break;
    Exemplar ex;
    ex.factual = pool.rows[r];
    try {
      ex.counterfactual = nearest_unlike_neighbor(pool.rows[r], model, pool, bounds).second;
    } catch (const Error&) {
      break;  // no unlike neighbors at all; zero-shot fallback
    }
    // Demonstrations must respect the immutable constraint too.
    for (std::size_t i = 0; i < pool.schema.predictor_count(); ++i)
      if (!pool.schema.predictor(i).is_mutable) ex.counterfactual.values[i] = ex.factual.values[i];
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace sensecf
