#include "pyfix/fix_generation.hpp"

#include "pyfix/edit_distance.hpp"
#include "pyfix/lexer.hpp"

namespace pyfix {

std::string fix_instruction(PyVersion version) {
  return "Fix the syntax errors in this Python " + std::to_string(version_number(version)) +
         " code";
}

FixOutcome generate_fixed_program(const SourceProgram& pb, const FixConfig& cfg,
                                  LlmBackend& backend, const SyntaxChecker& checker) {
  FixOutcome outcome;
  if (checker.check(pb).ok) {
    outcome.input_already_valid = true;
    outcome.fixed = pb;
    outcome.candidates_valid = 1;
    outcome.chosen_distance = 0;
    return outcome;
  }

  EditRequest req;
  req.input = pb.text;
  req.instruction = fix_instruction(pb.version);
  req.temperature = cfg.t1;
  req.n = cfg.n1;
  GenerationBatch batch = backend.edit_generate(req);

  TokenStream base = tokenize(pb.text, pb.version);
  outcome.candidates_total = static_cast<int>(batch.outputs.size());
  for (const std::string& text : batch.outputs) {
    SourceProgram candidate;
    candidate.id = pb.id;
    candidate.text = text;
    candidate.version = pb.version;
    if (!checker.check(candidate).ok) continue;
    ++outcome.candidates_valid;
    int distance = token_edit_distance(base, tokenize(text, pb.version));
    // Strict < keeps the earliest-returned candidate on ties.
    if (!outcome.chosen_distance || distance < *outcome.chosen_distance) {
      outcome.chosen_distance = distance;
      outcome.fixed = std::move(candidate);
    }
  }
  return outcome;
}

}  // namespace pyfix
