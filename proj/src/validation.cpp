#include "pyfix/validation.hpp"

#include "pyfix/errors.hpp"
#include "pyfix/util.hpp"

namespace pyfix {

std::string build_validation_instruction(PyVersion version, const std::string& x) {
  return "The syntax error in this Python " + std::to_string(version_number(version)) +
         " code is: " + trim(x);
}

bool accepted_at(const ValidationDecision& decision, int h3) {
  return decision.match_count >= h3;
}

ValidationDecision validate_feedback(const SourceProgram& pb, const SourceProgram& pf,
                                     const std::string& x, const ValidationParams& params,
                                     LlmBackend& backend, const SyntaxChecker& checker) {
  EditRequest req;
  req.input = pb.text;
  req.instruction = build_validation_instruction(pb.version, x);
  req.temperature = params.t3;
  req.n = params.n3;
  GenerationBatch batch = backend.edit_generate(req);

  ValidationDecision decision;
  for (const std::string& text : batch.outputs) {
    ValidationSample sample;
    sample.output = text;
    SourceProgram attempt;
    attempt.id = pb.id;
    attempt.text = text;
    attempt.version = pb.version;
    sample.parsed = checker.check(attempt).ok;
    if (sample.parsed) {
      try {
        sample.matched = ast_equal(attempt, pf);
      } catch (const ParseFailure&) {
        // Oracle and structural parser can disagree on edge cases; an
        // uncomparable sample is simply not a match.
        sample.matched = false;
      }
    }
    if (sample.matched) ++decision.match_count;
    decision.samples.push_back(std::move(sample));
  }
  decision.accepted = accepted_at(decision, params.h3);
  return decision;
}

}  // namespace pyfix
