#pragma once

#include <string>
#include <vector>

#include "pyfix/backend.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"

namespace pyfix {

struct ValidationParams {
  double t3 = 0.5;
  int n3 = 10;
  int h3 = 1;  // accept when at least h3 of the n3 samples match
};

struct ValidationSample {
  std::string output;
  bool parsed = false;
  bool matched = false;  // parsed and structurally equal to the fixed program
};

struct ValidationDecision {
  int match_count = 0;
  bool accepted = false;
  std::vector<ValidationSample> samples;
};

// "The syntax error in this Python {2|3} code is: " + trimmed explanation.
std::string build_validation_instruction(PyVersion version, const std::string& x);

// Simulated-student check: asks the edit model to repair pb guided only by
// the explanation, then counts samples that parse and are AST-equal to pf.
// Samples that fail (or fail to arrive) count against the threshold.
ValidationDecision validate_feedback(const SourceProgram& pb, const SourceProgram& pf,
                                     const std::string& x, const ValidationParams& params,
                                     LlmBackend& backend,
                                     const SyntaxChecker& checker = default_syntax_checker());

// Rescores an already-sampled decision against a different threshold.
bool accepted_at(const ValidationDecision& decision, int h3);

}  // namespace pyfix
