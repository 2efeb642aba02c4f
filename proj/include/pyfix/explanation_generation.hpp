#pragma once

#include <string>
#include <vector>

#include "pyfix/backend.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"

namespace pyfix {

// A shot-set entry: a buggy program, its repaired form, and the explanation
// a teacher wrote for it, plus derived fields used for selection.
struct AnnotatedExample {
  SourceProgram buggy;
  SourceProgram fixed;
  std::string explanation;
  std::string error_type;   // taxonomy type of the buggy program
  TokenStream diff_tokens;  // tokenized rendering of the buggy→fixed diff
};

struct ExplainConfig {
  double t2 = 0.0;
  int n2 = 1;
  int k_shots = 3;
};

// Delimiter between prompt blocks; doubles as the completion stop sequence.
extern const char kShotDelimiter[];

// Fills in the derived fields and validates the pair: the fixed side must
// parse, the explanation must be non-blank.
AnnotatedExample annotate_example(SourceProgram buggy, SourceProgram fixed,
                                  std::string explanation,
                                  const SyntaxChecker& checker = default_syntax_checker());

// Ranks the shot set for (pb, pf): examples sharing pb's error type first,
// then ascending distance between the example's diff and the pb→pf diff,
// then example id; returns the best k (fewer when the set is small).
std::vector<AnnotatedExample> select_few_shots(const SourceProgram& pb, const SourceProgram& pf,
                                               const std::vector<AnnotatedExample>& shots, int k,
                                               const SyntaxChecker& checker = default_syntax_checker());

// Renders the frozen few-shot prompt. Shots appear least-similar first so
// the strongest example sits next to the query block; the query block stops
// at the instruction line for the model to complete. include_diff=false
// builds the buggy-program-only variant used by the parallel technique.
std::string build_explanation_prompt(const SourceProgram& pb, const SourceProgram& pf,
                                     const std::vector<AnnotatedExample>& shots,
                                     bool include_diff = true);

// One completion call at (t2, n2) with the block delimiter as stop; returns
// the trimmed explanation. Whitespace-only output raises EmptyExplanation.
std::string generate_explanation(const SourceProgram& pb, const SourceProgram& pf,
                                 const std::vector<AnnotatedExample>& shots,
                                 const ExplainConfig& cfg, LlmBackend& backend,
                                 bool include_diff = true);

}  // namespace pyfix
