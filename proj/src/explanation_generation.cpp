#include "pyfix/explanation_generation.hpp"

#include <algorithm>

#include "pyfix/edit_distance.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/line_diff.hpp"
#include "pyfix/util.hpp"

namespace pyfix {

const char kShotDelimiter[] = "### Example";

namespace {

std::string error_type_of(const SourceProgram& p, const SyntaxChecker& checker) {
  SyntaxCheckResult r = checker.check(p);
  return r.ok ? std::string("None") : *r.error_type;
}

TokenStream diff_tokens_for(const SourceProgram& buggy, const SourceProgram& fixed) {
  return tokenize(render_line_diff(compute_line_diff(buggy, fixed)), buggy.version);
}

std::string with_final_newline(const std::string& text) {
  if (text.empty() || text.back() == '\n') return text;
  return text + "\n";
}

void append_block(std::string& out, const SourceProgram& program, const SourceProgram& fixed,
                  bool include_diff, const std::string* explanation) {
  out += kShotDelimiter;
  out += "\n\nCode:\n";
  out += with_final_newline(program.text);
  if (include_diff) {
    out += "Diff:\n";
    out += render_line_diff(compute_line_diff(program, fixed));
    out += "\n";
  }
  out += "The syntax error in this Python " + std::to_string(version_number(program.version)) +
         " code is:";
  if (explanation) {
    out += " " + *explanation + "\n\n";
  }
}

}  // namespace

AnnotatedExample annotate_example(SourceProgram buggy, SourceProgram fixed,
                                  std::string explanation, const SyntaxChecker& checker) {
  if (!checker.check(fixed).ok)
    throw ParseFailure("annotated example " + fixed.id + ": fixed program does not parse");
  if (trim(explanation).empty())
    throw EmptyExplanation("annotated example " + buggy.id + " has a blank explanation");
  AnnotatedExample ex;
  ex.error_type = error_type_of(buggy, checker);
  ex.diff_tokens = diff_tokens_for(buggy, fixed);
  ex.buggy = std::move(buggy);
  ex.fixed = std::move(fixed);
  ex.explanation = std::move(explanation);
  return ex;
}

std::vector<AnnotatedExample> select_few_shots(const SourceProgram& pb, const SourceProgram& pf,
                                               const std::vector<AnnotatedExample>& shots, int k,
                                               const SyntaxChecker& checker) {
  std::string want_type = error_type_of(pb, checker);
  TokenStream query_diff = diff_tokens_for(pb, pf);

  struct Ranked {
    int type_rank;
    int distance;
    const AnnotatedExample* example;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(shots.size());
  for (const AnnotatedExample& ex : shots) {
    Ranked r;
    r.type_rank = ex.error_type == want_type ? 0 : 1;
    r.distance = token_edit_distance(ex.diff_tokens, query_diff);
    r.example = &ex;
    ranked.push_back(r);
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.type_rank != b.type_rank) return a.type_rank < b.type_rank;
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.example->buggy.id < b.example->buggy.id;
  });

  std::vector<AnnotatedExample> out;
  for (const Ranked& r : ranked) {
    if (static_cast<int>(out.size()) == k) break;
    out.push_back(*r.example);
  }
  return out;
}

std::string build_explanation_prompt(const SourceProgram& pb, const SourceProgram& pf,
                                     const std::vector<AnnotatedExample>& shots,
                                     bool include_diff) {
  std::string out;
  // Selection order is best-first; the prompt wants the best shot adjacent
  // to the query block, so shots are emitted in reverse.
  for (auto it = shots.rbegin(); it != shots.rend(); ++it)
    append_block(out, it->buggy, it->fixed, include_diff, &it->explanation);
  append_block(out, pb, pf, include_diff, nullptr);
  return out;
}

std::string generate_explanation(const SourceProgram& pb, const SourceProgram& pf,
                                 const std::vector<AnnotatedExample>& shots,
                                 const ExplainConfig& cfg, LlmBackend& backend,
                                 bool include_diff) {
  CompletionRequest req;
  req.prompt = build_explanation_prompt(pb, pf, shots, include_diff);
  req.temperature = cfg.t2;
  req.n = cfg.n2;
  req.stop_sequences = {kShotDelimiter};
  GenerationBatch batch = backend.complete_generate(req);
  if (batch.outputs.empty())
    throw EmptyExplanation("backend returned no explanation sample");
  std::string text = trim(batch.outputs.front());
  if (text.empty()) throw EmptyExplanation("backend returned a blank explanation");
  return text;
}

}  // namespace pyfix
