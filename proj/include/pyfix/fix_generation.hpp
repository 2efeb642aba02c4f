#pragma once

#include <optional>
#include <string>

#include "pyfix/backend.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"

namespace pyfix {

struct FixConfig {
  double t1 = 0.5;
  int n1 = 10;
};

struct FixOutcome {
  std::optional<SourceProgram> fixed;
  int candidates_total = 0;
  int candidates_valid = 0;
  std::optional<int> chosen_distance;
  // Set when the input already parsed; the input is then returned unchanged.
  bool input_already_valid = false;
};

// The instruction sent to the edit model, with the version number filled in.
std::string fix_instruction(PyVersion version);

// Asks the edit model for n1 candidate repairs of pb, keeps the ones that
// parse, and returns the parseable candidate closest to pb in token edit
// distance (earliest-returned wins ties). fixed is absent when no candidate
// parses.
FixOutcome generate_fixed_program(const SourceProgram& pb, const FixConfig& cfg,
                                  LlmBackend& backend,
                                  const SyntaxChecker& checker = default_syntax_checker());

}  // namespace pyfix
