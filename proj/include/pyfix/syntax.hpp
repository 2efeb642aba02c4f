#pragma once

#include <memory>
#include <optional>
#include <string>

#include "pyfix/source_program.hpp"

namespace pyfix {

struct SyntaxCheckResult {
  bool ok = false;
  std::optional<std::string> error_type;  // normalized taxonomy name
  std::optional<int> line;                // 1-based
  std::optional<std::string> message;     // full oracle message
};

/// Maps an oracle's exception class and message onto the fixed error
/// taxonomy: InvalidSyntax, UnexpectedIndent, UnexpectedDedent, TabError
/// or Other. Both oracle backends route through this one table.
std::string normalize_error_type(const std::string& py_class, const std::string& message);

enum class OracleBackend { Embedded, Interpreter };

struct SyntaxOracleConfig {
  OracleBackend backend = OracleBackend::Embedded;
  std::string py2_interpreter;  // executable, interpreter backend only
  std::string py3_interpreter;
  int pool_size = 4;  // max concurrent checker subprocesses
};

/// Syntax oracle front end. The embedded backend parses in-process; the
/// interpreter backend compiles via a configured Python executable, with
/// access bounded by an internal worker pool. Thread-safe.
class SyntaxChecker {
 public:
  SyntaxChecker();
  explicit SyntaxChecker(SyntaxOracleConfig cfg);

  /// Never throws for parse failures; throws OracleUnavailable when the
  /// configured backend cannot run at all.
  SyntaxCheckResult check(const SourceProgram& p) const;

  const SyntaxOracleConfig& config() const { return cfg_; }

 private:
  SyntaxOracleConfig cfg_;
  struct Pool;
  std::shared_ptr<Pool> pool_;
};

/// Convenience: embedded-backend check.
SyntaxCheckResult check_syntax(const SourceProgram& p);

/// Shared embedded-backend instance, for call sites that take a checker
/// but were not handed a configured one.
const SyntaxChecker& default_syntax_checker();

/// Canonical serialized syntax tree; position, whitespace and comment
/// free. Throws ParseFailure if the program does not parse.
std::string normalized_ast(const SourceProgram& p);

/// True iff both programs have identical normalized trees. Throws
/// ParseFailure if either side does not parse.
bool ast_equal(const SourceProgram& a, const SourceProgram& b);

}  // namespace pyfix
