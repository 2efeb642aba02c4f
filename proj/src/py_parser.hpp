#pragma once

// Internal recursive-descent parser producing the normalized tree.
// Covers the Python 3 statement/expression grammar (minus match
// statements) plus a Python 2 mode: print/exec statements, backtick
// repr, tuple parameters, legacy raise/except forms, octal literals.

#include <optional>
#include <string>

#include "py_ast.hpp"
#include "pyfix/source_program.hpp"

namespace pyfix::parse {

struct ParseErr {
  std::string py_class;  // "SyntaxError" | "IndentationError" | "TabError"
  std::string message;
  int line = 1;
};

struct ParseOutcome {
  ast::NodePtr module;  // set iff error is absent
  std::optional<ParseErr> error;
};

ParseOutcome parse_module(const std::string& text, PyVersion version);

}  // namespace pyfix::parse
