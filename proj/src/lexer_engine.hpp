#pragma once

// Internal scanning layer shared by the surface tokenizer, the anonymizer
// and the syntax parser. Not installed.

#include <optional>
#include <string>
#include <vector>

#include "pyfix/source_program.hpp"

namespace pyfix::lex {

enum class PK {
  Name,
  Keyword,
  Number,
  String,
  Op,       // operators and punctuation alike; `text` holds the exact lexeme
  Comment,  // tolerant mode only
  ErrorTok, // tolerant mode only
  Newline,  // strict mode only: end of a logical line
  Indent,   // strict mode only
  Dedent,   // strict mode only
  End,
};

struct StringInfo {
  bool raw = false;
  bool bytes = false;
  bool fmt = false;
  bool triple = false;
  char quote = '\'';
  bool unterminated = false;
  // Byte offsets of the content region (between the quotes) in the source.
  size_t content_begin = 0;
  size_t content_end = 0;
};

struct PTok {
  PK kind = PK::End;
  std::string text;  // exact lexeme; empty for structural tokens
  int line = 1;
  int col = 1;
  size_t begin = 0;  // byte offsets of the lexeme
  size_t end = 0;
  StringInfo str;          // valid when the token is a string literal
  bool is_string = false;  // set for String and for ErrorTok born from a string
  bool num_invalid = false;
};

struct LexError {
  std::string py_class;  // "SyntaxError" | "IndentationError" | "TabError"
  std::string message;
  int line = 1;
};

struct ScanResult {
  std::vector<PTok> tokens;
  std::optional<LexError> error;  // strict mode: first structural error
};

/// Scan `text`. Tolerant mode never sets `error`, keeps comments and
/// error tokens, and emits no structural tokens. Strict mode produces the
/// parser stream (Newline/Indent/Dedent/End, keywords classified) and
/// stops at the first structural error.
ScanResult scan(const std::string& text, PyVersion version, bool tolerant);

bool is_py_keyword(const std::string& word, PyVersion version);

}  // namespace pyfix::lex
