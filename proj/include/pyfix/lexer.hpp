#pragma once

#include <string>
#include <vector>

#include "pyfix/source_program.hpp"

namespace pyfix {

/// Lexical category of a surface token. Mirrors the classic lexer split:
/// identifiers/keywords are Name, brackets and separators Punctuation,
/// everything else symbolic Operator. Error covers malformed lexemes
/// (unterminated strings, stray characters) in tolerant mode.
enum class TokenKind { Name, Number, String, Operator, Punctuation, Comment, Error };

const char* token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string value;  // exact lexeme
  int line = 0;       // 1-based
  int column = 0;     // 1-based
};

/// Whitespace-free token sequence of a program. Concatenating values
/// restores the source minus whitespace and line structure.
struct TokenStream {
  std::vector<Token> tokens;

  std::vector<std::string> values() const;
  size_t size() const { return tokens.size(); }
};

/// Error-tolerant surface tokenization. Total: never throws, lexes any
/// byte string. Whitespace and newlines are dropped; comments kept.
TokenStream tokenize(const SourceProgram& p);
TokenStream tokenize(const std::string& text, PyVersion version);

/// Replace every string literal's content characters with 'x', keeping
/// prefixes, quotes, line structure and all other tokens intact. In
/// format strings only literal text is masked; replacement fields are
/// left untouched so parse status cannot change.
SourceProgram anonymize_string_literals(const SourceProgram& p);

/// Word count of explanation text: per whitespace-delimited chunk, the
/// number of word-character runs ([A-Za-z0-9_] plus non-ASCII); a chunk
/// with no word characters counts once.
int count_words(const std::string& text);

}  // namespace pyfix
