#include "pyfix/lexer.hpp"

#include <cctype>

#include "lexer_engine.hpp"

namespace pyfix {
namespace {

bool is_punctuation(const std::string& text) {
  if (text.size() != 1) return false;
  return std::string("()[]{},:;").find(text[0]) != std::string::npos;
}

TokenKind surface_kind(const lex::PTok& t) {
  switch (t.kind) {
    case lex::PK::Name:
    case lex::PK::Keyword:
      return TokenKind::Name;
    case lex::PK::Number:
      return TokenKind::Number;
    case lex::PK::String:
      return TokenKind::String;
    case lex::PK::Comment:
      return TokenKind::Comment;
    case lex::PK::ErrorTok:
      return TokenKind::Error;
    case lex::PK::Op:
    default:
      return is_punctuation(t.text) ? TokenKind::Punctuation : TokenKind::Operator;
  }
}

// Masks one string literal's content in place. Newlines and the
// backslashes escaping them survive so line structure and termination
// status are untouched.
void mask_plain(std::string& out, const std::string& src, size_t b, size_t e) {
  size_t i = b;
  while (i < e) {
    char c = src[i];
    if (c == '\\' && i + 1 < e) {
      char n = src[i + 1];
      if (n == '\n' || n == '\r') {
        i += 2;
        continue;
      }
      out[i] = 'x';
      out[i + 1] = 'x';
      i += 2;
      continue;
    }
    if (c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    out[i] = 'x';
    ++i;
  }
}

// Format strings: mask only literal text. Braces stay (so field structure
// and brace errors are preserved) and replacement fields are copied
// verbatim, including nested string literals.
void mask_format(std::string& out, const std::string& src, size_t b, size_t e) {
  size_t i = b;
  int depth = 0;
  while (i < e) {
    char c = src[i];
    if (depth == 0) {
      if (c == '{' && i + 1 < e && src[i + 1] == '{') {
        i += 2;
        continue;
      }
      if (c == '}' && i + 1 < e && src[i + 1] == '}') {
        i += 2;
        continue;
      }
      if (c == '{') {
        depth = 1;
        ++i;
        continue;
      }
      if (c == '}') {
        ++i;
        continue;
      }
      if (c == '\\' && i + 1 < e) {
        char n = src[i + 1];
        if (n == '\n' || n == '\r') {
          i += 2;
          continue;
        }
        out[i] = 'x';
        out[i + 1] = 'x';
        i += 2;
        continue;
      }
      if (c == '\n' || c == '\r') {
        ++i;
        continue;
      }
      out[i] = 'x';
      ++i;
      continue;
    }
    if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
    } else if (c == '\'' || c == '"') {
      char q = c;
      ++i;
      while (i < e) {
        if (src[i] == '\\' && i + 1 < e) {
          i += 2;
          continue;
        }
        if (src[i] == q) break;
        ++i;
      }
    }
    ++i;
  }
}

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Name: return "name";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Comment: return "comment";
    case TokenKind::Error: return "error";
  }
  return "error";
}

std::vector<std::string> TokenStream::values() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.value);
  return out;
}

TokenStream tokenize(const SourceProgram& p) { return tokenize(p.text, p.version); }

TokenStream tokenize(const std::string& text, PyVersion version) {
  lex::ScanResult scanned = lex::scan(text, version, /*tolerant=*/true);
  TokenStream out;
  out.tokens.reserve(scanned.tokens.size());
  for (const auto& t : scanned.tokens) {
    Token tok;
    tok.kind = surface_kind(t);
    tok.value = t.text;
    tok.line = t.line;
    tok.column = t.col;
    out.tokens.push_back(std::move(tok));
  }
  return out;
}

SourceProgram anonymize_string_literals(const SourceProgram& p) {
  lex::ScanResult scanned = lex::scan(p.text, p.version, /*tolerant=*/true);
  SourceProgram out = p;
  for (const auto& t : scanned.tokens) {
    if (!t.is_string) continue;
    if (t.str.fmt)
      mask_format(out.text, p.text, t.str.content_begin, t.str.content_end);
    else
      mask_plain(out.text, p.text, t.str.content_begin, t.str.content_end);
  }
  return out;
}

int count_words(const std::string& text) {
  auto is_space = [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  auto is_word = [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c >= 0x80;
  };
  int total = 0;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    int runs = 0;
    bool in_run = false;
    while (i < n && !is_space(text[i])) {
      if (is_word(text[i])) {
        if (!in_run) {
          ++runs;
          in_run = true;
        }
      } else {
        in_run = false;
      }
      ++i;
    }
    total += runs == 0 ? 1 : runs;
  }
  return total;
}

}  // namespace pyfix
