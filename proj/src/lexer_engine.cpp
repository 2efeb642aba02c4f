#include "lexer_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace pyfix::lex {
namespace {

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool ident_cont(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

const char* kKw3[] = {
    "False", "None",   "True",   "and",    "as",     "assert", "async", "await",
    "break", "class",  "continue", "def",  "del",    "elif",   "else",  "except",
    "finally", "for",  "from",   "global", "if",     "import", "in",    "is",
    "lambda", "nonlocal", "not",  "or",    "pass",   "raise",  "return", "try",
    "while", "with",   "yield"};

const char* kKw2[] = {
    "None",  "and",   "as",     "assert", "break",  "class",  "continue", "def",
    "del",   "elif",  "else",   "except", "exec",   "finally", "for",  "from",
    "global", "if",   "import", "in",     "is",     "lambda", "not",   "or",
    "pass",  "print", "raise",  "return", "try",    "while",  "with",  "yield"};

// Multi-character operators, longest first within each leading character.
const char* kOps[] = {
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "**", "//",
    "<<", ">>", "<>"};

bool valid_string_prefix(const std::string& prefix, PyVersion version) {
  std::string low;
  for (char c : prefix) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (version == PyVersion::Py3) {
    static const char* ok[] = {"r", "b", "u", "f", "br", "rb", "fr", "rf"};
    for (const char* s : ok)
      if (low == s) return true;
    return false;
  }
  static const char* ok2[] = {"r", "b", "u", "ur", "br"};
  for (const char* s : ok2)
    if (low == s) return true;
  return false;
}

class Scanner {
 public:
  Scanner(const std::string& src, PyVersion version, bool tolerant)
      : src_(src), version_(version), tolerant_(tolerant) {}

  ScanResult run() {
    // A UTF-8 byte order mark is ignored.
    if (src_.size() >= 3 && static_cast<unsigned char>(src_[0]) == 0xEF &&
        static_cast<unsigned char>(src_[1]) == 0xBB && static_cast<unsigned char>(src_[2]) == 0xBF)
      pos_ = 3;
    while (!failed_) {
      if (at_line_start_) {
        at_line_start_ = false;
        if (brackets_.empty() && !joined_) {
          handle_indentation();
          if (failed_) break;
        }
        joined_ = false;
      }
      if (pos_ >= src_.size()) break;
      scan_token();
    }
    finish();
    return std::move(result_);
  }

 private:
  const std::string& src_;
  PyVersion version_;
  bool tolerant_;
  ScanResult result_;
  size_t pos_ = 0;
  int line_ = 1;
  size_t line_begin_ = 0;
  bool at_line_start_ = true;
  bool joined_ = false;  // previous physical line ended with a backslash
  bool line_has_tokens_ = false;
  bool failed_ = false;
  std::vector<std::pair<int, int>> indents_{{0, 0}};  // (column, alt column)
  struct Bracket {
    char open;
    int line;
  };
  std::vector<Bracket> brackets_;

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char peek(size_t k = 1) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  bool at_end() const { return pos_ >= src_.size(); }
  int column() const { return static_cast<int>(pos_ - line_begin_) + 1; }

  void newline_seen() {
    // Consumes "\n", "\r\n" or "\r" and updates line bookkeeping.
    if (cur() == '\r' && peek() == '\n') pos_ += 2;
    else ++pos_;
    ++line_;
    line_begin_ = pos_;
    at_line_start_ = true;
  }

  void fail(const std::string& py_class, const std::string& message, int line) {
    if (tolerant_) return;  // callers emit an error token instead
    if (!result_.error) result_.error = LexError{py_class, message, line};
    failed_ = true;
  }

  void emit(PK kind, size_t begin, int line, int col) {
    PTok t;
    t.kind = kind;
    t.text = src_.substr(begin, pos_ - begin);
    t.line = line;
    t.col = col;
    t.begin = begin;
    t.end = pos_;
    if (kind != PK::Comment) line_has_tokens_ = true;
    result_.tokens.push_back(std::move(t));
  }

  void emit_structural(PK kind) {
    if (tolerant_) return;
    PTok t;
    t.kind = kind;
    t.line = line_;
    t.col = column();
    t.begin = t.end = pos_;
    result_.tokens.push_back(std::move(t));
  }

  void handle_indentation() {
    if (tolerant_) return;
    int col = 0, alt = 0;
    while (true) {
      char c = cur();
      if (c == ' ') {
        ++col;
        ++alt;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
        ++alt;
      } else if (c == '\f') {
        col = 0;
        alt = 0;
      } else {
        break;
      }
      ++pos_;
    }
    char c = cur();
    if (at_end() || c == '#' || c == '\n' || c == '\r') return;  // blank line
    auto [tcol, talt] = indents_.back();
    if (col == tcol) {
      if (alt != talt)
        fail("TabError", "inconsistent use of tabs and spaces in indentation", line_);
    } else if (col > tcol) {
      if (alt <= talt) {
        fail("TabError", "inconsistent use of tabs and spaces in indentation", line_);
        return;
      }
      indents_.push_back({col, alt});
      emit_structural(PK::Indent);
    } else {
      while (indents_.size() > 1 && col < indents_.back().first) {
        indents_.pop_back();
        emit_structural(PK::Dedent);
      }
      if (col != indents_.back().first)
        fail("IndentationError", "unindent does not match any outer indentation level", line_);
      else if (alt != indents_.back().second)
        fail("TabError", "inconsistent use of tabs and spaces in indentation", line_);
    }
  }

  void scan_token() {
    char c = cur();
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '\n' || c == '\r') {
      bool logical = brackets_.empty() && line_has_tokens_;
      newline_seen();
      if (logical) {
        emit_structural(PK::Newline);
        line_has_tokens_ = false;
      }
      return;
    }
    if (c == '#') {
      size_t begin = pos_;
      int line = line_, col = column();
      while (!at_end() && cur() != '\n' && cur() != '\r') ++pos_;
      if (tolerant_) emit(PK::Comment, begin, line, col);
      return;
    }
    if (c == '\\') {
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
        newline_seen();
        at_line_start_ = false;  // continuation line: keep the logical line open
        joined_ = false;
        return;
      }
      size_t begin = pos_;
      int line = line_, col = column();
      ++pos_;
      if (at_end())
        fail("SyntaxError", "unexpected EOF while parsing", line);
      else
        fail("SyntaxError", "unexpected character after line continuation character", line);
      if (tolerant_) emit(PK::ErrorTok, begin, line, col);
      return;
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      scan_name();
      return;
    }
    if (is_digit(static_cast<unsigned char>(c)) ||
        (c == '.' && is_digit(static_cast<unsigned char>(peek())))) {
      scan_number();
      return;
    }
    if (c == '\'' || c == '"') {
      scan_string(pos_, 0);
      return;
    }
    if (c == '`') {
      size_t begin = pos_;
      int line = line_, col = column();
      ++pos_;
      if (version_ == PyVersion::Py2) {
        emit(PK::Op, begin, line, col);
        return;
      }
      fail("SyntaxError", "invalid character '`'", line);
      if (tolerant_) emit(PK::ErrorTok, begin, line, col);
      return;
    }
    scan_operator();
  }

  void scan_name() {
    size_t begin = pos_;
    int line = line_, col = column();
    while (!at_end() && ident_cont(static_cast<unsigned char>(cur()))) ++pos_;
    std::string word = src_.substr(begin, pos_ - begin);
    if ((cur() == '\'' || cur() == '"') && valid_string_prefix(word, version_)) {
      scan_string(begin, pos_ - begin);
      return;
    }
    if (!tolerant_ && is_py_keyword(word, version_)) {
      emit(PK::Keyword, begin, line, col);
      return;
    }
    emit(PK::Name, begin, line, col);
  }

  void scan_number() {
    size_t begin = pos_;
    int line = line_, col = column();
    bool invalid = false;
    bool is_int = true;
    auto digits = [&](auto pred) {
      // Digit run with underscores between digits; returns digit count.
      int count = 0;
      bool last_us = false;
      while (!at_end()) {
        char c = cur();
        if (pred(c)) {
          ++count;
          last_us = false;
          ++pos_;
        } else if (c == '_' && version_ == PyVersion::Py3) {
          if (last_us) invalid = true;
          last_us = true;
          ++pos_;
        } else {
          break;
        }
      }
      if (last_us) invalid = true;
      return count;
    };
    auto dec = [](char c) { return c >= '0' && c <= '9'; };

    if (cur() == '0' && (peek() == 'x' || peek() == 'X')) {
      pos_ += 2;
      if (digits([](char c) {
            return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
          }) == 0)
        invalid = true;
    } else if (cur() == '0' && (peek() == 'o' || peek() == 'O')) {
      pos_ += 2;
      if (digits([](char c) { return c >= '0' && c <= '7'; }) == 0) invalid = true;
    } else if (cur() == '0' && (peek() == 'b' || peek() == 'B')) {
      pos_ += 2;
      if (digits([](char c) { return c == '0' || c == '1'; }) == 0) invalid = true;
    } else {
      bool octal2 = version_ == PyVersion::Py2 && cur() == '0';
      size_t int_begin = pos_;
      digits(dec);
      std::string intpart = src_.substr(int_begin, pos_ - int_begin);
      if (cur() == '.') {
        is_int = false;
        ++pos_;
        digits(dec);
      }
      if (cur() == 'e' || cur() == 'E') {
        // Only an exponent if followed by a digit or a signed digit.
        char s = peek();
        if (is_digit(static_cast<unsigned char>(s)) ||
            ((s == '+' || s == '-') && is_digit(static_cast<unsigned char>(peek(2))))) {
          is_int = false;
          ++pos_;
          if (cur() == '+' || cur() == '-') ++pos_;
          digits(dec);
        }
      }
      bool imag = false;
      if (cur() == 'j' || cur() == 'J') {
        imag = true;
        is_int = false;
        ++pos_;
      }
      if (is_int && version_ == PyVersion::Py2 && (cur() == 'l' || cur() == 'L')) ++pos_;
      if (is_int && !imag) {
        if (octal2) {
          for (char d : intpart)
            if (d == '8' || d == '9') invalid = true;
        } else if (version_ == PyVersion::Py3 && intpart.size() > 1 && intpart[0] == '0') {
          bool nonzero = false;
          for (char d : intpart)
            if (d != '0' && d != '_') nonzero = true;
          if (nonzero) invalid = true;
        }
      }
    }
    if (version_ == PyVersion::Py3 && !at_end() &&
        ident_start(static_cast<unsigned char>(cur())))
      invalid = true;
    if (invalid && !tolerant_) {
      fail("SyntaxError", "invalid decimal literal", line);
      return;
    }
    emit(PK::Number, begin, line, col);
    result_.tokens.back().num_invalid = invalid;
  }

  void scan_string(size_t begin, size_t prefix_len) {
    int line = line_, col = static_cast<int>(begin - line_begin_) + 1;
    std::string prefix = src_.substr(begin, prefix_len);
    StringInfo info;
    for (char pc : prefix) {
      switch (std::tolower(static_cast<unsigned char>(pc))) {
        case 'r': info.raw = true; break;
        case 'b': info.bytes = true; break;
        case 'f': info.fmt = true; break;
        default: break;
      }
    }
    char q = cur();
    info.quote = q;
    ++pos_;
    if (cur() == q && peek() == q) {
      info.triple = true;
      pos_ += 2;
    }
    info.content_begin = pos_;

    auto unterminated = [&](int detect_line) {
      info.unterminated = true;
      info.content_end = pos_;
      std::string what = info.triple ? "unterminated triple-quoted string literal"
                                     : "unterminated string literal";
      fail("SyntaxError",
           what + " (detected at line " + std::to_string(detect_line) + ")", line);
      if (tolerant_) {
        emit(PK::ErrorTok, begin, line, col);
        result_.tokens.back().is_string = true;
        result_.tokens.back().str = info;
      }
    };

    while (true) {
      if (at_end()) {
        unterminated(line_);
        return;
      }
      char c = cur();
      if (c == '\\' && !at_end()) {
        ++pos_;
        if (at_end()) {
          unterminated(line_);
          return;
        }
        if (cur() == '\n' || cur() == '\r') {
          size_t keep = pos_;
          newline_seen();
          at_line_start_ = false;
          (void)keep;
        } else {
          ++pos_;
        }
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!info.triple) {
          unterminated(line_);
          return;
        }
        newline_seen();
        at_line_start_ = false;
        continue;
      }
      if (c == q) {
        if (!info.triple) {
          info.content_end = pos_;
          ++pos_;
          break;
        }
        if (peek() == q && peek(2) == q) {
          info.content_end = pos_;
          pos_ += 3;
          break;
        }
        ++pos_;
        continue;
      }
      ++pos_;
    }
    emit(PK::String, begin, line, col);
    result_.tokens.back().is_string = true;
    result_.tokens.back().str = info;
  }

  void scan_operator() {
    size_t begin = pos_;
    int line = line_, col = column();
    char c = cur();
    for (const char* op : kOps) {
      size_t n = std::char_traits<char>::length(op);
      if (src_.compare(pos_, n, op) == 0) {
        if (std::string(op) == "<>" && version_ != PyVersion::Py2) continue;
        if (std::string(op) == ":=" && version_ != PyVersion::Py3) continue;
        pos_ += n;
        emit(PK::Op, begin, line, col);
        return;
      }
    }
    static const std::string singles = "+-*/%@&|^~<>=.,:;()[]{}";
    if (singles.find(c) != std::string::npos) {
      if (c == '(' || c == '[' || c == '{') {
        brackets_.push_back({c, line_});
      } else if (c == ')' || c == ']' || c == '}') {
        char want = c == ')' ? '(' : c == ']' ? '[' : '{';
        if (brackets_.empty()) {
          if (!tolerant_) {
            fail("SyntaxError", std::string("unmatched '") + c + "'", line_);
            return;
          }
        } else if (brackets_.back().open != want) {
          if (!tolerant_) {
            fail("SyntaxError",
                 std::string("closing parenthesis '") + c +
                     "' does not match opening parenthesis '" + brackets_.back().open + "'",
                 line_);
            return;
          }
          brackets_.pop_back();
        } else {
          brackets_.pop_back();
        }
      }
      ++pos_;
      emit(PK::Op, begin, line, col);
      return;
    }
    ++pos_;
    fail("SyntaxError", std::string("invalid character '") + c + "'", line);
    if (tolerant_) emit(PK::ErrorTok, begin, line, col);
  }

  void finish() {
    if (tolerant_) return;
    if (failed_) return;
    if (!brackets_.empty()) {
      fail("SyntaxError",
           std::string("'") + brackets_.back().open + "' was never closed",
           brackets_.back().line);
      return;
    }
    if (line_has_tokens_) emit_structural(PK::Newline);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit_structural(PK::Dedent);
    }
    emit_structural(PK::End);
  }
};

}  // namespace

bool is_py_keyword(const std::string& word, PyVersion version) {
  if (version == PyVersion::Py3) {
    for (const char* k : kKw3)
      if (word == k) return true;
    return false;
  }
  for (const char* k : kKw2)
    if (word == k) return true;
  return false;
}

ScanResult scan(const std::string& text, PyVersion version, bool tolerant) {
  return Scanner(text, version, tolerant).run();
}

}  // namespace pyfix::lex
