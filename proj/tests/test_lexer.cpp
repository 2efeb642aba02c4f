#include "doctest.h"
#include "pyfix/lexer.hpp"
#include "pyfix/syntax.hpp"
#include "pyfix/util.hpp"

using namespace pyfix;

namespace {

SourceProgram prog(const std::string& text, PyVersion v = PyVersion::Py3) {
  SourceProgram p;
  p.id = "t";
  p.text = text;
  p.version = v;
  return p;
}

std::vector<TokenKind> kinds_of(const TokenStream& ts) {
  std::vector<TokenKind> out;
  for (const auto& t : ts.tokens) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("tokenize basic statement") {
  TokenStream ts = tokenize(prog("x = 1"));
  REQUIRE(ts.size() == 3);
  CHECK(kinds_of(ts) ==
        std::vector<TokenKind>{TokenKind::Name, TokenKind::Operator, TokenKind::Number});
  CHECK(ts.values() == std::vector<std::string>{"x", "=", "1"});
  CHECK(ts.tokens[0].line == 1);
  CHECK(ts.tokens[0].column == 1);
  CHECK(ts.tokens[2].column == 5);
}

TEST_CASE("tokenize empty source") {
  CHECK(tokenize(prog("")).size() == 0);
}

TEST_CASE("tokenize drops whitespace and keeps comments") {
  TokenStream ts = tokenize(prog("x = 'a b'  # c d"));
  REQUIRE(ts.size() == 4);
  CHECK(ts.tokens[2].kind == TokenKind::String);
  CHECK(ts.tokens[2].value == "'a b'");
  CHECK(ts.tokens[3].kind == TokenKind::Comment);
  CHECK(ts.tokens[3].value == "# c d");
}

TEST_CASE("tokenize classifies punctuation and operators") {
  TokenStream ts = tokenize(prog("f(a, b[1]) + {x: y}"));
  for (const auto& t : ts.tokens) {
    if (t.value == "(" || t.value == ")" || t.value == "," || t.value == "[" ||
        t.value == "]" || t.value == "{" || t.value == "}" || t.value == ":")
      CHECK(t.kind == TokenKind::Punctuation);
    if (t.value == "+") CHECK(t.kind == TokenKind::Operator);
  }
}

TEST_CASE("tokenize multi-character operators stay single tokens") {
  TokenStream ts = tokenize(prog("a //= b ** c != d"));
  CHECK(ts.values() == std::vector<std::string>{"a", "//=", "b", "**", "c", "!=", "d"});
}

TEST_CASE("unterminated string lexes as one error token to end of line") {
  TokenStream ts = tokenize(prog("s = 'abc\nx = 1"));
  REQUIRE(ts.size() >= 3);
  CHECK(ts.tokens[2].kind == TokenKind::Error);
  CHECK(ts.tokens[2].value == "'abc");
  // lexing continues on the next line
  CHECK(ts.tokens[3].value == "x");
}

TEST_CASE("unterminated triple-quoted string runs to end of input") {
  TokenStream ts = tokenize(prog("s = \"\"\"ab\ncd"));
  REQUIRE(ts.size() == 3);
  CHECK(ts.tokens[2].kind == TokenKind::Error);
  CHECK(ts.tokens[2].value == "\"\"\"ab\ncd");
}

TEST_CASE("tokenize is total on arbitrary UTF-8 input") {
  Rng rng(20240817);
  const std::string pool =
      "abc XYZ_09 ()[]{}:,;+-*/%=<>!&|^~.'\"\\\n\t#@`$?äπ\u00e9\u4e2d";
  std::vector<std::string> pieces;
  {
    // split pool into whole UTF-8 characters
    size_t i = 0;
    while (i < pool.size()) {
      unsigned char c = pool[i];
      size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
      pieces.push_back(pool.substr(i, len));
      i += len;
    }
  }
  for (int round = 0; round < 500; ++round) {
    std::string text;
    const int len = static_cast<int>(rng.below(60));
    for (int k = 0; k < len; ++k) text += pieces[rng.below(pieces.size())];
    REQUIRE(is_valid_utf8(text));
    PyVersion v = rng.below(2) == 0 ? PyVersion::Py2 : PyVersion::Py3;
    TokenStream ts = tokenize(prog(text, v));  // must not throw
    for (const auto& t : ts.tokens) CHECK(!t.value.empty());
    TokenStream again = tokenize(prog(text, v));
    CHECK(ts.values() == again.values());
  }
}

TEST_CASE("anonymize masks string contents") {
  CHECK(anonymize_string_literals(prog("print(\"hello\")")).text == "print(\"xxxxx\")");
  CHECK(anonymize_string_literals(prog("x = 1 + 2")).text == "x = 1 + 2");
  CHECK(anonymize_string_literals(prog("s = 'ab' + \"c\"")).text == "s = 'xx' + \"x\"");
}

TEST_CASE("anonymize keeps prefixes, quotes and non-string tokens") {
  SourceProgram p = prog("s = rb'ab' + 'c d'  # note");
  SourceProgram masked = anonymize_string_literals(p);
  CHECK(masked.text == "s = rb'xx' + 'xxx'  # note");
  TokenStream before = tokenize(p);
  TokenStream after = tokenize(masked);
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i) {
    CHECK(before.tokens[i].kind == after.tokens[i].kind);
    if (before.tokens[i].kind != TokenKind::String)
      CHECK(before.tokens[i].value == after.tokens[i].value);
    else
      CHECK(before.tokens[i].value.size() == after.tokens[i].value.size());
  }
}

TEST_CASE("anonymize preserves format-string fields and newlines") {
  CHECK(anonymize_string_literals(prog("y = f\"sum={a+b} end\"")).text ==
        "y = f\"xxxx{a+b}xxxx\"");
  CHECK(anonymize_string_literals(prog("s = '''ab\ncd'''")).text == "s = '''xx\nxx'''");
  CHECK(anonymize_string_literals(prog("s = 'ab\\\ncd'")).text == "s = 'xx\\\nxx'");
  // literal braces survive so field structure cannot change
  CHECK(anonymize_string_literals(prog("y = f\"a{{b}}c\"")).text == "y = f\"x{{x}}x\"");
}

TEST_CASE("anonymize never changes parse status") {
  const char* samples[] = {
      "print(\"hello\")",
      "s = 'ab' + \"c\"",
      "x = f\"sum={a+b} end\"",
      "x = f\"bad{\"",
      "s = 'abc",
      "s = \"\"\"open",
      "s = 'a\\'b' + 'c\\\\'",
      "if x:\n    y = 'literal with spaces and # hash'\n",
      "d = {'k': f'{v:>10}', 'u': b'bytes'}",
      "broken(('\n",
      "print 'py2 style'",
  };
  for (const char* s : samples) {
    for (PyVersion v : {PyVersion::Py2, PyVersion::Py3}) {
      SourceProgram p = prog(s, v);
      SourceProgram masked = anonymize_string_literals(p);
      CHECK(check_syntax(masked).ok == check_syntax(p).ok);
      // masking is idempotent
      CHECK(anonymize_string_literals(masked).text == masked.text);
    }
  }
}

TEST_CASE("count words") {
  CHECK(count_words("") == 0);
  CHECK(count_words("We should add a plus sign.") == 6);
  CHECK(count_words("add `+' between") == 3);
  CHECK(count_words("don't") == 2);
  CHECK(count_words("   ") == 0);
  CHECK(count_words("replace `appned' with `append' to fix") == 6);
  CHECK(count_words("a+b") == 2);
}
