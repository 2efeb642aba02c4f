#include "py_parser.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "lexer_engine.hpp"

namespace pyfix::parse {
namespace {

using ast::NodePtr;
using ast::make;
using ast::nil;
using lex::PK;
using lex::PTok;

struct Bail {};

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return c - 'A' + 10;
}

// Decimal string arithmetic for canonical integer values of any width.
std::string big_from_digits(const std::string& digits, int base) {
  std::vector<int> dec{0};
  for (char c : digits) {
    if (c == '_') continue;
    int d = is_hex(c) ? hex_val(c) : 0;
    int carry = d;
    for (size_t i = 0; i < dec.size(); ++i) {
      int v = dec[i] * base + carry;
      dec[i] = v % 10;
      carry = v / 10;
    }
    while (carry) {
      dec.push_back(carry % 10);
      carry /= 10;
    }
  }
  std::string out;
  for (auto it = dec.rbegin(); it != dec.rend(); ++it) out += static_cast<char>('0' + *it);
  size_t nz = out.find_first_not_of('0');
  return nz == std::string::npos ? "0" : out.substr(nz);
}

std::string canonical_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, res.ptr);
  // Keep floats distinguishable from equal-valued ints: 1.0 must not
  // canonicalize to the same text as 1.
  if (out.find_first_of(".ein") == std::string::npos) out += ".0";
  return out;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  Parser(const std::string& src, std::vector<PTok> toks, PyVersion v)
      : src_(src), toks_(std::move(toks)), v_(v) {}

  ParseOutcome run() {
    ParseOutcome out;
    try {
      auto mod = make("Module");
      while (!at(PK::End)) {
        if (at(PK::Newline)) {
          advance();
          continue;
        }
        statement_into(mod->children);
      }
      out.module = mod;
    } catch (const Bail&) {
      out.error = err_;
    }
    return out;
  }

 private:
  const std::string& src_;
  std::vector<PTok> toks_;
  PyVersion v_;
  size_t i_ = 0;
  ParseErr err_;

  bool py2() const { return v_ == PyVersion::Py2; }
  bool py3() const { return v_ == PyVersion::Py3; }

  const PTok& cur() const { return toks_[i_]; }
  const PTok& peek(size_t k = 1) const {
    size_t j = i_ + k;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  void advance() {
    if (i_ + 1 < toks_.size()) ++i_;
  }
  bool at(PK k) const { return cur().kind == k; }
  bool at_op(const char* s) const { return cur().kind == PK::Op && cur().text == s; }
  bool at_kw(const char* s) const { return cur().kind == PK::Keyword && cur().text == s; }
  bool eat_op(const char* s) {
    if (!at_op(s)) return false;
    advance();
    return true;
  }
  bool eat_kw(const char* s) {
    if (!at_kw(s)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg, int line,
                         const char* py_class = "SyntaxError") {
    err_ = ParseErr{py_class, msg, line};
    throw Bail{};
  }
  [[noreturn]] void fail_here(const std::string& msg) { fail(msg, cur().line); }

  void expect_op(const char* s) {
    if (!eat_op(s)) fail_here(std::string("expected '") + s + "'");
  }
  void expect_kw(const char* s) {
    if (!eat_kw(s)) fail_here(std::string("expected '") + s + "'");
  }
  std::string expect_name() {
    if (!at(PK::Name)) fail_here("invalid syntax");
    std::string n = cur().text;
    advance();
    return n;
  }
  void expect_newline() {
    if (at(PK::End)) return;
    if (!at(PK::Newline)) fail_here("invalid syntax");
    advance();
  }

  // True when the current token can begin an expression.
  bool starts_expr() const {
    switch (cur().kind) {
      case PK::Name:
      case PK::Number:
      case PK::String:
        return true;
      case PK::Keyword: {
        const std::string& t = cur().text;
        if (t == "None" || t == "True" || t == "False" || t == "not" || t == "lambda" ||
            t == "await")
          return true;
        return false;
      }
      case PK::Op: {
        const std::string& t = cur().text;
        return t == "(" || t == "[" || t == "{" || t == "+" || t == "-" || t == "~" ||
               t == "..." || (t == "`" && v_ == PyVersion::Py2);
      }
      default:
        return false;
    }
  }

  // ---- statements ----

  void statement_into(std::vector<NodePtr>& body) {
    if (at(PK::Indent)) fail("unexpected indent", cur().line, "IndentationError");
    if (at(PK::Keyword)) {
      const std::string& t = cur().text;
      if (t == "if") return body.push_back(if_stmt());
      if (t == "while") return body.push_back(while_stmt());
      if (t == "for") return body.push_back(for_stmt(false));
      if (t == "try") return body.push_back(try_stmt());
      if (t == "with") return body.push_back(with_stmt(false));
      if (t == "def") return body.push_back(func_def(false));
      if (t == "class") return body.push_back(class_def());
      if (t == "async") return body.push_back(async_stmt());
    }
    if (at_op("@")) return body.push_back(decorated());
    simple_line_into(body);
  }

  void simple_line_into(std::vector<NodePtr>& body) {
    while (true) {
      body.push_back(small_stmt());
      if (eat_op(";")) {
        if (at(PK::Newline) || at(PK::End)) break;
        continue;
      }
      break;
    }
    expect_newline();
  }

  NodePtr block_of(std::vector<NodePtr> stmts) { return make("Block", std::move(stmts)); }

  NodePtr colon_suite() {
    expect_op(":");
    std::vector<NodePtr> body;
    if (at(PK::Newline)) {
      advance();
      if (!at(PK::Indent))
        fail("expected an indented block", cur().line, "IndentationError");
      advance();
      while (!at(PK::Dedent) && !at(PK::End)) statement_into(body);
      if (at(PK::Dedent)) advance();
    } else {
      simple_line_into(body);
    }
    return block_of(std::move(body));
  }

  NodePtr if_stmt() {
    expect_kw("if");
    NodePtr cond = namedexpr_test();
    NodePtr then = colon_suite();
    NodePtr orelse = nil();
    if (at_kw("elif")) {
      cur_as_if();  // rewrite elif into a nested if
      std::vector<NodePtr> inner;
      inner.push_back(if_stmt());
      orelse = block_of(std::move(inner));
    } else if (eat_kw("else")) {
      orelse = colon_suite();
    }
    return make("If", {cond, then, orelse});
  }

  void cur_as_if() {
    // `elif` behaves exactly like a fresh `if` at this point.
    toks_[i_].text = "if";
  }

  NodePtr while_stmt() {
    expect_kw("while");
    NodePtr cond = namedexpr_test();
    NodePtr body = colon_suite();
    NodePtr orelse = eat_kw("else") ? colon_suite() : nil();
    return make("While", {cond, body, orelse});
  }

  NodePtr for_stmt(bool is_async) {
    expect_kw("for");
    int line = cur().line;
    NodePtr target = target_list(line);
    expect_kw("in");
    NodePtr iter = testlist(/*allow_star=*/py3());
    NodePtr body = colon_suite();
    NodePtr orelse = eat_kw("else") ? colon_suite() : nil();
    return make(is_async ? "AsyncFor" : "For", {target, iter, body, orelse});
  }

  NodePtr try_stmt() {
    expect_kw("try");
    NodePtr body = colon_suite();
    std::vector<NodePtr> handlers;
    while (at_kw("except")) {
      int line = cur().line;
      advance();
      NodePtr type = nil();
      NodePtr name = nil();
      if (!at_op(":")) {
        type = test();
        if (eat_kw("as")) {
          name = make("Str", expect_name());
        } else if (py2() && eat_op(",")) {
          NodePtr t = target_atom(line);
          if (t->kind == "Name")
            name = make("Str", t->value);
          else
            name = t;
        }
      }
      NodePtr hbody = colon_suite();
      handlers.push_back(make("ExceptHandler", {type, name, hbody}));
    }
    NodePtr orelse = nil();
    NodePtr fin = nil();
    if (!handlers.empty() && eat_kw("else")) orelse = colon_suite();
    if (eat_kw("finally")) fin = colon_suite();
    if (handlers.empty() && fin->kind == "Nil")
      fail_here("expected 'except' or 'finally' block");
    std::vector<NodePtr> children{body};
    children.push_back(make("Handlers", std::move(handlers)));
    children.push_back(orelse);
    children.push_back(fin);
    return make("Try", std::move(children));
  }

  NodePtr with_stmt(bool is_async) {
    expect_kw("with");
    std::vector<NodePtr> items;
    while (true) {
      int line = cur().line;
      NodePtr ctx = test();
      NodePtr target = nil();
      if (eat_kw("as")) {
        target = bitor_expr();
        check_target(target, line, "assign");
      }
      items.push_back(make("WithItem", {ctx, target}));
      if (!eat_op(",")) break;
    }
    NodePtr body = colon_suite();
    std::vector<NodePtr> children{make("Items", std::move(items)), body};
    return make(is_async ? "AsyncWith" : "With", std::move(children));
  }

  NodePtr func_def(bool is_async) {
    expect_kw("def");
    std::string name = expect_name();
    NodePtr params = parameters();
    NodePtr returns = nil();
    if (at_op("->")) {
      if (py2()) fail_here("invalid syntax");
      advance();
      returns = test();
    }
    NodePtr body = colon_suite();
    return make(is_async ? "AsyncDef" : "Def", name, {params, returns, body});
  }

  NodePtr class_def() {
    expect_kw("class");
    std::string name = expect_name();
    NodePtr bases = make("Bases");
    if (eat_op("(")) {
      if (!at_op(")")) call_args_into(bases->children);
      expect_op(")");
    }
    NodePtr body = colon_suite();
    return make("Class", name, {bases, body});
  }

  NodePtr async_stmt() {
    if (py2()) fail_here("invalid syntax");
    expect_kw("async");
    if (at_kw("def")) return func_def(true);
    if (at_kw("for")) return for_stmt(true);
    if (at_kw("with")) return with_stmt(true);
    fail_here("invalid syntax");
  }

  NodePtr decorated() {
    std::vector<NodePtr> parts;
    while (at_op("@")) {
      advance();
      parts.push_back(namedexpr_test());
      expect_newline();
    }
    NodePtr target;
    if (at_kw("def"))
      target = func_def(false);
    else if (at_kw("class"))
      target = class_def();
    else if (at_kw("async"))
      target = async_stmt();
    else
      fail_here("invalid syntax");
    parts.push_back(target);
    return make("Decorated", std::move(parts));
  }

  NodePtr small_stmt() {
    if (at(PK::Keyword)) {
      const std::string& t = cur().text;
      if (t == "pass") {
        advance();
        return make("Pass");
      }
      if (t == "break") {
        advance();
        return make("Break");
      }
      if (t == "continue") {
        advance();
        return make("Continue");
      }
      if (t == "del") return del_stmt();
      if (t == "return") return return_stmt();
      if (t == "raise") return raise_stmt();
      if (t == "yield") return make("ExprStmt", {yield_expr()});
      if (t == "import") return import_stmt();
      if (t == "from") return from_import_stmt();
      if (t == "global") return name_list_stmt("Global");
      if (t == "nonlocal" && py3()) return name_list_stmt("Nonlocal");
      if (t == "assert") return assert_stmt();
      if (t == "print" && py2()) return print_stmt();
      if (t == "exec" && py2()) return exec_stmt();
    }
    return expr_stmt();
  }

  NodePtr del_stmt() {
    expect_kw("del");
    int line = cur().line;
    NodePtr targets = target_list(line, /*deletion=*/true);
    return make("Del", {targets});
  }

  NodePtr return_stmt() {
    expect_kw("return");
    NodePtr value = starts_expr() || at_op("*") ? testlist(py3()) : nil();
    return make("Return", {value});
  }

  NodePtr raise_stmt() {
    expect_kw("raise");
    if (!starts_expr()) return make("Raise", {nil(), nil()});
    NodePtr exc = test();
    if (py3()) {
      NodePtr from = eat_kw("from") ? test() : nil();
      return make("Raise", {exc, from});
    }
    NodePtr second = nil();
    NodePtr third = nil();
    if (eat_op(",")) {
      second = test();
      if (eat_op(",")) third = test();
    }
    return make("RaiseLegacy", {exc, second, third});
  }

  NodePtr import_stmt() {
    expect_kw("import");
    std::vector<NodePtr> aliases;
    while (true) {
      std::string mod = dotted_name();
      NodePtr as = eat_kw("as") ? make("Str", expect_name()) : nil();
      aliases.push_back(make("Alias", mod, {as}));
      if (!eat_op(",")) break;
    }
    return make("Import", std::move(aliases));
  }

  NodePtr from_import_stmt() {
    expect_kw("from");
    std::string level;
    while (true) {
      if (at_op(".")) {
        level += ".";
        advance();
      } else if (at_op("...")) {
        level += "...";
        advance();
      } else {
        break;
      }
    }
    std::string mod;
    if (at(PK::Name)) mod = dotted_name();
    if (level.empty() && mod.empty()) fail_here("invalid syntax");
    expect_kw("import");
    std::vector<NodePtr> aliases;
    if (eat_op("*")) {
      aliases.push_back(make("Star"));
    } else {
      bool parens = eat_op("(");
      while (true) {
        std::string n = expect_name();
        NodePtr as = eat_kw("as") ? make("Str", expect_name()) : nil();
        aliases.push_back(make("Alias", n, {as}));
        if (!eat_op(",")) break;
        if (parens && at_op(")")) break;
      }
      if (parens) expect_op(")");
    }
    return make("ImportFrom", level + mod, std::move(aliases));
  }

  std::string dotted_name() {
    std::string out = expect_name();
    while (at_op(".") && peek().kind == PK::Name) {
      advance();
      out += "." + expect_name();
    }
    return out;
  }

  NodePtr name_list_stmt(const char* kind) {
    advance();  // keyword
    std::vector<NodePtr> names;
    while (true) {
      names.push_back(make("Name", expect_name()));
      if (!eat_op(",")) break;
    }
    return make(kind, std::move(names));
  }

  NodePtr assert_stmt() {
    expect_kw("assert");
    NodePtr t = test();
    NodePtr msg = eat_op(",") ? test() : nil();
    return make("Assert", {t, msg});
  }

  NodePtr print_stmt() {
    expect_kw("print");
    NodePtr dest = nil();
    std::vector<NodePtr> values;
    bool trailing = false;
    if (at_op(">>")) {
      advance();
      dest = test();
      while (eat_op(",")) {
        if (!starts_expr()) {
          trailing = true;
          break;
        }
        values.push_back(test());
      }
    } else if (starts_expr()) {
      values.push_back(test());
      while (eat_op(",")) {
        if (!starts_expr()) {
          trailing = true;
          break;
        }
        values.push_back(test());
      }
    }
    std::vector<NodePtr> children{dest};
    for (auto& v : values) children.push_back(std::move(v));
    return make("Print", trailing ? "nonl" : "nl", std::move(children));
  }

  NodePtr exec_stmt() {
    expect_kw("exec");
    NodePtr code = bitor_expr();
    NodePtr globals = nil();
    NodePtr locals = nil();
    if (eat_kw("in")) {
      globals = test();
      if (eat_op(",")) locals = test();
    }
    return make("Exec", {code, globals, locals});
  }

  NodePtr expr_stmt() {
    int line = cur().line;
    NodePtr first = testlist_star(/*named_ok=*/false);
    if (at_op(":") && py3()) {
      advance();
      check_ann_target(first, line);
      NodePtr ann = test();
      NodePtr value = nil();
      if (eat_op("=")) value = at_kw("yield") ? yield_expr() : testlist_star(false);
      return make("AnnAssign", {first, ann, value});
    }
    static const char* aug_ops[] = {"+=", "-=", "*=", "/=", "%=",  "&=",  "|=",
                                    "^=", "<<=", ">>=", "**=", "//=", "@="};
    for (const char* op : aug_ops) {
      if (at_op(op)) {
        if (std::strcmp(op, "@=") == 0 && py2()) break;
        advance();
        check_aug_target(first, line);
        NodePtr value = at_kw("yield") ? yield_expr() : testlist(py3());
        return make("AugAssign", std::string(op, std::strlen(op) - 1), {first, value});
      }
    }
    if (!at_op("=")) return make("ExprStmt", {first});
    std::vector<NodePtr> targets{first};
    NodePtr value;
    while (eat_op("=")) {
      NodePtr next = at_kw("yield") ? yield_expr() : testlist_star(false);
      if (at_op("=")) {
        targets.push_back(next);
      } else {
        value = next;
        break;
      }
    }
    for (auto& t : targets) {
      if (t->kind == "Starred")
        fail("starred assignment target must be in a list or tuple", line);
      check_target(t, line, "assign");
    }
    std::vector<NodePtr> children{make("Targets", std::move(targets)), value};
    return make("Assign", std::move(children));
  }

  // ---- assignment-target validation ----

  void check_target(const NodePtr& n, int line, const char* what) {
    const std::string& k = n->kind;
    if (k == "Name" || k == "Attribute" || k == "Subscript") return;
    if (k == "Tuple" || k == "List") {
      if (py2() && k == "Tuple" && n->children.empty())
        fail("can't assign to ()", line);
      for (const auto& c : n->children) check_target(c, line, what);
      return;
    }
    if (k == "Starred" && py3() && std::strcmp(what, "delete") != 0) {
      check_target(n->children[0], line, what);
      return;
    }
    const bool del = std::strcmp(what, "delete") == 0;
    std::string verb = del ? "cannot delete " : "cannot assign to ";
    if (k == "Num" || k == "Str" || k == "Bytes" || k == "Const" || k == "JoinedStr")
      fail(verb + "literal", line);
    if (k == "Call") fail(verb + "function call", line);
    fail(verb + "expression", line);
  }

  void check_aug_target(const NodePtr& n, int line) {
    const std::string& k = n->kind;
    if (k == "Name" || k == "Attribute" || k == "Subscript") return;
    fail("illegal expression for augmented assignment", line);
  }

  void check_ann_target(const NodePtr& n, int line) {
    const std::string& k = n->kind;
    if (k == "Name" || k == "Attribute" || k == "Subscript") return;
    if (k == "Tuple") fail("only single target (not tuple) can be annotated", line);
    fail("illegal target for annotation", line);
  }

  // for-loop and del targets
  NodePtr target_list(int line, bool deletion = false) {
    std::vector<NodePtr> elems;
    bool tuple = false;
    while (true) {
      NodePtr e;
      if (at_op("*") && py3() && !deletion) {
        advance();
        e = make("Starred", {bitor_expr()});
      } else {
        e = bitor_expr();
      }
      elems.push_back(e);
      if (eat_op(",")) {
        tuple = true;
        if (!starts_expr() && !at_op("*")) break;
        continue;
      }
      break;
    }
    NodePtr out = !tuple && elems.size() == 1 ? elems[0] : make("Tuple", std::move(elems));
    if (out->kind == "Starred")
      fail("starred assignment target must be in a list or tuple", line);
    check_target(out, line, deletion ? "delete" : "assign");
    return out;
  }

  NodePtr target_atom(int line) {
    NodePtr e = bitor_expr();
    check_target(e, line, "assign");
    return e;
  }

  // ---- expressions ----

  NodePtr yield_expr() {
    expect_kw("yield");
    if (py3() && eat_kw("from")) return make("YieldFrom", {test()});
    NodePtr value = starts_expr() || at_op("*") ? testlist(py3()) : nil();
    return make("Yield", {value});
  }

  NodePtr testlist(bool allow_star) {
    std::vector<NodePtr> elems;
    bool tuple = false;
    while (true) {
      if (allow_star && at_op("*")) {
        advance();
        elems.push_back(make("Starred", {bitor_expr()}));
      } else {
        elems.push_back(test());
      }
      if (eat_op(",")) {
        tuple = true;
        if (starts_expr() || (allow_star && at_op("*"))) continue;
      }
      break;
    }
    if (!tuple && elems.size() == 1) return elems[0];
    return make("Tuple", std::move(elems));
  }

  NodePtr testlist_star(bool named_ok) {
    std::vector<NodePtr> elems;
    bool tuple = false;
    while (true) {
      if (py3() && at_op("*")) {
        advance();
        elems.push_back(make("Starred", {bitor_expr()}));
      } else {
        elems.push_back(named_ok ? namedexpr_test() : test());
      }
      if (eat_op(",")) {
        tuple = true;
        if (starts_expr() || at_op("*")) continue;
      }
      break;
    }
    if (!tuple && elems.size() == 1) return elems[0];
    return make("Tuple", std::move(elems));
  }

  NodePtr namedexpr_test() {
    NodePtr t = test();
    if (py3() && at_op(":=")) {
      int line = cur().line;
      advance();
      if (t->kind != "Name") fail("cannot use assignment expressions with expression", line);
      return make("NamedExpr", {t, test()});
    }
    return t;
  }

  NodePtr test() {
    if (at_kw("lambda")) return lambdef(/*nocond=*/false);
    NodePtr t = or_test();
    if (at_kw("if")) {
      advance();
      NodePtr cond = or_test();
      expect_kw("else");
      NodePtr orelse = test();
      return make("IfExp", {t, cond, orelse});
    }
    return t;
  }

  NodePtr test_nocond() {
    if (at_kw("lambda")) return lambdef(/*nocond=*/true);
    return or_test();
  }

  NodePtr or_test() {
    NodePtr t = and_test();
    if (!at_kw("or")) return t;
    std::vector<NodePtr> elems{t};
    while (eat_kw("or")) elems.push_back(and_test());
    return make("Or", std::move(elems));
  }

  NodePtr and_test() {
    NodePtr t = not_test();
    if (!at_kw("and")) return t;
    std::vector<NodePtr> elems{t};
    while (eat_kw("and")) elems.push_back(not_test());
    return make("And", std::move(elems));
  }

  NodePtr not_test() {
    if (eat_kw("not")) return make("Not", {not_test()});
    return comparison();
  }

  NodePtr comparison() {
    NodePtr left = bitor_expr();
    std::vector<NodePtr> parts;
    while (true) {
      std::string op;
      if (at_op("<") || at_op(">") || at_op("==") || at_op(">=") || at_op("<=") ||
          at_op("!=")) {
        op = cur().text;
        advance();
      } else if (py2() && at_op("<>")) {
        op = "!=";  // same comparison, legacy spelling
        advance();
      } else if (at_kw("in")) {
        op = "in";
        advance();
      } else if (at_kw("not") && peek().kind == PK::Keyword && peek().text == "in") {
        op = "not in";
        advance();
        advance();
      } else if (at_kw("is")) {
        advance();
        op = eat_kw("not") ? "is not" : "is";
      } else {
        break;
      }
      parts.push_back(make("CmpOp", op));
      parts.push_back(bitor_expr());
    }
    if (parts.empty()) return left;
    std::vector<NodePtr> children{left};
    for (auto& p : parts) children.push_back(std::move(p));
    return make("Compare", std::move(children));
  }

  NodePtr binary_chain(NodePtr (Parser::*next)(), const std::vector<const char*>& ops) {
    NodePtr left = (this->*next)();
    while (true) {
      const char* matched = nullptr;
      for (const char* op : ops)
        if (at_op(op)) {
          matched = op;
          break;
        }
      if (!matched) return left;
      advance();
      NodePtr right = (this->*next)();
      left = make("BinOp", matched, {left, right});
    }
  }

  NodePtr bitor_expr() { return binary_chain(&Parser::bitxor_expr, {"|"}); }
  NodePtr bitxor_expr() { return binary_chain(&Parser::bitand_expr, {"^"}); }
  NodePtr bitand_expr() { return binary_chain(&Parser::shift_expr, {"&"}); }
  NodePtr shift_expr() { return binary_chain(&Parser::arith_expr, {"<<", ">>"}); }
  NodePtr arith_expr() { return binary_chain(&Parser::term, {"+", "-"}); }

  NodePtr term() {
    static const std::vector<const char*> ops2{"*", "/", "%", "//"};
    static const std::vector<const char*> ops3{"*", "/", "%", "//", "@"};
    return binary_chain(&Parser::factor, py3() ? ops3 : ops2);
  }

  NodePtr factor() {
    if (at_op("+")) {
      advance();
      return make("UnaryOp", "+", {factor()});
    }
    if (at_op("-")) {
      advance();
      return make("UnaryOp", "-", {factor()});
    }
    if (at_op("~")) {
      advance();
      return make("UnaryOp", "~", {factor()});
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom_expr();
    if (at_op("**")) {
      advance();
      return make("BinOp", "**", {base, factor()});
    }
    return base;
  }

  NodePtr atom_expr() {
    if (py3() && at_kw("await")) {
      advance();
      return make("Await", {atom_expr()});
    }
    NodePtr e = atom();
    while (true) {
      if (at_op("(")) {
        advance();
        NodePtr call = make("Call", {e});
        if (!at_op(")")) call_args_into(call->children);
        expect_op(")");
        e = call;
      } else if (at_op("[")) {
        advance();
        NodePtr index = subscript_list();
        expect_op("]");
        e = make("Subscript", {e, index});
      } else if (at_op(".")) {
        advance();
        e = make("Attribute", expect_name(), {e});
      } else {
        return e;
      }
    }
  }

  void call_args_into(std::vector<NodePtr>& args) {
    bool kw_seen = false;
    while (true) {
      if (at_op(")")) return;
      if (at_op("**")) {
        advance();
        args.push_back(make("DoubleStar", {test()}));
        kw_seen = true;
      } else if (at_op("*")) {
        advance();
        args.push_back(make("Starred", {test()}));
      } else {
        int line = cur().line;
        NodePtr e = test();
        if (at_op("=")) {
          advance();
          if (e->kind != "Name")
            fail("expression cannot contain assignment, perhaps you meant '=='?", line);
          args.push_back(make("Keyword", e->value, {test()}));
          kw_seen = true;
        } else if (py3() && at_op(":=")) {
          advance();
          if (e->kind != "Name")
            fail("cannot use assignment expressions with expression", line);
          args.push_back(make("NamedExpr", {e, test()}));
        } else if (at_kw("for") || (py3() && at_kw("async"))) {
          NodePtr gen = make("GeneratorExp", {e});
          comp_clauses_into(gen->children);
          args.push_back(gen);
        } else {
          if (kw_seen) fail("positional argument follows keyword argument", line);
          args.push_back(e);
        }
      }
      if (!eat_op(",")) return;
    }
  }

  NodePtr subscript_list() {
    std::vector<NodePtr> elems;
    bool tuple = false;
    while (true) {
      elems.push_back(subscript());
      if (eat_op(",")) {
        tuple = true;
        if (at_op("]")) break;
        continue;
      }
      break;
    }
    if (!tuple && elems.size() == 1) return elems[0];
    return make("Tuple", std::move(elems));
  }

  NodePtr subscript() {
    NodePtr lower = nil();
    if (at_op("...")) {
      advance();
      return make("Const", "Ellipsis");
    }
    bool have_lower = false;
    if (!at_op(":")) {
      if (py3() && at_op("*")) {
        advance();
        lower = make("Starred", {bitor_expr()});
      } else {
        lower = test();
      }
      have_lower = true;
    }
    if (!at_op(":")) {
      if (!have_lower) fail_here("invalid syntax");
      return lower;
    }
    advance();
    NodePtr upper = nil();
    if (!at_op(":") && !at_op("]") && !at_op(",")) upper = test();
    NodePtr step = nil();
    if (eat_op(":")) {
      if (!at_op("]") && !at_op(",")) step = test();
    }
    return make("Slice", {lower, upper, step});
  }

  void comp_clauses_into(std::vector<NodePtr>& out) {
    while (true) {
      bool is_async = false;
      if (py3() && at_kw("async") && peek().kind == PK::Keyword && peek().text == "for") {
        advance();
        is_async = true;
      }
      if (at_kw("for")) {
        advance();
        int line = cur().line;
        NodePtr target = comp_target(line);
        expect_kw("in");
        NodePtr iter = or_test();
        out.push_back(make(is_async ? "AsyncCompFor" : "CompFor", {target, iter}));
      } else if (at_kw("if")) {
        advance();
        NodePtr cond = test_nocond();
        out.push_back(make("CompIf", {cond}));
      } else {
        return;
      }
    }
  }

  NodePtr comp_target(int line) {
    std::vector<NodePtr> elems;
    bool tuple = false;
    while (true) {
      if (py3() && at_op("*")) {
        advance();
        elems.push_back(make("Starred", {bitor_expr()}));
      } else {
        elems.push_back(bitor_expr());
      }
      if (eat_op(",")) {
        tuple = true;
        if (!starts_expr() && !at_op("*")) break;
        continue;
      }
      break;
    }
    NodePtr out = !tuple && elems.size() == 1 ? elems[0] : make("Tuple", std::move(elems));
    check_target(out, line, "assign");
    return out;
  }

  bool comp_follows() {
    if (at_kw("for")) return true;
    return py3() && at_kw("async") && peek().kind == PK::Keyword && peek().text == "for";
  }

  NodePtr atom() {
    if (at(PK::Name)) {
      NodePtr n = make("Name", cur().text);
      advance();
      return n;
    }
    if (at(PK::Number)) return number_atom();
    if (at(PK::String)) return string_atom();
    if (at(PK::Keyword)) {
      const std::string& t = cur().text;
      if (t == "None" || t == "True" || t == "False") {
        NodePtr n = make("Const", t);
        advance();
        return n;
      }
      if (t == "lambda") return lambdef(false);
      if (t == "yield") {
        // only valid inside parentheses; caller contexts reach here otherwise
        fail_here("invalid syntax");
      }
      fail_here("invalid syntax");
    }
    if (at_op("(")) return paren_atom();
    if (at_op("[")) return list_atom();
    if (at_op("{")) return brace_atom();
    if (at_op("...")) {
      if (py2()) fail_here("invalid syntax");
      advance();
      return make("Const", "Ellipsis");
    }
    if (py2() && at_op("`")) {
      advance();
      NodePtr inner = testlist(false);
      expect_op("`");
      return make("Repr", {inner});
    }
    fail_here("invalid syntax");
  }

  NodePtr paren_atom() {
    expect_op("(");
    if (at_op(")")) {
      advance();
      return make("Tuple");
    }
    if (at_kw("yield")) {
      NodePtr y = yield_expr();
      expect_op(")");
      return y;
    }
    std::vector<NodePtr> elems;
    bool tuple = false;
    bool first = true;
    while (true) {
      if (at_op(")")) break;
      NodePtr e;
      if (py3() && at_op("*")) {
        advance();
        e = make("Starred", {bitor_expr()});
      } else {
        e = namedexpr_test();
      }
      if (first && comp_follows()) {
        NodePtr gen = make("GeneratorExp", {e});
        comp_clauses_into(gen->children);
        expect_op(")");
        return gen;
      }
      first = false;
      elems.push_back(e);
      if (eat_op(",")) {
        tuple = true;
        continue;
      }
      break;
    }
    expect_op(")");
    if (!tuple && elems.size() == 1) return elems[0];  // plain grouping
    return make("Tuple", std::move(elems));
  }

  NodePtr list_atom() {
    expect_op("[");
    if (at_op("]")) {
      advance();
      return make("List");
    }
    std::vector<NodePtr> elems;
    bool first = true;
    while (true) {
      if (at_op("]")) break;
      NodePtr e;
      if (py3() && at_op("*")) {
        advance();
        e = make("Starred", {bitor_expr()});
      } else {
        e = namedexpr_test();
      }
      if (first && comp_follows()) {
        NodePtr comp = make("ListComp", {e});
        comp_clauses_into(comp->children);
        expect_op("]");
        return comp;
      }
      first = false;
      elems.push_back(e);
      if (!eat_op(",")) break;
    }
    expect_op("]");
    return make("List", std::move(elems));
  }

  NodePtr brace_atom() {
    expect_op("{");
    if (at_op("}")) {
      advance();
      return make("Dict");
    }
    // decide dict vs set from the first element
    if (at_op("**")) {
      if (py2()) fail_here("invalid syntax");
      advance();
      NodePtr first = make("DoubleStar", {bitor_expr()});
      return dict_tail(first);
    }
    NodePtr e;
    bool starred = false;
    if (at_op("*")) {
      if (py2()) fail_here("invalid syntax");
      advance();
      e = make("Starred", {bitor_expr()});
      starred = true;
    } else {
      e = namedexpr_test();
    }
    if (!starred && at_op(":")) {
      advance();
      NodePtr v = test();
      NodePtr pair = make("Pair", {e, v});
      if (comp_follows()) {
        NodePtr comp = make("DictComp", {pair});
        comp_clauses_into(comp->children);
        expect_op("}");
        return comp;
      }
      return dict_tail(pair);
    }
    if (!starred && comp_follows()) {
      NodePtr comp = make("SetComp", {e});
      comp_clauses_into(comp->children);
      expect_op("}");
      return comp;
    }
    // set display
    std::vector<NodePtr> elems{e};
    while (eat_op(",")) {
      if (at_op("}")) break;
      if (at_op("*")) {
        if (py2()) fail_here("invalid syntax");
        advance();
        elems.push_back(make("Starred", {bitor_expr()}));
      } else {
        elems.push_back(namedexpr_test());
      }
    }
    expect_op("}");
    return make("Set", std::move(elems));
  }

  NodePtr dict_tail(NodePtr first_entry) {
    std::vector<NodePtr> entries{first_entry};
    while (eat_op(",")) {
      if (at_op("}")) break;
      if (at_op("**")) {
        advance();
        entries.push_back(make("DoubleStar", {bitor_expr()}));
        continue;
      }
      NodePtr k = test();
      expect_op(":");
      NodePtr v = test();
      entries.push_back(make("Pair", {k, v}));
    }
    expect_op("}");
    return make("Dict", std::move(entries));
  }

  NodePtr lambdef(bool nocond) {
    expect_kw("lambda");
    NodePtr params = param_list(/*parens=*/false, /*allow_annotations=*/false);
    expect_op(":");
    NodePtr body = nocond ? test_nocond() : test();
    return make("Lambda", {params, body});
  }

  NodePtr parameters() {
    expect_op("(");
    NodePtr params = param_list(/*parens=*/true, /*allow_annotations=*/py3());
    expect_op(")");
    return params;
  }

  NodePtr param_list(bool parens, bool allow_annotations) {
    NodePtr out = make("Params");
    bool seen_default = false;
    bool seen_star = false;
    auto terminator = [&]() { return parens ? at_op(")") : at_op(":"); };
    if (terminator()) return out;
    while (true) {
      if (at_op("*")) {
        advance();
        seen_star = true;
        if (at(PK::Name)) {
          std::string n = expect_name();
          NodePtr ann = nil();
          if (allow_annotations && eat_op(":")) ann = test();
          out->children.push_back(make("StarParam", n, {ann}));
        } else {
          if (py2()) fail_here("invalid syntax");
          out->children.push_back(make("StarMark"));
        }
      } else if (at_op("**")) {
        advance();
        std::string n = expect_name();
        NodePtr ann = nil();
        if (allow_annotations && eat_op(":")) ann = test();
        out->children.push_back(make("DoubleStarParam", n, {ann}));
      } else if (at_op("/")) {
        if (py2() || !parens) fail_here("invalid syntax");
        advance();
        out->children.push_back(make("SlashMark"));
      } else if (at(PK::Name)) {
        std::string n = expect_name();
        NodePtr ann = nil();
        if (allow_annotations && eat_op(":")) ann = test();
        NodePtr def = nil();
        if (eat_op("=")) {
          def = test();
          seen_default = true;
        } else if (seen_default && !seen_star) {
          fail_here("parameter without a default follows parameter with a default");
        }
        out->children.push_back(make("Param", n, {ann, def}));
      } else if (py2() && at_op("(")) {
        NodePtr t = py2_tuple_param();
        NodePtr def = nil();
        if (eat_op("=")) {
          def = test();
          seen_default = true;
        } else if (seen_default) {
          fail_here("parameter without a default follows parameter with a default");
        }
        out->children.push_back(make("TupleParam", {t, def}));
      } else {
        fail_here("invalid syntax");
      }
      if (!eat_op(",")) break;
      if (terminator()) break;
    }
    return out;
  }

  NodePtr py2_tuple_param() {
    expect_op("(");
    std::vector<NodePtr> elems;
    while (true) {
      if (at(PK::Name))
        elems.push_back(make("Name", expect_name()));
      else if (at_op("("))
        elems.push_back(py2_tuple_param());
      else
        fail_here("invalid syntax");
      if (!eat_op(",")) break;
      if (at_op(")")) break;
    }
    expect_op(")");
    return make("Tuple", std::move(elems));
  }

  // ---- literals ----

  NodePtr number_atom() {
    const PTok& t = cur();
    std::string text = t.text;
    advance();
    return make("Num", canonical_number(text));
  }

  std::string canonical_number(const std::string& raw) {
    std::string s;
    for (char c : raw)
      if (c != '_') s += c;
    bool imag = false;
    if (!s.empty() && (s.back() == 'j' || s.back() == 'J')) {
      imag = true;
      s.pop_back();
    }
    if (!s.empty() && (s.back() == 'l' || s.back() == 'L')) s.pop_back();
    std::string value;
    if (s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
      value = big_from_digits(s.substr(2), 16);
    } else if (s.size() > 1 && s[0] == '0' && (s[1] == 'o' || s[1] == 'O')) {
      value = big_from_digits(s.substr(2), 8);
    } else if (s.size() > 1 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
      value = big_from_digits(s.substr(2), 2);
    } else if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
               s.find('E') == std::string::npos && !imag) {
      if (py2() && s.size() > 1 && s[0] == '0')
        value = big_from_digits(s.substr(1), 8);
      else
        value = big_from_digits(s, 10);
    } else {
      double d = std::strtod(s.c_str(), nullptr);
      value = canonical_double(d);
    }
    return imag ? value + "j" : value;
  }

  NodePtr string_atom() {
    // Adjacent string literals concatenate into one value.
    bool any_bytes = false;
    bool any_str = false;
    bool any_fmt = false;
    std::vector<NodePtr> pieces;  // Str and FormattedValue nodes, in order
    int first_line = cur().line;
    while (at(PK::String)) {
      const PTok& t = cur();
      const lex::StringInfo& si = t.str;
      bool bytes = si.bytes;
      bool fmt = si.fmt;
      if (py2()) {
        bytes = false;  // all literals are plain strings in this mode
        fmt = false;
      }
      if (bytes)
        any_bytes = true;
      else
        any_str = true;
      if (any_bytes && any_str)
        fail("cannot mix bytes and nonbytes literals", t.line);
      std::string content = src_.substr(si.content_begin, si.content_end - si.content_begin);
      if (fmt) {
        any_fmt = true;
        parse_fstring_into(pieces, content, si.raw, t.line, 0);
      } else {
        std::string value = decode_string(content, si.raw, bytes, t.line);
        pieces.push_back(make("Str", value));
      }
      advance();
    }
    if (any_bytes) {
      std::string all;
      for (auto& p : pieces) all += p->value;
      return make("Bytes", all);
    }
    if (!any_fmt) {
      std::string all;
      for (auto& p : pieces) all += p->value;
      return make("Str", all);
    }
    // merge adjacent literal pieces inside the joined string
    std::vector<NodePtr> merged;
    for (auto& p : pieces) {
      if (p->kind == "Str" && !merged.empty() && merged.back()->kind == "Str") {
        merged.back() = make("Str", merged.back()->value + p->value);
      } else {
        merged.push_back(p);
      }
    }
    // drop empty literal fragments so equal texts normalize identically
    std::vector<NodePtr> final_pieces;
    for (auto& p : merged)
      if (!(p->kind == "Str" && p->value.empty())) final_pieces.push_back(p);
    (void)first_line;
    return make("JoinedStr", std::move(final_pieces));
  }

  std::string decode_string(const std::string& content, bool raw, bool bytes, int line) {
    if (py3() && bytes) {
      for (unsigned char c : content)
        if (c >= 0x80)
          fail("bytes can only contain ASCII literal characters", line);
    }
    if (raw) return content;
    std::string out;
    size_t i = 0;
    const size_t n = content.size();
    while (i < n) {
      char c = content[i];
      if (c != '\\') {
        out += c;
        ++i;
        continue;
      }
      if (i + 1 >= n) {
        out += c;
        ++i;
        continue;
      }
      char e = content[i + 1];
      i += 2;
      switch (e) {
        case '\n': break;  // line continuation
        case '\r':
          if (i < n && content[i] == '\n') ++i;
          break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case 'a': out += '\a'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'v': out += '\v'; break;
        case '0':
        case '1':
        case '2':
        case '3':
        case '4':
        case '5':
        case '6':
        case '7': {
          int v = e - '0';
          for (int k = 0; k < 2 && i < n && content[i] >= '0' && content[i] <= '7'; ++k) {
            v = v * 8 + (content[i] - '0');
            ++i;
          }
          out += static_cast<char>(v & 0xFF);
          break;
        }
        case 'x': {
          if (i + 1 >= n || !is_hex(content[i]) || !is_hex(content[i + 1]))
            fail("invalid \\x escape", line);
          out += static_cast<char>(hex_val(content[i]) * 16 + hex_val(content[i + 1]));
          i += 2;
          break;
        }
        case 'u':
        case 'U': {
          if (bytes) {
            out += '\\';
            out += e;
            break;
          }
          const int want = e == 'u' ? 4 : 8;
          uint32_t cp = 0;
          for (int k = 0; k < want; ++k) {
            if (i >= n || !is_hex(content[i]))
              fail(std::string("invalid \\") + e + " escape", line);
            cp = cp * 16 + static_cast<uint32_t>(hex_val(content[i]));
            ++i;
          }
          if (cp > 0x10FFFF) fail("illegal Unicode character", line);
          append_utf8(out, cp);
          break;
        }
        case 'N':
          // named characters kept verbatim (no name table); stable per input
          out += "\\N";
          break;
        default:
          out += '\\';
          out += e;
          break;
      }
    }
    return out;
  }

  // Format string bodies: literal text plus {expression[=][!conv][:spec]}
  // fields. Nesting depth covers format specs that contain fields.
  void parse_fstring_into(std::vector<NodePtr>& pieces, const std::string& content,
                          bool raw, int line, int depth) {
    std::string literal;
    size_t i = 0;
    const size_t n = content.size();
    auto flush = [&]() {
      if (!literal.empty()) {
        pieces.push_back(make("Str", decode_string(literal, raw, false, line)));
        literal.clear();
      }
    };
    while (i < n) {
      char c = content[i];
      if (c == '{' && i + 1 < n && content[i + 1] == '{') {
        literal += '{';
        i += 2;
        continue;
      }
      if (c == '}' && i + 1 < n && content[i + 1] == '}') {
        literal += '}';
        i += 2;
        continue;
      }
      if (c == '}') fail("f-string: single '}' is not allowed", line);
      if (c != '{') {
        if (c == '\\' && i + 1 < n) {
          literal += c;
          literal += content[i + 1];
          i += 2;
          continue;
        }
        literal += c;
        ++i;
        continue;
      }
      // replacement field
      flush();
      ++i;
      size_t expr_begin = i;
      int nest = 0;
      size_t expr_end = std::string::npos;
      char pending = '\0';
      while (i < n) {
        char d = content[i];
        if (d == '\'' || d == '"') {
          char q = d;
          ++i;
          while (i < n) {
            if (content[i] == '\\' && i + 1 < n) {
              i += 2;
              continue;
            }
            if (content[i] == q) break;
            ++i;
          }
          if (i < n) ++i;
          continue;
        }
        if (d == '(' || d == '[' || d == '{') {
          ++nest;
          ++i;
          continue;
        }
        if (d == ')' || d == ']') {
          --nest;
          ++i;
          continue;
        }
        if (d == '}') {
          if (nest > 0) {
            --nest;
            ++i;
            continue;
          }
          expr_end = i;
          pending = '}';
          break;
        }
        if (nest == 0 && d == '!' && i + 1 < n && content[i + 1] != '=') {
          expr_end = i;
          pending = '!';
          break;
        }
        if (nest == 0 && d == ':') {
          expr_end = i;
          pending = ':';
          break;
        }
        ++i;
      }
      if (expr_end == std::string::npos)
        fail("f-string: expecting '}'", line);
      std::string expr_text = content.substr(expr_begin, expr_end - expr_begin);
      bool dbg = false;
      {
        // trailing '=' (not part of a comparison) is the debug marker
        std::string t = expr_text;
        while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
        if (!t.empty() && t.back() == '=' &&
            (t.size() < 2 || (t[t.size() - 2] != '=' && t[t.size() - 2] != '!' &&
                              t[t.size() - 2] != '<' && t[t.size() - 2] != '>'))) {
          dbg = true;
          t.pop_back();
          expr_text = t;
        }
      }
      {
        std::string stripped = expr_text;
        size_t a = stripped.find_first_not_of(" \t");
        if (a == std::string::npos)
          fail("f-string: empty expression not allowed", line);
      }
      NodePtr expr = parse_embedded_expr(expr_text, line);
      std::string conv;
      if (pending == '!') {
        ++i;  // '!'
        if (i >= n || (content[i] != 's' && content[i] != 'r' && content[i] != 'a'))
          fail("f-string: invalid conversion character", line);
        conv = std::string(1, content[i]);
        ++i;
        if (i < n && content[i] == ':')
          pending = ':';
        else if (i < n && content[i] == '}')
          pending = '}';
        else
          fail("f-string: expecting '}'", line);
      }
      NodePtr spec = nil();
      if (pending == ':') {
        ++i;  // ':'
        size_t spec_begin = i;
        int snest = 0;
        size_t spec_end = std::string::npos;
        while (i < n) {
          char d = content[i];
          if (d == '{') ++snest;
          if (d == '}') {
            if (snest == 0) {
              spec_end = i;
              break;
            }
            --snest;
          }
          ++i;
        }
        if (spec_end == std::string::npos) fail("f-string: expecting '}'", line);
        if (depth >= 2) fail("f-string: expressions nested too deeply", line);
        std::vector<NodePtr> spec_pieces;
        parse_fstring_into(spec_pieces, content.substr(spec_begin, spec_end - spec_begin),
                           raw, line, depth + 1);
        spec = make("JoinedStr", std::move(spec_pieces));
      }
      if (i >= n || content[i] != '}') fail("f-string: expecting '}'", line);
      ++i;
      std::string marker = conv + (dbg ? "=" : "");
      pieces.push_back(make("FormattedValue", marker, {expr, spec}));
    }
    flush();
  }

  NodePtr parse_embedded_expr(const std::string& raw, int line) {
    // Parenthesize so surrounding whitespace and embedded newlines scan as
    // part of an expression rather than as layout.
    std::string text = "(" + raw + ")";
    lex::ScanResult scanned = lex::scan(text, v_, /*tolerant=*/false);
    if (scanned.error) fail("f-string: invalid syntax", line);
    Parser sub(text, std::move(scanned.tokens), v_);
    NodePtr expr;
    try {
      expr = sub.embedded_testlist();
    } catch (const Bail&) {
      fail("f-string: invalid syntax", line);
    }
    return expr;
  }

  NodePtr embedded_testlist() {
    NodePtr t = testlist(py3());
    if (!at(PK::Newline) && !at(PK::End)) fail_here("invalid syntax");
    return t;
  }
};

}  // namespace

ParseOutcome parse_module(const std::string& text, PyVersion version) {
  lex::ScanResult scanned = lex::scan(text, version, /*tolerant=*/false);
  if (scanned.error) {
    ParseOutcome out;
    out.error = ParseErr{scanned.error->py_class, scanned.error->message, scanned.error->line};
    return out;
  }
  return Parser(text, std::move(scanned.tokens), version).run();
}

}  // namespace pyfix::parse
