#include "py_ast.hpp"

namespace pyfix::ast {
namespace {

void escape_into(const std::string& s, std::string& out) {
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '(': out += "\\("; break;
      case ')': out += "\\)"; break;
      case ' ': out += "\\s"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\0': out += "\\0"; break;
      default: out += c;
    }
  }
}

void serialize_into(const NodePtr& node, std::string& out) {
  out += '(';
  out += node->kind;
  if (node->has_value) {
    out += '=';
    escape_into(node->value, out);
  }
  for (const auto& c : node->children) {
    out += ' ';
    serialize_into(c, out);
  }
  out += ')';
}

}  // namespace

std::string serialize(const NodePtr& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

}  // namespace pyfix::ast
