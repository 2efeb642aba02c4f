#pragma once

// Internal normalized syntax tree. Nodes carry no positions, whitespace
// or comments, so serialized trees compare equal exactly when the
// programs are structurally identical.

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pyfix::ast {

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
  std::string kind;
  std::string value;  // identifier, literal or operator payload; may be empty
  bool has_value = false;
  std::vector<NodePtr> children;
};

inline NodePtr make(std::string kind) {
  auto n = std::make_shared<Node>();
  n->kind = std::move(kind);
  return n;
}

inline NodePtr make(std::string kind, std::string value) {
  auto n = std::make_shared<Node>();
  n->kind = std::move(kind);
  n->value = std::move(value);
  n->has_value = true;
  return n;
}

inline NodePtr make(std::string kind, std::vector<NodePtr> children) {
  auto n = make(std::move(kind));
  n->children = std::move(children);
  return n;
}

inline NodePtr make(std::string kind, std::string value, std::vector<NodePtr> children) {
  auto n = make(std::move(kind), std::move(value));
  n->children = std::move(children);
  return n;
}

inline NodePtr nil() { return make("Nil"); }

/// Canonical form: (Kind["=<escaped value>"] child...). Values are
/// escaped so arbitrary literal text cannot collide with the syntax.
std::string serialize(const NodePtr& node);

}  // namespace pyfix::ast
