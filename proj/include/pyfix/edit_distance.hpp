#pragma once

#include <string>
#include <vector>

#include "pyfix/lexer.hpp"

namespace pyfix {

/// Levenshtein distance over token value sequences: unit-cost insert,
/// delete and substitute. Symmetric; zero iff the value sequences match.
int token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

int token_edit_distance(const TokenStream& a, const TokenStream& b);

}  // namespace pyfix
