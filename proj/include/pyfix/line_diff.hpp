#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pyfix/source_program.hpp"

namespace pyfix {

/// One line-level change. `line_no` is 1-based and refers to the base
/// text: for removals and replacements, the base line changed; for pure
/// insertions, the base line before which `added` goes (length+1 appends).
/// Line text is stored with its newline terminator so application is
/// byte-exact; rendering strips it.
struct DiffHunk {
  int line_no = 0;
  std::optional<std::string> removed;
  std::optional<std::string> added;
};

struct LineDiff {
  std::vector<DiffHunk> hunks;

  bool empty() const { return hunks.empty(); }
};

/// Minimal line diff (longest common subsequence over exact lines).
/// Hunks come out sorted by line_no.
LineDiff compute_line_diff(const std::string& base, const std::string& target);
LineDiff compute_line_diff(const SourceProgram& base, const SourceProgram& target);

/// Reconstructs the target text from base + diff.
std::string apply_line_diff(const std::string& base, const LineDiff& diff);

/// Human-readable form used in prompts:
///   line N:
///   - old text
///   + new text
/// per hunk, newline-joined, no trailing newline. Empty diff renders as
/// "(no changes)".
std::string render_line_diff(const LineDiff& diff);

}  // namespace pyfix
