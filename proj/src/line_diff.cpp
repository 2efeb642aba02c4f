#include "pyfix/line_diff.hpp"

#include <algorithm>

namespace pyfix {
namespace {

// Lines keep their newline terminator; the final line may lack one.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      lines.push_back(text.substr(start, i - start + 1));
      start = i + 1;
    }
  }
  if (start < text.size()) lines.push_back(text.substr(start));
  return lines;
}

std::string strip_terminator(const std::string& line) {
  if (line.size() >= 2 && line.compare(line.size() - 2, 2, "\r\n") == 0)
    return line.substr(0, line.size() - 2);
  if (!line.empty() && line.back() == '\n') return line.substr(0, line.size() - 1);
  return line;
}

}  // namespace

LineDiff compute_line_diff(const std::string& base, const std::string& target) {
  const std::vector<std::string> a = split_lines(base);
  const std::vector<std::string> b = split_lines(target);
  const size_t n = a.size(), m = b.size();

  // dp[i][j] = LCS length of a[i..], b[j..]
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);

  LineDiff diff;
  size_t i = 0, j = 0;
  std::vector<size_t> removed;          // consecutive base indices
  std::vector<std::string> added;       // inserted line texts
  auto flush = [&](size_t base_at) {
    if (removed.empty() && added.empty()) return;
    const size_t first = removed.empty() ? base_at : removed.front();
    const size_t r = removed.size();
    const size_t pairs = std::min(r, added.size());
    for (size_t p = 0; p < pairs; ++p) {
      DiffHunk h;
      h.line_no = static_cast<int>(first + p) + 1;
      h.removed = a[first + p];
      h.added = added[p];
      diff.hunks.push_back(std::move(h));
    }
    for (size_t p = pairs; p < r; ++p) {
      DiffHunk h;
      h.line_no = static_cast<int>(first + p) + 1;
      h.removed = a[first + p];
      diff.hunks.push_back(std::move(h));
    }
    for (size_t p = pairs; p < added.size(); ++p) {
      DiffHunk h;
      h.line_no = static_cast<int>(first + r) + 1;
      h.added = added[p];
      diff.hunks.push_back(std::move(h));
    }
    removed.clear();
    added.clear();
  };

  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      flush(i);
      ++i;
      ++j;
    } else if (j >= m || (i < n && dp[i + 1][j] >= dp[i][j + 1])) {
      removed.push_back(i);
      ++i;
    } else {
      added.push_back(b[j]);
      ++j;
    }
  }
  flush(n);
  return diff;
}

LineDiff compute_line_diff(const SourceProgram& base, const SourceProgram& target) {
  return compute_line_diff(base.text, target.text);
}

std::string apply_line_diff(const std::string& base, const LineDiff& diff) {
  const std::vector<std::string> lines = split_lines(base);
  std::string out;
  size_t h = 0;
  for (size_t l = 1; l <= lines.size() + 1; ++l) {
    while (h < diff.hunks.size() && diff.hunks[h].line_no == static_cast<int>(l) &&
           !diff.hunks[h].removed) {
      out += *diff.hunks[h].added;
      ++h;
    }
    if (l > lines.size()) break;
    if (h < diff.hunks.size() && diff.hunks[h].line_no == static_cast<int>(l) &&
        diff.hunks[h].removed) {
      if (diff.hunks[h].added) out += *diff.hunks[h].added;
      ++h;
    } else {
      out += lines[l - 1];
    }
  }
  return out;
}

std::string render_line_diff(const LineDiff& diff) {
  if (diff.hunks.empty()) return "(no changes)";
  std::string out;
  for (const auto& h : diff.hunks) {
    if (!out.empty()) out += "\n";
    out += "line " + std::to_string(h.line_no) + ":";
    if (h.removed) out += "\n- " + strip_terminator(*h.removed);
    if (h.added) out += "\n+ " + strip_terminator(*h.added);
  }
  return out;
}

}  // namespace pyfix
