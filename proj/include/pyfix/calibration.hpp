#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pyfix/backend.hpp"
#include "pyfix/rating.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"
#include "pyfix/validation.hpp"

namespace pyfix {

struct CalibrationGrid {
  std::vector<double> t3_values = {0.3, 0.5, 0.8};
  int n3 = 10;
  std::vector<int> h3_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

// One calibration-set item: the buggy program plus the feedback produced for
// it, if any. Items without feedback still count toward the totals.
struct CalItem {
  SourceProgram pb;
  std::optional<SourceProgram> pf;
  std::optional<std::string> x;
  std::optional<QualityRating> rating;

  bool has_feedback() const { return pf.has_value() && x.has_value(); }
};

struct CalibrationPoint {
  double t3 = 0.0;
  int h3 = 0;
  std::optional<double> precision;  // absent when nothing was accepted
  double coverage = 0.0;
  int n_provided = 0;
  int n_good = 0;
};

struct TargetPrecision {
  double P = 70.0;
};

// Per-item outcome of one t3's validation batch.
struct ItemCount {
  std::optional<int> match_count;   // absent: no feedback or failed batch
  std::optional<std::string> error;  // set when the batch failed
};

// All sampling results for a grid, independent of h3, so thresholds can be
// re-derived without another backend call.
struct MatchCountTable {
  std::vector<double> t3_values;
  int n3 = 0;
  // counts[i][j]: result for t3_values[i] on item j.
  std::vector<std::vector<ItemCount>> counts;
};

std::string match_count_table_to_json(const MatchCountTable& table);
MatchCountTable match_count_table_from_json(const std::string& text);

// Runs one n3-sample validation batch per (t3, item-with-feedback). A
// backend failure is recorded on that item and does not abort the grid.
MatchCountTable collect_match_counts(const std::vector<CalItem>& items,
                                     const CalibrationGrid& grid, LlmBackend& backend,
                                     const SyntaxChecker& checker = default_syntax_checker(),
                                     int parallelism = 1);

// Pure arithmetic: precision/coverage for every (t3, h3) cell. Items whose
// batch failed at a t3 are left out of that t3's totals.
std::vector<CalibrationPoint> points_from_counts(const MatchCountTable& table,
                                                 const std::vector<CalItem>& items,
                                                 const CalibrationGrid& grid);

std::vector<CalibrationPoint> evaluate_grid(const std::vector<CalItem>& items,
                                            const CalibrationGrid& grid, LlmBackend& backend,
                                            const SyntaxChecker& checker = default_syntax_checker(),
                                            int parallelism = 1);

struct CalibrationChoice {
  ValidationParams params;
  CalibrationPoint point;  // achieved precision/coverage on the cal set
};

// Picks the max-coverage point with precision >= P; if none qualifies, falls
// back to the highest achievable precision. Ties prefer higher precision,
// then smaller h3, then smaller t3. Throws NoFeasiblePoint when every point
// has coverage zero.
CalibrationChoice choose_params(const std::vector<CalibrationPoint>& points,
                                TargetPrecision target, int n3);

struct RuleChoice {
  int h_r = 0;
  std::optional<double> precision;
  double coverage = 0.0;
};

std::vector<int> default_rule_grid();  // 30, 40, ..., 200

// Calibrates the word-count acceptance rule count_words(x) <= h_r with the
// same selection logic as choose_params.
RuleChoice calibrate_rule_threshold(const std::vector<CalItem>& items,
                                    const std::vector<int>& hr_grid, TargetPrecision target);

}  // namespace pyfix
