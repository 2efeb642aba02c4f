#include "pyfix/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/util.hpp"

namespace pyfix {

using nlohmann::json;

std::string match_count_table_to_json(const MatchCountTable& table) {
  json j;
  j["schema"] = "match_counts";
  j["version"] = 1;
  json t3s = json::array();
  for (double t : table.t3_values) t3s.push_back(format_double(t));
  j["t3_values"] = t3s;
  j["n3"] = table.n3;
  json rows = json::array();
  for (const auto& row : table.counts) {
    json cells = json::array();
    for (const ItemCount& c : row) {
      json cell;
      cell["match_count"] = c.match_count ? json(*c.match_count) : json(nullptr);
      cell["error"] = c.error ? json(*c.error) : json(nullptr);
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  j["counts"] = rows;
  return j.dump(2) + "\n";
}

MatchCountTable match_count_table_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(0, std::string("match-count table: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "match_counts")
    throw SchemaError(0, "match-count table: expected {\"schema\":\"match_counts\", ...}");
  MatchCountTable table;
  for (const json& t : j.value("t3_values", json::array()))
    table.t3_values.push_back(std::stod(t.get<std::string>()));
  table.n3 = j.value("n3", 0);
  for (const json& row : j.value("counts", json::array())) {
    std::vector<ItemCount> cells;
    for (const json& cell : row) {
      ItemCount c;
      if (cell.contains("match_count") && !cell["match_count"].is_null())
        c.match_count = cell["match_count"].get<int>();
      if (cell.contains("error") && !cell["error"].is_null())
        c.error = cell["error"].get<std::string>();
      cells.push_back(std::move(c));
    }
    table.counts.push_back(std::move(cells));
  }
  return table;
}

MatchCountTable collect_match_counts(const std::vector<CalItem>& items,
                                     const CalibrationGrid& grid, LlmBackend& backend,
                                     const SyntaxChecker& checker, int parallelism) {
  MatchCountTable table;
  table.t3_values = grid.t3_values;
  table.n3 = grid.n3;
  table.counts.assign(grid.t3_values.size(), std::vector<ItemCount>(items.size()));
  for (size_t ti = 0; ti < grid.t3_values.size(); ++ti) {
    ValidationParams params;
    params.t3 = grid.t3_values[ti];
    params.n3 = grid.n3;
    params.h3 = 1;  // counts only; thresholds are applied later
    std::vector<ItemCount>& row = table.counts[ti];
    parallel_for(items.size(), parallelism, [&](size_t j) {
      const CalItem& item = items[j];
      if (!item.has_feedback()) return;  // counts toward totals only
      try {
        ValidationDecision d =
            validate_feedback(item.pb, *item.pf, *item.x, params, backend, checker);
        row[j].match_count = d.match_count;
      } catch (const Error& e) {
        row[j].error = e.what();
      }
    });
  }
  return table;
}

std::vector<CalibrationPoint> points_from_counts(const MatchCountTable& table,
                                                 const std::vector<CalItem>& items,
                                                 const CalibrationGrid& grid) {
  std::vector<CalibrationPoint> points;
  if (table.counts.size() != table.t3_values.size())
    throw SchemaError(0, "match-count table rows do not match its t3 grid");
  for (size_t ti = 0; ti < table.t3_values.size(); ++ti) {
    const std::vector<ItemCount>& row = table.counts[ti];
    if (row.size() != items.size())
      throw SchemaError(0, "match-count table covers " + std::to_string(row.size()) +
                               " items, calibration set has " + std::to_string(items.size()));
    for (int h3 : grid.h3_values) {
      CalibrationPoint p;
      p.t3 = table.t3_values[ti];
      p.h3 = h3;
      int n_total = 0;
      for (size_t j = 0; j < items.size(); ++j) {
        if (row[j].error) continue;  // failed batch: out of this t3 entirely
        ++n_total;
        if (!row[j].match_count || *row[j].match_count < h3) continue;
        ++p.n_provided;
        if (items[j].rating && items[j].rating->overall) ++p.n_good;
      }
      if (n_total > 0) p.coverage = 100.0 * p.n_provided / n_total;
      if (p.n_provided > 0) p.precision = 100.0 * p.n_good / p.n_provided;
      points.push_back(p);
    }
  }
  return points;
}

std::vector<CalibrationPoint> evaluate_grid(const std::vector<CalItem>& items,
                                            const CalibrationGrid& grid, LlmBackend& backend,
                                            const SyntaxChecker& checker, int parallelism) {
  return points_from_counts(collect_match_counts(items, grid, backend, checker, parallelism),
                            items, grid);
}

namespace {

// Shared selection core: feasible set first, highest-achievable fallback,
// declared tie order. `better` must impose the module's tie-break.
template <typename Point>
const Point* select_point(const std::vector<Point>& points, double target,
                          bool (*better)(const Point&, const Point&)) {
  bool any_coverage = std::any_of(points.begin(), points.end(),
                                  [](const Point& p) { return p.coverage > 0.0; });
  if (points.empty() || !any_coverage)
    throw NoFeasiblePoint("every calibration point has zero coverage");

  const Point* best = nullptr;
  for (const Point& p : points) {
    if (!p.precision || *p.precision < target) continue;
    if (!best || better(p, *best)) best = &p;
  }
  if (best) return best;

  // Fallback: the highest precision anyone achieves.
  double max_precision = 0.0;
  for (const Point& p : points)
    if (p.precision) max_precision = std::max(max_precision, *p.precision);
  for (const Point& p : points) {
    if (!p.precision || *p.precision != max_precision) continue;
    if (!best || better(p, *best)) best = &p;
  }
  if (!best) throw NoFeasiblePoint("no calibration point accepted anything");
  return best;
}

bool better_validation_point(const CalibrationPoint& a, const CalibrationPoint& b) {
  if (a.coverage != b.coverage) return a.coverage > b.coverage;
  double ap = a.precision.value_or(-1.0), bp = b.precision.value_or(-1.0);
  if (ap != bp) return ap > bp;
  if (a.h3 != b.h3) return a.h3 < b.h3;
  return a.t3 < b.t3;
}

}  // namespace

CalibrationChoice choose_params(const std::vector<CalibrationPoint>& points,
                                TargetPrecision target, int n3) {
  const CalibrationPoint* best = select_point(points, target.P, better_validation_point);
  CalibrationChoice choice;
  choice.params.t3 = best->t3;
  choice.params.n3 = n3;
  choice.params.h3 = best->h3;
  choice.point = *best;
  return choice;
}

std::vector<int> default_rule_grid() {
  std::vector<int> grid;
  for (int h = 30; h <= 200; h += 10) grid.push_back(h);
  return grid;
}

namespace {

struct RulePoint {
  int h_r = 0;
  std::optional<double> precision;
  double coverage = 0.0;
};

bool better_rule_point(const RulePoint& a, const RulePoint& b) {
  if (a.coverage != b.coverage) return a.coverage > b.coverage;
  double ap = a.precision.value_or(-1.0), bp = b.precision.value_or(-1.0);
  if (ap != bp) return ap > bp;
  return a.h_r < b.h_r;
}

}  // namespace

RuleChoice calibrate_rule_threshold(const std::vector<CalItem>& items,
                                    const std::vector<int>& hr_grid, TargetPrecision target) {
  std::vector<RulePoint> points;
  for (int h_r : hr_grid) {
    RulePoint p;
    p.h_r = h_r;
    int n_provided = 0, n_good = 0;
    for (const CalItem& item : items) {
      if (!item.has_feedback() || count_words(*item.x) > h_r) continue;
      ++n_provided;
      if (item.rating && item.rating->overall) ++n_good;
    }
    if (!items.empty()) p.coverage = 100.0 * n_provided / static_cast<double>(items.size());
    if (n_provided > 0) p.precision = 100.0 * n_good / n_provided;
    points.push_back(p);
  }
  const RulePoint* best = select_point(points, target.P, better_rule_point);
  RuleChoice choice;
  choice.h_r = best->h_r;
  choice.precision = best->precision;
  choice.coverage = best->coverage;
  return choice;
}

}  // namespace pyfix
