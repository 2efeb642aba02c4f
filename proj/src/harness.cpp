#include "pyfix/harness.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "pyfix/errors.hpp"
#include "pyfix/lexer.hpp"

namespace pyfix {

namespace {

bool uses_selected_shots(TechniqueId t) {
  return t == TechniqueId::PyFiXV || t == TechniqueId::PyFiX_shot_Sel ||
         t == TechniqueId::PyFiParX_shot_Sel || t == TechniqueId::PyFiX_Rule ||
         t == TechniqueId::PyFiX_Opt;
}

void check_resources(TechniqueId t, const RunResources& res) {
  if ((uses_selected_shots(t) || t == TechniqueId::PyFiX_shot_Rand) && !res.shots)
    throw UsageError(std::string(technique_name(t)) + " needs a shot set");
  if (t == TechniqueId::PyFiX_shot_Rand && !res.rng)
    throw UsageError("pyfix-shot-rand needs a random source");
  if (t == TechniqueId::PyFiX_Rule && !res.h_r)
    throw UsageError("pyfix-rule needs a word-count bound");
  if (t == TechniqueId::PyFiX_Opt && !res.ratings)
    throw UsageError("pyfix-opt needs a rating store");
}

bool is_backend_outage(const Error& e) {
  switch (e.code()) {
    case ErrorCode::RateLimited:
    case ErrorCode::BackendUnavailable:
    case ErrorCode::FixtureMissing:
    case ErrorCode::EmptyExplanation:
      return true;
    default:
      return false;
  }
}

// The environment's own diagnostic, used verbatim as the explanation by
// the error-message baseline.
std::string environment_message(const SourceProgram& pb, const SyntaxChecker& checker) {
  SyntaxCheckResult check = checker.check(pb);
  if (check.ok) return "no syntax error detected";
  if (check.message) return *check.message;
  return check.error_type.value_or("Other");
}

std::vector<AnnotatedExample> draw_random_shots(const std::vector<AnnotatedExample>& pool, int k,
                                                Rng& rng) {
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<AnnotatedExample> picked;
  for (size_t i = 0; i < order.size() && static_cast<int>(picked.size()) < k; ++i)
    picked.push_back(pool[order[i]]);
  return picked;
}

}  // namespace

const char* technique_name(TechniqueId technique) {
  switch (technique) {
    case TechniqueId::PyFiXV: return "pyfixv";
    case TechniqueId::PyFiPEM: return "pyfipem";
    case TechniqueId::PyFiX_shot_None: return "pyfix-shot-none";
    case TechniqueId::PyFiX_shot_Rand: return "pyfix-shot-rand";
    case TechniqueId::PyFiX_shot_Sel: return "pyfix-shot-sel";
    case TechniqueId::PyFiParX_shot_Sel: return "pyfiparx-shot-sel";
    case TechniqueId::PyFiX_Rule: return "pyfix-rule";
    case TechniqueId::PyFiX_Opt: return "pyfix-opt";
  }
  return "?";
}

const std::vector<TechniqueId>& all_techniques() {
  static const std::vector<TechniqueId> kAll = {
      TechniqueId::PyFiXV,          TechniqueId::PyFiPEM,
      TechniqueId::PyFiX_shot_None, TechniqueId::PyFiX_shot_Rand,
      TechniqueId::PyFiX_shot_Sel,  TechniqueId::PyFiParX_shot_Sel,
      TechniqueId::PyFiX_Rule,      TechniqueId::PyFiX_Opt,
  };
  return kAll;
}

std::optional<TechniqueId> technique_from_name(const std::string& name) {
  for (TechniqueId t : all_techniques())
    if (name == technique_name(t)) return t;
  return std::nullopt;
}

RunRecord run_pipeline(const SourceProgram& pb, TechniqueId technique, LlmBackend& backend,
                       const RunResources& resources) {
  check_resources(technique, resources);
  const SyntaxChecker& checker =
      resources.checker ? *resources.checker : default_syntax_checker();

  RunRecord rec;
  rec.program_id = pb.id;
  rec.technique = technique;
  try {
    rec.fix = generate_fixed_program(pb, resources.fix_cfg, backend, checker);
    if (!rec.fix.fixed) return rec;  // no feedback without a fix
    const SourceProgram& pf = *rec.fix.fixed;
    rec.fixed = pf;

    std::string x;
    if (technique == TechniqueId::PyFiPEM) {
      x = environment_message(pb, checker);
    } else {
      std::vector<AnnotatedExample> picked;
      bool include_diff = technique != TechniqueId::PyFiParX_shot_Sel;
      if (technique == TechniqueId::PyFiX_shot_Rand) {
        picked = draw_random_shots(*resources.shots, resources.explain_cfg.k_shots,
                                   *resources.rng);
      } else if (technique == TechniqueId::PyFiParX_shot_Sel) {
        // Parallel stages: nothing downstream of Stage-1 may leak into the
        // prompt, so the query diff is taken against the buggy program
        // itself.
        picked = select_few_shots(pb, pb, *resources.shots, resources.explain_cfg.k_shots,
                                  checker);
      } else if (uses_selected_shots(technique)) {
        picked = select_few_shots(pb, pf, *resources.shots, resources.explain_cfg.k_shots,
                                  checker);
      }
      x = generate_explanation(pb, pf, picked, resources.explain_cfg, backend, include_diff);
    }
    rec.explanation = x;
    rec.fingerprint = feedback_fingerprint(pb.id, pf.text, x, technique_name(technique));
    if (resources.ratings) rec.rating = resources.ratings->lookup(rec.fingerprint);

    switch (technique) {
      case TechniqueId::PyFiXV: {
        ValidationDecision decision =
            validate_feedback(pb, pf, x, resources.validation, backend, checker);
        rec.provided = decision.accepted;
        rec.validation = std::move(decision);
        break;
      }
      case TechniqueId::PyFiX_Rule:
        rec.explanation_words = count_words(x);
        rec.provided = *rec.explanation_words <= *resources.h_r;
        break;
      case TechniqueId::PyFiX_Opt:
        if (!rec.rating)
          throw MissingRating("no rating for feedback " + rec.fingerprint + " on program " +
                              pb.id);
        rec.provided = rec.rating->overall;
        break;
      default:
        rec.provided = true;  // no validation stage
        break;
    }
  } catch (const Error& e) {
    if (!is_backend_outage(e)) throw;
    rec.provided = false;
    rec.backend_failed = true;
    rec.backend_error = e.what();
  }
  return rec;
}

MetricsReport compute_metrics(const std::vector<RunRecord>& records) {
  MetricsReport report;
  std::map<int, RoundMetrics> rounds;
  for (const RunRecord& rec : records) {
    ++report.n_total;
    RoundMetrics* rm = nullptr;
    if (rec.round >= 0) {
      rm = &rounds[rec.round];
      rm->round = rec.round;
      ++rm->n_total;
    }
    if (!rec.provided) continue;
    if (!rec.rating)
      throw MissingRating("provided feedback without a rating on program " + rec.program_id);
    ++report.n_provided;
    if (rm) ++rm->n_provided;
    if (rec.rating->overall) {
      ++report.n_good;
      if (rm) ++rm->n_good;
    }
  }

  auto finish = [](auto& m) {
    m.coverage = m.n_total ? 100.0 * m.n_provided / m.n_total : 0.0;
    if (m.n_provided) m.precision = 100.0 * m.n_good / m.n_provided;
  };
  finish(report);
  std::vector<double> coverages, precisions;
  for (auto& [round, rm] : rounds) {
    finish(rm);
    coverages.push_back(rm.coverage);
    if (rm.precision) precisions.push_back(*rm.precision);
    report.rounds.push_back(rm);
  }
  if (!coverages.empty()) {
    auto [mean, err] = mean_stderr(coverages);
    report.coverage_mean = mean;
    report.coverage_stderr = err;
  }
  if (!precisions.empty()) {
    auto [mean, err] = mean_stderr(precisions);
    report.precision_mean = mean;
    report.precision_stderr = err;
  }
  return report;
}

std::vector<SplitRound> split_dataset(size_t n, uint64_t seed) {
  if (n < 8) throw DatasetTooSmall("need at least 8 items, got " + std::to_string(n));
  Rng base(seed);
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffler = base.fork(0);
  shuffler.shuffle(perm);

  std::vector<SplitRound> rounds(4);
  for (size_t r = 0; r < 4; ++r) {
    size_t begin = r * n / 4, end = (r + 1) * n / 4;
    SplitRound& round = rounds[r];
    round.test.assign(perm.begin() + begin, perm.begin() + end);

    std::vector<size_t> rest;
    rest.reserve(n - round.test.size());
    rest.insert(rest.end(), perm.begin(), perm.begin() + begin);
    rest.insert(rest.end(), perm.begin() + end, perm.end());
    Rng redraw = base.fork(r + 1);
    redraw.shuffle(rest);

    size_t shot_size = std::min(n / 2, rest.size());
    round.shot.assign(rest.begin(), rest.begin() + shot_size);
    round.cal.assign(rest.begin() + shot_size, rest.end());

    std::sort(round.test.begin(), round.test.end());
    std::sort(round.shot.begin(), round.shot.end());
    std::sort(round.cal.begin(), round.cal.end());
  }
  return rounds;
}

std::vector<CurvePoint> tradeoff_curve(const MatchCountTable& table,
                                       const std::vector<CalItem>& items,
                                       const CalibrationGrid& grid,
                                       const std::vector<double>& targets) {
  std::vector<CalibrationPoint> points = points_from_counts(table, items, grid);
  std::vector<CurvePoint> curve;
  for (double target : targets) {
    CalibrationChoice choice = choose_params(points, TargetPrecision{target}, grid.n3);
    CurvePoint cp;
    cp.target = target;
    cp.params = choice.params;
    cp.precision = choice.point.precision;
    cp.coverage = choice.point.coverage;
    curve.push_back(cp);
  }
  return curve;
}

std::optional<double> f1_of_validator(const std::vector<RunRecord>& records) {
  long tp = 0, fp = 0, fn = 0;
  for (const RunRecord& rec : records) {
    if (!rec.fixed || !rec.explanation) continue;  // no feedback to judge
    if (!rec.rating)
      throw MissingRating("unrated feedback on program " + rec.program_id);
    bool good = rec.rating->overall;
    if (rec.provided && good) ++tp;
    if (rec.provided && !good) ++fp;
    if (!rec.provided && good) ++fn;
  }
  if (tp + fn == 0) return std::nullopt;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

EvaluationResult evaluate_technique(const std::vector<DatasetRecord>& dataset,
                                    const std::vector<AnnotatedExample>& shots,
                                    const RatingStore* ratings, LlmBackend& backend,
                                    const EvaluateOptions& opts, const SyntaxChecker& checker) {
  if (opts.rounds < 1 || opts.rounds > 4)
    throw UsageError("rounds must be between 1 and 4");
  std::vector<SplitRound> split = split_dataset(dataset.size(), opts.seed);

  EvaluationResult result;
  Rng base(opts.seed);
  for (int r = 0; r < opts.rounds; ++r) {
    const SplitRound& round = split[r];
    std::set<std::string> shot_ids;
    for (size_t idx : round.shot) shot_ids.insert(dataset[idx].program.id);
    std::vector<AnnotatedExample> pool;
    for (const AnnotatedExample& shot : shots)
      if (shot_ids.count(shot.buggy.id)) pool.push_back(shot);

    std::vector<RunRecord> records(round.test.size());
    parallel_for(round.test.size(), opts.parallelism, [&](size_t i) {
      Rng item_rng = base.fork((r + 1) * 1000003ULL + i);
      RunResources res;
      res.shots = &pool;
      res.fix_cfg = opts.fix_cfg;
      res.explain_cfg = opts.explain_cfg;
      res.validation = opts.validation;
      res.h_r = opts.h_r;
      res.ratings = ratings;
      res.checker = &checker;
      res.rng = &item_rng;
      records[i] = run_pipeline(dataset[round.test[i]].program, opts.technique, backend, res);
      records[i].round = r;
    });
    for (RunRecord& rec : records) result.records.push_back(std::move(rec));
  }
  result.metrics = compute_metrics(result.records);
  return result;
}

}  // namespace pyfix
