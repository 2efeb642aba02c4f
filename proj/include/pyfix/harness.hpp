#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pyfix/backend.hpp"
#include "pyfix/calibration.hpp"
#include "pyfix/datastore.hpp"
#include "pyfix/explanation_generation.hpp"
#include "pyfix/fix_generation.hpp"
#include "pyfix/rating.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"
#include "pyfix/util.hpp"
#include "pyfix/validation.hpp"

namespace pyfix {

// The full technique roster: the validated pipeline, the error-message
// baseline, the shot ablations, the parallel-stages variant, the length
// rule and the rating oracle.
enum class TechniqueId {
  PyFiXV,
  PyFiPEM,
  PyFiX_shot_None,
  PyFiX_shot_Rand,
  PyFiX_shot_Sel,
  PyFiParX_shot_Sel,
  PyFiX_Rule,
  PyFiX_Opt,
};

const char* technique_name(TechniqueId technique);
std::optional<TechniqueId> technique_from_name(const std::string& name);
const std::vector<TechniqueId>& all_techniques();

// Everything a single pipeline run may need. Null members are fine for
// techniques that do not use them; a technique missing a required resource
// raises UsageError before any backend call.
struct RunResources {
  const std::vector<AnnotatedExample>* shots = nullptr;
  FixConfig fix_cfg;
  ExplainConfig explain_cfg;
  ValidationParams validation;          // PyFiXV
  std::optional<int> h_r;               // PyFiX_Rule word bound
  const RatingStore* ratings = nullptr; // attached when present; required by PyFiX_Opt
  const SyntaxChecker* checker = nullptr;  // default checker when null
  Rng* rng = nullptr;                   // PyFiX_shot_Rand draw source
};

struct RunRecord {
  std::string program_id;
  TechniqueId technique = TechniqueId::PyFiXV;
  std::optional<SourceProgram> fixed;
  std::optional<std::string> explanation;
  bool provided = false;

  FixOutcome fix;
  std::optional<ValidationDecision> validation;  // PyFiXV
  std::optional<int> explanation_words;          // PyFiX_Rule
  std::string fingerprint;                       // set once feedback exists
  std::optional<QualityRating> rating;

  bool backend_failed = false;
  std::optional<std::string> backend_error;
  int round = -1;  // filled by the evaluation loop
};

// Runs one program through one technique. Feedback that was generated but
// rejected stays in the record with provided=false; a failed Stage-1 or a
// backend outage yields provided=false as well, the latter with the
// failure flag set.
RunRecord run_pipeline(const SourceProgram& pb, TechniqueId technique, LlmBackend& backend,
                       const RunResources& resources);

struct RoundMetrics {
  int round = -1;
  int n_total = 0;
  int n_provided = 0;
  int n_good = 0;
  double coverage = 0.0;
  std::optional<double> precision;
};

struct MetricsReport {
  int n_total = 0;
  int n_provided = 0;
  int n_good = 0;
  double coverage = 0.0;               // pooled over all records
  std::optional<double> precision;     // absent when nothing was provided
  std::vector<RoundMetrics> rounds;    // present when records carry rounds
  std::optional<double> coverage_mean, coverage_stderr;
  std::optional<double> precision_mean, precision_stderr;  // over rounds with any provided
};

// Percentage arithmetic over run records, pooled and per round. Every
// provided record must carry a rating.
MetricsReport compute_metrics(const std::vector<RunRecord>& records);

struct SplitRound {
  std::vector<size_t> test, shot, cal;  // indices, each sorted ascending
};

// Four evaluation rounds over n items: the test quarters partition the
// index space; each round redraws half the items as shots and a quarter
// for calibration from the remaining three quarters. Deterministic in
// seed. Fewer than 8 items raise DatasetTooSmall.
std::vector<SplitRound> split_dataset(size_t n, uint64_t seed);

struct CurvePoint {
  double target = 0.0;
  ValidationParams params;
  std::optional<double> precision;
  double coverage = 0.0;
};

// Precision/coverage trade-off: for each requested target, calibrate on
// the given match counts and report the chosen point's numbers on the
// same set.
std::vector<CurvePoint> tradeoff_curve(const MatchCountTable& table,
                                       const std::vector<CalItem>& items,
                                       const CalibrationGrid& grid,
                                       const std::vector<double>& targets);

// F1 of the accept decision over records where Stage-1 produced feedback:
// positives are good-rated feedback, predicted positives the provided
// ones. Absent when there are no positives.
std::optional<double> f1_of_validator(const std::vector<RunRecord>& records);

struct EvaluateOptions {
  TechniqueId technique = TechniqueId::PyFiXV;
  uint64_t seed = 0;
  int rounds = 4;  // 1..4: how many of the four rounds to run
  int parallelism = 1;
  FixConfig fix_cfg;
  ExplainConfig explain_cfg;
  ValidationParams validation;
  std::optional<int> h_r;
};

struct EvaluationResult {
  std::vector<RunRecord> records;
  MetricsReport metrics;
};

// Cross-validated evaluation: runs the technique over each round's test
// quarter, with that round's shot annotations as the prompt pool, and
// aggregates the metrics per round.
EvaluationResult evaluate_technique(const std::vector<DatasetRecord>& dataset,
                                    const std::vector<AnnotatedExample>& shots,
                                    const RatingStore* ratings, LlmBackend& backend,
                                    const EvaluateOptions& opts,
                                    const SyntaxChecker& checker = default_syntax_checker());

}  // namespace pyfix
