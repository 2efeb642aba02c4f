#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pyfix/calibration.hpp"
#include "pyfix/cli_config.hpp"
#include "pyfix/datastore.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/explanation_generation.hpp"
#include "pyfix/fix_generation.hpp"
#include "pyfix/harness.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/util.hpp"
#include "pyfix/validation.hpp"

using namespace pyfix;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string backend_override;
  uint64_t seed = 0;
  int parallelism = 0;  // 0: keep the config value
};

RunConfig resolve_config(const GlobalArgs& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : run_config_from_file(g.config_path);
  if (!g.backend_override.empty()) {
    if (g.backend_override != "live" && g.backend_override != "replay" &&
        g.backend_override != "record" && g.backend_override != "scripted")
      throw UsageError("--backend must be live, replay, record or scripted");
    cfg.mode = g.backend_override;
  }
  if (g.parallelism > 0) cfg.parallelism = g.parallelism;
  return cfg;
}

SourceProgram read_program(const std::string& path, int version) {
  SourceProgram p;
  p.id = std::filesystem::path(path).stem().string();
  p.text = read_file(path);
  p.version = version_from_number(version);
  return p;
}

// stdout by default; files go through the temp-file-and-rename path.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    atomic_write_file(out_path, content);
}

TechniqueId parse_technique(const std::string& name) {
  std::optional<TechniqueId> technique = technique_from_name(name);
  if (technique) return *technique;
  std::string valid;
  for (TechniqueId t : all_techniques()) {
    if (!valid.empty()) valid += ", ";
    valid += technique_name(t);
  }
  throw UsageError("unknown technique '" + name + "' (one of: " + valid + ")");
}

RatingsFile load_ratings_warned(const std::string& path) {
  RatingsFile file = load_ratings(path);
  for (const std::string& w : file.warnings) std::cerr << "ratings: " << w << "\n";
  return file;
}

MatchCountTable table_for(const std::vector<CalItem>& items, const CalibrationGrid& grid,
                          const std::string& counts_path, const std::string& save_counts,
                          const RunConfig& cfg, const SyntaxChecker& checker) {
  MatchCountTable table;
  if (!counts_path.empty()) {
    table = match_count_table_from_json(read_file(counts_path));
  } else {
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    table = collect_match_counts(items, grid, *backend, checker, cfg.parallelism);
  }
  if (!save_counts.empty()) atomic_write_file(save_counts, match_count_table_to_json(table));
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback generation for Python syntax errors: repair, explain, validate"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--config", global.config_path, "TOML run configuration");
  app.add_option("--backend", global.backend_override,
                 "Backend mode override: live, replay, record or scripted");
  app.add_option("--seed", global.seed, "Root seed for every randomized choice")
      ->capture_default_str();
  app.add_option("--parallelism", global.parallelism, "Concurrent per-item pipelines");

  int exit_code = 0;

  // fix
  auto* fix_cmd = app.add_subcommand("fix", "Repair one buggy program (exit 3 when no fix)");
  struct {
    std::string input, out;
    int version = 3;
    double t1 = 0.5;
    int n1 = 10;
  } fix_args;
  fix_cmd->add_option("--input", fix_args.input, "Buggy program file")->required();
  fix_cmd->add_option("--version", fix_args.version, "Python version of the program")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  fix_cmd->add_option("--t1", fix_args.t1, "Sampling temperature")->capture_default_str();
  fix_cmd->add_option("--n1", fix_args.n1, "Candidate count")->capture_default_str();
  fix_cmd->add_option("--out", fix_args.out, "Write the fixed program here instead of stdout");
  fix_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    SourceProgram pb = read_program(fix_args.input, fix_args.version);
    FixConfig fc;
    fc.t1 = fix_args.t1;
    fc.n1 = fix_args.n1;
    FixOutcome outcome = generate_fixed_program(pb, fc, *backend, checker);
    if (!outcome.fixed) {
      std::cerr << "no fix found (" << outcome.candidates_total << " candidates, "
                << outcome.candidates_valid << " parseable)\n";
      exit_code = 3;
      return;
    }
    emit(fix_args.out, outcome.fixed->text);
  });

  // explain
  auto* explain_cmd =
      app.add_subcommand("explain", "Explain the bug given the buggy and fixed programs");
  struct {
    std::string buggy, fixed, shots, out;
    int version = 3;
    int k = 3;
    double t2 = 0.0;
    bool buggy_only = false;
  } explain_args;
  explain_cmd->add_option("--buggy", explain_args.buggy, "Buggy program file")->required();
  explain_cmd->add_option("--fixed", explain_args.fixed,
                          "Fixed program file (omit with --buggy-only)");
  explain_cmd->add_option("--shots", explain_args.shots, "Annotated example pool (jsonl)");
  explain_cmd->add_option("--version", explain_args.version, "Python version")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  explain_cmd->add_option("--k", explain_args.k, "Examples per prompt")->capture_default_str();
  explain_cmd->add_option("--t2", explain_args.t2, "Sampling temperature")
      ->capture_default_str();
  explain_cmd->add_flag("--buggy-only", explain_args.buggy_only,
                        "Build the prompt from the buggy program alone");
  explain_cmd->add_option("--out", explain_args.out, "Write the explanation here");
  explain_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    SourceProgram pb = read_program(explain_args.buggy, explain_args.version);
    if (!explain_args.buggy_only && explain_args.fixed.empty())
      throw UsageError("--fixed is required unless --buggy-only is set");
    SourceProgram pf = pb;
    if (!explain_args.buggy_only) {
      pf = read_program(explain_args.fixed, explain_args.version);
      pf.id = pb.id;
    }
    std::vector<AnnotatedExample> pool;
    if (!explain_args.shots.empty()) pool = load_shots(explain_args.shots, checker);
    std::vector<AnnotatedExample> picked =
        select_few_shots(pb, pf, pool, explain_args.k, checker);
    ExplainConfig ec;
    ec.t2 = explain_args.t2;
    ec.k_shots = explain_args.k;
    std::string x = generate_explanation(pb, pf, picked, ec, *backend,
                                         !explain_args.buggy_only);
    emit(explain_args.out, x + "\n");
  });

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "Run the simulated-student check on one explanation");
  struct {
    std::string buggy, fixed, explanation, params;
    int version = 3;
    double t3 = 0.5;
    int n3 = 10;
    int h3 = 1;
  } validate_args;
  validate_cmd->add_option("--buggy", validate_args.buggy, "Buggy program file")->required();
  validate_cmd->add_option("--fixed", validate_args.fixed, "Fixed program file")->required();
  validate_cmd->add_option("--explanation", validate_args.explanation, "Explanation text file")
      ->required();
  validate_cmd->add_option("--version", validate_args.version, "Python version")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  validate_cmd->add_option("--t3", validate_args.t3, "Sampling temperature")
      ->capture_default_str();
  validate_cmd->add_option("--n3", validate_args.n3, "Sample count")->capture_default_str();
  validate_cmd->add_option("--h3", validate_args.h3, "Acceptance threshold")
      ->capture_default_str();
  validate_cmd->add_option("--params", validate_args.params,
                           "Calibrated parameter file (overrides --t3/--n3/--h3)");
  validate_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    SourceProgram pb = read_program(validate_args.buggy, validate_args.version);
    SourceProgram pf = read_program(validate_args.fixed, validate_args.version);
    pf.id = pb.id;
    std::string x = read_file(validate_args.explanation);
    ValidationParams params;
    if (!validate_args.params.empty()) {
      params = validation_params_from_json(read_file(validate_args.params));
    } else {
      params.t3 = validate_args.t3;
      params.n3 = validate_args.n3;
      params.h3 = validate_args.h3;
    }
    ValidationDecision decision = validate_feedback(pb, pf, x, params, *backend, checker);
    std::cout << (decision.accepted ? "ACCEPT" : "REJECT")
              << " match_count=" << decision.match_count << "\n";
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one program through one technique");
  struct {
    std::string input, technique, shots, params, ratings, out;
    int version = 3;
    int k = 3;
    double t1 = 0.5;
    int n1 = 10;
    std::optional<int> h_r;
  } run_args;
  run_cmd->add_option("--input", run_args.input, "Buggy program file")->required();
  run_cmd->add_option("--technique", run_args.technique, "Technique name")->required();
  run_cmd->add_option("--version", run_args.version, "Python version")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  run_cmd->add_option("--shots", run_args.shots, "Annotated example pool (jsonl)");
  run_cmd->add_option("--params", run_args.params, "Calibrated validation parameters");
  run_cmd->add_option("--ratings", run_args.ratings, "Rating store (jsonl)");
  run_cmd->add_option("--h-r", run_args.h_r, "Word bound for the length rule");
  run_cmd->add_option("--k", run_args.k, "Examples per prompt")->capture_default_str();
  run_cmd->add_option("--t1", run_args.t1, "Repair temperature")->capture_default_str();
  run_cmd->add_option("--n1", run_args.n1, "Repair candidates")->capture_default_str();
  run_cmd->add_option("--out", run_args.out, "Write the run record here instead of stdout");
  run_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    TechniqueId technique = parse_technique(run_args.technique);
    SourceProgram pb = read_program(run_args.input, run_args.version);

    std::vector<AnnotatedExample> shots;
    RatingsFile ratings;
    RunResources res;
    if (!run_args.shots.empty()) {
      shots = load_shots(run_args.shots, checker);
      res.shots = &shots;
    }
    if (!run_args.ratings.empty()) {
      ratings = load_ratings_warned(run_args.ratings);
      res.ratings = &ratings.store;
    }
    res.fix_cfg.t1 = run_args.t1;
    res.fix_cfg.n1 = run_args.n1;
    res.explain_cfg.k_shots = run_args.k;
    if (!run_args.params.empty())
      res.validation = validation_params_from_json(read_file(run_args.params));
    res.h_r = run_args.h_r;
    res.checker = &checker;
    Rng rng(global.seed);
    res.rng = &rng;

    RunRecord record = run_pipeline(pb, technique, *backend, res);
    emit(run_args.out, run_record_to_json(record).dump(2) + "\n");
    if (record.backend_failed) exit_code = 4;
  });

  // calibrate
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Pick validation thresholds for a target precision");
  struct {
    std::string cal, ratings, out, counts, save_counts;
    double target = 70.0;
    bool rule = false;
  } cal_args;
  calibrate_cmd->add_option("--cal", cal_args.cal, "Calibration set (jsonl)")->required();
  calibrate_cmd->add_option("--ratings", cal_args.ratings, "Rating store (jsonl)")->required();
  calibrate_cmd
      ->add_option("--target-precision", cal_args.target, "Precision level to calibrate for")
      ->required();
  calibrate_cmd->add_option("--out", cal_args.out, "Parameter file to write");
  calibrate_cmd->add_option("--counts", cal_args.counts,
                            "Reuse a saved match-count table instead of sampling");
  calibrate_cmd->add_option("--save-counts", cal_args.save_counts,
                            "Persist the sampled match-count table here");
  calibrate_cmd->add_flag("--rule", cal_args.rule,
                          "Calibrate the explanation-length rule instead");
  calibrate_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    RatingsFile ratings = load_ratings_warned(cal_args.ratings);
    std::vector<CalItem> items = load_cal_items(cal_args.cal, ratings.store);
    TargetPrecision target{cal_args.target};
    if (cal_args.rule) {
      RuleChoice choice = calibrate_rule_threshold(items, default_rule_grid(), target);
      emit(cal_args.out, rule_choice_to_json(choice));
      return;
    }
    CalibrationGrid grid;
    MatchCountTable table =
        table_for(items, grid, cal_args.counts, cal_args.save_counts, cfg, checker);
    CalibrationChoice choice =
        choose_params(points_from_counts(table, items, grid), target, grid.n3);
    emit(cal_args.out, calibration_choice_to_json(choice));
  });

  // evaluate
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Cross-validated evaluation of one technique");
  struct {
    std::string dataset, technique, shots, params, ratings, out;
    int rounds = 4;
    int k = 3;
    std::optional<int> h_r;
  } eval_args;
  evaluate_cmd->add_option("--dataset", eval_args.dataset, "Dataset (jsonl)")->required();
  evaluate_cmd->add_option("--technique", eval_args.technique, "Technique name")->required();
  evaluate_cmd->add_option("--shots", eval_args.shots, "Annotated example pool (jsonl)");
  evaluate_cmd->add_option("--params", eval_args.params, "Calibrated validation parameters");
  evaluate_cmd->add_option("--ratings", eval_args.ratings, "Rating store (jsonl)")
      ->required();
  evaluate_cmd->add_option("--rounds", eval_args.rounds, "Evaluation rounds to run (1-4)")
      ->capture_default_str();
  evaluate_cmd->add_option("--k", eval_args.k, "Examples per prompt")->capture_default_str();
  evaluate_cmd->add_option("--h-r", eval_args.h_r, "Word bound for the length rule");
  evaluate_cmd->add_option("--out", eval_args.out, "Report file to write");
  evaluate_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    std::shared_ptr<LlmBackend> backend = make_backend(cfg);
    std::vector<DatasetRecord> dataset = load_dataset(eval_args.dataset, checker);
    std::vector<AnnotatedExample> shots;
    if (!eval_args.shots.empty()) shots = load_shots(eval_args.shots, checker);
    RatingsFile ratings = load_ratings_warned(eval_args.ratings);
    EvaluateOptions opts;
    opts.technique = parse_technique(eval_args.technique);
    opts.seed = global.seed;
    opts.rounds = eval_args.rounds;
    opts.parallelism = cfg.parallelism;
    opts.explain_cfg.k_shots = eval_args.k;
    if (!eval_args.params.empty())
      opts.validation = validation_params_from_json(read_file(eval_args.params));
    opts.h_r = eval_args.h_r;
    EvaluationResult result =
        evaluate_technique(dataset, shots, &ratings.store, *backend, opts, checker);

    std::optional<double> f1;
    try {
      f1 = f1_of_validator(result.records);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingRating) throw;
    }
    json records = json::array();
    for (const RunRecord& r : result.records) records.push_back(run_record_to_json(r));
    json report = {{"technique", technique_name(opts.technique)},
                   {"seed", opts.seed},
                   {"rounds", opts.rounds},
                   {"metrics", metrics_report_to_json(result.metrics)},
                   {"f1", f1 ? json(*f1) : json(nullptr)},
                   {"records", records}};
    emit(eval_args.out, report.dump(2) + "\n");
  });

  // curve
  auto* curve_cmd =
      app.add_subcommand("curve", "Precision/coverage trade-off across target levels");
  struct {
    std::string cal, ratings, out, counts, save_counts;
    std::vector<double> targets;
  } curve_args;
  curve_cmd->add_option("--cal", curve_args.cal, "Calibration set (jsonl)")->required();
  curve_cmd->add_option("--ratings", curve_args.ratings, "Rating store (jsonl)")->required();
  curve_cmd->add_option("--targets", curve_args.targets,
                        "Comma-separated precision levels (default 50..100 by 5)")
      ->delimiter(',');
  curve_cmd->add_option("--out", curve_args.out, "CSV file to write");
  curve_cmd->add_option("--counts", curve_args.counts,
                        "Reuse a saved match-count table instead of sampling");
  curve_cmd->add_option("--save-counts", curve_args.save_counts,
                        "Persist the sampled match-count table here");
  curve_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    RatingsFile ratings = load_ratings_warned(curve_args.ratings);
    std::vector<CalItem> items = load_cal_items(curve_args.cal, ratings.store);
    std::vector<double> targets = curve_args.targets;
    if (targets.empty())
      for (int p = 50; p <= 100; p += 5) targets.push_back(p);
    CalibrationGrid grid;
    MatchCountTable table =
        table_for(items, grid, curve_args.counts, curve_args.save_counts, cfg, checker);
    std::vector<CurvePoint> points = tradeoff_curve(table, items, grid, targets);
    emit(curve_args.out, curve_to_csv(points));
  });

  // ingest
  auto* ingest_cmd =
      app.add_subcommand("ingest", "Filter raw buggy programs into a dataset file");
  struct {
    std::string input, out, report;
    int version = 3;
    int max_tokens = 500;
    bool anonymize = false;
  } ingest_args;
  ingest_cmd->add_option("--input", ingest_args.input, "JSONL file or directory of sources")
      ->required();
  ingest_cmd->add_option("--out", ingest_args.out, "Dataset file to write")->required();
  ingest_cmd->add_option("--version", ingest_args.version, "Default Python version")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  ingest_cmd->add_option("--max-tokens", ingest_args.max_tokens, "Admission length bound")
      ->capture_default_str();
  ingest_cmd->add_flag("--anonymize", ingest_args.anonymize, "Mask string literal contents");
  ingest_cmd->add_option("--report", ingest_args.report, "Write the rejection report here");
  ingest_cmd->callback([&] {
    RunConfig cfg = resolve_config(global);
    SyntaxChecker checker = make_checker(cfg);
    IngestOptions opts;
    opts.version = version_from_number(ingest_args.version);
    opts.anonymize = ingest_args.anonymize;
    opts.max_tokens = ingest_args.max_tokens;
    IngestReport report = ingest(ingest_args.input, opts, checker);
    write_dataset(ingest_args.out, report.admitted);
    if (!ingest_args.report.empty()) {
      json rejected = json::array();
      for (const Rejection& r : report.rejected)
        rejected.push_back({{"id", r.id}, {"reason", reject_reason_name(r.reason)}});
      json summary = {{"admitted", report.admitted.size()},
                      {"rejected", rejected}};
      atomic_write_file(ingest_args.report, summary.dump(2) + "\n");
    }
    std::cerr << "admitted " << report.admitted.size() << ", rejected "
              << report.rejected.size() << "\n";
  });

  // anonymize
  auto* anon_cmd = app.add_subcommand("anonymize", "Mask string literal contents with 'x'");
  struct {
    std::string input, out;
    int version = 3;
  } anon_args;
  anon_cmd->add_option("--input", anon_args.input, "Program file")->required();
  anon_cmd->add_option("--version", anon_args.version, "Python version")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  anon_cmd->add_option("--out", anon_args.out, "Write the masked program here");
  anon_cmd->callback([&] {
    SourceProgram p = read_program(anon_args.input, anon_args.version);
    emit(anon_args.out, anonymize_string_literals(p).text);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::vector<CLI::App*> subs = app.get_subcommands();
    std::cout << (subs.empty() ? &app : subs.front())->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::vector<CLI::App*> subs = app.get_subcommands();
    std::cerr << e.what() << "\n\n" << (subs.empty() ? &app : subs.front())->help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::UsageError: {
        std::vector<CLI::App*> subs = app.get_subcommands();
        if (!subs.empty()) std::cerr << "\n" << subs.front()->help();
        return 2;
      }
      case ErrorCode::RateLimited:
      case ErrorCode::BackendUnavailable:
      case ErrorCode::FixtureMissing:
      case ErrorCode::EmptyExplanation:
        return 4;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
