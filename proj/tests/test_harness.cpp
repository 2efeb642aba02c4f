#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pyfix/errors.hpp"
#include "pyfix/harness.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/util.hpp"

using namespace pyfix;

namespace {

SourceProgram prog(const std::string& id, const std::string& text) {
  SourceProgram p;
  p.id = id;
  p.text = text;
  p.version = PyVersion::Py3;
  return p;
}

const char* kBuggy = "x = (1\n";
const char* kFixed = "x = (1)\n";
const char* kWhy = "add the closing parenthesis";

ScriptEntry edit_entry(std::vector<std::string> outputs) {
  ScriptEntry e;
  e.kind = ScriptEntry::Kind::Edit;
  e.outputs = std::move(outputs);
  return e;
}

ScriptEntry completion_entry(std::vector<std::string> outputs) {
  ScriptEntry e;
  e.kind = ScriptEntry::Kind::Complete;
  e.outputs = std::move(outputs);
  return e;
}

// Forwards to a wrapped backend while keeping copies of every request so
// tests can inspect prompts and instructions.
struct CapturingBackend : LlmBackend {
  LlmBackend& inner;
  std::vector<EditRequest> edits;
  std::vector<CompletionRequest> completions;

  explicit CapturingBackend(LlmBackend& b) : inner(b) {}
  GenerationBatch edit_generate(const EditRequest& req) override {
    edits.push_back(req);
    return inner.edit_generate(req);
  }
  GenerationBatch complete_generate(const CompletionRequest& req) override {
    completions.push_back(req);
    return inner.complete_generate(req);
  }
};

AnnotatedExample shot(const std::string& id, const std::string& buggy, const std::string& fixed,
                      const std::string& why) {
  return annotate_example(prog(id, buggy), prog(id, fixed), why);
}

std::vector<AnnotatedExample> small_shot_pool() {
  return {
      shot("s1", "a = (1\n", "a = (1)\n", "close the parenthesis"),
      shot("s2", "b = [2\n", "b = [2]\n", "close the bracket"),
      shot("s3", "c = {3\n", "c = {3}\n", "close the brace"),
      shot("s4", "d = (4,\n", "d = (4,)\n", "close the tuple"),
      shot("s5", "e = [5,\n", "e = [5,]\n", "close the list"),
  };
}

// A three-call script for one validated run: fix batch, explanation
// completion, then a validation batch matching `matches` of n3=3 samples.
std::vector<ScriptEntry> pyfixv_script(int matches) {
  std::vector<std::string> validation;
  for (int i = 0; i < 3; ++i) validation.push_back(i < matches ? kFixed : kBuggy);
  return {edit_entry({kFixed}), completion_entry({kWhy}), edit_entry(std::move(validation))};
}

RunResources resources_for(TechniqueId technique, const std::vector<AnnotatedExample>* shots,
                           const RatingStore* ratings, Rng* rng) {
  RunResources res;
  res.shots = shots;
  res.explain_cfg.k_shots = 3;
  res.validation.t3 = 0.5;
  res.validation.n3 = 3;
  res.validation.h3 = 2;
  res.h_r = 30;
  res.ratings = ratings;
  res.rng = rng;
  (void)technique;
  return res;
}

int count_of(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1))
    ++n;
  return n;
}

RunRecord synthetic_record(bool provided, bool good, int round = -1) {
  static int counter = 0;
  RunRecord rec;
  rec.program_id = "p" + std::to_string(counter++);
  rec.technique = TechniqueId::PyFiXV;
  rec.fixed = prog(rec.program_id, kFixed);
  rec.explanation = kWhy;
  rec.provided = provided;
  rec.rating = make_rating(good, good, good, good);
  rec.round = round;
  return rec;
}

}  // namespace

TEST_CASE("technique names round trip") {
  CHECK(all_techniques().size() == 8);
  for (TechniqueId t : all_techniques()) {
    auto back = technique_from_name(technique_name(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK(!technique_from_name("pyfix").has_value());
  CHECK(std::string(technique_name(TechniqueId::PyFiXV)) == "pyfixv");
  CHECK(std::string(technique_name(TechniqueId::PyFiParX_shot_Sel)) == "pyfiparx-shot-sel");
}

TEST_CASE("the validated pipeline accepts when enough simulated students succeed") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  ScriptedBackend backend(pyfixv_script(2));
  RunResources res = resources_for(TechniqueId::PyFiXV, &pool, nullptr, nullptr);
  RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiXV, backend, res);

  CHECK(rec.provided);
  REQUIRE(rec.fixed.has_value());
  CHECK(rec.fixed->text == kFixed);
  CHECK(rec.explanation == kWhy);
  REQUIRE(rec.validation.has_value());
  CHECK(rec.validation->match_count == 2);
  CHECK(rec.fingerprint == feedback_fingerprint("p1", kFixed, kWhy, "pyfixv"));
  CHECK(!rec.backend_failed);
  CHECK(backend.entries_left() == 0);
}

TEST_CASE("the validated pipeline withholds on too few matches") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  ScriptedBackend backend(pyfixv_script(1));
  RunResources res = resources_for(TechniqueId::PyFiXV, &pool, nullptr, nullptr);
  RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiXV, backend, res);

  CHECK(!rec.provided);
  CHECK(rec.fixed.has_value());        // feedback exists, it was just withheld
  CHECK(rec.explanation.has_value());
  CHECK(rec.validation->match_count == 1);
}

TEST_CASE("a failed first stage withholds feedback under every technique") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  RatingStore ratings;
  Rng rng(7);
  for (TechniqueId t : all_techniques()) {
    ScriptedBackend backend({edit_entry({"still ( broken", "also ( broken"})});
    RunResources res = resources_for(t, &pool, &ratings, &rng);
    RunRecord rec = run_pipeline(prog("p1", kBuggy), t, backend, res);
    CAPTURE(technique_name(t));
    CHECK(!rec.provided);
    CHECK(!rec.fixed.has_value());
    CHECK(!rec.explanation.has_value());
    CHECK(!rec.backend_failed);
    CHECK(rec.fix.candidates_valid == 0);
    CHECK(backend.entries_left() == 0);  // nothing ran past stage 1
  }
}

TEST_CASE("no-validation techniques always provide successful fixes") {
  RatingStore ratings;
  for (TechniqueId t : {TechniqueId::PyFiPEM, TechniqueId::PyFiX_shot_None,
                        TechniqueId::PyFiX_shot_Rand, TechniqueId::PyFiX_shot_Sel,
                        TechniqueId::PyFiParX_shot_Sel}) {
    std::vector<AnnotatedExample> pool = small_shot_pool();
    Rng rng(7);
    std::vector<ScriptEntry> script = {edit_entry({kFixed})};
    if (t != TechniqueId::PyFiPEM) script.push_back(completion_entry({kWhy}));
    ScriptedBackend backend(std::move(script));
    RunResources res = resources_for(t, &pool, &ratings, &rng);
    RunRecord rec = run_pipeline(prog("p1", kBuggy), t, backend, res);
    CAPTURE(technique_name(t));
    CHECK(rec.provided);
    CHECK(backend.entries_left() == 0);
  }
}

TEST_CASE("the error-message baseline uses the oracle diagnostic verbatim") {
  SourceProgram pb = prog("p1", kBuggy);
  ScriptedBackend backend({edit_entry({kFixed})});
  RunResources res = resources_for(TechniqueId::PyFiPEM, nullptr, nullptr, nullptr);
  RunRecord rec = run_pipeline(pb, TechniqueId::PyFiPEM, backend, res);

  SyntaxCheckResult check = default_syntax_checker().check(pb);
  REQUIRE(check.message.has_value());
  CHECK(rec.explanation == *check.message);
  CHECK(rec.provided);
  CHECK(backend.entries_left() == 0);  // no completion call happened
}

TEST_CASE("the parallel variant never leaks the fix into the prompt") {
  std::vector<AnnotatedExample> pool = small_shot_pool();

  ScriptedBackend seq_script({edit_entry({kFixed}), completion_entry({kWhy})});
  CapturingBackend seq(seq_script);
  RunResources res = resources_for(TechniqueId::PyFiX_shot_Sel, &pool, nullptr, nullptr);
  run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_shot_Sel, seq, res);
  REQUIRE(seq.completions.size() == 1);
  CHECK(seq.completions[0].prompt.find("Diff:") != std::string::npos);

  ScriptedBackend par_script({edit_entry({kFixed}), completion_entry({kWhy})});
  CapturingBackend par(par_script);
  run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiParX_shot_Sel, par, res);
  REQUIRE(par.completions.size() == 1);
  CHECK(par.completions[0].prompt.find("Diff:") == std::string::npos);
  CHECK(par.completions[0].prompt.find(kFixed) == std::string::npos);
  CHECK(par.completions[0].prompt.find(kBuggy) != std::string::npos);
}

TEST_CASE("random shots draw without replacement from the pool") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  Rng rng(42);
  ScriptedBackend script({edit_entry({kFixed}), completion_entry({kWhy})});
  CapturingBackend capture(script);
  RunResources res = resources_for(TechniqueId::PyFiX_shot_Rand, &pool, nullptr, &rng);
  run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_shot_Rand, capture, res);

  REQUIRE(capture.completions.size() == 1);
  const std::string& prompt = capture.completions[0].prompt;
  CHECK(count_of(prompt, kShotDelimiter) == 4);  // three shots and the query
  int present = 0;
  for (const AnnotatedExample& s : pool)
    if (prompt.find(s.buggy.text) != std::string::npos) ++present;
  CHECK(present == 3);

  // Same seed, same draw.
  Rng rng2(42);
  ScriptedBackend script2({edit_entry({kFixed}), completion_entry({kWhy})});
  CapturingBackend capture2(script2);
  res.rng = &rng2;
  run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_shot_Rand, capture2, res);
  CHECK(capture2.completions[0].prompt == prompt);
}

TEST_CASE("the word-count rule accepts only terse explanations") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  for (auto [why, words, accept] :
       {std::tuple<const char*, int, bool>{"add one parenthesis now", 4, true},
        std::tuple<const char*, int, bool>{
            "this very long explanation rambles on and on without mercy", 10, false}}) {
    ScriptedBackend backend({edit_entry({kFixed}), completion_entry({why})});
    RunResources res = resources_for(TechniqueId::PyFiX_Rule, &pool, nullptr, nullptr);
    res.h_r = 5;
    RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_Rule, backend, res);
    REQUIRE(rec.explanation_words.has_value());
    CHECK(*rec.explanation_words == words);
    CHECK(rec.provided == accept);
  }
}

TEST_CASE("the rating oracle provides exactly the well-rated feedback") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  std::string fp = feedback_fingerprint("p1", kFixed, kWhy, "pyfix-opt");

  RatingStore good;
  good.add({fp, make_rating(true, true, true, true), "alice", "t"});
  ScriptedBackend b1({edit_entry({kFixed}), completion_entry({kWhy})});
  RunResources res = resources_for(TechniqueId::PyFiX_Opt, &pool, &good, nullptr);
  RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_Opt, b1, res);
  CHECK(rec.provided);
  REQUIRE(rec.rating.has_value());
  CHECK(rec.rating->overall);

  RatingStore bad;
  bad.add({fp, make_rating(true, true, true, false), "alice", "t"});
  ScriptedBackend b2({edit_entry({kFixed}), completion_entry({kWhy})});
  res.ratings = &bad;
  rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_Opt, b2, res);
  CHECK(!rec.provided);

  RatingStore empty;
  ScriptedBackend b3({edit_entry({kFixed}), completion_entry({kWhy})});
  res.ratings = &empty;
  CHECK_THROWS_AS(run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiX_Opt, b3, res),
                  MissingRating);
}

TEST_CASE("ratings attach to any technique that finds one") {
  std::vector<AnnotatedExample> pool = small_shot_pool();
  std::string fp = feedback_fingerprint("p1", kFixed, kWhy, "pyfixv");
  RatingStore store;
  store.add({fp, make_rating(true, true, true, true), "alice", "t"});

  ScriptedBackend backend(pyfixv_script(3));
  RunResources res = resources_for(TechniqueId::PyFiXV, &pool, &store, nullptr);
  RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiXV, backend, res);
  REQUIRE(rec.rating.has_value());
  CHECK(rec.rating->overall);
}

TEST_CASE("a backend outage is recorded, not thrown") {
  std::vector<AnnotatedExample> pool = small_shot_pool();

  // Script runs dry before the explanation call.
  ScriptedBackend backend({edit_entry({kFixed})});
  RunResources res = resources_for(TechniqueId::PyFiXV, &pool, nullptr, nullptr);
  RunRecord rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiXV, backend, res);
  CHECK(!rec.provided);
  CHECK(rec.backend_failed);
  REQUIRE(rec.backend_error.has_value());
  CHECK(rec.backend_error->find("script") != std::string::npos);
  CHECK(rec.fixed.has_value());  // stage 1 had already succeeded

  // A blank explanation is an upstream failure too.
  ScriptedBackend blank({edit_entry({kFixed}), completion_entry({"   "})});
  rec = run_pipeline(prog("p1", kBuggy), TechniqueId::PyFiXV, blank, res);
  CHECK(!rec.provided);
  CHECK(rec.backend_failed);
}

TEST_CASE("missing resources fail fast before any backend call") {
  ScriptedBackend backend({});
  RunResources bare;
  CHECK_THROWS_AS(
      run_pipeline(prog("p", kBuggy), TechniqueId::PyFiX_shot_Sel, backend, bare), UsageError);
  std::vector<AnnotatedExample> pool = small_shot_pool();
  bare.shots = &pool;
  CHECK_THROWS_AS(
      run_pipeline(prog("p", kBuggy), TechniqueId::PyFiX_shot_Rand, backend, bare), UsageError);
  CHECK_THROWS_AS(run_pipeline(prog("p", kBuggy), TechniqueId::PyFiX_Rule, backend, bare),
                  UsageError);
  CHECK_THROWS_AS(run_pipeline(prog("p", kBuggy), TechniqueId::PyFiX_Opt, backend, bare),
                  UsageError);
  CHECK(backend.entries_left() == 0);
}

TEST_CASE("metric arithmetic matches hand-computed percentages") {
  std::vector<RunRecord> records;
  for (int i = 0; i < 60; ++i) {
    bool provided = i < 40;
    bool good = i < 30;  // all good ones are provided
    records.push_back(synthetic_record(provided, good));
  }
  MetricsReport report = compute_metrics(records);
  CHECK(report.n_total == 60);
  CHECK(report.n_provided == 40);
  CHECK(report.n_good == 30);
  CHECK(report.coverage == doctest::Approx(66.6667).epsilon(1e-4));
  REQUIRE(report.precision.has_value());
  CHECK(*report.precision == 75.0);
  CHECK(report.rounds.empty());
}

TEST_CASE("zero provided means zero coverage and absent precision") {
  std::vector<RunRecord> records = {synthetic_record(false, false),
                                    synthetic_record(false, true)};
  MetricsReport report = compute_metrics(records);
  CHECK(report.coverage == 0.0);
  CHECK(!report.precision.has_value());
  CHECK(compute_metrics({}).n_total == 0);
}

TEST_CASE("provided feedback without a rating is a contract violation") {
  RunRecord rec = synthetic_record(true, true);
  rec.rating.reset();
  CHECK_THROWS_AS(compute_metrics({rec}), MissingRating);
}

TEST_CASE("round grouping reports mean and standard error across rounds") {
  // Per-round precisions 70, 72, 74, 76 from exact integer ratios.
  struct Round {
    int provided, good;
  };
  std::vector<Round> spec = {{10, 7}, {25, 18}, {50, 37}, {25, 19}};
  std::vector<RunRecord> records;
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < spec[r].provided; ++i)
      records.push_back(synthetic_record(true, i < spec[r].good, r));

  MetricsReport report = compute_metrics(records);
  REQUIRE(report.rounds.size() == 4);
  CHECK(*report.rounds[0].precision == 70.0);
  CHECK(*report.rounds[1].precision == 72.0);
  CHECK(*report.rounds[2].precision == 74.0);
  CHECK(*report.rounds[3].precision == 76.0);
  REQUIRE(report.precision_mean.has_value());
  CHECK(*report.precision_mean == doctest::Approx(73.0));
  // Sample stddev sqrt(20/3), over four rounds.
  CHECK(*report.precision_stderr == doctest::Approx(1.29099).epsilon(1e-4));
  CHECK(*report.coverage_mean == doctest::Approx(100.0));

  // Order of records never matters.
  Rng rng(3);
  rng.shuffle(records);
  MetricsReport again = compute_metrics(records);
  CHECK(again.n_provided == report.n_provided);
  CHECK(again.precision == report.precision);
  REQUIRE(again.rounds.size() == 4);
  for (int r = 0; r < 4; ++r) {
    CHECK(again.rounds[r].round == report.rounds[r].round);
    CHECK(again.rounds[r].precision == report.rounds[r].precision);
  }
  CHECK(again.precision_stderr == report.precision_stderr);
}

TEST_CASE("the splitter partitions the dataset into four exhaustive test quarters") {
  std::vector<SplitRound> rounds = split_dataset(240, 7);
  REQUIRE(rounds.size() == 4);
  std::set<size_t> seen;
  for (const SplitRound& r : rounds) {
    CHECK(r.test.size() == 60);
    CHECK(r.shot.size() == 120);
    CHECK(r.cal.size() == 60);
    for (size_t idx : r.test) CHECK(seen.insert(idx).second);  // disjoint

    // Within a round the three parts partition the dataset.
    std::set<size_t> all(r.test.begin(), r.test.end());
    for (size_t idx : r.shot) CHECK(all.insert(idx).second);
    for (size_t idx : r.cal) CHECK(all.insert(idx).second);
    CHECK(all.size() == 240);
    CHECK(std::is_sorted(r.test.begin(), r.test.end()));
    CHECK(std::is_sorted(r.shot.begin(), r.shot.end()));
  }
  CHECK(seen.size() == 240);  // union is the whole dataset

  // Shot halves are redrawn per round.
  CHECK(rounds[0].shot != rounds[1].shot);
}

TEST_CASE("splits are deterministic in the seed") {
  std::vector<SplitRound> a = split_dataset(33, 11);
  std::vector<SplitRound> b = split_dataset(33, 11);
  std::vector<SplitRound> c = split_dataset(33, 12);
  for (int r = 0; r < 4; ++r) {
    CHECK(a[r].test == b[r].test);
    CHECK(a[r].shot == b[r].shot);
    CHECK(a[r].cal == b[r].cal);
  }
  bool any_diff = false;
  for (int r = 0; r < 4; ++r) any_diff = any_diff || a[r].test != c[r].test;
  CHECK(any_diff);
}

TEST_CASE("uneven sizes stay within one of each other and tiny sets refuse") {
  CHECK_THROWS_AS(split_dataset(7, 1), DatasetTooSmall);
  std::vector<SplitRound> rounds = split_dataset(10, 3);
  std::set<size_t> seen;
  for (const SplitRound& r : rounds) {
    CHECK(r.test.size() >= 2);
    CHECK(r.test.size() <= 3);
    CHECK(r.shot.size() == 5);
    CHECK(r.test.size() + r.shot.size() + r.cal.size() == 10);
    for (size_t idx : r.test) seen.insert(idx);
  }
  CHECK(seen.size() == 10);

  std::vector<SplitRound> eight = split_dataset(8, 3);
  for (const SplitRound& r : eight) {
    CHECK(r.test.size() == 2);
    CHECK(r.shot.size() == 4);
    CHECK(r.cal.size() == 2);
  }
}

TEST_CASE("f1 matches the direct confusion-matrix formula") {
  auto judged = [](bool provided, bool good) {
    RunRecord rec = synthetic_record(provided, good);
    return rec;
  };

  // TP=2 FP=1 FN=1: F1 = 2*2 / (2*2 + 1 + 1) = 2/3.
  std::vector<RunRecord> toy = {judged(true, true), judged(true, true), judged(true, false),
                                judged(false, true)};
  REQUIRE(f1_of_validator(toy).has_value());
  CHECK(*f1_of_validator(toy) == doctest::Approx(2.0 / 3.0));

  // A perfect validator.
  std::vector<RunRecord> perfect = {judged(true, true), judged(false, false),
                                    judged(true, true)};
  CHECK(*f1_of_validator(perfect) == 1.0);

  // Accept-everything: F1 = 2p/(p+1) at base precision p = 3/4.
  std::vector<RunRecord> all = {judged(true, true), judged(true, true), judged(true, true),
                                judged(true, false)};
  CHECK(*f1_of_validator(all) == doctest::Approx(2.0 * 0.75 / 1.75));

  // No positives anywhere: undefined.
  std::vector<RunRecord> none = {judged(true, false), judged(false, false)};
  CHECK(!f1_of_validator(none).has_value());

  // Stage-1 failures are outside the confusion matrix.
  RunRecord failed;
  failed.program_id = "f";
  toy.push_back(failed);
  CHECK(*f1_of_validator(toy) == doctest::Approx(2.0 / 3.0));

  // Stage-1-successful but unrated records violate the contract.
  RunRecord unrated = judged(false, false);
  unrated.rating.reset();
  toy.push_back(unrated);
  CHECK_THROWS_AS(f1_of_validator(toy), MissingRating);
}

TEST_CASE("the trade-off curve flattens below the achievable floor and falls back on top") {
  // Four items, counts chosen so h3 trades precision against coverage:
  // counts [10, 9, 3, 1], ratings [bad, good, good, good]. The validator
  // is anti-correlated with quality at the top, so no threshold beats the
  // accept-everything point.
  std::vector<CalItem> items;
  std::vector<int> counts = {10, 9, 3, 1};
  std::vector<bool> goods = {false, true, true, true};
  for (int i = 0; i < 4; ++i) {
    CalItem it;
    it.pb = prog("p" + std::to_string(i), kBuggy);
    it.pf = prog("p" + std::to_string(i), kFixed);
    it.x = kWhy;
    it.rating = make_rating(goods[i], goods[i], goods[i], goods[i]);
    items.push_back(it);
  }
  CalibrationGrid grid;
  grid.t3_values = {0.5};
  MatchCountTable table;
  table.t3_values = grid.t3_values;
  table.n3 = grid.n3;
  table.counts.resize(1);
  for (int c : counts) {
    ItemCount cell;
    cell.match_count = c;
    table.counts[0].push_back(cell);
  }

  // h3=1: 4 provided, 3 good -> precision 75, coverage 100.
  // h3=2..3: 3 provided, 2 good -> 66.7/75.
  // h3=4..9: 2 provided, 1 good -> 50/50.
  // h3=10: 1 provided, 0 good -> 0/25. Max achievable precision is 75.
  std::vector<CurvePoint> curve = tradeoff_curve(table, items, grid, {10, 50, 75, 90, 100});
  REQUIRE(curve.size() == 5);
  // Targets at or below 75 are all served by the same max-coverage point.
  for (int i = 0; i < 3; ++i) {
    CHECK(curve[i].params.h3 == 1);
    CHECK(*curve[i].precision == 75.0);
    CHECK(curve[i].coverage == 100.0);
  }
  // Nothing reaches 90 or 100: fall back to the best achievable precision,
  // reported truthfully.
  for (int i = 3; i < 5; ++i) {
    CHECK(*curve[i].precision == 75.0);
    CHECK(curve[i].coverage == 100.0);
  }
}

TEST_CASE("the trade-off curve agrees with exhaustive enumeration on random data") {
  Rng rng(90210);
  for (int round = 0; round < 25; ++round) {
    size_t n_items = 3 + rng.below(6);
    std::vector<CalItem> items;
    MatchCountTable table;
    CalibrationGrid grid;  // full three-temperature grid
    table.t3_values = grid.t3_values;
    table.n3 = grid.n3;
    table.counts.resize(grid.t3_values.size());
    for (size_t i = 0; i < n_items; ++i) {
      CalItem it;
      it.pb = prog("p" + std::to_string(i), kBuggy);
      it.pf = prog("p" + std::to_string(i), kFixed);
      it.x = kWhy;
      bool good = rng.below(2) == 0;
      it.rating = make_rating(good, good, good, good);
      items.push_back(it);
      for (size_t t = 0; t < grid.t3_values.size(); ++t) {
        ItemCount cell;
        cell.match_count = static_cast<int>(rng.below(11));
        table.counts[t].push_back(cell);
      }
    }
    double target = static_cast<double>(rng.below(101));

    // Reference: enumerate every grid point from the raw counts.
    struct Best {
      bool set = false;
      double precision = -1, coverage = -1;
      int h3 = 0;
      double t3 = 0;
    };
    auto point_of = [&](size_t t_idx, int h3) {
      int provided = 0, good = 0;
      for (size_t i = 0; i < n_items; ++i) {
        if (*table.counts[t_idx][i].match_count >= h3) {
          ++provided;
          if (items[i].rating->overall) ++good;
        }
      }
      double coverage = 100.0 * provided / n_items;
      std::optional<double> precision;
      if (provided) precision = 100.0 * good / provided;
      return std::make_pair(coverage, precision);
    };
    auto pick = [&](auto admits) {
      Best best;
      for (size_t t_idx = 0; t_idx < grid.t3_values.size(); ++t_idx)
        for (int h3 = 1; h3 <= 10; ++h3) {
          auto [coverage, precision] = point_of(t_idx, h3);
          if (!admits(precision)) continue;
          double prec = precision.value_or(-1);
          bool better = !best.set || coverage > best.coverage ||
                        (coverage == best.coverage && prec > best.precision) ||
                        (coverage == best.coverage && prec == best.precision &&
                         (h3 < best.h3 || (h3 == best.h3 && grid.t3_values[t_idx] < best.t3)));
          if (better)
            best = {true, prec, coverage, h3, grid.t3_values[t_idx]};
        }
      return best;
    };
    Best feasible =
        pick([&](std::optional<double> p) { return p.has_value() && *p >= target; });
    Best expected = feasible;
    if (!feasible.set) {
      double top = -1;
      for (size_t t_idx = 0; t_idx < grid.t3_values.size(); ++t_idx)
        for (int h3 = 1; h3 <= 10; ++h3) {
          auto [coverage, precision] = point_of(t_idx, h3);
          (void)coverage;
          if (precision) top = std::max(top, *precision);
        }
      if (top < 0) {
        CHECK_THROWS_AS(tradeoff_curve(table, items, grid, {target}), NoFeasiblePoint);
        continue;
      }
      expected =
          pick([&](std::optional<double> p) { return p.has_value() && *p == top; });
    }

    std::vector<CurvePoint> curve = tradeoff_curve(table, items, grid, {target});
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].coverage == expected.coverage);
    CHECK(curve[0].params.h3 == expected.h3);
    CHECK(curve[0].params.t3 == expected.t3);
  }
}

TEST_CASE("cross-validated evaluation is deterministic and tags rounds") {
  // Eight programs; Stage-1 fails for two of them, the rest are accepted
  // by the zero-shot technique.
  std::vector<DatasetRecord> dataset;
  for (int i = 0; i < 8; ++i) {
    DatasetRecord r;
    r.program.id = "p" + std::to_string(i);
    r.program.text = "x = (" + std::to_string(i) + "\n";
    r.program.version = PyVersion::Py3;
    dataset.push_back(r);
  }

  auto script_for = [&](const std::vector<SplitRound>& split) {
    // Walk rounds in order, emitting fix + explanation entries per item;
    // items p0 and p1 get unparseable fixes and consume only the fix call.
    std::vector<ScriptEntry> entries;
    for (int r = 0; r < 4; ++r)
      for (size_t idx : split[r].test) {
        const std::string& id = dataset[idx].program.id;
        if (id == "p0" || id == "p1") {
          entries.push_back(edit_entry({"still ( broken"}));
        } else {
          entries.push_back(edit_entry({"x = (9)\n"}));
          entries.push_back(completion_entry({kWhy}));
        }
      }
    return entries;
  };

  RatingStore ratings;
  for (int i = 2; i < 8; ++i)
    ratings.add({feedback_fingerprint("p" + std::to_string(i), "x = (9)\n", kWhy,
                                      "pyfix-shot-none"),
                 make_rating(true, true, true, i % 2 == 0), "r", "t"});

  EvaluateOptions opts;
  opts.technique = TechniqueId::PyFiX_shot_None;
  opts.seed = 5;
  std::vector<SplitRound> split = split_dataset(8, opts.seed);

  ScriptedBackend backend(script_for(split));
  EvaluationResult result =
      evaluate_technique(dataset, {}, &ratings, backend, opts);
  CHECK(backend.entries_left() == 0);
  REQUIRE(result.records.size() == 8);
  CHECK(result.metrics.n_total == 8);
  CHECK(result.metrics.n_provided == 6);  // stage-1 failures withhold
  CHECK(result.metrics.n_good == 3);
  CHECK(result.metrics.coverage == 75.0);
  CHECK(*result.metrics.precision == 50.0);
  REQUIRE(result.metrics.rounds.size() == 4);
  for (const RoundMetrics& rm : result.metrics.rounds) CHECK(rm.n_total == 2);

  // Bitwise repeatability.
  ScriptedBackend backend2(script_for(split));
  EvaluationResult again =
      evaluate_technique(dataset, {}, &ratings, backend2, opts);
  REQUIRE(again.records.size() == result.records.size());
  for (size_t i = 0; i < result.records.size(); ++i) {
    CHECK(again.records[i].program_id == result.records[i].program_id);
    CHECK(again.records[i].provided == result.records[i].provided);
    CHECK(again.records[i].round == result.records[i].round);
  }

  // Limiting the round count runs a prefix of the protocol.
  opts.rounds = 2;
  std::vector<ScriptEntry> prefix;
  for (int r = 0; r < 2; ++r)
    for (size_t idx : split[r].test) {
      const std::string& id = dataset[idx].program.id;
      if (id == "p0" || id == "p1") {
        prefix.push_back(edit_entry({"still ( broken"}));
      } else {
        prefix.push_back(edit_entry({"x = (9)\n"}));
        prefix.push_back(completion_entry({kWhy}));
      }
    }
  ScriptedBackend backend3(std::move(prefix));
  EvaluationResult short_run =
      evaluate_technique(dataset, {}, &ratings, backend3, opts);
  CHECK(short_run.records.size() == 4);
  CHECK(short_run.metrics.rounds.size() == 2);
}

TEST_CASE("no-validation coverage equals the stage-1 success rate") {
  // 3 of 8 programs fail stage 1: success rate 62.5.
  std::vector<DatasetRecord> dataset;
  for (int i = 0; i < 8; ++i) {
    DatasetRecord r;
    r.program.id = "q" + std::to_string(i);
    r.program.text = "y = (" + std::to_string(i) + "\n";
    r.program.version = PyVersion::Py3;
    dataset.push_back(r);
  }
  std::set<std::string> failing = {"q0", "q3", "q6"};

  EvaluateOptions opts;
  opts.technique = TechniqueId::PyFiX_shot_None;
  opts.seed = 9;
  std::vector<SplitRound> split = split_dataset(8, opts.seed);
  std::vector<ScriptEntry> entries;
  for (int r = 0; r < 4; ++r)
    for (size_t idx : split[r].test) {
      if (failing.count(dataset[idx].program.id)) {
        entries.push_back(edit_entry({"nope ("}));
      } else {
        entries.push_back(edit_entry({"y = (9)\n"}));
        entries.push_back(completion_entry({kWhy}));
      }
    }
  RatingStore ratings;
  for (int i = 0; i < 8; ++i)
    ratings.add({feedback_fingerprint("q" + std::to_string(i), "y = (9)\n", kWhy,
                                      "pyfix-shot-none"),
                 make_rating(true, true, true, true), "r", "t"});

  ScriptedBackend backend(std::move(entries));
  EvaluationResult result = evaluate_technique(dataset, {}, &ratings, backend, opts);
  int stage1_ok = 0;
  for (const RunRecord& rec : result.records)
    if (rec.fixed) ++stage1_ok;
  CHECK(result.metrics.coverage == 100.0 * stage1_ok / 8);
  CHECK(result.metrics.coverage == 62.5);
}
