#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pyfix/datastore.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/util.hpp"
#include "support/sample_programs.hpp"

using namespace pyfix;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pyfix_ds_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string dataset_line(const std::string& id, const std::string& source, int version = 3) {
  json j = {{"schema", 1}, {"id", id}, {"source", source}, {"version", version}};
  return j.dump() + "\n";
}

// Unclosed tuple with an exact surface token count: "x = (" then
// comma-joined ones.
std::string long_buggy(int tokens) {
  REQUIRE(tokens >= 4);
  REQUIRE(tokens % 2 == 0);
  std::string text = "x = (1";
  for (int i = 0; i < (tokens - 4) / 2; ++i) text += ",1";
  text += "\n";
  return text;
}

}  // namespace

TEST_CASE("ingest admits buggy programs and reports each rejection reason") {
  TempDir dir;
  std::string too_long = long_buggy(502);
  {
    SourceProgram probe;
    probe.text = too_long;
    probe.version = PyVersion::Py3;
    REQUIRE(tokenize(probe).size() == 502);
  }
  std::string file = dir.file("data.jsonl");
  atomic_write_file(file, dataset_line("p1", "x = (1\n") + dataset_line("p2", "x = 1\n") +
                              dataset_line("p3", too_long) +
                              dataset_line("p4", "y = (2\n") +
                              dataset_line("p5", "y  =  ( 2\n"));

  IngestReport report = ingest(file);
  REQUIRE(report.admitted.size() == 2);
  CHECK(report.admitted[0].program.id == "p1");
  CHECK(report.admitted[0].error_type == "InvalidSyntax");
  CHECK(report.admitted[0].token_count == 4);
  CHECK(report.admitted[1].program.id == "p4");

  REQUIRE(report.rejected.size() == 3);
  CHECK(report.rejected[0].id == "p2");
  CHECK(report.rejected[0].reason == RejectReason::Parses);
  CHECK(report.rejected[1].id == "p3");
  CHECK(report.rejected[1].reason == RejectReason::TooLong);
  CHECK(report.rejected[2].id == "p5");  // token-identical to p4
  CHECK(report.rejected[2].reason == RejectReason::Duplicate);
}

TEST_CASE("the token bound is inclusive") {
  TempDir dir;
  std::string at_bound = long_buggy(500);
  {
    SourceProgram probe;
    probe.text = at_bound;
    probe.version = PyVersion::Py3;
    REQUIRE(tokenize(probe).size() == 500);
  }
  std::string file = dir.file("data.jsonl");
  atomic_write_file(file, dataset_line("p1", at_bound));
  IngestReport report = ingest(file);
  CHECK(report.admitted.size() == 1);
  CHECK(report.admitted[0].token_count == 500);
  CHECK(report.rejected.empty());
}

TEST_CASE("ingest walks a directory of source files named by file") {
  TempDir dir;
  std::filesystem::create_directories(dir.path / "src");
  atomic_write_file(dir.file("src/b.py"), "x = (1\n");
  atomic_write_file(dir.file("src/a.py"), "while True\n    pass\n");
  {
    std::ofstream raw(dir.file("src/c.py"), std::ios::binary);
    raw << "s = '\xff\xfe'\n";  // not utf-8
  }

  IngestReport report = ingest(dir.file("src"));
  REQUIRE(report.admitted.size() == 2);
  CHECK(report.admitted[0].program.id == "a.py");
  CHECK(report.admitted[1].program.id == "b.py");
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].id == "c.py");
  CHECK(report.rejected[0].reason == RejectReason::BadEncoding);
}

TEST_CASE("re-ingesting a written dataset reproduces it exactly") {
  TempDir dir;
  std::string file = dir.file("data.jsonl");
  atomic_write_file(file, dataset_line("p2", "y = (2\n", 2) + dataset_line("p1", "x = (1\n") +
                              dataset_line("p3", "z = 1\n"));
  IngestReport first = ingest(file);
  REQUIRE(first.admitted.size() == 2);

  std::string out = dir.file("clean.jsonl");
  write_dataset(out, first.admitted);
  IngestReport second = ingest(out);
  CHECK(second.rejected.empty());
  REQUIRE(second.admitted.size() == first.admitted.size());
  for (size_t i = 0; i < first.admitted.size(); ++i) {
    CHECK(second.admitted[i].program.id == first.admitted[i].program.id);
    CHECK(second.admitted[i].program.text == first.admitted[i].program.text);
    CHECK(second.admitted[i].program.version == first.admitted[i].program.version);
    CHECK(second.admitted[i].error_type == first.admitted[i].error_type);
    CHECK(second.admitted[i].token_count == first.admitted[i].token_count);
  }

  // Loading the written file agrees with ingesting it.
  std::vector<DatasetRecord> loaded = load_dataset(out);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].program.id == "p1");
  CHECK(loaded[1].program.version == PyVersion::Py2);
}

TEST_CASE("the anonymize flag masks literals before deduplication") {
  TempDir dir;
  std::string file = dir.file("data.jsonl");
  atomic_write_file(file, dataset_line("p1", "s = 'hello' +\n") +
                              dataset_line("p2", "s = 'world' +\n"));
  IngestOptions opts;
  opts.anonymize = true;
  IngestReport report = ingest(file, opts);
  REQUIRE(report.admitted.size() == 1);
  CHECK(report.admitted[0].program.text == "s = 'xxxxx' +\n");
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].reason == RejectReason::Duplicate);

  // Without the flag the two literals keep the programs distinct.
  CHECK(ingest(file).admitted.size() == 2);
}

TEST_CASE("load_dataset enforces the record invariants") {
  TempDir dir;
  std::string file = dir.file("data.jsonl");

  atomic_write_file(file, dataset_line("p1", "x = 1\n"));
  CHECK_THROWS_AS(load_dataset(file), SchemaError);

  atomic_write_file(file, dataset_line("p1", "x = (1\n") + dataset_line("p1", "y = (1\n"));
  CHECK_THROWS_AS(load_dataset(file), SchemaError);

  atomic_write_file(file, "{\"schema\":1,\"id\":\"p\",\"source\":\"x = (1\\n\"}\n");
  CHECK_THROWS_AS(load_dataset(file), SchemaError);  // missing version

  atomic_write_file(file, dataset_line("p1", "x = (1\n") + "not json\n");
  try {
    load_dataset(file);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 2);
  }

  atomic_write_file(file, "");
  CHECK(load_dataset(file).empty());
}

TEST_CASE("shots survive a write/load round trip with derived fields rebuilt") {
  using namespace pyfix::testdata;
  TempDir dir;
  SourceProgram buggy;
  buggy.id = "shot1";
  buggy.text = kRangeAppendBuggy;
  buggy.version = PyVersion::Py3;
  SourceProgram fixed = buggy;
  fixed.text = kRangeAppendFixed;
  AnnotatedExample direct = annotate_example(buggy, fixed, kRangeAppendExplanation);

  std::string file = dir.file("shots.jsonl");
  write_shots(file, {direct});
  std::vector<AnnotatedExample> loaded = load_shots(file);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].buggy.id == "shot1");
  CHECK(loaded[0].buggy.text == direct.buggy.text);
  CHECK(loaded[0].fixed.text == direct.fixed.text);
  CHECK(loaded[0].explanation == direct.explanation);
  CHECK(loaded[0].error_type == direct.error_type);
  CHECK(loaded[0].diff_tokens.values() == direct.diff_tokens.values());
}

TEST_CASE("invalid shots never load") {
  TempDir dir;
  std::string file = dir.file("shots.jsonl");

  json broken_fix = {{"schema", 1},      {"id", "s"},
                     {"buggy", "x = (1\n"}, {"fixed", "x = (1\n"},
                     {"explanation", "no fix at all"}, {"version", 3}};
  atomic_write_file(file, broken_fix.dump() + "\n");
  CHECK_THROWS_AS(load_shots(file), ParseFailure);

  json blank = {{"schema", 1},        {"id", "s"},
                {"buggy", "x = (1\n"},   {"fixed", "x = (1)\n"},
                {"explanation", "  \n"}, {"version", 3}};
  atomic_write_file(file, blank.dump() + "\n");
  CHECK_THROWS_AS(load_shots(file), EmptyExplanation);

  atomic_write_file(file, "");
  CHECK(load_shots(file).empty());
}

TEST_CASE("feedback fingerprints separate every component") {
  std::string base = feedback_fingerprint("id", "fix", "because", "pyfixv");
  CHECK(base == feedback_fingerprint("id", "fix", "because", "pyfixv"));
  CHECK(base != feedback_fingerprint("id2", "fix", "because", "pyfixv"));
  CHECK(base != feedback_fingerprint("id", "fix2", "because", "pyfixv"));
  CHECK(base != feedback_fingerprint("id", "fix", "because!", "pyfixv"));
  CHECK(base != feedback_fingerprint("id", "fix", "because", "pyfipem"));
  // Field boundaries are real, not string concatenation.
  CHECK(feedback_fingerprint("ab", "c", "d", "e") != feedback_fingerprint("a", "bc", "d", "e"));
}

TEST_CASE("rating stores recompute overall and reject duplicate verdicts") {
  RatingStore store;
  RatingRecord r;
  r.fingerprint = "fp1";
  r.rater = "alice";
  r.ts = "2026-01-01T00:00:00Z";
  r.rating = {true, true, true, false, /*overall=*/true};  // stored overall is a lie
  store.add(r);
  REQUIRE(store.lookup("fp1").has_value());
  CHECK(!store.lookup("fp1")->overall);

  CHECK_THROWS_AS(store.add(r), SchemaError);

  // A second rater may disagree; the effective verdict is the conjunction.
  RatingRecord r2 = r;
  r2.rater = "bob";
  r2.rating = make_rating(true, true, true, true);
  store.add(r2);
  CHECK(store.size() == 2);
  CHECK(store.lookup("fp1")->fix_ok);
  CHECK(!store.lookup("fp1")->comprehensible);
  CHECK(!store.lookup("fp1")->overall);

  CHECK(!store.lookup("missing").has_value());
}

TEST_CASE("ratings files round trip and flag integer attributes") {
  TempDir dir;
  RatingStore store;
  store.add({"fp1", make_rating(true, true, true, true), "alice", "t1"});
  store.add({"fp2", make_rating(true, false, true, true), "alice", "t2"});
  std::string file = dir.file("ratings.jsonl");
  write_ratings(file, store);

  RatingsFile loaded = load_ratings(file);
  CHECK(loaded.warnings.empty());
  REQUIRE(loaded.store.size() == 2);
  CHECK(loaded.store.lookup("fp1")->overall);
  CHECK(!loaded.store.lookup("fp2")->overall);
  CHECK(loaded.store.records()[1].rater == "alice");
  CHECK(loaded.store.records()[1].ts == "t2");

  // 0/1 integers are accepted and a wrong stored overall only warns.
  json legacy = {{"schema", 1}, {"fingerprint", "fp3"}, {"fix_ok", 1}, {"complete", 1},
                 {"correct", 1}, {"comprehensible", 0}, {"overall", 1},
                 {"rater", "carol"}, {"ts", "t3"}};
  atomic_write_file(file, legacy.dump() + "\n");
  RatingsFile warned = load_ratings(file);
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.warnings[0].find("line 1") != std::string::npos);
  CHECK(!warned.store.lookup("fp3")->overall);

  // Duplicate (fingerprint, rater) pairs are schema violations.
  atomic_write_file(file, legacy.dump() + "\n" + legacy.dump() + "\n");
  try {
    load_ratings(file);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 2);
  }

  json bad_flag = legacy;
  bad_flag["fix_ok"] = 2;
  atomic_write_file(file, bad_flag.dump() + "\n");
  CHECK_THROWS_AS(load_ratings(file), SchemaError);
}

TEST_CASE("reject reasons print by name") {
  CHECK(std::string(reject_reason_name(RejectReason::BadEncoding)) == "BadEncoding");
  CHECK(std::string(reject_reason_name(RejectReason::Parses)) == "Parses");
  CHECK(std::string(reject_reason_name(RejectReason::TooLong)) == "TooLong");
  CHECK(std::string(reject_reason_name(RejectReason::Duplicate)) == "Duplicate");
}
