#include "pyfix/datastore.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/lexer.hpp"
#include "pyfix/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pyfix {

namespace {

constexpr int kSchemaVersion = 1;

struct Line {
  int number;  // 1-based
  json value;
};

std::vector<Line> parse_jsonl(const std::string& path) {
  std::string text = read_file(path);
  std::vector<Line> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    ++number;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (trim(line).empty()) continue;
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object())
      throw SchemaError(number, "not a json object: " + path);
    lines.push_back({number, std::move(value)});
  }
  return lines;
}

std::string require_string(const Line& line, const char* key) {
  if (!line.value.contains(key) || !line.value[key].is_string())
    throw SchemaError(line.number, std::string("missing string field '") + key + "'");
  return line.value[key].get<std::string>();
}

void require_schema(const Line& line) {
  if (!line.value.contains("schema") || !line.value["schema"].is_number_integer() ||
      line.value["schema"].get<int>() != kSchemaVersion)
    throw SchemaError(line.number, "unsupported schema version");
}

PyVersion version_field(const Line& line, PyVersion fallback) {
  if (!line.value.contains("version")) return fallback;
  const json& v = line.value["version"];
  if (v.is_number_integer()) {
    if (v.get<int>() == 2) return PyVersion::Py2;
    if (v.get<int>() == 3) return PyVersion::Py3;
  }
  throw SchemaError(line.number, "version must be 2 or 3");
}

bool require_flag(const Line& line, const char* key) {
  if (line.value.contains(key)) {
    const json& v = line.value[key];
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1))
      return v.get<int>() == 1;
  }
  throw SchemaError(line.number, std::string("field '") + key + "' must be a 0/1 flag");
}

// Identity of a program modulo whitespace: the exact token value sequence.
std::string dedup_key(const SourceProgram& p) {
  json values = json::array();
  for (const std::string& v : tokenize(p).values()) values.push_back(v);
  return values.dump();
}

struct Candidate {
  SourceProgram program;
  int line = 0;  // jsonl origin, 0 for directory files
};

std::vector<Candidate> read_candidates(const std::string& path, const IngestOptions& opts) {
  std::vector<Candidate> out;
  if (fs::is_directory(path)) {
    for (const fs::directory_entry& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      Candidate c;
      c.program.id = entry.path().filename().string();
      c.program.text = read_file(entry.path().string());
      c.program.version = opts.version;
      out.push_back(std::move(c));
    }
  } else {
    std::set<std::string> seen_ids;
    for (const Line& line : parse_jsonl(path)) {
      Candidate c;
      c.program.id = require_string(line, "id");
      c.program.text = require_string(line, "source");
      c.program.version = version_field(line, opts.version);
      c.line = line.number;
      if (!seen_ids.insert(c.program.id).second)
        throw SchemaError(line.number, "duplicate id '" + c.program.id + "'");
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.program.id < b.program.id; });
  return out;
}

}  // namespace

const char* reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::BadEncoding: return "BadEncoding";
    case RejectReason::Parses: return "Parses";
    case RejectReason::TooLong: return "TooLong";
    case RejectReason::Duplicate: return "Duplicate";
  }
  return "?";
}

IngestReport ingest(const std::string& path, const IngestOptions& opts,
                    const SyntaxChecker& checker) {
  IngestReport report;
  std::set<std::string> seen_tokens;
  for (Candidate& c : read_candidates(path, opts)) {
    if (!is_valid_utf8(c.program.text)) {
      report.rejected.push_back({c.program.id, RejectReason::BadEncoding});
      continue;
    }
    SourceProgram p = opts.anonymize ? anonymize_string_literals(c.program) : c.program;
    SyntaxCheckResult check = checker.check(p);
    if (check.ok) {
      report.rejected.push_back({p.id, RejectReason::Parses});
      continue;
    }
    int token_count = static_cast<int>(tokenize(p).size());
    if (token_count > opts.max_tokens) {
      report.rejected.push_back({p.id, RejectReason::TooLong});
      continue;
    }
    if (!seen_tokens.insert(dedup_key(p)).second) {
      report.rejected.push_back({p.id, RejectReason::Duplicate});
      continue;
    }
    DatasetRecord record;
    record.program = std::move(p);
    record.error_type = check.error_type.value_or("Other");
    record.token_count = token_count;
    report.admitted.push_back(std::move(record));
  }
  return report;
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const DatasetRecord& r : records) {
    json line = {{"schema", kSchemaVersion},
                 {"id", r.program.id},
                 {"source", r.program.text},
                 {"version", version_number(r.program.version)}};
    out += line.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<DatasetRecord> load_dataset(const std::string& path, const SyntaxChecker& checker) {
  std::vector<DatasetRecord> records;
  std::set<std::string> seen_ids;
  std::set<std::string> seen_tokens;
  for (const Line& line : parse_jsonl(path)) {
    require_schema(line);
    DatasetRecord r;
    r.program.id = require_string(line, "id");
    r.program.text = require_string(line, "source");
    r.program.version = version_field(line, PyVersion::Py3);
    if (!line.value.contains("version")) throw SchemaError(line.number, "missing version");
    if (!seen_ids.insert(r.program.id).second)
      throw SchemaError(line.number, "duplicate id '" + r.program.id + "'");
    if (!is_valid_utf8(r.program.text)) throw SchemaError(line.number, "source is not utf-8");
    SyntaxCheckResult check = checker.check(r.program);
    if (check.ok) throw SchemaError(line.number, "program parses cleanly");
    r.error_type = check.error_type.value_or("Other");
    r.token_count = static_cast<int>(tokenize(r.program).size());
    if (r.token_count > 500) throw SchemaError(line.number, "program exceeds the token bound");
    if (!seen_tokens.insert(dedup_key(r.program)).second)
      throw SchemaError(line.number, "token-identical duplicate");
    records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(), [](const DatasetRecord& a, const DatasetRecord& b) {
    return a.program.id < b.program.id;
  });
  return records;
}

void write_shots(const std::string& path, const std::vector<AnnotatedExample>& shots) {
  std::string out;
  for (const AnnotatedExample& s : shots) {
    json line = {{"schema", kSchemaVersion},
                 {"id", s.buggy.id},
                 {"buggy", s.buggy.text},
                 {"fixed", s.fixed.text},
                 {"explanation", s.explanation},
                 {"version", version_number(s.buggy.version)}};
    out += line.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<AnnotatedExample> load_shots(const std::string& path, const SyntaxChecker& checker) {
  std::vector<AnnotatedExample> shots;
  for (const Line& line : parse_jsonl(path)) {
    require_schema(line);
    SourceProgram buggy;
    buggy.id = require_string(line, "id");
    buggy.text = require_string(line, "buggy");
    buggy.version = version_field(line, PyVersion::Py3);
    if (!line.value.contains("version")) throw SchemaError(line.number, "missing version");
    SourceProgram fixed = buggy;
    fixed.text = require_string(line, "fixed");
    shots.push_back(annotate_example(std::move(buggy), std::move(fixed),
                                     require_string(line, "explanation"), checker));
  }
  return shots;
}

std::string feedback_fingerprint(const std::string& pb_id, const std::string& pf_text,
                                 const std::string& explanation, const std::string& technique) {
  json key = json::array({pb_id, pf_text, explanation, technique});
  return sha256_hex(key.dump());
}

void RatingStore::add(RatingRecord record) {
  auto key = std::make_pair(record.fingerprint, record.rater);
  if (by_key_.count(key))
    throw SchemaError(0, "duplicate rating for fingerprint " + record.fingerprint + " by rater '" +
                             record.rater + "'");
  record.rating.overall = computed_overall(record.rating);
  by_key_[key] = records_.size();
  auto it = effective_.find(record.fingerprint);
  if (it == effective_.end()) {
    effective_[record.fingerprint] = record.rating;
  } else {
    // Conjunction across raters: one dissent makes the feedback bad.
    QualityRating& r = it->second;
    r.fix_ok = r.fix_ok && record.rating.fix_ok;
    r.complete = r.complete && record.rating.complete;
    r.correct = r.correct && record.rating.correct;
    r.comprehensible = r.comprehensible && record.rating.comprehensible;
    r.overall = computed_overall(r);
  }
  records_.push_back(std::move(record));
}

std::optional<QualityRating> RatingStore::lookup(const std::string& fingerprint) const {
  auto it = effective_.find(fingerprint);
  if (it == effective_.end()) return std::nullopt;
  return it->second;
}

void write_ratings(const std::string& path, const RatingStore& store) {
  std::string out;
  for (const RatingRecord& r : store.records()) {
    json line = {{"schema", kSchemaVersion},
                 {"fingerprint", r.fingerprint},
                 {"fix_ok", r.rating.fix_ok},
                 {"complete", r.rating.complete},
                 {"correct", r.rating.correct},
                 {"comprehensible", r.rating.comprehensible},
                 {"rater", r.rater},
                 {"ts", r.ts}};
    out += line.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

RatingsFile load_ratings(const std::string& path) {
  RatingsFile out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Line& line : parse_jsonl(path)) {
    require_schema(line);
    RatingRecord r;
    r.fingerprint = require_string(line, "fingerprint");
    r.rater = require_string(line, "rater");
    r.ts = require_string(line, "ts");
    r.rating = make_rating(require_flag(line, "fix_ok"), require_flag(line, "complete"),
                           require_flag(line, "correct"), require_flag(line, "comprehensible"));
    if (line.value.contains("overall") && require_flag(line, "overall") != r.rating.overall)
      out.warnings.push_back("line " + std::to_string(line.number) +
                             ": stored overall disagrees with the attributes; recomputed");
    if (!seen.insert({r.fingerprint, r.rater}).second)
      throw SchemaError(line.number, "duplicate rating for fingerprint " + r.fingerprint +
                                         " by rater '" + r.rater + "'");
    out.store.add(std::move(r));
  }
  return out;
}

}  // namespace pyfix
