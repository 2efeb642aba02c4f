#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pyfix/explanation_generation.hpp"
#include "pyfix/rating.hpp"
#include "pyfix/source_program.hpp"
#include "pyfix/syntax.hpp"

namespace pyfix {

// An admitted dataset entry. Admission requires the program to fail the
// syntax check and to stay within the token budget; both derived fields
// are recomputed on load, never trusted from disk.
struct DatasetRecord {
  SourceProgram program;
  std::string error_type;
  int token_count = 0;
};

enum class RejectReason { BadEncoding, Parses, TooLong, Duplicate };
const char* reject_reason_name(RejectReason reason);

struct Rejection {
  std::string id;
  RejectReason reason;
};

struct IngestReport {
  std::vector<DatasetRecord> admitted;  // ordered by id
  std::vector<Rejection> rejected;      // ordered by processing (id) order
};

struct IngestOptions {
  PyVersion version = PyVersion::Py3;  // default for records without one
  bool anonymize = false;
  int max_tokens = 500;
};

// Reads either a JSONL dataset file or a directory of source files (one
// program per file, file name as id), applies the admission filters and
// returns the surviving records plus a rejection report. Candidates are
// processed in id order; of two token-identical programs the smaller id
// survives. Re-ingesting a written dataset reproduces it exactly.
IngestReport ingest(const std::string& path, const IngestOptions& opts = {},
                    const SyntaxChecker& checker = default_syntax_checker());

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> load_dataset(const std::string& path,
                                        const SyntaxChecker& checker = default_syntax_checker());

void write_shots(const std::string& path, const std::vector<AnnotatedExample>& shots);
std::vector<AnnotatedExample> load_shots(const std::string& path,
                                         const SyntaxChecker& checker = default_syntax_checker());

// Key that ties a rating to one concrete piece of feedback: the buggy
// program's id, the exact fixed text, the exact explanation, and the
// technique that produced them.
std::string feedback_fingerprint(const std::string& pb_id, const std::string& pf_text,
                                 const std::string& explanation, const std::string& technique);

struct RatingRecord {
  std::string fingerprint;
  QualityRating rating;
  std::string rater;
  std::string ts;
};

// Rating collection with per-(fingerprint, rater) uniqueness. Lookup
// answers with the conjunction over raters: feedback counts as good only
// if every rater marked it good.
class RatingStore {
 public:
  void add(RatingRecord record);  // duplicate (fingerprint, rater) throws

  std::optional<QualityRating> lookup(const std::string& fingerprint) const;
  const std::vector<RatingRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

 private:
  std::vector<RatingRecord> records_;
  std::map<std::pair<std::string, std::string>, size_t> by_key_;
  std::map<std::string, QualityRating> effective_;
};

struct RatingsFile {
  RatingStore store;
  std::vector<std::string> warnings;  // stored overall disagreed with the attributes
};

void write_ratings(const std::string& path, const RatingStore& store);
RatingsFile load_ratings(const std::string& path);

}  // namespace pyfix
