#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pyfix/backend.hpp"
#include "pyfix/calibration.hpp"
#include "pyfix/harness.hpp"
#include "pyfix/syntax.hpp"
#include "pyfix/validation.hpp"

namespace pyfix {

// Flat typed key/value view of a config file. Keys are dotted paths;
// `[section]` headers prefix the keys that follow them.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  const std::map<std::string, std::string>& raw() const { return raw_; }

 private:
  struct Value {
    enum class Kind { String, Int, Bool } kind;
    std::string str;
    long long integer = 0;
    bool flag = false;
    int line = 0;
  };
  std::map<std::string, Value> values_;
  std::map<std::string, std::string> raw_;
};

// Everything the command line needs to wire a run: oracle choice, backend
// mode and transport settings. Every field has a workable offline default.
struct RunConfig {
  std::string mode = "replay";  // live | replay | record | scripted
  std::string fixtures_dir = "fixtures";
  std::string script_path;

  std::string base_url;
  std::string edit_model;
  std::string completion_model;
  std::string api_key_env = "LLM_API_KEY";
  int parallelism = 1;
  int max_attempts = 3;
  int backoff_ms = 250;

  std::string syntax_oracle = "embedded";  // embedded | interpreter
  std::string py2_interpreter;
  std::string py3_interpreter;
};

// Reads a config file into a RunConfig. Unknown keys, wrong value types
// and unsupported mode/oracle names are schema errors.
RunConfig run_config_from_file(const std::string& path);
RunConfig run_config_from_text(const std::string& text);

SyntaxChecker make_checker(const RunConfig& cfg);

// Builds the backend for the configured mode. Replay and record modes
// need fixtures_dir; scripted needs script_path; live and record need
// base_url.
std::shared_ptr<LlmBackend> make_backend(const RunConfig& cfg);

// The calibrated-parameter file: {t3, n3, h3, achieved_precision,
// achieved_coverage}.
std::string calibration_choice_to_json(const CalibrationChoice& choice);
ValidationParams validation_params_from_json(const std::string& text);

// The rule-threshold counterpart: {h_r, achieved_precision, achieved_coverage}.
std::string rule_choice_to_json(const RuleChoice& choice);

// Calibration-set file: one json object per line, shaped like a shots record
// but with `fixed` and `explanation` optional so items where the pipeline
// produced nothing still count toward coverage. Feedback ratings are looked
// up by fingerprint under the validated-pipeline technique name; a
// feedback-bearing item without a rating is a schema error.
std::vector<CalItem> load_cal_items(const std::string& path, const RatingStore& ratings);

// Run artifacts. Validation samples stay in memory only; the record keeps
// match_count and the accept bit.
nlohmann::json run_record_to_json(const RunRecord& record);
nlohmann::json metrics_report_to_json(const MetricsReport& metrics);

// "P,precision,coverage" rows; an unachievable precision leaves the cell
// empty.
std::string curve_to_csv(const std::vector<CurvePoint>& points);

}  // namespace pyfix
