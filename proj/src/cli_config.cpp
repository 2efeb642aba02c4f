#include "pyfix/cli_config.hpp"

#include <set>

#include "json.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/util.hpp"

using nlohmann::json;

namespace pyfix {

namespace {

bool is_bare_key(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return s.front() != '.' && s.back() != '.';
}

std::string parse_quoted(const std::string& raw, int line) {
  if (raw.size() < 2 || raw.back() != '"')
    throw SchemaError(line, "unterminated string");
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 2 >= raw.size()) throw SchemaError(line, "dangling escape");
    char esc = raw[++i];
    switch (esc) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      default: throw SchemaError(line, std::string("unsupported escape \\") + esc);
    }
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::string section;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;

    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw SchemaError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(section)) throw SchemaError(line_no, "bad section name");
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string raw = trim(line.substr(eq + 1));
    if (!is_bare_key(key)) throw SchemaError(line_no, "bad key '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) throw SchemaError(line_no, "duplicate key '" + key + "'");

    Value v;
    v.line = line_no;
    if (!raw.empty() && raw.front() == '"') {
      v.kind = Value::Kind::String;
      v.str = parse_quoted(raw, line_no);
    } else if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::Bool;
      v.flag = raw == "true";
    } else if (!raw.empty() &&
               raw.find_first_not_of("0123456789-") == std::string::npos) {
      v.kind = Value::Kind::Int;
      try {
        v.integer = std::stoll(raw);
      } catch (const std::exception&) {
        throw SchemaError(line_no, "bad integer '" + raw + "'");
      }
    } else {
      throw SchemaError(line_no, "unparseable value '" + raw + "'");
    }
    cfg.raw_[key] = raw;
    cfg.values_[key] = std::move(v);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) { return parse(read_file(path)); }

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::String)
    throw SchemaError(it->second.line, "key '" + key + "' must be a string");
  return it->second.str;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Int)
    throw SchemaError(it->second.line, "key '" + key + "' must be an integer");
  return static_cast<int>(it->second.integer);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Bool)
    throw SchemaError(it->second.line, "key '" + key + "' must be true or false");
  return it->second.flag;
}

RunConfig run_config_from_text(const std::string& text) {
  ConfigFile file = ConfigFile::parse(text);
  static const std::set<std::string> kKnown = {
      "mode",          "fixtures_dir",       "script_path",
      "base_url",      "edit_model",         "completion_model",
      "api_key_env",   "parallelism",        "retry.max_attempts",
      "retry.backoff_ms", "syntax_oracle",   "interpreter_path.py2",
      "interpreter_path.py3",
  };
  for (const auto& [key, value] : file.raw())
    if (!kKnown.count(key)) throw SchemaError(0, "unknown config key '" + key + "'");

  RunConfig cfg;
  cfg.mode = file.get_string("mode", cfg.mode);
  cfg.fixtures_dir = file.get_string("fixtures_dir", cfg.fixtures_dir);
  cfg.script_path = file.get_string("script_path", cfg.script_path);
  cfg.base_url = file.get_string("base_url", cfg.base_url);
  cfg.edit_model = file.get_string("edit_model", cfg.edit_model);
  cfg.completion_model = file.get_string("completion_model", cfg.completion_model);
  cfg.api_key_env = file.get_string("api_key_env", cfg.api_key_env);
  cfg.parallelism = file.get_int("parallelism", cfg.parallelism);
  cfg.max_attempts = file.get_int("retry.max_attempts", cfg.max_attempts);
  cfg.backoff_ms = file.get_int("retry.backoff_ms", cfg.backoff_ms);
  cfg.syntax_oracle = file.get_string("syntax_oracle", cfg.syntax_oracle);
  cfg.py2_interpreter = file.get_string("interpreter_path.py2", cfg.py2_interpreter);
  cfg.py3_interpreter = file.get_string("interpreter_path.py3", cfg.py3_interpreter);

  if (cfg.mode != "live" && cfg.mode != "replay" && cfg.mode != "record" &&
      cfg.mode != "scripted")
    throw SchemaError(0, "mode must be live, replay, record or scripted");
  if (cfg.syntax_oracle != "embedded" && cfg.syntax_oracle != "interpreter")
    throw SchemaError(0, "syntax_oracle must be embedded or interpreter");
  if (cfg.parallelism < 1) throw SchemaError(0, "parallelism must be positive");
  return cfg;
}

RunConfig run_config_from_file(const std::string& path) {
  return run_config_from_text(read_file(path));
}

SyntaxChecker make_checker(const RunConfig& cfg) {
  if (cfg.syntax_oracle == "embedded") return SyntaxChecker();
  SyntaxOracleConfig oracle;
  oracle.backend = OracleBackend::Interpreter;
  oracle.py2_interpreter = cfg.py2_interpreter;
  oracle.py3_interpreter = cfg.py3_interpreter;
  return SyntaxChecker(oracle);
}

std::shared_ptr<LlmBackend> make_backend(const RunConfig& cfg) {
  auto http = [&cfg]() {
    if (cfg.base_url.empty())
      throw UsageError(cfg.mode + " mode needs base_url in the config");
    HttpBackendConfig http_cfg;
    http_cfg.base_url = cfg.base_url;
    http_cfg.edit_model = cfg.edit_model;
    http_cfg.completion_model = cfg.completion_model;
    http_cfg.api_key_env = cfg.api_key_env;
    http_cfg.parallelism = cfg.parallelism;
    http_cfg.max_attempts = cfg.max_attempts;
    http_cfg.backoff_ms = cfg.backoff_ms;
    return std::make_shared<HttpBackend>(http_cfg);
  };
  if (cfg.mode == "live") return http();
  if (cfg.mode == "record") return std::make_shared<ReplayBackend>(cfg.fixtures_dir, http());
  if (cfg.mode == "replay") return std::make_shared<ReplayBackend>(cfg.fixtures_dir);
  if (cfg.script_path.empty())
    throw UsageError("scripted mode needs script_path in the config");
  return std::make_shared<ScriptedBackend>(ScriptedBackend::read_script(cfg.script_path));
}

std::string calibration_choice_to_json(const CalibrationChoice& choice) {
  json out = {{"t3", choice.params.t3},
              {"n3", choice.params.n3},
              {"h3", choice.params.h3},
              {"achieved_precision", choice.point.precision.value_or(0.0)},
              {"achieved_coverage", choice.point.coverage}};
  return out.dump(2) + "\n";
}

ValidationParams validation_params_from_json(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw SchemaError(0, "parameter file is not a json object");
  ValidationParams params;
  try {
    params.t3 = parsed.at("t3").get<double>();
    params.n3 = parsed.at("n3").get<int>();
    params.h3 = parsed.at("h3").get<int>();
  } catch (const json::exception&) {
    throw SchemaError(0, "parameter file needs numeric t3, n3 and h3");
  }
  if (params.n3 < 1 || params.h3 < 1 || params.h3 > params.n3)
    throw SchemaError(0, "parameter file needs 1 <= h3 <= n3");
  return params;
}

std::string rule_choice_to_json(const RuleChoice& choice) {
  json out = {{"h_r", choice.h_r},
              {"achieved_precision", choice.precision.value_or(0.0)},
              {"achieved_coverage", choice.coverage}};
  return out.dump(2) + "\n";
}

std::vector<CalItem> load_cal_items(const std::string& path, const RatingStore& ratings) {
  std::vector<CalItem> items;
  std::string text = read_file(path);
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line =
        text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw SchemaError(line_no, "expected a json object");
    if (!j.contains("schema") || j["schema"] != 1)
      throw SchemaError(line_no, "unsupported schema");
    auto field = [&](const char* name) {
      if (!j.contains(name) || !j[name].is_string())
        throw SchemaError(line_no, std::string("missing string field '") + name + "'");
      return j[name].get<std::string>();
    };

    CalItem item;
    item.pb.id = field("id");
    item.pb.text = field("buggy");
    if (!j.contains("version") || !j["version"].is_number_integer())
      throw SchemaError(line_no, "missing version");
    item.pb.version = version_from_number(j["version"].get<int>());

    bool has_fixed = j.contains("fixed");
    bool has_x = j.contains("explanation");
    if (has_fixed != has_x)
      throw SchemaError(line_no, "fixed and explanation must appear together");
    if (has_fixed) {
      SourceProgram pf = item.pb;
      pf.text = field("fixed");
      item.pf = std::move(pf);
      item.x = field("explanation");
      std::string fp = feedback_fingerprint(item.pb.id, item.pf->text, *item.x,
                                            technique_name(TechniqueId::PyFiXV));
      std::optional<QualityRating> rating = ratings.lookup(fp);
      if (!rating)
        throw SchemaError(line_no, "no rating for the feedback on '" + item.pb.id + "'");
      item.rating = *rating;
    }
    items.push_back(std::move(item));
  }
  return items;
}

json run_record_to_json(const RunRecord& record) {
  json j;
  j["program_id"] = record.program_id;
  j["technique"] = technique_name(record.technique);
  j["provided"] = record.provided;
  j["fixed"] = record.fixed ? json(record.fixed->text) : json(nullptr);
  j["explanation"] = record.explanation ? json(*record.explanation) : json(nullptr);
  j["fix"] = {{"candidates_total", record.fix.candidates_total},
              {"candidates_valid", record.fix.candidates_valid},
              {"chosen_distance", record.fix.chosen_distance
                                      ? json(*record.fix.chosen_distance)
                                      : json(nullptr)},
              {"input_already_valid", record.fix.input_already_valid}};
  j["validation"] = record.validation
                        ? json{{"match_count", record.validation->match_count},
                               {"accepted", record.validation->accepted}}
                        : json(nullptr);
  j["explanation_words"] =
      record.explanation_words ? json(*record.explanation_words) : json(nullptr);
  j["fingerprint"] = record.fingerprint.empty() ? json(nullptr) : json(record.fingerprint);
  j["rating"] = record.rating ? json{{"fix_ok", record.rating->fix_ok},
                                     {"complete", record.rating->complete},
                                     {"correct", record.rating->correct},
                                     {"comprehensible", record.rating->comprehensible},
                                     {"overall", record.rating->overall}}
                              : json(nullptr);
  j["backend_failed"] = record.backend_failed;
  j["backend_error"] = record.backend_error ? json(*record.backend_error) : json(nullptr);
  j["round"] = record.round;
  return j;
}

namespace {

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

json metrics_report_to_json(const MetricsReport& metrics) {
  json rounds = json::array();
  for (const RoundMetrics& r : metrics.rounds)
    rounds.push_back({{"round", r.round},
                      {"n_total", r.n_total},
                      {"n_provided", r.n_provided},
                      {"n_good", r.n_good},
                      {"coverage", r.coverage},
                      {"precision", optional_number(r.precision)}});
  return json{{"n_total", metrics.n_total},
              {"n_provided", metrics.n_provided},
              {"n_good", metrics.n_good},
              {"coverage", metrics.coverage},
              {"precision", optional_number(metrics.precision)},
              {"rounds", rounds},
              {"coverage_mean", optional_number(metrics.coverage_mean)},
              {"coverage_stderr", optional_number(metrics.coverage_stderr)},
              {"precision_mean", optional_number(metrics.precision_mean)},
              {"precision_stderr", optional_number(metrics.precision_stderr)}};
}

std::string curve_to_csv(const std::vector<CurvePoint>& points) {
  std::string out = "P,precision,coverage\n";
  for (const CurvePoint& p : points) {
    out += format_double(p.target);
    out += ',';
    if (p.precision) out += format_double(*p.precision);
    out += ',';
    out += format_double(p.coverage);
    out += '\n';
  }
  return out;
}

}  // namespace pyfix
