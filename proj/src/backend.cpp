#include "pyfix/backend.hpp"

#include <filesystem>
#include <utility>

#include "json.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/util.hpp"

namespace pyfix {

namespace fs = std::filesystem;
using nlohmann::json;

int GenerationBatch::failed_slots() const {
  int k = 0;
  for (const auto& e : per_sample_error)
    if (e) ++k;
  return k;
}

// Fingerprints hash a canonical JSON rendering of the request fields only.
// json objects serialize with sorted keys, and temperatures go through the
// shortest round-trip text form, so equal requests always hash equally.
std::string request_fingerprint(const EditRequest& r) {
  json j;
  j["kind"] = "edit";
  j["input"] = r.input;
  j["instruction"] = r.instruction;
  j["temperature"] = format_double(r.temperature);
  j["n"] = r.n;
  return sha256_hex(j.dump());
}

std::string request_fingerprint(const CompletionRequest& r) {
  json j;
  j["kind"] = "complete";
  j["prompt"] = r.prompt;
  j["temperature"] = format_double(r.temperature);
  j["n"] = r.n;
  j["max_output_tokens"] = r.max_output_tokens;
  j["stop"] = r.stop_sequences;
  return sha256_hex(j.dump());
}

void apply_stop_sequences(GenerationBatch& batch, const std::vector<std::string>& stop) {
  for (std::string& out : batch.outputs) {
    size_t cut = std::string::npos;
    for (const std::string& s : stop) {
      if (s.empty()) continue;
      size_t pos = out.find(s);
      if (pos < cut) cut = pos;
    }
    if (cut != std::string::npos) out.resize(cut);
  }
}

// --- scripted -------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script)
    : script_(script.begin(), script.end()) {}

std::vector<ScriptEntry> ScriptedBackend::read_script(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(0, "script file " + path + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "script")
    throw SchemaError(0, "script file " + path + ": expected {\"schema\":\"script\", ...}");
  std::vector<ScriptEntry> entries;
  for (const json& je : j.value("entries", json::array())) {
    ScriptEntry e;
    std::string kind = je.value("kind", "");
    if (kind == "edit")
      e.kind = ScriptEntry::Kind::Edit;
    else if (kind == "complete")
      e.kind = ScriptEntry::Kind::Complete;
    else
      throw SchemaError(0, "script file " + path + ": entry kind must be edit|complete");
    if (!je.contains("outputs") || !je["outputs"].is_array())
      throw SchemaError(0, "script file " + path + ": entry missing outputs array");
    for (const json& o : je["outputs"]) e.outputs.push_back(o.get<std::string>());
    entries.push_back(std::move(e));
  }
  return entries;
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
  return ScriptedBackend(read_script(path));
}

size_t ScriptedBackend::entries_left() const {
  std::lock_guard<std::mutex> lock(mu_);
  return script_.size();
}

GenerationBatch ScriptedBackend::next(ScriptEntry::Kind kind, int n, const std::string& fingerprint,
                                      const std::vector<std::string>& stop) {
  std::lock_guard<std::mutex> lock(mu_);
  if (script_.empty()) throw FixtureMissing("scripted backend: script exhausted");
  if (script_.front().kind != kind)
    throw FixtureMissing("scripted backend: next entry is of the other kind");
  ScriptEntry entry = std::move(script_.front());
  script_.pop_front();

  GenerationBatch batch;
  batch.request_fingerprint = fingerprint;
  batch.per_sample_error.assign(static_cast<size_t>(n), std::nullopt);
  for (int i = 0; i < n; ++i) {
    if (i < static_cast<int>(entry.outputs.size()))
      batch.outputs.push_back(entry.outputs[static_cast<size_t>(i)]);
    else
      batch.per_sample_error[static_cast<size_t>(i)] = "script entry has no sample for this slot";
  }
  apply_stop_sequences(batch, stop);
  return batch;
}

GenerationBatch ScriptedBackend::edit_generate(const EditRequest& r) {
  return next(ScriptEntry::Kind::Edit, r.n, request_fingerprint(r), {});
}

GenerationBatch ScriptedBackend::complete_generate(const CompletionRequest& r) {
  return next(ScriptEntry::Kind::Complete, r.n, request_fingerprint(r), r.stop_sequences);
}

// --- replay ---------------------------------------------------------------

namespace {

json batch_to_json(const GenerationBatch& batch) {
  json j;
  j["schema"] = "fixture";
  j["version"] = 1;
  j["fingerprint"] = batch.request_fingerprint;
  j["outputs"] = batch.outputs;
  json errs = json::array();
  for (const auto& e : batch.per_sample_error)
    errs.push_back(e ? json(*e) : json(nullptr));
  j["errors"] = errs;
  return j;
}

GenerationBatch batch_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || j.value("schema", "") != "fixture")
    throw SchemaError(0, origin + ": expected {\"schema\":\"fixture\", ...}");
  GenerationBatch batch;
  batch.request_fingerprint = j.value("fingerprint", "");
  for (const json& o : j.value("outputs", json::array()))
    batch.outputs.push_back(o.get<std::string>());
  for (const json& e : j.value("errors", json::array())) {
    if (e.is_null())
      batch.per_sample_error.push_back(std::nullopt);
    else
      batch.per_sample_error.push_back(e.get<std::string>());
  }
  return batch;
}

std::string fixture_path(const std::string& dir, const std::string& fingerprint) {
  return (fs::path(dir) / (fingerprint + ".json")).string();
}

}  // namespace

void write_fixture(const std::string& fixtures_dir, const GenerationBatch& batch) {
  fs::create_directories(fixtures_dir);
  atomic_write_file(fixture_path(fixtures_dir, batch.request_fingerprint),
                    batch_to_json(batch).dump(2) + "\n");
}

std::optional<GenerationBatch> read_fixture(const std::string& fixtures_dir,
                                            const std::string& fingerprint) {
  std::string path = fixture_path(fixtures_dir, fingerprint);
  if (!fs::exists(path)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(0, "fixture " + path + ": " + e.what());
  }
  return batch_from_json(j, "fixture " + path);
}

ReplayBackend::ReplayBackend(std::string fixtures_dir, std::shared_ptr<LlmBackend> delegate)
    : dir_(std::move(fixtures_dir)), delegate_(std::move(delegate)) {}

std::optional<GenerationBatch> ReplayBackend::lookup(const std::string& fingerprint) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(fingerprint);
    if (it != cache_.end()) return it->second;
  }
  std::optional<GenerationBatch> batch = read_fixture(dir_, fingerprint);
  if (batch) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(fingerprint, *batch);
  }
  return batch;
}

void ReplayBackend::store(const GenerationBatch& batch) {
  write_fixture(dir_, batch);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(batch.request_fingerprint, batch);
}

template <typename Req>
GenerationBatch ReplayBackend::serve(const Req& r) {
  std::string fp = request_fingerprint(r);
  if (std::optional<GenerationBatch> hit = lookup(fp)) return *hit;
  if (!delegate_)
    throw FixtureMissing("no recorded response for request " + fp);
  GenerationBatch batch = [&] {
    if constexpr (std::is_same_v<Req, EditRequest>)
      return delegate_->edit_generate(r);
    else
      return delegate_->complete_generate(r);
  }();
  batch.request_fingerprint = fp;
  store(batch);
  return batch;
}

GenerationBatch ReplayBackend::edit_generate(const EditRequest& r) { return serve(r); }

GenerationBatch ReplayBackend::complete_generate(const CompletionRequest& r) { return serve(r); }

uint64_t ReplayBackend::http_requests_issued() const {
  return delegate_ ? delegate_->http_requests_issued() : 0;
}

}  // namespace pyfix
